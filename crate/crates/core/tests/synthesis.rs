use tcount::channel::channel_of_unitary;
use tcount::circuit::{emit_circuit, fixtures};
use tcount::heuristic::{method_names, min_t_synth, subroutine_a};
use tcount::provable::{tcount_bruteforce, ProvableSearch};
use tcount::{ChannelMatrix, Circuit, Decomposition, Error, HeuristicConfig, ProvableConfig};

fn channel(c: &Circuit) -> ChannelMatrix {
    channel_of_unitary(&c.unitary()).unwrap()
}

#[test]
fn emitted_circuit_rebuilds_target() {
    for seed in 0..12 {
        let c = fixtures::random_circuit(2, 2 + seed as usize % 5, seed).unwrap();
        let u = channel(&c);
        let d = min_t_synth(&u, &HeuristicConfig::default())
            .unwrap()
            .decomposition;
        let frag = emit_circuit(&d).unwrap();
        assert_eq!(frag.t_count(), d.tcount());
        assert!(d.tcount() <= c.t_count());
        assert_eq!(channel(&frag).mul(&d.clifford).unwrap(), u, "seed {seed}");
    }
}

#[test]
fn decomposition_json_round_trip() {
    let u = channel(&fixtures::random_circuit(2, 4, 3).unwrap());
    let d = min_t_synth(&u, &HeuristicConfig::default())
        .unwrap()
        .decomposition;
    let text = serde_json::to_string(&d).unwrap();
    assert!(text.contains("clifford_channel"));
    let back: Decomposition = serde_json::from_str(&text).unwrap();
    assert_eq!(back, d);
    back.verify(&u).unwrap();
}

#[test]
fn every_method_agrees_with_bruteforce() {
    for name in method_names() {
        let cfg = HeuristicConfig::with_method(name).unwrap();
        for seed in 0..8 {
            let u = channel(&fixtures::random_circuit(2, seed as usize % 4, 100 + seed).unwrap());
            let want = tcount_bruteforce(&u, 3, 1 << 20).unwrap();
            let got = min_t_synth(&u, &cfg).unwrap();
            got.decomposition.verify(&u).unwrap();
            assert_eq!(Some(got.decomposition.tcount()), want, "{name} seed {seed}");
        }
    }
}

#[test]
fn methods_find_toffoli() {
    let u = channel(&fixtures::toffoli());
    for name in ["A", "C"] {
        let r = min_t_synth(&u, &HeuristicConfig::with_method(name).unwrap()).unwrap();
        assert_eq!(r.decomposition.tcount(), 7, "{name}");
        assert!(r.telemetry.max_frontier < 4096);
    }
}

#[test]
fn iterative_deepening_stops_at_first_success() {
    let u = channel(&fixtures::peres());
    let r = min_t_synth(&u, &HeuristicConfig::default()).unwrap();
    let attempts = &r.telemetry.attempts;
    assert_eq!(attempts.last().unwrap().outcome, "found");
    assert_eq!(attempts.last().unwrap().m, 7);
    assert!(attempts.windows(2).all(|w| w[1].m == w[0].m + 1));
    assert!(attempts[..attempts.len() - 1]
        .iter()
        .all(|a| a.outcome != "found"));
}

#[test]
fn subroutine_below_tcount_fails() {
    let u = channel(&fixtures::toffoli());
    let cfg = HeuristicConfig::default();
    assert!(subroutine_a(&u, 6, &cfg).unwrap().is_none());
    assert_eq!(subroutine_a(&u, 7, &cfg).unwrap().unwrap().tcount(), 7);
}

#[test]
fn small_cap_is_inconclusive() {
    let u = channel(&fixtures::toffoli());
    let cfg = HeuristicConfig {
        m_cap: Some(5),
        ..Default::default()
    };
    match min_t_synth(&u, &cfg) {
        Err(Error::Inconclusive { m_cap, .. }) => assert_eq!(m_cap, 5),
        other => panic!("expected inconclusive, got {other:?}"),
    }
}

#[test]
fn provable_decomposition_verifies() {
    let search = ProvableSearch::new(2, ProvableConfig::new(4, 2).unwrap()).unwrap();
    for seed in 0..6 {
        let u = channel(&fixtures::random_circuit(2, 3, 200 + seed).unwrap());
        let t = search.decide(&u).unwrap().unwrap();
        let d = search.decompose(&u, t).unwrap();
        assert_eq!(d.tcount(), t);
        d.verify(&u).unwrap();
    }
}

#[test]
fn clifford_fixture_is_free() {
    let u = channel(&fixtures::clifford3());
    assert!(u.is_clifford());
    let r = min_t_synth(&u, &HeuristicConfig::default()).unwrap();
    assert_eq!(r.decomposition.tcount(), 0);
}

/// Needs `|D_3|` at n=3, about 13 GB of labels; run on a large machine.
#[test]
#[ignore]
fn toffoli_provable_seven() {
    let u = channel(&fixtures::toffoli());
    let mut cfg = ProvableConfig::new(7, 2).unwrap();
    cfg.mem_cap = usize::MAX;
    let search = ProvableSearch::new(3, cfg).unwrap();
    assert_eq!(search.decide(&u).unwrap(), Some(7));
}
