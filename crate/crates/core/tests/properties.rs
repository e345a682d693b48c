use proptest::prelude::*;
use tcount::channel::{channel_of_unitary, dense_channel_mul};
use tcount::circuit::fixtures;
use tcount::coset::coset_label;
use tcount::pauli::pauli_mul;
use tcount::ring::ring_compare;
use tcount::rp::{all_rp, rp_mult};
use tcount::{Circuit, Pauli, RealElt};

fn real() -> impl Strategy<Value = RealElt> {
    (-5000i64..5000, -5000i64..5000, 0u32..12).prop_map(|(a, b, k)| RealElt::new(a, b, k))
}

proptest! {
    #[test]
    fn ring_laws(x in real(), y in real(), z in real()) {
        prop_assert_eq!(x + y, y + x);
        prop_assert_eq!(x * y, y * x);
        prop_assert_eq!((x + y) + z, x + (y + z));
        prop_assert_eq!(x * (y + z), x * y + x * z);
        prop_assert_eq!(x - x, RealElt::ZERO);
        prop_assert!(((x * y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-6 * (1.0 + (x.to_f64() * y.to_f64()).abs()));
    }

    #[test]
    fn order_matches_value(x in real(), y in real()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(ring_compare(x, y), fx.partial_cmp(&fy).unwrap());
        }
    }

    #[test]
    fn pauli_product_commutation(n in 1usize..=4, a in 1usize..256, b in 1usize..256) {
        let p = Pauli::new(n, a % (1 << (2 * n))).unwrap();
        let q = Pauli::new(n, b % (1 << (2 * n))).unwrap();
        let (s, pq) = pauli_mul(p, q).unwrap();
        let (t, qp) = pauli_mul(q, p).unwrap();
        prop_assert_eq!(pq, qp);
        let same = s == t;
        prop_assert_eq!(same, p.commutes_with(&q));
    }

    #[test]
    fn channel_is_multiplicative(n in 1usize..=2, g in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = fixtures::random_circuit(n, g, s1).unwrap();
        let b = fixtures::random_circuit(n, g, s2).unwrap();
        let mut ab = a.clone();
        ab.extend(&b).unwrap();
        let ca = channel_of_unitary(&a.unitary()).unwrap();
        let cb = channel_of_unitary(&b.unitary()).unwrap();
        let cab = channel_of_unitary(&ab.unitary()).unwrap();
        // Gates act in order, so the later circuit multiplies on the left.
        prop_assert_eq!(cab, dense_channel_mul(&cb, &ca).unwrap());
    }

    #[test]
    fn label_ignores_right_clifford(n in 1usize..=2, s in any::<u64>(), len in 0usize..20) {
        let w = channel_of_unitary(&fixtures::random_circuit(n, 3, s).unwrap().unitary()).unwrap();
        let c = channel_of_unitary(&fixtures::random_clifford(n, len, s ^ 1).unwrap().unitary()).unwrap();
        prop_assert_eq!(coset_label(&w), coset_label(&w.mul(&c).unwrap()));
    }

    #[test]
    fn text_round_trip(n in 1usize..=3, g in 0usize..6, s in any::<u64>()) {
        let c = fixtures::random_circuit(n, g, s).unwrap();
        prop_assert_eq!(Circuit::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn kernel_matches_dense(n in 1usize..=3, i in any::<usize>(), s in any::<u64>()) {
        let v = channel_of_unitary(&fixtures::random_circuit(n, 2, s).unwrap().unitary()).unwrap();
        let rps = all_rp(n);
        let a = &rps[i % rps.len()];
        prop_assert_eq!(rp_mult(a, &v).unwrap(), dense_channel_mul(&a.expand(), &v).unwrap());
    }
}
