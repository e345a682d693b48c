//! Exact T-count by nested meet-in-the-middle over coset databases, plus a
//! layered brute-force oracle.

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::channel::{dense_channel_mul, ChannelMatrix};
use crate::coset::{coset_label, witness_inv_mult, CosetLabel, DatabaseSet};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::rp::{all_rp, rp_compact, rp_inv_mult};

pub const DEFAULT_MEM_CAP: usize = 4 << 30;

#[derive(Clone, Debug)]
pub struct ProvableConfig {
    /// Largest T-count the search decides.
    pub m: usize,
    /// Space/time trade-off; databases go up to `⌈m/c⌉`.
    pub c: usize,
    pub mem_cap: usize,
    pub db_dir: Option<PathBuf>,
}

impl ProvableConfig {
    pub fn new(m: usize, c: usize) -> Result<Self> {
        let cfg = ProvableConfig {
            m,
            c,
            mem_cap: DEFAULT_MEM_CAP,
            db_dir: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::Invalid(format!(
                "c must be at least 2, got {}",
                self.c
            )));
        }
        if self.m < 1 {
            return Err(Error::Invalid("m must be at least 1".into()));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.m.div_ceil(self.c)
    }
}

/// A configured decision procedure with its databases loaded.
pub struct ProvableSearch {
    cfg: ProvableConfig,
    dbs: DatabaseSet,
}

impl ProvableSearch {
    pub fn new(n: usize, cfg: ProvableConfig) -> Result<Self> {
        cfg.validate()?;
        let dbs = DatabaseSet::load_or_build(n, cfg.depth(), cfg.mem_cap, cfg.db_dir.as_deref())?;
        Ok(ProvableSearch { cfg, dbs })
    }

    pub fn config(&self) -> &ProvableConfig {
        &self.cfg
    }

    pub fn databases(&self) -> &DatabaseSet {
        &self.dbs
    }

    /// `Some(𝒯(U))` if `𝒯(U) ≤ m`, else `None`.
    pub fn decide(&self, u: &ChannelMatrix) -> Result<Option<usize>> {
        self.check_width(u)?;
        self.decide_bounded(u, self.cfg.m)
    }

    fn check_width(&self, u: &ChannelMatrix) -> Result<()> {
        if u.n() != self.dbs.n() {
            return Err(Error::DimensionMismatch {
                expected: self.dbs.n(),
                found: u.n(),
            });
        }
        Ok(())
    }

    /// Exact `𝒯(U)` when it is at most `bound`.
    ///
    /// Stage `j` covers `𝒯(U) ∈ (jd, B]` with `B = min((j+1)d, bound)` and
    /// `r = B − jd`: every such `U` splits as `W·V` with `W` in `D_r` (up to
    /// a right Clifford) and `𝒯(V) ≤ jd`. Any witness whose `W⁻¹U` decides
    /// gives an upper bound `r + 𝒯(V)`, so the stage returns the minimum over
    /// witnesses rather than the first hit.
    fn decide_bounded(&self, u: &ChannelMatrix, bound: usize) -> Result<Option<usize>> {
        let d = self.cfg.depth();
        let label = coset_label(u);
        if let Some((k, _)) = self.dbs.find(&label, d.min(bound)) {
            return Ok(Some(k));
        }
        let mut j = 1;
        while j * d < bound {
            let top = ((j + 1) * d).min(bound);
            let r = top - j * d;
            let floor = (j * d + 1).saturating_sub(r);
            let db = self.dbs.level(r);
            let best = AtomicUsize::new(usize::MAX);
            (0..db.len())
                .into_par_iter()
                .try_for_each(|i| -> Result<()> {
                    if best.load(Ordering::Relaxed) == floor {
                        return Ok(());
                    }
                    let v = witness_inv_mult(db.witness(i), u)?;
                    if let Some(t) = self.decide_bounded(&v, j * d)? {
                        best.fetch_min(t, Ordering::Relaxed);
                    }
                    Ok(())
                })?;
            let best = best.into_inner();
            if best != usize::MAX {
                return Ok(Some(best + r));
            }
            j += 1;
        }
        Ok(None)
    }

    /// Peels one `R(P)` at a time: `P` is accepted when
    /// `𝒯(R(P)⁻¹U) = t − 1`.
    pub fn decompose(&self, u: &ChannelMatrix, t: usize) -> Result<Decomposition> {
        self.check_width(u)?;
        let rps = all_rp(u.n());
        let mut paulis = Vec::with_capacity(t);
        let mut cur = u.clone();
        for left in (1..=t).rev() {
            let next = rps
                .par_iter()
                .map(|rp| -> Result<Option<(Pauli, ChannelMatrix)>> {
                    let v = rp_inv_mult(rp, &cur)?;
                    Ok((self.decide_bounded(&v, left - 1)? == Some(left - 1))
                        .then(|| (rp.pauli(), v)))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .next()
                .ok_or_else(|| {
                    Error::Internal(format!("no peeling Pauli found with {left} T gates left"))
                })?;
            paulis.push(next.0);
            cur = next.1;
        }
        if !cur.is_clifford() {
            return Err(Error::Internal("peeled remainder is not Clifford".into()));
        }
        let d = Decomposition::new(paulis, cur);
        d.verify(u)?;
        Ok(d)
    }
}

/// One-shot decision: builds the databases and runs the search.
pub fn count_t_decide(u: &ChannelMatrix, cfg: &ProvableConfig) -> Result<Option<usize>> {
    ProvableSearch::new(u.n(), cfg.clone())?.decide(u)
}

pub fn decomposition_from_decision(
    u: &ChannelMatrix,
    t: usize,
    cfg: &ProvableConfig,
) -> Result<Decomposition> {
    ProvableSearch::new(u.n(), cfg.clone())?.decompose(u, t)
}

/// Exact T-count by breadth-first enumeration of cosets, using dense
/// multiplication and a hash set of labels. Independent of the databases.
pub fn tcount_bruteforce(
    u: &ChannelMatrix,
    mmax: usize,
    frontier_cap: usize,
) -> Result<Option<usize>> {
    let n = u.n();
    let target = coset_label(u);
    let gens: Vec<ChannelMatrix> = Pauli::non_identity(n)
        .map(|p| rp_compact(p).map(|a| a.expand()))
        .collect::<Result<_>>()?;
    let id = ChannelMatrix::identity(n);
    let mut seen: HashSet<CosetLabel> = HashSet::new();
    seen.insert(coset_label(&id));
    if seen.contains(&target) {
        return Ok(Some(0));
    }
    let mut layer = vec![id];
    for k in 1..=mmax {
        let mut next = Vec::new();
        for m in &layer {
            for g in &gens {
                let w = dense_channel_mul(g, m)?;
                let label = coset_label(&w);
                if seen.insert(label.clone()) {
                    if label == target {
                        return Ok(Some(k));
                    }
                    next.push(w);
                    if next.len() > frontier_cap {
                        return Err(Error::FrontierOverflow {
                            cap: frontier_cap,
                            size: next.len(),
                        });
                    }
                }
            }
        }
        layer = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of_unitary;
    use crate::circuit::{Circuit, Gate};

    fn ch(n: usize, gates: &[Gate]) -> ChannelMatrix {
        channel_of_unitary(
            &Circuit::from_gates(n, gates.iter().copied())
                .unwrap()
                .unitary(),
        )
        .unwrap()
    }

    #[test]
    fn config_rules() {
        assert!(ProvableConfig::new(3, 1).is_err());
        assert!(ProvableConfig::new(0, 2).is_err());
        assert_eq!(ProvableConfig::new(7, 2).unwrap().depth(), 4);
        assert_eq!(ProvableConfig::new(1, 3).unwrap().depth(), 1);
    }

    #[test]
    fn small_single_qubit_cases() {
        use Gate::*;
        let clifford = ch(1, &[H(1), S(1)]);
        assert_eq!(
            count_t_decide(&clifford, &ProvableConfig::new(2, 2).unwrap()).unwrap(),
            Some(0)
        );
        let t = ch(1, &[T(1)]);
        assert_eq!(
            count_t_decide(&t, &ProvableConfig::new(2, 2).unwrap()).unwrap(),
            Some(1)
        );
        let tht = ch(1, &[T(1), H(1), T(1), H(1), T(1)]);
        assert_eq!(
            count_t_decide(&tht, &ProvableConfig::new(3, 3).unwrap()).unwrap(),
            Some(3)
        );
        assert_eq!(
            count_t_decide(&tht, &ProvableConfig::new(2, 2).unwrap()).unwrap(),
            None
        );
        assert_eq!(tcount_bruteforce(&tht, 5, 1 << 16).unwrap(), Some(3));
    }

    #[test]
    fn decomposition_of_t() {
        let t = ch(1, &[Gate::T(1)]);
        let d = decomposition_from_decision(&t, 1, &ProvableConfig::new(2, 2).unwrap()).unwrap();
        assert_eq!(d.paulis, vec!["Z".parse::<Pauli>().unwrap()]);
        let id = ChannelMatrix::identity(1);
        let d0 = decomposition_from_decision(&id, 0, &ProvableConfig::new(2, 2).unwrap()).unwrap();
        assert!(d0.paulis.is_empty());
        assert_eq!(d0.clifford, id);
    }

    #[test]
    fn controlled_s_regression() {
        // Controlled-S = T_1 T_2 · CNOT · T†_2 · CNOT.
        use Gate::*;
        let cs = ch(2, &[T(1), T(2), Cnot(1, 2), Tdg(2), Cnot(1, 2)]);
        assert_eq!(tcount_bruteforce(&cs, 4, 1 << 20).unwrap(), Some(3));
        assert_eq!(
            count_t_decide(&cs, &ProvableConfig::new(4, 2).unwrap()).unwrap(),
            Some(3)
        );
    }
}
