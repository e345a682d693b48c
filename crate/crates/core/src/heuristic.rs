//! Iterative-deepening search over `⟨R(P)⟩⁻¹` products, pruned level by
//! level by the change in sde and Hamming weight.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelMatrix;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::rp::{all_rp, rp_inv_mult, RowStats, RpCompact};

pub const DEFAULT_FRONTIER_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Change {
    Decrease,
    Same,
    Increase,
}

impl Change {
    fn of<T: Ord>(before: T, after: T) -> Change {
        match after.cmp(&before) {
            std::cmp::Ordering::Less => Change::Decrease,
            std::cmp::Ordering::Equal => Change::Same,
            std::cmp::Ordering::Greater => Change::Increase,
        }
    }
}

/// How a child differs from its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Delta {
    pub sde: Change,
    pub hw: Change,
}

/// A divide-and-select rule: partitions the admissible children by their
/// deltas and returns the indices it keeps.
pub trait DivideSelect: Send + Sync {
    fn name(&self) -> &'static str;
    fn select(&self, deltas: &[Delta]) -> Vec<usize>;
}

/// Smallest nonempty set, earlier sets winning ties.
fn smallest(sets: Vec<Vec<usize>>) -> Vec<usize> {
    sets.into_iter()
        .filter(|s| !s.is_empty())
        .fold(None::<Vec<usize>>, |best, s| match best {
            Some(b) if b.len() <= s.len() => Some(b),
            _ => Some(s),
        })
        .unwrap_or_default()
}

fn with_unchanged_sde(mut chosen: Vec<usize>, deltas: &[Delta]) -> Vec<usize> {
    chosen.extend((0..deltas.len()).filter(|&i| deltas[i].sde == Change::Same));
    chosen.sort_unstable();
    chosen
}

/// Two sets by sde direction; unchanged-sde nodes are added after selection.
pub struct MethodA;

impl DivideSelect for MethodA {
    fn name(&self) -> &'static str {
        "A"
    }

    fn select(&self, deltas: &[Delta]) -> Vec<usize> {
        let by = |c: Change| (0..deltas.len()).filter(|&i| deltas[i].sde == c).collect();
        let chosen = smallest(vec![by(Change::Decrease), by(Change::Increase)]);
        with_unchanged_sde(chosen, deltas)
    }
}

/// Four sets by sde and Hamming-weight direction. An unchanged Hamming
/// weight counts as both directions; unchanged-sde nodes are added after
/// selection.
pub struct MethodB;

impl DivideSelect for MethodB {
    fn name(&self) -> &'static str {
        "B"
    }

    fn select(&self, deltas: &[Delta]) -> Vec<usize> {
        let set = |sde: Change, hw: Change| -> Vec<usize> {
            (0..deltas.len())
                .filter(|&i| {
                    deltas[i].sde == sde && (deltas[i].hw == hw || deltas[i].hw == Change::Same)
                })
                .collect()
        };
        use Change::*;
        let chosen = smallest(vec![
            set(Decrease, Decrease),
            set(Decrease, Increase),
            set(Increase, Decrease),
            set(Increase, Increase),
        ]);
        with_unchanged_sde(chosen, deltas)
    }
}

/// Nine sets, one per (sde, Hamming weight) direction pair.
pub struct MethodC;

impl DivideSelect for MethodC {
    fn name(&self) -> &'static str {
        "C"
    }

    fn select(&self, deltas: &[Delta]) -> Vec<usize> {
        use Change::*;
        let order = [Decrease, Same, Increase];
        let mut sets = Vec::with_capacity(9);
        for sde in order {
            for hw in order {
                let d = Delta { sde, hw };
                sets.push((0..deltas.len()).filter(|&i| deltas[i] == d).collect());
            }
        }
        smallest(sets)
    }
}

type MethodCtor = fn() -> Arc<dyn DivideSelect>;

const METHODS: &[(&str, MethodCtor)] = &[
    ("A", || Arc::new(MethodA)),
    ("B", || Arc::new(MethodB)),
    ("C", || Arc::new(MethodC)),
];

pub fn method_names() -> Vec<&'static str> {
    METHODS.iter().map(|(n, _)| *n).collect()
}

pub fn method_by_name(name: &str) -> Result<Arc<dyn DivideSelect>> {
    METHODS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, ctor)| ctor())
        .ok_or_else(|| Error::UnknownName {
            kind: "divide-and-select method",
            name: name.to_string(),
        })
}

#[derive(Clone)]
pub struct HeuristicConfig {
    pub method: Arc<dyn DivideSelect>,
    pub frontier_cap: usize,
    /// Largest depth tried; `None` means `sde(U) + 2n + 8`.
    pub m_cap: Option<usize>,
    pub join_first_two: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            method: Arc::new(MethodC),
            frontier_cap: DEFAULT_FRONTIER_CAP,
            m_cap: None,
            join_first_two: true,
        }
    }
}

impl fmt::Debug for HeuristicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeuristicConfig")
            .field("method", &self.method.name())
            .field("frontier_cap", &self.frontier_cap)
            .field("m_cap", &self.m_cap)
            .field("join_first_two", &self.join_first_two)
            .finish()
    }
}

impl HeuristicConfig {
    pub fn with_method(name: &str) -> Result<Self> {
        Ok(HeuristicConfig {
            method: method_by_name(name)?,
            ..Default::default()
        })
    }

    fn validate(&self) -> Result<()> {
        if self.frontier_cap == 0 {
            return Err(Error::Invalid("frontier cap must be at least 1".into()));
        }
        Ok(())
    }

    pub fn effective_m_cap(&self, u: &ChannelMatrix) -> usize {
        self.m_cap.unwrap_or(u.sde() as usize + 2 * u.n() + 8)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Attempt {
    pub m: usize,
    /// Frontier size kept after each selection.
    pub levels: Vec<usize>,
    pub outcome: &'static str,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Telemetry {
    pub max_frontier: usize,
    /// Frontier sizes of the final attempt.
    pub levels: Vec<usize>,
    pub wall_ms: u128,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug)]
pub struct SynthResult {
    pub decomposition: Decomposition,
    pub telemetry: Telemetry,
}

#[derive(Clone)]
struct Node {
    /// Factors applied so far, outermost first: `[P_t, P_{t-1}, …]`.
    path: Vec<Pauli>,
    /// `None` for nodes rebuilt on demand from the root.
    matrix: Option<Arc<ChannelMatrix>>,
    sde: u32,
    hw: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    parent: usize,
    rp: usize,
    sde: u32,
    hw: usize,
    fingerprint: u64,
    delta: Delta,
}

/// Children of one parent, scored in Pauli order up to the first Clifford
/// child (`hit`), with no budget filter applied yet.
struct Scored {
    hit: Option<usize>,
    children: Vec<Candidate>,
}

enum Expansion {
    Found(Vec<Pauli>, ChannelMatrix),
    Children(Vec<Candidate>),
}

/// The first two levels below the root. They do not depend on `m` apart
/// from the budget filter, so one expansion serves every attempt.
struct Joined {
    root: Scored,
    level1: Vec<Node>,
    level2: Vec<Scored>,
}

struct Searcher<'a> {
    root: &'a ChannelMatrix,
    rps: Vec<RpCompact>,
    cfg: &'a HeuristicConfig,
    joined: OnceLock<Joined>,
}

impl<'a> Searcher<'a> {
    fn new(root: &'a ChannelMatrix, cfg: &'a HeuristicConfig) -> Self {
        Searcher {
            root,
            rps: all_rp(root.n()),
            cfg,
            joined: OnceLock::new(),
        }
    }

    fn root_node(&self) -> Node {
        Node {
            path: Vec::new(),
            matrix: Some(Arc::new(self.root.clone())),
            sde: self.root.sde(),
            hw: self.root.hamming_weight(),
        }
    }

    fn matrix(&self, node: &Node) -> Result<Arc<ChannelMatrix>> {
        if let Some(m) = &node.matrix {
            return Ok(m.clone());
        }
        let mut v = self.root.clone();
        for p in &node.path {
            v = rp_inv_mult(&self.rps[p.index() - 1], &v)?;
        }
        Ok(Arc::new(v))
    }

    fn child(&self, parents: &[Node], c: &Candidate) -> Result<ChannelMatrix> {
        rp_inv_mult(&self.rps[c.rp], &*self.matrix(&parents[c.parent])?)
    }

    fn child_path(&self, parent: &Node, rp: usize) -> Vec<Pauli> {
        let mut path = parent.path.clone();
        path.push(self.rps[rp].pauli());
        path
    }

    /// Scores every child of every parent without building the products.
    fn expand(&self, parents: &[Node]) -> Result<Vec<Scored>> {
        parents
            .par_iter()
            .enumerate()
            .map(|(pi, parent)| -> Result<Scored> {
                let m = self.matrix(parent)?;
                let stats = RowStats::of(&m);
                let mut children = Vec::with_capacity(self.rps.len());
                for (ri, rp) in self.rps.iter().enumerate() {
                    let s = stats.score(rp, &m, true);
                    if s.sde == 0 {
                        return Ok(Scored {
                            hit: Some(ri),
                            children,
                        });
                    }
                    children.push(Candidate {
                        parent: pi,
                        rp: ri,
                        sde: s.sde,
                        hw: s.hamming_weight,
                        fingerprint: s.fingerprint,
                        delta: Delta {
                            sde: Change::of(parent.sde, s.sde),
                            hw: Change::of(parent.hw, s.hamming_weight),
                        },
                    });
                }
                Ok(Scored {
                    hit: None,
                    children,
                })
            })
            .collect()
    }

    /// Returns the first Clifford child of an admissible parent, or else the
    /// children of admissible parents with sde at most `budget`.
    fn gather(
        &self,
        parents: &[Node],
        scored: &[Scored],
        admissible: impl Fn(&Node) -> bool,
        budget: u32,
    ) -> Result<Expansion> {
        for (pi, s) in scored.iter().enumerate() {
            if let (Some(ri), true) = (s.hit, admissible(&parents[pi])) {
                let m = rp_inv_mult(&self.rps[ri], &*self.matrix(&parents[pi])?)?;
                return Ok(Expansion::Found(self.child_path(&parents[pi], ri), m));
            }
        }
        Ok(Expansion::Children(
            scored
                .iter()
                .enumerate()
                .filter(|(pi, _)| admissible(&parents[*pi]))
                .flat_map(|(_, s)| s.children.iter().filter(|c| c.sde <= budget).copied())
                .collect(),
        ))
    }

    fn joined(&self) -> Result<&Joined> {
        if let Some(j) = self.joined.get() {
            return Ok(j);
        }
        let root = [self.root_node()];
        let mut scored = self.expand(&root)?;
        let root_scored = scored.pop().expect("one parent");
        let level1: Vec<Node> = root_scored
            .children
            .iter()
            .map(|c| Node {
                path: self.child_path(&root[0], c.rp),
                matrix: None,
                sde: c.sde,
                hw: c.hw,
            })
            .collect();
        let level2 = if root_scored.hit.is_some() {
            Vec::new()
        } else {
            self.expand(&level1)?
        };
        let _ = self.joined.set(Joined {
            root: root_scored,
            level1,
            level2,
        });
        Ok(self.joined.get().expect("just set"))
    }

    /// Drops children equal to an earlier child, comparing 64-bit digests
    /// of the exact entries.
    fn dedup(cands: Vec<Candidate>) -> Vec<Candidate> {
        let mut seen = HashSet::with_capacity(cands.len());
        cands
            .into_iter()
            .filter(|c| seen.insert(c.fingerprint))
            .collect()
    }

    fn materialize(&self, parents: &[Node], chosen: &[Candidate]) -> Result<Vec<Node>> {
        chosen
            .par_iter()
            .map(|c| -> Result<Node> {
                Ok(Node {
                    path: self.child_path(&parents[c.parent], c.rp),
                    matrix: Some(Arc::new(self.child(parents, c)?)),
                    sde: c.sde,
                    hw: c.hw,
                })
            })
            .collect()
    }

    /// One call of sub-routine 𝒜 with target depth `m`.
    fn run(&self, m: usize, attempt: &mut Attempt) -> Result<Option<Decomposition>> {
        let root = [self.root_node()];
        let (mut frontier, mut i, first) = if self.cfg.join_first_two && m >= 2 {
            let j = self.joined()?;
            let top = self.gather(&root, std::slice::from_ref(&j.root), |_| true, u32::MAX)?;
            if let Expansion::Found(path, c0) = top {
                return Ok(Some(Decomposition::new(path, c0)));
            }
            let limit = (m - 1) as u32;
            attempt
                .levels
                .push(j.level1.iter().filter(|n| n.sde <= limit).count());
            let e = self.gather(&j.level1, &j.level2, |n| n.sde <= limit, (m - 2) as u32)?;
            (j.level1.clone(), 2, e)
        } else {
            let e = self.gather(&root, &self.expand(&root)?, |_| true, (m - 1) as u32)?;
            (root.to_vec(), 1, e)
        };
        let mut expansion = first;
        loop {
            let cands = match expansion {
                Expansion::Found(path, c0) => return Ok(Some(Decomposition::new(path, c0))),
                Expansion::Children(c) => Self::dedup(c),
            };
            let deltas: Vec<Delta> = cands.iter().map(|c| c.delta).collect();
            let chosen: Vec<Candidate> = self
                .cfg
                .method
                .select(&deltas)
                .into_iter()
                .map(|k| cands[k])
                .collect();
            if chosen.is_empty() {
                return Ok(None);
            }
            if chosen.len() > self.cfg.frontier_cap {
                return Err(Error::FrontierOverflow {
                    cap: self.cfg.frontier_cap,
                    size: chosen.len(),
                });
            }
            frontier = self.materialize(&frontier, &chosen)?;
            attempt.levels.push(frontier.len());
            if i == m {
                return Ok(None);
            }
            i += 1;
            let scored = self.expand(&frontier)?;
            expansion = self.gather(&frontier, &scored, |_| true, (m - i) as u32)?;
        }
    }
}

/// Sub-routine 𝒜: searches up to depth `m` for a product
/// `⟨R(P_1)⟩⁻¹···⟨R(P_t)⟩⁻¹⟨U⟩` that is Clifford.
pub fn subroutine_a(
    u: &ChannelMatrix,
    m: usize,
    cfg: &HeuristicConfig,
) -> Result<Option<Decomposition>> {
    cfg.validate()?;
    if u.is_clifford() {
        return Ok(Some(Decomposition::new(Vec::new(), u.clone())));
    }
    Searcher::new(u, cfg).run(m, &mut Attempt::default())
}

/// MIN-T-SYNTH: runs 𝒜 with `m = sde(U), sde(U)+1, …` until it succeeds.
/// The decomposition is verified exactly before it is returned.
pub fn min_t_synth(u: &ChannelMatrix, cfg: &HeuristicConfig) -> Result<SynthResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut telemetry = Telemetry::default();
    let finish = |mut telemetry: Telemetry, d: Decomposition| -> Result<SynthResult> {
        d.verify(u)?;
        telemetry.wall_ms = start.elapsed().as_millis();
        telemetry.levels = telemetry
            .attempts
            .last()
            .map(|a| a.levels.clone())
            .unwrap_or_default();
        telemetry.max_frontier = telemetry
            .attempts
            .iter()
            .flat_map(|a| a.levels.iter().copied())
            .max()
            .unwrap_or(0);
        Ok(SynthResult {
            decomposition: d,
            telemetry,
        })
    };
    if u.is_clifford() {
        return finish(telemetry, Decomposition::new(Vec::new(), u.clone()));
    }
    let searcher = Searcher::new(u, cfg);
    let m_cap = cfg.effective_m_cap(u);
    let mut overflowed = false;
    let mut m = (u.sde() as usize).max(1);
    while m <= m_cap {
        let mut attempt = Attempt {
            m,
            ..Default::default()
        };
        let result = searcher.run(m, &mut attempt);
        attempt.outcome = match &result {
            Ok(Some(_)) => "found",
            Ok(None) => "no",
            Err(Error::FrontierOverflow { .. }) => "overflow",
            Err(_) => "error",
        };
        telemetry.attempts.push(attempt);
        match result {
            Ok(Some(d)) => return finish(telemetry, d),
            Ok(None) => {}
            Err(Error::FrontierOverflow { .. }) => overflowed = true,
            Err(e) => return Err(e),
        }
        m += 1;
    }
    Err(Error::Inconclusive { m_cap, overflowed })
}
