//! T-count solvers behind one interface, selected by name at runtime.

use serde::Serialize;

use crate::channel::ChannelMatrix;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::heuristic::{min_t_synth, HeuristicConfig, Telemetry};
use crate::provable::{tcount_bruteforce, ProvableConfig, ProvableSearch};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Solution {
    /// `None` when the solver proved `𝒯(U)` exceeds its bound.
    pub tcount: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub telemetry: Option<Telemetry>,
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, u: &ChannelMatrix) -> Result<Solution>;
}

/// Settings for every registered solver; each reads only its own part.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub heuristic: HeuristicConfig,
    pub provable: ProvableConfig,
    /// Also build a decomposition after the provable decision.
    pub provable_decompose: bool,
    pub brute_mmax: usize,
    pub brute_frontier_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            heuristic: HeuristicConfig::default(),
            provable: ProvableConfig::new(4, 2).expect("valid defaults"),
            provable_decompose: true,
            brute_mmax: 4,
            brute_frontier_cap: 1 << 20,
        }
    }
}

pub struct HeuristicSolver(pub HeuristicConfig);

impl Solver for HeuristicSolver {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn solve(&self, u: &ChannelMatrix) -> Result<Solution> {
        let r = min_t_synth(u, &self.0)?;
        Ok(Solution {
            tcount: Some(r.decomposition.tcount()),
            decomposition: Some(r.decomposition),
            telemetry: Some(r.telemetry),
        })
    }
}

pub struct ProvableSolver {
    pub cfg: ProvableConfig,
    pub decompose: bool,
}

impl Solver for ProvableSolver {
    fn name(&self) -> &'static str {
        "provable"
    }

    fn solve(&self, u: &ChannelMatrix) -> Result<Solution> {
        let search = ProvableSearch::new(u.n(), self.cfg.clone())?;
        let tcount = search.decide(u)?;
        let decomposition = match (tcount, self.decompose) {
            (Some(t), true) => Some(search.decompose(u, t)?),
            _ => None,
        };
        Ok(Solution {
            tcount,
            decomposition,
            telemetry: None,
        })
    }
}

pub struct BruteForceSolver {
    pub mmax: usize,
    pub frontier_cap: usize,
}

impl Solver for BruteForceSolver {
    fn name(&self) -> &'static str {
        "bruteforce"
    }

    fn solve(&self, u: &ChannelMatrix) -> Result<Solution> {
        Ok(Solution {
            tcount: tcount_bruteforce(u, self.mmax, self.frontier_cap)?,
            ..Default::default()
        })
    }
}

type SolverCtor = fn(&SolverOptions) -> Box<dyn Solver>;

const SOLVERS: &[(&str, SolverCtor)] = &[
    ("heuristic", |o| {
        Box::new(HeuristicSolver(o.heuristic.clone()))
    }),
    ("provable", |o| {
        Box::new(ProvableSolver {
            cfg: o.provable.clone(),
            decompose: o.provable_decompose,
        })
    }),
    ("bruteforce", |o| {
        Box::new(BruteForceSolver {
            mmax: o.brute_mmax,
            frontier_cap: o.brute_frontier_cap,
        })
    }),
];

pub fn solver_names() -> Vec<&'static str> {
    SOLVERS.iter().map(|(n, _)| *n).collect()
}

pub fn solver_by_name(name: &str, opts: &SolverOptions) -> Result<Box<dyn Solver>> {
    SOLVERS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, ctor)| ctor(opts))
        .ok_or_else(|| Error::UnknownName {
            kind: "solver",
            name: name.to_string(),
        })
}
