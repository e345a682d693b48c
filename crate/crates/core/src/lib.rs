pub mod channel;
pub mod circuit;
pub mod coset;
pub mod decomposition;
pub mod error;
pub mod heuristic;
pub mod pauli;
pub mod provable;
pub mod ring;
pub mod rp;
pub mod solver;

pub use channel::{channel_of_unitary, ChannelMatrix, Unitary};
pub use circuit::{Circuit, Gate};
pub use decomposition::Decomposition;
pub use error::{Error, Result};
pub use heuristic::{min_t_synth, HeuristicConfig};
pub use pauli::{Pauli, Phase4};
pub use provable::{count_t_decide, ProvableConfig};
pub use ring::{ComplexElt, RealElt};
pub use rp::{rp_compact, RpCompact};
pub use solver::{solver_by_name, Solver};
