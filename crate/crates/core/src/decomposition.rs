use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::rp::{rp_compact, rp_mult};

/// `⟨U⟩ = ⟨R(P_t)⟩ ··· ⟨R(P_1)⟩ · ⟨C₀⟩` with `paulis = [P_t, …, P_1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub paulis: Vec<Pauli>,
    #[serde(rename = "clifford_channel")]
    pub clifford: ChannelMatrix,
}

impl Decomposition {
    pub fn new(paulis: Vec<Pauli>, clifford: ChannelMatrix) -> Self {
        Decomposition { paulis, clifford }
    }

    pub fn tcount(&self) -> usize {
        self.paulis.len()
    }

    /// Rebuilds the channel by applying the `⟨R(P)⟩` factors to `⟨C₀⟩`.
    pub fn reconstruct(&self) -> Result<ChannelMatrix> {
        let mut w = self.clifford.clone();
        for p in self.paulis.iter().rev() {
            w = rp_mult(&rp_compact(*p)?, &w)?;
        }
        Ok(w)
    }

    /// Checks the reconstruction identity against `target` and that the
    /// terminal factor is a Clifford channel.
    pub fn verify(&self, target: &ChannelMatrix) -> Result<()> {
        if !self.clifford.is_clifford() {
            return Err(Error::Internal(
                "terminal factor is not a Clifford channel".into(),
            ));
        }
        if self.paulis.iter().any(|p| p.n() != target.n()) {
            return Err(Error::Internal("Pauli width differs from target".into()));
        }
        if &self.reconstruct()? != target {
            return Err(Error::Internal(
                "decomposition does not reconstruct the target".into(),
            ));
        }
        Ok(())
    }
}
