//! Compact encoding of `⟨R(P)⟩` and structured multiplication by it.
//!
//! For a non-identity Pauli `P`, `R(P) Q R(P)† = Q` when `Q` commutes with
//! `P`, and `(Q + iQP)/√2` when it anticommutes. So `⟨R(P)⟩` is the
//! identity except on the `N²/2` rows whose Pauli anticommutes with `P`.
//! Those rows come in pairs `(i, ℓ)` with `P_ℓ ∝ P_i P`, and each pair
//! holds a rotation block
//!
//! ```text
//!   row i: 1/√2 at (i,i),  s/√2 at (i,ℓ)
//!   row ℓ: 1/√2 at (ℓ,ℓ), -s/√2 at (ℓ,i)
//! ```
//!
//! Only the `N²/4` triples `(i, ℓ, s)` are stored.

use std::fmt;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::pauli::{pauli_mul, Pauli, Phase4};
use crate::ring::{halved_sum, RealElt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RpPair {
    /// Smaller row index.
    pub i: u32,
    /// Partner row index, always greater than `i`.
    pub l: u32,
    /// Sign of the `(i, ℓ)` entry.
    pub negative: bool,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RpCompact {
    pauli: Pauli,
    pairs: Vec<RpPair>,
}

impl RpCompact {
    pub fn pauli(&self) -> Pauli {
        self.pauli
    }

    pub fn n(&self) -> usize {
        self.pauli.n()
    }

    pub fn pairs(&self) -> &[RpPair] {
        &self.pairs
    }

    /// Rows carrying `1/√2` on the diagonal.
    pub fn touched_rows(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Dense `⟨R(P)⟩`.
    pub fn expand(&self) -> ChannelMatrix {
        let n = self.n();
        let dim = 1usize << (2 * n);
        let mut entries = vec![RealElt::ZERO; dim * dim];
        for r in 0..dim {
            entries[r * dim + r] = RealElt::ONE;
        }
        let h = RealElt::INV_SQRT2;
        for p in &self.pairs {
            let (i, l) = (p.i as usize, p.l as usize);
            let s = if p.negative { -h } else { h };
            entries[i * dim + i] = h;
            entries[l * dim + l] = h;
            entries[i * dim + l] = s;
            entries[l * dim + i] = -s;
        }
        ChannelMatrix::from_raw(n, entries)
    }
}

impl fmt::Display for RpCompact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P={}: ", self.pauli)?;
        for p in &self.pairs {
            let s = if p.negative { '−' } else { '+' };
            write!(f, "({},{}{})", p.i, s, p.l)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RpCompact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Builds the compact form of `⟨R(P)⟩` from commutation data alone.
pub fn rp_compact(p: Pauli) -> Result<RpCompact> {
    if p.is_identity() {
        return Err(Error::Invalid("R(P) needs a non-identity Pauli".into()));
    }
    let n = p.n();
    let dim = 1usize << (2 * n);
    let mut pairs = Vec::with_capacity(dim / 4);
    for r in 0..dim {
        let partner = r ^ p.index();
        if partner < r {
            continue;
        }
        let q_r = Pauli::new(n, r)?;
        if q_r.commutes_with(&p) {
            continue;
        }
        // Column ℓ holds i·Q_ℓ·P = i^{1+φ} Q_r, with the sign landing at row r.
        let q_l = Pauli::new(n, partner)?;
        let (phi, prod) = pauli_mul(q_l, p)?;
        debug_assert_eq!(prod.index(), r);
        let sign = (Phase4::I * phi)
            .real_sign()
            .ok_or_else(|| Error::Internal("anticommuting product with real phase".into()))?;
        pairs.push(RpPair {
            i: r as u32,
            l: partner as u32,
            negative: sign < 0,
        });
    }
    debug_assert_eq!(pairs.len(), dim / 4);
    Ok(RpCompact { pauli: p, pairs })
}

/// Compact forms for every non-identity Pauli on `n` qubits, in index order.
pub fn all_rp(n: usize) -> Vec<RpCompact> {
    Pauli::non_identity(n)
        .map(|p| rp_compact(p).expect("non-identity"))
        .collect()
}

/// `⟨R(P)⟩⁻¹ = ⟨R(P)⟩ᵀ`: every pair sign flips.
pub fn rp_inv(a: &RpCompact) -> RpCompact {
    RpCompact {
        pauli: a.pauli,
        pairs: a
            .pairs
            .iter()
            .map(|p| RpPair {
                negative: !p.negative,
                ..*p
            })
            .collect(),
    }
}

fn check_dims(a: &RpCompact, v: &ChannelMatrix) -> Result<()> {
    if a.n() != v.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: v.n(),
        });
    }
    Ok(())
}

/// `⟨R(P)⟩ · V`: untouched rows are copied and each pair `(i, ℓ, s)` becomes
/// `W[i] = (V[i] + sV[ℓ])/√2`, `W[ℓ] = (V[ℓ] - sV[i])/√2`.
pub fn rp_mult(a: &RpCompact, v: &ChannelMatrix) -> Result<ChannelMatrix> {
    check_dims(a, v)?;
    let d = v.dim();
    let mut out = v.entries().to_vec();
    let src = v.entries();
    for p in &a.pairs {
        let (i, l) = (p.i as usize, p.l as usize);
        let (ri, rl) = (&src[i * d..(i + 1) * d], &src[l * d..(l + 1) * d]);
        for c in 0..d {
            out[i * d + c] = halved_sum(ri[c], rl[c], p.negative);
            out[l * d + c] = halved_sum(rl[c], ri[c], !p.negative);
        }
    }
    Ok(ChannelMatrix::from_raw(v.n(), out))
}

/// `⟨R(P)⟩⁻¹ · V` without materializing the inverse.
pub fn rp_inv_mult(a: &RpCompact, v: &ChannelMatrix) -> Result<ChannelMatrix> {
    check_dims(a, v)?;
    let d = v.dim();
    let mut out = v.entries().to_vec();
    let src = v.entries();
    for p in &a.pairs {
        let (i, l) = (p.i as usize, p.l as usize);
        let (ri, rl) = (&src[i * d..(i + 1) * d], &src[l * d..(l + 1) * d]);
        for c in 0..d {
            out[i * d + c] = halved_sum(ri[c], rl[c], !p.negative);
            out[l * d + c] = halved_sum(rl[c], ri[c], p.negative);
        }
    }
    Ok(ChannelMatrix::from_raw(v.n(), out))
}

/// Multiply and track sde and Hamming weight of the product in the same
/// pass. `sde_v` must be `sde(V)`; the output sde differs from it by at most 1.
pub fn sde_delta_mult(
    a: &RpCompact,
    v: &ChannelMatrix,
    sde_v: u32,
) -> Result<(ChannelMatrix, u32, usize)> {
    check_dims(a, v)?;
    debug_assert_eq!(sde_v, v.sde());
    let d = v.dim();
    let src = v.entries();
    let mut out = src.to_vec();
    let mut touched = vec![false; d];
    let mut sde = 0;
    let mut hw = 0;
    for p in &a.pairs {
        let (i, l) = (p.i as usize, p.l as usize);
        touched[i] = true;
        touched[l] = true;
        let (ri, rl) = (&src[i * d..(i + 1) * d], &src[l * d..(l + 1) * d]);
        for c in 0..d {
            let x = halved_sum(ri[c], rl[c], p.negative);
            let y = halved_sum(rl[c], ri[c], !p.negative);
            sde = sde.max(x.k()).max(y.k());
            hw += usize::from(!x.is_zero()) + usize::from(!y.is_zero());
            out[i * d + c] = x;
            out[l * d + c] = y;
        }
    }
    for (r, t) in touched.iter().enumerate() {
        if !t {
            for e in &src[r * d..(r + 1) * d] {
                sde = sde.max(e.k());
                hw += usize::from(!e.is_zero());
            }
        }
    }
    Ok((ChannelMatrix::from_raw(v.n(), out), sde, hw))
}

#[inline]
fn entry_word(e: RealElt) -> u64 {
    (e.a() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (e.b() as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (e.k() as u64).wrapping_mul(0x1656_67B1_9E37_79F9)
}

#[inline]
fn hash_step(h: u64, e: RealElt) -> u64 {
    (h.rotate_left(23) ^ entry_word(e)).wrapping_mul(0xFF51_AFD7_ED55_8CCD)
}

#[inline]
fn row_contribution(row: usize, h: u64) -> u64 {
    let mut x = h ^ (row as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    x ^= x >> 33;
    x = x.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    x ^= x >> 33;
    x
}

/// Per-row sde, Hamming weight and hash of a channel matrix, used to score
/// many candidate products `⟨R(P)⟩^{±1}·V` without materializing them.
#[derive(Clone, Debug)]
pub struct RowStats {
    sde: Vec<u32>,
    hw: Vec<u32>,
    contrib: Vec<u64>,
    fingerprint: u64,
    total_hw: usize,
}

/// Summary of a product computed by [`RowStats::score`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductScore {
    pub sde: u32,
    pub hamming_weight: usize,
    pub fingerprint: u64,
}

impl RowStats {
    pub fn of(v: &ChannelMatrix) -> Self {
        let d = v.dim();
        let mut sde = Vec::with_capacity(d);
        let mut hw = Vec::with_capacity(d);
        let mut contrib = Vec::with_capacity(d);
        for r in 0..d {
            let row = v.row(r);
            sde.push(row.iter().map(|e| e.k()).max().unwrap_or(0));
            hw.push(row.iter().filter(|e| !e.is_zero()).count() as u32);
            let h = row.iter().fold(0u64, |h, &e| hash_step(h, e));
            contrib.push(row_contribution(r, h));
        }
        let fingerprint = contrib.iter().fold(0u64, |a, &c| a.wrapping_add(c));
        let total_hw = hw.iter().map(|&x| x as usize).sum();
        RowStats {
            sde,
            hw,
            contrib,
            fingerprint,
            total_hw,
        }
    }

    pub fn sde(&self) -> u32 {
        self.sde.iter().copied().max().unwrap_or(0)
    }

    pub fn hamming_weight(&self) -> usize {
        self.total_hw
    }

    /// Order-independent 64-bit digest of the exact entries.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Scores `⟨R(P)⟩·V` (or `⟨R(P)⟩⁻¹·V` when `inverse`) given `V` and its
    /// row stats, touching only the paired rows.
    pub fn score(&self, a: &RpCompact, v: &ChannelMatrix, inverse: bool) -> ProductScore {
        let d = v.dim();
        let src = v.entries();
        let mut fp = self.fingerprint;
        let mut hw = self.total_hw;
        let mut touched_max = 0u32;
        let mut untouched = vec![true; d];
        for p in &a.pairs {
            let (i, l) = (p.i as usize, p.l as usize);
            untouched[i] = false;
            untouched[l] = false;
            let neg = p.negative ^ inverse;
            let (ri, rl) = (&src[i * d..(i + 1) * d], &src[l * d..(l + 1) * d]);
            let (mut hi, mut hl) = (0u64, 0u64);
            let (mut wi, mut wl) = (0usize, 0usize);
            for c in 0..d {
                let x = halved_sum(ri[c], rl[c], neg);
                let y = halved_sum(rl[c], ri[c], !neg);
                touched_max = touched_max.max(x.k()).max(y.k());
                wi += usize::from(!x.is_zero());
                wl += usize::from(!y.is_zero());
                hi = hash_step(hi, x);
                hl = hash_step(hl, y);
            }
            hw = hw + wi + wl - self.hw[i] as usize - self.hw[l] as usize;
            fp = fp
                .wrapping_sub(self.contrib[i])
                .wrapping_sub(self.contrib[l])
                .wrapping_add(row_contribution(i, hi))
                .wrapping_add(row_contribution(l, hl));
        }
        let rest = self
            .sde
            .iter()
            .zip(&untouched)
            .filter(|(_, &u)| u)
            .map(|(&s, _)| s)
            .max()
            .unwrap_or(0);
        ProductScore {
            sde: touched_max.max(rest),
            hamming_weight: hw,
            fingerprint: fp,
        }
    }
}
