//! Exact unitaries over ℤ[i, 1/√2] and their channel representations.
//!
//! The channel representation of an n-qubit unitary `U` is the real
//! `4^n × 4^n` matrix with entries `(1/2^n) Tr(P_r U P_s U†)`, rows and
//! columns indexed by Pauli strings. It forgets the global phase and is
//! multiplicative, and a unitary is Clifford exactly when its channel is a
//! signed permutation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{apply_masks, Pauli, Phase4, MAX_QUBITS};
use crate::ring::{ComplexElt, RealElt};

/// A `2^n × 2^n` matrix with entries in ℤ[i, 1/√2], row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Unitary {
    n: usize,
    entries: Vec<ComplexElt>,
}

#[derive(Serialize, Deserialize)]
struct UnitaryJson {
    n: usize,
    entries: Vec<Vec<ComplexElt>>,
}

impl Unitary {
    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        let mut entries = vec![ComplexElt::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ComplexElt::ONE;
        }
        Unitary { n, entries }
    }

    /// Builds a matrix from rows; does not check unitarity.
    pub fn from_rows(n: usize, rows: Vec<Vec<ComplexElt>>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Invalid(format!("unsupported qubit count {n}")));
        }
        let dim = 1 << n;
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid(format!(
                "a {n}-qubit unitary needs {dim}x{dim} entries"
            )));
        }
        Ok(Unitary {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> ComplexElt {
        self.entries[r * self.dim() + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: ComplexElt) {
        let d = self.dim();
        self.entries[r * d + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<ComplexElt>> {
        self.entries
            .chunks(self.dim())
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn adjoint(&self) -> Unitary {
        let d = self.dim();
        let mut out = self.clone();
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rhs.n,
            });
        }
        let d = self.dim();
        let mut out = vec![ComplexElt::ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let x = self.entries[i * d + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let y = rhs.entries[k * d + j];
                    if !y.is_zero() {
                        out[i * d + j] = out[i * d + j] + x * y;
                    }
                }
            }
        }
        Ok(Unitary {
            n: self.n,
            entries: out,
        })
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: ComplexElt) -> Unitary {
        Unitary {
            n: self.n,
            entries: self.entries.iter().map(|&e| e * s).collect(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self.mul(&self.adjoint()) {
            Ok(p) => p == Unitary::identity(self.n),
            Err(_) => false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&UnitaryJson {
            n: self.n,
            entries: self.rows(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: UnitaryJson = serde_json::from_str(s)?;
        Unitary::from_rows(j.n, j.entries)
    }
}

/// The channel representation: a `4^n × 4^n` real matrix over ℤ[1/√2],
/// stored dense and row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChannelMatrix {
    n: usize,
    dim: usize,
    entries: Vec<RealElt>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    n: usize,
    entries: Vec<Vec<RealElt>>,
}

impl ChannelMatrix {
    pub fn identity(n: usize) -> Self {
        let dim = 1 << (2 * n);
        let mut entries = vec![RealElt::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = RealElt::ONE;
        }
        ChannelMatrix { n, dim, entries }
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<RealElt>) -> Self {
        let dim = 1 << (2 * n);
        debug_assert_eq!(entries.len(), dim * dim);
        ChannelMatrix { n, dim, entries }
    }

    /// Builds a channel from rows and checks that it is orthogonal with
    /// `e_1` as first row and column.
    pub fn from_rows(n: usize, rows: Vec<Vec<RealElt>>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Invalid(format!("unsupported qubit count {n}")));
        }
        let dim = 1 << (2 * n);
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::MalformedChannel(format!(
                "a {n}-qubit channel needs {dim}x{dim} entries"
            )));
        }
        let m = ChannelMatrix {
            n,
            dim,
            entries: rows.into_iter().flatten().collect(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for j in 0..self.dim {
            let want = if j == 0 { RealElt::ONE } else { RealElt::ZERO };
            if self.get(0, j) != want || self.get(j, 0) != want {
                return Err(Error::MalformedChannel(
                    "first row and column must be e_1".into(),
                ));
            }
        }
        for j in 0..self.dim {
            if self.column(j).iter().all(|e| e.is_zero()) {
                return Err(Error::MalformedChannel(format!("column {j} is zero")));
            }
        }
        if self.transpose().mul(self)? != ChannelMatrix::identity(self.n) {
            return Err(Error::MalformedChannel("matrix is not orthogonal".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Side length `N² = 4^n`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> RealElt {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[RealElt] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<RealElt> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[RealElt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<RealElt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Maximum sde over all entries.
    pub fn sde(&self) -> u32 {
        self.entries.iter().map(|e| e.k()).max().unwrap_or(0)
    }

    /// Number of nonzero entries.
    pub fn hamming_weight(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }

    /// True iff the matrix is a signed permutation.
    pub fn is_clifford(&self) -> bool {
        let mut col_hits = vec![false; self.dim];
        for r in 0..self.dim {
            let mut hits = 0;
            for (c, e) in self.row(r).iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if *e != RealElt::ONE && *e != RealElt::MINUS_ONE {
                    return false;
                }
                if col_hits[c] {
                    return false;
                }
                col_hits[c] = true;
                hits += 1;
            }
            if hits != 1 {
                return false;
            }
        }
        true
    }

    pub fn transpose(&self) -> ChannelMatrix {
        let d = self.dim;
        let mut entries = vec![RealElt::ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c];
            }
        }
        ChannelMatrix {
            n: self.n,
            dim: d,
            entries,
        }
    }

    /// Dense exact product `self · rhs`.
    pub fn mul(&self, rhs: &ChannelMatrix) -> Result<ChannelMatrix> {
        dense_channel_mul(self, rhs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json_value())?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ChannelJson {
            n: self.n,
            entries: self.rows(),
        })
        .expect("channel serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ChannelJson = serde_json::from_str(s)?;
        ChannelMatrix::from_rows(j.n, j.entries)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let j: ChannelJson = serde_json::from_value(v)?;
        ChannelMatrix::from_rows(j.n, j.entries)
    }
}

impl std::fmt::Debug for ChannelMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ChannelMatrix(n={}) [", self.n)?;
        for r in 0..self.dim {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Serialize for ChannelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            n: self.n,
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChannelMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ChannelJson::deserialize(d)?;
        ChannelMatrix::from_rows(j.n, j.entries).map_err(serde::de::Error::custom)
    }
}

/// Exact dense product with no sparsity shortcuts, used as the reference
/// for the structured kernels.
pub fn dense_channel_mul(a: &ChannelMatrix, b: &ChannelMatrix) -> Result<ChannelMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    let d = a.dim;
    let entries: Vec<RealElt> = (0..d)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut row = vec![RealElt::ZERO; d];
            for k in 0..d {
                let x = a.entries[i * d + k];
                let brow = &b.entries[k * d..(k + 1) * d];
                for (out, &y) in row.iter_mut().zip(brow) {
                    *out = *out + x * y;
                }
            }
            row
        })
        .collect();
    Ok(ChannelMatrix {
        n: a.n,
        dim: d,
        entries,
    })
}

/// Kronecker product; Pauli index of the joint system is
/// `index_a · 4^{n_b} + index_b`.
pub fn channel_tensor(a: &ChannelMatrix, b: &ChannelMatrix) -> ChannelMatrix {
    let n = a.n + b.n;
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut entries = vec![RealElt::ZERO; d * d];
    for ra in 0..da {
        for ca in 0..da {
            let x = a.get(ra, ca);
            if x.is_zero() {
                continue;
            }
            for rb in 0..db {
                for cb in 0..db {
                    let y = b.get(rb, cb);
                    if !y.is_zero() {
                        entries[(ra * db + rb) * d + ca * db + cb] = x * y;
                    }
                }
            }
        }
    }
    ChannelMatrix { n, dim: d, entries }
}

fn phase_elt(p: Phase4) -> ComplexElt {
    match p.exponent() {
        0 => ComplexElt::ONE,
        1 => ComplexElt::I,
        2 => -ComplexElt::ONE,
        _ => -ComplexElt::I,
    }
}

/// Computes `⟨U⟩` exactly after validating that `U` is unitary.
///
/// Column `s` is obtained from `M = U P_s U†`, applying `P_s` as a signed
/// permutation, then `⟨U⟩_rs = Tr(P_r M) / 2^n` where
/// `Tr(P_r M) = Σ_x phase_r(x) M[x][x ⊕ xmask_r]`.
pub fn channel_of_unitary(u: &Unitary) -> Result<ChannelMatrix> {
    if !u.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let n = u.n();
    let nn = u.dim();
    let dim = 1usize << (2 * n);
    let adj = u.adjoint();
    let paulis: Vec<(usize, usize, u32)> = (0..dim)
        .map(|i| {
            let p = Pauli::new(n, i).expect("index in range");
            (p.x_mask(), p.z_mask(), p.y_count())
        })
        .collect();

    let columns: Vec<Vec<RealElt>> = paulis
        .par_iter()
        .map(|&(sx, sz, sy)| -> Result<Vec<RealElt>> {
            // U P_s: column j of P_s has its entry at row j ^ sx.
            let mut up = vec![ComplexElt::ZERO; nn * nn];
            for j in 0..nn {
                let (ph, row) = apply_masks(sx, sz, sy, j);
                let ph = phase_elt(ph);
                for i in 0..nn {
                    let v = u.get(i, row);
                    if !v.is_zero() {
                        up[i * nn + j] = v * ph;
                    }
                }
            }
            let mut m = vec![ComplexElt::ZERO; nn * nn];
            for i in 0..nn {
                for k in 0..nn {
                    let x = up[i * nn + k];
                    if x.is_zero() {
                        continue;
                    }
                    for j in 0..nn {
                        let y = adj.get(k, j);
                        if !y.is_zero() {
                            m[i * nn + j] = m[i * nn + j] + x * y;
                        }
                    }
                }
            }
            let mut col = Vec::with_capacity(dim);
            for &(rx, rz, ry) in &paulis {
                let mut tr = ComplexElt::ZERO;
                for x in 0..nn {
                    // P_r|x⟩ = ph|x ^ rx⟩, so (P_r)[x^rx][x] = ph.
                    let (ph, y) = apply_masks(rx, rz, ry, x);
                    let v = m[x * nn + y];
                    if !v.is_zero() {
                        tr = tr + v * phase_elt(ph);
                    }
                }
                if !tr.im().is_zero() {
                    return Err(Error::Invalid("channel entry is not real".into()));
                }
                let re = tr.re();
                col.push(RealElt::new(re.a(), re.b(), re.k() + 2 * n as u32));
            }
            Ok(col)
        })
        .collect::<Result<_>>()?;

    let mut entries = vec![RealElt::ZERO; dim * dim];
    for (s, col) in columns.into_iter().enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            entries[r * dim + s] = v;
        }
    }
    Ok(ChannelMatrix { n, dim, entries })
}

/// T-count of a single-qubit unitary, which equals `sde(⟨U⟩)`.
pub fn tcount_single_qubit(u: &Unitary) -> Result<u32> {
    if u.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: u.n(),
        });
    }
    Ok(channel_of_unitary(u)?.sde())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: i64, b: i64, cc: i64, d: i64, k: u32) -> ComplexElt {
        ComplexElt::new(a, b, cc, d, k)
    }

    pub(crate) fn t_gate() -> Unitary {
        Unitary::from_rows(
            1,
            vec![
                vec![ComplexElt::ONE, ComplexElt::ZERO],
                vec![ComplexElt::ZERO, ComplexElt::OMEGA],
            ],
        )
        .unwrap()
    }

    pub(crate) fn h_gate() -> Unitary {
        let h = c(1, 0, 0, 0, 1);
        Unitary::from_rows(1, vec![vec![h, h], vec![h, -h]]).unwrap()
    }

    fn s_gate() -> Unitary {
        Unitary::from_rows(
            1,
            vec![
                vec![ComplexElt::ONE, ComplexElt::ZERO],
                vec![ComplexElt::ZERO, ComplexElt::I],
            ],
        )
        .unwrap()
    }

    fn kron(a: &Unitary, b: &Unitary) -> Unitary {
        let (da, db) = (a.dim(), b.dim());
        let mut rows = vec![vec![ComplexElt::ZERO; da * db]; da * db];
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        rows[i * db + k][j * db + l] = a.get(i, j) * b.get(k, l);
                    }
                }
            }
        }
        Unitary::from_rows(a.n() + b.n(), rows).unwrap()
    }

    #[test]
    fn identity_channel() {
        let ch = channel_of_unitary(&Unitary::identity(2)).unwrap();
        assert_eq!(ch, ChannelMatrix::identity(2));
        assert_eq!(ch.sde(), 0);
        assert_eq!(ChannelMatrix::identity(1).hamming_weight(), 4);
        assert!(ch.is_clifford());
    }

    #[test]
    fn t_channel_explicit() {
        let ch = channel_of_unitary(&t_gate()).unwrap();
        let r = RealElt::INV_SQRT2;
        let z = RealElt::ZERO;
        let o = RealElt::ONE;
        let want = vec![
            vec![o, z, z, z],
            vec![z, r, -r, z],
            vec![z, r, r, z],
            vec![z, z, z, o],
        ];
        assert_eq!(ch.rows(), want);
        assert_eq!(ch.sde(), 1);
        assert_eq!(ch.hamming_weight(), 6);
        assert!(!ch.is_clifford());
        assert_eq!(tcount_single_qubit(&t_gate()).unwrap(), 1);
        assert_eq!(tcount_single_qubit(&h_gate()).unwrap(), 0);
    }

    #[test]
    fn tht_has_tcount_two() {
        let tht = t_gate().mul(&h_gate()).unwrap().mul(&t_gate()).unwrap();
        assert_eq!(tcount_single_qubit(&tht).unwrap(), 2);
    }

    #[test]
    fn t_squared_is_s() {
        let t = channel_of_unitary(&t_gate()).unwrap();
        let s = channel_of_unitary(&s_gate()).unwrap();
        assert_eq!(dense_channel_mul(&t, &t).unwrap(), s);
        assert!(s.is_clifford());
    }

    #[test]
    fn homomorphism_h_t() {
        let h = channel_of_unitary(&h_gate()).unwrap();
        let t = channel_of_unitary(&t_gate()).unwrap();
        let ht = channel_of_unitary(&h_gate().mul(&t_gate()).unwrap()).unwrap();
        assert_eq!(dense_channel_mul(&h, &t).unwrap(), ht);
        let id = ChannelMatrix::identity(1);
        assert_eq!(dense_channel_mul(&ht, &id).unwrap(), ht);
    }

    #[test]
    fn tensor_matches_kron() {
        let t = channel_of_unitary(&t_gate()).unwrap();
        let h = channel_of_unitary(&h_gate()).unwrap();
        let id = ChannelMatrix::identity(1);
        assert_eq!(channel_tensor(&id, &id), ChannelMatrix::identity(2));
        let t_i = channel_of_unitary(&kron(&t_gate(), &Unitary::identity(1))).unwrap();
        assert_eq!(channel_tensor(&t, &id), t_i);
        let h_t = channel_of_unitary(&kron(&h_gate(), &t_gate())).unwrap();
        assert_eq!(channel_tensor(&h, &t), h_t);
    }

    #[test]
    fn global_phase_invariance() {
        let u = h_gate().mul(&t_gate()).unwrap();
        let a = channel_of_unitary(&u).unwrap();
        let b = channel_of_unitary(&u.scale(ComplexElt::OMEGA)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_unitary() {
        let bad = Unitary::from_rows(
            1,
            vec![
                vec![ComplexElt::ONE, ComplexElt::ONE],
                vec![ComplexElt::ZERO, ComplexElt::ONE],
            ],
        )
        .unwrap();
        assert!(matches!(channel_of_unitary(&bad), Err(Error::NotUnitary)));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = channel_of_unitary(&t_gate()).unwrap();
        let s = t.to_json().unwrap();
        assert_eq!(ChannelMatrix::from_json(&s).unwrap(), t);
        let bad = r#"{"n":1,"entries":[[[1,0,0],[0,0,0],[0,0,0],[0,0,0]],[[0,0,0],[1,0,0],[0,0,0],[0,0,0]],[[0,0,0],[0,0,0],[0,0,0],[0,0,0]],[[0,0,0],[0,0,0],[0,0,0],[1,0,0]]]}"#;
        assert!(ChannelMatrix::from_json(bad).is_err());
        let u = h_gate();
        assert_eq!(Unitary::from_json(&u.to_json().unwrap()).unwrap(), u);
    }
}
