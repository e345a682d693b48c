//! n-qubit Pauli operators as base-4 indices.
//!
//! Digit encoding is I=0, X=1, Y=2, Z=3 with qubit 1 as the most
//! significant digit, so index 0 is always the identity and the string
//! `"XZ"` is index `1·4 + 3 = 7`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported qubit count. Channel matrices are `4^n × 4^n`, so
/// anything beyond this is out of reach anyway.
pub const MAX_QUBITS: usize = 8;

/// A power `i^e` of the imaginary unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase4(u8);

impl std::ops::Mul for Phase4 {
    type Output = Phase4;

    fn mul(self, other: Phase4) -> Phase4 {
        Phase4((self.0 + other.0) & 3)
    }
}

impl Phase4 {
    pub const ONE: Phase4 = Phase4(0);
    pub const I: Phase4 = Phase4(1);
    pub const MINUS_ONE: Phase4 = Phase4(2);
    pub const MINUS_I: Phase4 = Phase4(3);

    pub fn new(e: u8) -> Self {
        Phase4(e & 3)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn inv(self) -> Phase4 {
        Phase4((4 - self.0) & 3)
    }

    /// `Some(±1)` for a real phase.
    pub fn real_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

/// A Pauli string `Q_1 ⊗ … ⊗ Q_n` identified by its base-4 index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli {
    n: u8,
    index: u32,
}

/// Single-qubit product `p·q = i^e r`.
#[inline]
fn mul_digit(p: u32, q: u32) -> (u8, u32) {
    let r = p ^ q;
    if p == 0 || q == 0 || p == q {
        return (0, r);
    }
    // X→Y→Z→X cyclic order gives +i.
    if (q + 3 - p) % 3 == 1 {
        (1, r)
    } else {
        (3, r)
    }
}

impl Pauli {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Invalid(format!("unsupported qubit count {n}")));
        }
        if index >= 1usize << (2 * n) {
            return Err(Error::Invalid(format!(
                "Pauli index {index} out of range for {n} qubits"
            )));
        }
        Ok(Pauli {
            n: n as u8,
            index: index as u32,
        })
    }

    pub fn identity(n: usize) -> Self {
        Pauli::new(n, 0).expect("qubit count")
    }

    /// All `4^n - 1` non-identity Paulis in increasing index order.
    pub fn non_identity(n: usize) -> impl Iterator<Item = Pauli> + Clone {
        (1..(1usize << (2 * n))).map(move |i| Pauli {
            n: n as u8,
            index: i as u32,
        })
    }

    /// Builds a Pauli from per-qubit digits (qubit 1 first).
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for &d in digits {
            if d > 3 {
                return Err(Error::Invalid(format!("Pauli digit {d} out of range")));
            }
            index = index * 4 + d as usize;
        }
        Pauli::new(digits.len(), index)
    }

    /// Single-qubit Pauli `digit` acting on 1-based `qubit`.
    pub fn single(n: usize, qubit: usize, digit: u8) -> Result<Self> {
        if qubit == 0 || qubit > n {
            return Err(Error::Invalid(format!("qubit {qubit} out of range")));
        }
        let mut digits = vec![0u8; n];
        digits[qubit - 1] = digit;
        Pauli::from_digits(&digits)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index as usize
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.index == 0
    }

    /// Digit of 1-based `qubit`.
    #[inline]
    pub fn digit(&self, qubit: usize) -> u8 {
        ((self.index >> (2 * (self.n as usize - qubit))) & 3) as u8
    }

    pub fn digits(&self) -> Vec<u8> {
        (1..=self.n()).map(|q| self.digit(q)).collect()
    }

    /// Bit mask of qubits carrying X or Y; bit `n - q` is qubit `q`, matching
    /// the computational-basis convention of [`apply_pauli`].
    pub fn x_mask(&self) -> usize {
        let mut m = 0;
        for q in 1..=self.n() {
            let d = self.digit(q);
            if d == 1 || d == 2 {
                m |= 1 << (self.n() - q);
            }
        }
        m
    }

    /// Bit mask of qubits carrying Z or Y.
    pub fn z_mask(&self) -> usize {
        let mut m = 0;
        for q in 1..=self.n() {
            let d = self.digit(q);
            if d == 2 || d == 3 {
                m |= 1 << (self.n() - q);
            }
        }
        m
    }

    pub fn y_count(&self) -> u32 {
        (1..=self.n()).filter(|&q| self.digit(q) == 2).count() as u32
    }

    /// Number of qubits with a non-identity digit.
    pub fn weight(&self) -> usize {
        (1..=self.n()).filter(|&q| self.digit(q) != 0).count()
    }

    pub fn commutes_with(&self, other: &Pauli) -> bool {
        let (ax, az) = (self.x_mask(), self.z_mask());
        let (bx, bz) = (other.x_mask(), other.z_mask());
        ((ax & bz).count_ones() + (az & bx).count_ones()) % 2 == 0
    }
}

/// Product `P_p · P_q = i^φ P_r`, computed digit-wise.
pub fn pauli_mul(p: Pauli, q: Pauli) -> Result<(Phase4, Pauli)> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    let mut e = 0u8;
    for qb in 1..=p.n() {
        let (de, _) = mul_digit(p.digit(qb) as u32, q.digit(qb) as u32);
        e += de;
    }
    Ok((
        Phase4::new(e),
        Pauli {
            n: p.n,
            index: p.index ^ q.index,
        },
    ))
}

/// `P_p |x⟩ = i^φ |out⟩`, with qubit 1 the most significant bit of `x`.
pub fn apply_pauli(p: Pauli, basis_index: usize) -> Result<(Phase4, usize)> {
    if basis_index >= 1usize << p.n() {
        return Err(Error::Invalid(format!(
            "basis index {basis_index} out of range for {} qubits",
            p.n()
        )));
    }
    Ok(apply_masks(
        p.x_mask(),
        p.z_mask(),
        p.y_count(),
        basis_index,
    ))
}

/// Signed-permutation action given precomputed masks: `Y = iXZ`, so the
/// phase is `i^{#Y} (-1)^{|z ∧ x|}`.
#[inline]
pub(crate) fn apply_masks(xm: usize, zm: usize, ys: u32, x: usize) -> (Phase4, usize) {
    let neg = (zm & x).count_ones() % 2;
    (Phase4::new((ys + 2 * neg) as u8), x ^ xm)
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 1..=self.n() {
            let c = ['I', 'X', 'Y', 'Z'][self.digit(q) as usize];
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(Error::Invalid(format!("bad Pauli character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Pauli::from_digits(&digits)
    }
}

impl serde::Serialize for Pauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Pauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ComplexElt;
    use proptest::prelude::*;

    fn p(s: &str) -> Pauli {
        s.parse().unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(pauli_mul(p("X"), p("X")).unwrap(), (Phase4::ONE, p("I")));
        assert_eq!(pauli_mul(p("X"), p("Y")).unwrap(), (Phase4::I, p("Z")));
        assert_eq!(pauli_mul(p("XZ"), p("ZX")).unwrap(), (Phase4::ONE, p("YY")));
        assert!(pauli_mul(p("X"), p("XX")).is_err());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply_pauli(p("Z"), 0).unwrap(), (Phase4::ONE, 0));
        assert_eq!(apply_pauli(p("X"), 0).unwrap(), (Phase4::ONE, 1));
        assert_eq!(apply_pauli(p("Y"), 1).unwrap(), (Phase4::MINUS_I, 0));
        assert!(apply_pauli(p("Y"), 2).is_err());
    }

    #[test]
    fn text_form() {
        assert_eq!(p("IZYX").to_string(), "IZYX");
        assert_eq!(p("XZ").index(), 7);
        assert!(Pauli::identity(3).is_identity());
        assert!("XQ".parse::<Pauli>().is_err());
    }

    type Dense = Vec<Vec<ComplexElt>>;

    fn dense_single(d: u8) -> Dense {
        let (o, z, i) = (ComplexElt::ONE, ComplexElt::ZERO, ComplexElt::I);
        match d {
            0 => vec![vec![o, z], vec![z, o]],
            1 => vec![vec![z, o], vec![o, z]],
            2 => vec![vec![z, -i], vec![i, z]],
            _ => vec![vec![o, z], vec![z, -o]],
        }
    }

    fn kron(a: &Dense, b: &Dense) -> Dense {
        let (ra, rb) = (a.len(), b.len());
        let mut out = vec![vec![ComplexElt::ZERO; ra * rb]; ra * rb];
        for i in 0..ra {
            for j in 0..ra {
                for k in 0..rb {
                    for l in 0..rb {
                        out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    fn dense(p: Pauli) -> Dense {
        let digits = p.digits();
        let mut m = dense_single(digits[0]);
        for &d in &digits[1..] {
            m = kron(&m, &dense_single(d));
        }
        m
    }

    fn phase_elt(ph: Phase4) -> ComplexElt {
        [
            ComplexElt::ONE,
            ComplexElt::I,
            -ComplexElt::ONE,
            -ComplexElt::I,
        ][ph.exponent() as usize]
    }

    #[test]
    fn apply_matches_dense_exhaustively() {
        for n in 1..=3 {
            for idx in 0..(1usize << (2 * n)) {
                let pa = Pauli::new(n, idx).unwrap();
                let m = dense(pa);
                for x in 0..(1usize << n) {
                    let (ph, out) = apply_pauli(pa, x).unwrap();
                    for (row, mrow) in m.iter().enumerate() {
                        let want = mrow[x];
                        let got = if row == out {
                            phase_elt(ph)
                        } else {
                            ComplexElt::ZERO
                        };
                        assert_eq!(got, want, "{pa} on |{x}> row {row}");
                    }
                }
            }
        }
    }

    #[test]
    fn mul_matches_dense_two_qubits() {
        for a in 0..16 {
            for b in 0..16 {
                let (pa, pb) = (Pauli::new(2, a).unwrap(), Pauli::new(2, b).unwrap());
                let (ph, r) = pauli_mul(pa, pb).unwrap();
                let (da, db, dr) = (dense(pa), dense(pb), dense(r));
                for i in 0..4 {
                    for j in 0..4 {
                        let mut s = ComplexElt::ZERO;
                        for k in 0..4 {
                            s = s + da[i][k] * db[k][j];
                        }
                        assert_eq!(s, phase_elt(ph) * dr[i][j]);
                    }
                }
            }
        }
    }

    fn pauli3() -> impl Strategy<Value = Pauli> {
        (0usize..64).prop_map(|i| Pauli::new(3, i).unwrap())
    }

    proptest! {
        #[test]
        fn mul_associative(a in pauli3(), b in pauli3(), c in pauli3()) {
            let (p1, ab) = pauli_mul(a, b).unwrap();
            let (p2, left) = pauli_mul(ab, c).unwrap();
            let (p3, bc) = pauli_mul(b, c).unwrap();
            let (p4, right) = pauli_mul(a, bc).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(p1 * p2, p3 * p4);
        }

        #[test]
        fn squares_to_identity(a in pauli3()) {
            prop_assert_eq!(pauli_mul(a, a).unwrap(), (Phase4::ONE, Pauli::identity(3)));
        }

        #[test]
        fn string_round_trip(a in pauli3()) {
            prop_assert_eq!(a.to_string().parse::<Pauli>().unwrap(), a);
        }
    }
}
