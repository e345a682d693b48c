//! Exact arithmetic over the rings ℤ[1/√2] and ℤ[i, 1/√2].
//!
//! Every value is held in a canonical form with the smallest possible
//! denominator exponent (sde), so structural equality is value equality.
//! Numerators are `i64`; all arithmetic is overflow-checked and panics
//! rather than wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[inline]
fn ck_add(x: i64, y: i64) -> i64 {
    x.checked_add(y).expect("ring arithmetic overflow")
}

#[inline]
fn ck_sub(x: i64, y: i64) -> i64 {
    x.checked_sub(y).expect("ring arithmetic overflow")
}

#[inline]
fn ck_mul(x: i64, y: i64) -> i64 {
    x.checked_mul(y).expect("ring arithmetic overflow")
}

/// Multiplies `a + b√2` by `√2^times`.
#[inline]
fn scale_sqrt2(mut a: i64, mut b: i64, times: u32) -> (i64, i64) {
    for _ in 0..times {
        let na = ck_mul(b, 2);
        b = a;
        a = na;
    }
    (a, b)
}

/// An element `(a + b√2) / √2^k` of ℤ[1/√2].
///
/// Invariant: `k == 0` or `a` is odd; zero is `(0, 0, 0)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RealElt {
    a: i64,
    b: i64,
    k: u32,
}

impl RealElt {
    pub const ZERO: RealElt = RealElt { a: 0, b: 0, k: 0 };
    pub const ONE: RealElt = RealElt { a: 1, b: 0, k: 0 };
    pub const MINUS_ONE: RealElt = RealElt { a: -1, b: 0, k: 0 };
    /// `1/√2`
    pub const INV_SQRT2: RealElt = RealElt { a: 1, b: 0, k: 1 };
    pub const SQRT2: RealElt = RealElt { a: 0, b: 1, k: 0 };

    /// Builds the canonical element equal to `(a + b√2) / √2^k`.
    pub fn new(a: i64, b: i64, k: u32) -> Self {
        reduce_real(a, b, k)
    }

    pub fn from_int(a: i64) -> Self {
        RealElt { a, b: 0, k: 0 }
    }

    #[inline]
    pub fn a(&self) -> i64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> i64 {
        self.b
    }

    /// Denominator exponent of the canonical form, i.e. the sde.
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn sde(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Numerator `(a, b)` rescaled to denominator `√2^k`; `k` must be at
    /// least `self.k()`.
    pub fn numerator_at(&self, k: u32) -> (i64, i64) {
        debug_assert!(k >= self.k || self.is_zero());
        if self.is_zero() {
            return (0, 0);
        }
        scale_sqrt2(self.a, self.b, k - self.k)
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2)
            / std::f64::consts::SQRT_2.powi(self.k as i32)
    }

    /// Returns `(q + sign·r) / √2` in canonical form.
    pub fn halved_sum(q: RealElt, r: RealElt, negate: bool) -> RealElt {
        halved_sum(q, r, negate)
    }

    /// Multiplies by `√2^-1`.
    pub fn div_sqrt2(self) -> RealElt {
        if self.is_zero() {
            return self;
        }
        reduce_real(self.a, self.b, self.k + 1)
    }
}

/// Reduces `(a + b√2)/√2^k` to canonical form.
///
/// While `a` is even and `k > 0`, `(a + b√2)/√2^k = (b + (a/2)√2)/√2^(k-1)`.
pub fn reduce_real(mut a: i64, mut b: i64, mut k: u32) -> RealElt {
    if a == 0 && b == 0 {
        return RealElt::ZERO;
    }
    while k > 0 && a % 2 == 0 {
        let na = b;
        b = a / 2;
        a = na;
        k -= 1;
    }
    RealElt { a, b, k }
}

/// `sde` of a canonical element.
pub fn sde_real(x: RealElt) -> u32 {
    x.k
}

/// `(q ± r) / √2`, reduced. `negate` selects the minus sign.
#[inline]
pub fn halved_sum(q: RealElt, r: RealElt, negate: bool) -> RealElt {
    if r.is_zero() {
        if q.is_zero() {
            return RealElt::ZERO;
        }
        return reduce_real(q.a, q.b, q.k + 1);
    }
    if q.is_zero() {
        let (a, b) = if negate { (-r.a, -r.b) } else { (r.a, r.b) };
        return reduce_real(a, b, r.k + 1);
    }
    let k = q.k.max(r.k);
    let (qa, qb) = scale_sqrt2(q.a, q.b, k - q.k);
    let (ra, rb) = scale_sqrt2(r.a, r.b, k - r.k);
    let (a, b) = if negate {
        (ck_sub(qa, ra), ck_sub(qb, rb))
    } else {
        (ck_add(qa, ra), ck_add(qb, rb))
    };
    reduce_real(a, b, k + 1)
}

/// Sign of `p + q√2` computed exactly.
fn sign_of(p: i128, q: i128) -> Ordering {
    match (p.cmp(&0), q.cmp(&0)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) => (p * p).cmp(&(2 * q * q)),
        (Ordering::Less, Ordering::Greater) => (2 * q * q).cmp(&(p * p)),
    }
}

/// Total order agreeing with the real values.
pub fn ring_compare(x: RealElt, y: RealElt) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    let k = x.k.max(y.k);
    let scale = |e: RealElt| -> (i128, i128) {
        let (mut a, mut b) = (e.a as i128, e.b as i128);
        for _ in 0..(k - e.k) {
            let na = 2 * b;
            b = a;
            a = na;
        }
        (a, b)
    };
    let (xa, xb) = scale(x);
    let (ya, yb) = scale(y);
    sign_of(xa - ya, xb - yb)
}

impl Ord for RealElt {
    fn cmp(&self, other: &Self) -> Ordering {
        ring_compare(*self, *other)
    }
}

impl PartialOrd for RealElt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for RealElt {
    type Output = RealElt;
    fn neg(self) -> RealElt {
        RealElt {
            a: -self.a,
            b: -self.b,
            k: self.k,
        }
    }
}

impl Add for RealElt {
    type Output = RealElt;
    fn add(self, rhs: RealElt) -> RealElt {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let k = self.k.max(rhs.k);
        let (xa, xb) = scale_sqrt2(self.a, self.b, k - self.k);
        let (ya, yb) = scale_sqrt2(rhs.a, rhs.b, k - rhs.k);
        reduce_real(ck_add(xa, ya), ck_add(xb, yb), k)
    }
}

impl Sub for RealElt {
    type Output = RealElt;
    fn sub(self, rhs: RealElt) -> RealElt {
        self + (-rhs)
    }
}

impl Mul for RealElt {
    type Output = RealElt;
    fn mul(self, rhs: RealElt) -> RealElt {
        if self.is_zero() || rhs.is_zero() {
            return RealElt::ZERO;
        }
        let a = ck_add(ck_mul(self.a, rhs.a), ck_mul(2, ck_mul(self.b, rhs.b)));
        let b = ck_add(ck_mul(self.a, rhs.b), ck_mul(self.b, rhs.a));
        reduce_real(a, b, self.k + rhs.k)
    }
}

impl fmt::Debug for RealElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.k)
    }
}

impl fmt::Display for RealElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            match self.b {
                0 => write!(f, "{}", self.a),
                _ => write!(f, "{}{:+}√2", self.a, self.b),
            }
        } else {
            write!(f, "({}{:+}√2)/√2^{}", self.a, self.b, self.k)
        }
    }
}

impl Serialize for RealElt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.a, self.b, self.k).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealElt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (a, b, k) = <(i64, i64, u32)>::deserialize(d)?;
        Ok(reduce_real(a, b, k))
    }
}

/// An element `(a + bi + c√2 + di√2) / √2^k` of ℤ[i, 1/√2].
///
/// Canonical when `k == 0` or at least one of `a`, `b` is odd.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ComplexElt {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    k: u32,
}

impl ComplexElt {
    pub const ZERO: ComplexElt = ComplexElt {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
        k: 0,
    };
    pub const ONE: ComplexElt = ComplexElt {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        k: 0,
    };
    pub const I: ComplexElt = ComplexElt {
        a: 0,
        b: 1,
        c: 0,
        d: 0,
        k: 0,
    };
    /// `e^{iπ/4} = (1 + i)/√2`
    pub const OMEGA: ComplexElt = ComplexElt {
        a: 1,
        b: 1,
        c: 0,
        d: 0,
        k: 1,
    };
    pub const INV_SQRT2: ComplexElt = ComplexElt {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        k: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64, k: u32) -> Self {
        c_reduce(a, b, c, d, k)
    }

    pub fn from_int(a: i64) -> Self {
        ComplexElt::new(a, 0, 0, 0, 0)
    }

    pub fn parts(&self) -> (i64, i64, i64, i64, u32) {
        (self.a, self.b, self.c, self.d, self.k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Smallest denominator exponent; only used to validate inputs.
    pub fn sde(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn re(&self) -> RealElt {
        RealElt::new(self.a, self.c, self.k)
    }

    pub fn im(&self) -> RealElt {
        RealElt::new(self.b, self.d, self.k)
    }

    pub fn from_parts(re: RealElt, im: RealElt) -> Self {
        let k = re.k().max(im.k());
        let (a, c) = re.numerator_at(k);
        let (b, d) = im.numerator_at(k);
        c_reduce(a, b, c, d, k)
    }

    pub fn conj(&self) -> Self {
        c_conj(*self)
    }

    fn scaled_to(&self, k: u32) -> (i64, i64, i64, i64) {
        let (a, c) = scale_sqrt2(self.a, self.c, k - self.k);
        let (b, d) = scale_sqrt2(self.b, self.d, k - self.k);
        (a, b, c, d)
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re().to_f64(), self.im().to_f64())
    }
}

/// Canonical reduction: while `k > 0` and `a`, `b` both even,
/// `(a, b, c, d) ← (c, d, a/2, b/2)` and `k ← k - 1`.
pub fn c_reduce(mut a: i64, mut b: i64, mut c: i64, mut d: i64, mut k: u32) -> ComplexElt {
    if a == 0 && b == 0 && c == 0 && d == 0 {
        return ComplexElt::ZERO;
    }
    while k > 0 && a % 2 == 0 && b % 2 == 0 {
        let (na, nb) = (c, d);
        c = a / 2;
        d = b / 2;
        a = na;
        b = nb;
        k -= 1;
    }
    ComplexElt { a, b, c, d, k }
}

pub fn c_add(x: ComplexElt, y: ComplexElt) -> ComplexElt {
    if x.is_zero() {
        return y;
    }
    if y.is_zero() {
        return x;
    }
    let k = x.k.max(y.k);
    let (xa, xb, xc, xd) = x.scaled_to(k);
    let (ya, yb, yc, yd) = y.scaled_to(k);
    c_reduce(
        ck_add(xa, ya),
        ck_add(xb, yb),
        ck_add(xc, yc),
        ck_add(xd, yd),
        k,
    )
}

/// Product in ℤ[√2] of `(p + q√2)(r + s√2)`.
#[inline]
fn zsqrt2_mul(p: i64, q: i64, r: i64, s: i64) -> (i64, i64) {
    (
        ck_add(ck_mul(p, r), ck_mul(2, ck_mul(q, s))),
        ck_add(ck_mul(p, s), ck_mul(q, r)),
    )
}

pub fn c_mul(x: ComplexElt, y: ComplexElt) -> ComplexElt {
    if x.is_zero() || y.is_zero() {
        return ComplexElt::ZERO;
    }
    // x = X + iX', y = Y + iY' with X = a + c√2, X' = b + d√2.
    let (rr_a, rr_b) = zsqrt2_mul(x.a, x.c, y.a, y.c);
    let (ii_a, ii_b) = zsqrt2_mul(x.b, x.d, y.b, y.d);
    let (ri_a, ri_b) = zsqrt2_mul(x.a, x.c, y.b, y.d);
    let (ir_a, ir_b) = zsqrt2_mul(x.b, x.d, y.a, y.c);
    c_reduce(
        ck_sub(rr_a, ii_a),
        ck_add(ri_a, ir_a),
        ck_sub(rr_b, ii_b),
        ck_add(ri_b, ir_b),
        x.k + y.k,
    )
}

pub fn c_conj(x: ComplexElt) -> ComplexElt {
    ComplexElt {
        a: x.a,
        b: -x.b,
        c: x.c,
        d: -x.d,
        k: x.k,
    }
}

impl Add for ComplexElt {
    type Output = ComplexElt;
    fn add(self, rhs: Self) -> Self {
        c_add(self, rhs)
    }
}

impl Sub for ComplexElt {
    type Output = ComplexElt;
    fn sub(self, rhs: Self) -> Self {
        c_add(self, -rhs)
    }
}

impl Mul for ComplexElt {
    type Output = ComplexElt;
    fn mul(self, rhs: Self) -> Self {
        c_mul(self, rhs)
    }
}

impl Neg for ComplexElt {
    type Output = ComplexElt;
    fn neg(self) -> Self {
        ComplexElt {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            k: self.k,
        }
    }
}

impl fmt::Debug for ComplexElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{},{},{},{}]",
            self.a, self.b, self.c, self.d, self.k
        )
    }
}

impl Serialize for ComplexElt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.a, self.b, self.c, self.d, self.k).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexElt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        if v.len() != 5 {
            return Err(D::Error::custom(format!(
                "ring element needs 5 integers [a,b,c,d,k], got {}",
                v.len()
            )));
        }
        let k = u32::try_from(v[4]).map_err(|_| D::Error::custom("negative exponent"))?;
        Ok(c_reduce(v[0], v[1], v[2], v[3], k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triple(x: RealElt) -> (i64, i64, u32) {
        (x.a(), x.b(), x.k())
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(triple(reduce_real(0, 0, 5)), (0, 0, 0));
        assert_eq!(triple(reduce_real(3, 1, 2)), (3, 1, 2));
        assert_eq!(triple(reduce_real(2, 3, 2)), (3, 1, 1));
    }

    #[test]
    fn reduce_preserves_value() {
        // (2 + 3√2)/2 == (3 + √2)/√2: cross-multiplied, (2 + 3√2)·√2 = 6 + 2√2 = 2·(3 + √2).
        let x = reduce_real(2, 3, 2);
        assert!((x.to_f64() - (2.0 + 3.0 * 2f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sde_examples() {
        assert_eq!(sde_real(RealElt::ZERO), 0);
        assert_eq!(sde_real(RealElt::new(1, 0, 1)), 1);
        assert_eq!(sde_real(RealElt::new(3, 1, 1)), 1);
    }

    #[test]
    fn halved_sum_examples() {
        let one = RealElt::ONE;
        assert_eq!(triple(halved_sum(one, one, true)), (0, 0, 0));
        assert_eq!(triple(halved_sum(one, one, false)), (0, 1, 0));
        let h = halved_sum(RealElt::new(1, 0, 1), RealElt::ZERO, false);
        assert_eq!(triple(h), (1, 0, 2));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(ring_compare(RealElt::ZERO, RealElt::ONE), Ordering::Less);
        assert_eq!(
            ring_compare(RealElt::new(1, 0, 1), RealElt::ONE),
            Ordering::Less
        );
        assert_eq!(
            ring_compare(RealElt::new(3, -2, 0), RealElt::ZERO),
            Ordering::Greater
        );
    }

    #[test]
    fn complex_examples() {
        assert_eq!(c_mul(ComplexElt::ONE, ComplexElt::I), ComplexElt::I);
        assert_eq!(c_mul(ComplexElt::OMEGA, ComplexElt::OMEGA), ComplexElt::I);
        assert_eq!(c_conj(ComplexElt::OMEGA).parts(), (1, -1, 0, 0, 1));
    }

    #[test]
    fn omega_has_order_eight() {
        let mut x = ComplexElt::ONE;
        for _ in 0..8 {
            x = x * ComplexElt::OMEGA;
        }
        assert_eq!(x, ComplexElt::ONE);
    }

    #[test]
    fn serde_reduces_on_ingest() {
        let x: RealElt = serde_json::from_str("[2,3,2]").unwrap();
        assert_eq!(serde_json::to_string(&x).unwrap(), "[3,1,1]");
        let z: ComplexElt = serde_json::from_str("[2,2,0,0,2]").unwrap();
        assert_eq!(z.parts(), (1, 1, 0, 0, 0));
        assert!(serde_json::from_str::<ComplexElt>("[1,2,3]").is_err());
    }

    fn real() -> impl Strategy<Value = RealElt> {
        (-40i64..40, -40i64..40, 0u32..8).prop_map(|(a, b, k)| RealElt::new(a, b, k))
    }

    fn complex() -> impl Strategy<Value = ComplexElt> {
        (-20i64..20, -20i64..20, -20i64..20, -20i64..20, 0u32..6)
            .prop_map(|(a, b, c, d, k)| ComplexElt::new(a, b, c, d, k))
    }

    proptest! {
        #[test]
        fn reduce_idempotent(a in -1000i64..1000, b in -1000i64..1000, k in 0u32..12) {
            let x = reduce_real(a, b, k);
            prop_assert_eq!(reduce_real(x.a(), x.b(), x.k()), x);
            let raw = RealElt { a, b, k };
            prop_assert!((x.to_f64() - raw.to_f64()).abs() < 1e-9);
        }

        #[test]
        fn compare_matches_floats(x in real(), y in real()) {
            let (fx, fy) = (x.to_f64(), y.to_f64());
            let ord = ring_compare(x, y);
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(ord, fx.partial_cmp(&fy).unwrap());
            }
            prop_assert_eq!(ord, ring_compare(y, x).reverse());
            prop_assert_eq!(ord == Ordering::Equal, x == y);
        }

        #[test]
        fn real_ring_laws(x in real(), y in real(), z in real()) {
            prop_assert_eq!((x + y) + z, x + (y + z));
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!(x - x, RealElt::ZERO);
        }

        #[test]
        fn complex_ring_laws(x in complex(), y in complex(), z in complex()) {
            prop_assert_eq!(c_mul(c_mul(x, y), z), c_mul(x, c_mul(y, z)));
            prop_assert_eq!(c_mul(x, c_add(y, z)), c_add(c_mul(x, y), c_mul(x, z)));
            prop_assert_eq!(c_conj(c_conj(x)), x);
            prop_assert_eq!(c_mul(x, y), c_mul(y, x));
            prop_assert_eq!(ComplexElt::from_parts(x.re(), x.im()), x);
        }
    }
}
