//! Dual-mode scalar arithmetic.
//!
//! `Scalar` is either an arbitrary-precision rational (`Exact`) or a binary64
//! float (`Float`). Exact arithmetic is closed and lossless; float comparisons
//! pass through a one-sided tolerance. The two modes never mix inside a single
//! computation: operations validate mode agreement at their entry points, and
//! the arithmetic itself panics on a mode mismatch so bugs surface immediately.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default one-sided tolerance for float-mode inequality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Numeric mode of a scalar or of a whole problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => write!(f, "exact"),
            ScalarMode::Float => write!(f, "float"),
        }
    }
}

/// A number in one of the two supported modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::zero()),
            ScalarMode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::one()),
            ScalarMode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(n: i64, mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            ScalarMode::Float => Scalar::Float(n as f64),
        }
    }

    /// The fraction `num/den` in the given mode. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64, mode: ScalarMode) -> Self {
        assert!(den != 0, "zero denominator");
        match mode {
            ScalarMode::Exact => {
                Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            ScalarMode::Float => Scalar::Float(num as f64 / den as f64),
        }
    }

    pub fn exact(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    /// Converts a float value into the given mode. Exact conversion uses the
    /// literal binary expansion of the float, which is itself a rational.
    pub fn from_f64(v: f64, mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(
                BigRational::from_float(v).expect("finite float converts to a rational"),
            ),
            ScalarMode::Float => Scalar::Float(v),
        }
    }

    /// Parses the canonical exact form: an integer `p` or a fraction `p/q`.
    /// Non-canonical fractions like `2/4` are reduced deterministically.
    pub fn parse_exact(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("malformed rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::InvalidSpec(format!("zero denominator in {s:?}")));
        }
        Ok(Scalar::Exact(BigRational::new(num, den)))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => *v == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(v) => *v < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }

    /// Integer power, exact in exact mode.
    pub fn powi(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let mut acc = BigRational::one();
                for _ in 0..exp {
                    acc *= r;
                }
                Scalar::Exact(acc)
            }
            Scalar::Float(v) => Scalar::Float(v.powi(exp as i32)),
        }
    }

    /// The value as a u32 when it is an exact positive integer.
    pub fn as_positive_integer(&self) -> Option<u32> {
        match self {
            Scalar::Exact(r) if r.is_integer() && r.is_positive() => r.numer().to_u32(),
            _ => None,
        }
    }

    pub fn is_positive_integer(&self) -> bool {
        self.as_positive_integer().is_some()
    }

    /// Total order within one mode. Panics on mixed modes or NaN; inputs are
    /// validated before any sorting happens.
    pub fn cmp_same_mode(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.partial_cmp(b).expect("NaN in scalar comparison")
            }
            _ => panic!("mixed scalar modes in comparison"),
        }
    }

    /// One-sided inequality check: `self <= rhs` passes exactly in exact mode
    /// and within `tau` in float mode (`self <= rhs + tau`).
    pub fn le_tol(&self, rhs: &Scalar, tau: f64) -> bool {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            (Scalar::Float(a), Scalar::Float(b)) => *a <= *b + tau,
            _ => panic!("mixed scalar modes in comparison"),
        }
    }

    /// Strict margin check: `self > rhs` beyond the tolerance. Exact mode is
    /// a plain strict comparison; float mode requires `self > rhs + tau`.
    pub fn gt_margin(&self, rhs: &Scalar, tau: f64) -> bool {
        !self.le_tol(rhs, tau)
    }

    /// Equality within tolerance (exact equality in exact mode).
    pub fn eq_tol(&self, rhs: &Scalar, tau: f64) -> bool {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => (a - b).abs() <= tau,
            _ => panic!("mixed scalar modes in comparison"),
        }
    }

    /// Renders the canonical text form: `p/q` (or plain `p` for integers) in
    /// exact mode, shortest round-trip decimal in float mode.
    pub fn render(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(v) => format!("{v}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => panic!("mixed scalar modes in arithmetic"),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.render()),
            Scalar::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl<'de> Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a \"p/q\" string (exact) or a number (float)")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Scalar, E> {
                Scalar::parse_exact(s).map_err(|e| E::custom(e.to_string()))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite scalar"));
                }
                Ok(Scalar::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// Sorts and deduplicates scalars of a single mode in place.
pub fn sort_dedup(values: &mut Vec<Scalar>) {
    values.sort_by(|a, b| a.cmp_same_mode(b));
    values.dedup_by(|a, b| a.cmp_same_mode(b) == Ordering::Equal);
}

/// Verifies that every scalar produced by the iterator shares `mode`.
pub fn require_mode<'a>(
    mode: ScalarMode,
    values: impl IntoIterator<Item = &'a Scalar>,
    context: &str,
) -> Result<()> {
    for v in values {
        if v.mode() != mode {
            return Err(Error::MixedModes(context.to_string()));
        }
    }
    Ok(())
}

/// The tolerance as a scalar value in the given mode, for checks that compare
/// a computed quantity against the tolerance itself.
pub fn tolerance_value(tau: f64, mode: ScalarMode) -> Scalar {
    Scalar::from_f64(tau, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_canonicalizes() {
        let s = Scalar::parse_exact("2/4").unwrap();
        assert_eq!(s.render(), "1/2");
        let s = Scalar::parse_exact("-6/4").unwrap();
        assert_eq!(s.render(), "-3/2");
        let s = Scalar::parse_exact("3/-6").unwrap();
        assert_eq!(s.render(), "-1/2");
        let s = Scalar::parse_exact("7").unwrap();
        assert_eq!(s.render(), "7");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Scalar::parse_exact("1/0").is_err());
        assert!(Scalar::parse_exact("a/b").is_err());
        assert!(Scalar::parse_exact("").is_err());
        assert!(Scalar::parse_exact("1.5").is_err());
    }

    #[test]
    fn exact_arithmetic_is_lossless() {
        let a = Scalar::from_ratio(1, 3, ScalarMode::Exact);
        let b = Scalar::from_ratio(1, 6, ScalarMode::Exact);
        let sum = &a + &b;
        assert_eq!(sum.render(), "1/2");
        let back = &sum - &b;
        assert_eq!(back, a);
    }

    #[test]
    fn float_le_is_one_sided() {
        let a = Scalar::Float(1.0 + 5e-10);
        let b = Scalar::Float(1.0);
        assert!(a.le_tol(&b, 1e-9));
        assert!(!a.le_tol(&b, 1e-10));
        // exact mode ignores the tolerance
        let a = Scalar::from_ratio(1, 1, ScalarMode::Exact);
        let b = Scalar::from_ratio(1, 1, ScalarMode::Exact);
        assert!(a.le_tol(&b, 0.0));
    }

    #[test]
    #[should_panic(expected = "mixed scalar modes")]
    fn mixed_mode_arithmetic_panics() {
        let _ = &Scalar::Float(1.0) + &Scalar::from_int(1, ScalarMode::Exact);
    }

    #[test]
    fn sort_dedup_orders_ascending() {
        let mut v = vec![
            Scalar::from_ratio(3, 4, ScalarMode::Exact),
            Scalar::from_ratio(1, 2, ScalarMode::Exact),
            Scalar::from_ratio(6, 8, ScalarMode::Exact),
        ];
        sort_dedup(&mut v);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].render(), "1/2");
        assert_eq!(v[1].render(), "3/4");
    }

    #[test]
    fn powi_exact() {
        let s = Scalar::from_ratio(2, 3, ScalarMode::Exact);
        assert_eq!(s.powi(3).render(), "8/27");
        assert_eq!(s.powi(0).render(), "1");
    }
}
