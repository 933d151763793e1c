//! Number types the exact profile calculus is generic over.
//!
//! `f64` is the working type. [`Rational`] (a reduced `i128` fraction) is used
//! by golden tests where identities must hold bit-for-bit.

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// Exact rational used for golden checks. Overflows panic, so keep
/// factorial indices small (sf_k for k <= 20 fits comfortably).
pub type Rational = Ratio<i128>;

/// Tolerance used when canonicalizing `f64` profiles.
pub const CANON_TOL: f64 = 1e-12;

pub trait Scalar:
    Copy + PartialOrd + Debug + Send + Sync + 'static + Num + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn from_u64(v: u64) -> Self;
    /// Nearest representable value; exact for `f64`, best rational
    /// approximation for [`Rational`].
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;

    /// Equality up to the canonicalization tolerance. Exact for rationals.
    fn near(self, other: Self) -> bool;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn half(self) -> Self {
        self / (Self::one() + Self::one())
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn near(self, other: Self) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= CANON_TOL * scale
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn from_u64(v: u64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn from_f64(v: f64) -> Self {
        Ratio::approximate_float(v).expect("finite value representable as i128 ratio")
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn abs(self) -> Self {
        Signed::abs(&self)
    }

    fn near(self, other: Self) -> bool {
        self == other
    }
}

/// Extended real: a finite value or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ext<T> {
    Finite(T),
    PosInf,
}

impl<T: Scalar> Ext<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::PosInf => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(v) => v.to_f64(),
            Ext::PosInf => f64::INFINITY,
        }
    }

    /// `a <= b` with `+inf` as the top element.
    pub fn le(self, other: Self) -> bool {
        match (self, other) {
            (_, Ext::PosInf) => true,
            (Ext::PosInf, Ext::Finite(_)) => false,
            (Ext::Finite(a), Ext::Finite(b)) => a <= b,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.le(other) {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self.le(other) {
            self
        } else {
            other
        }
    }
}

/// Domain bound of a profile: `v = +inf` beyond it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound<T> {
    At(T),
    Unbounded,
}

impl<T: Scalar> Bound<T> {
    pub fn contains(self, r: T) -> bool {
        match self {
            Bound::At(d) => r <= d,
            Bound::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Bound::At(d) => Some(d),
            Bound::Unbounded => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Bound::At(d) => d.to_f64(),
            Bound::Unbounded => f64::INFINITY,
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (Bound::Unbounded, b) | (b, Bound::Unbounded) => b,
            (Bound::At(a), Bound::At(b)) => Bound::At(a.min_of(b)),
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Bound::Unbounded, _) | (_, Bound::Unbounded) => Bound::Unbounded,
            (Bound::At(a), Bound::At(b)) => Bound::At(a.max_of(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_is_relative_for_f64() {
        assert!(1e6_f64.near(1e6 + 1e-7));
        assert!(!1.0_f64.near(1.0 + 1e-9));
    }

    #[test]
    fn rational_near_is_exact() {
        let a = Rational::new(1, 3);
        assert!(a.near(Rational::new(2, 6)));
        assert!(!a.near(Rational::new(333_333, 1_000_000)));
    }

    #[test]
    fn ext_ordering() {
        let a: Ext<f64> = Ext::Finite(2.0);
        assert!(a.le(Ext::PosInf));
        assert!(!Ext::<f64>::PosInf.le(a));
        assert_eq!(a.max(Ext::PosInf), Ext::PosInf);
        assert_eq!(a.min(Ext::Finite(1.0)), Ext::Finite(1.0));
    }
}
