//! Scalars usable by the certificate algebra, and exact sign evaluation.
//!
//! Every finite `f64` is a dyadic rational, so converting to [`BigRational`]
//! is lossless. Sign decisions on regime boundaries go through this module to
//! avoid misclassifying points that sit exactly on a boundary.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::Neg;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Field operations needed by the certificate checker.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync {
    /// Lossless for rationals, identity for floats. Panics on non-finite input.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Tolerance for "is zero" and "is nonnegative" decisions.
    fn tolerance() -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_f64(v as f64)
    }

    fn is_neg_beyond_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_negligible(&self) -> bool {
        let t = Self::tolerance();
        *self <= t && *self >= -t
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tolerance() -> Self {
        1e-12
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(|| panic!("cannot convert {v} to a rational"))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn tolerance() -> Self {
        BigRational::zero()
    }
}

/// Exact conversion of a finite float.
pub fn rat(v: f64) -> BigRational {
    <BigRational as Scalar>::from_f64(v)
}

/// Sign of an exact rational.
pub fn sign(v: &BigRational) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}
