//! Curvature intervals `[mu, L]` of the classes `F_{mu,L}`.
//!
//! The upper bound may be `+inf` (nonsmooth functions). It is stored as
//! `f64::INFINITY`; every expression involving `1/(L - mu)` goes through
//! [`CurvatureBounds::inv_gap`], which maps the infinite case to zero.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A curvature interval with `mu < L`, `mu` finite and `L` possibly `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds", into = "RawBounds")]
pub struct CurvatureBounds {
    mu: f64,
    l: f64,
}

impl CurvatureBounds {
    pub fn new(mu: f64, l: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidBounds(format!("mu must be finite, got {mu}")));
        }
        if l.is_nan() || l == f64::NEG_INFINITY {
            return Err(Error::InvalidBounds(format!("L must be a number or +inf, got {l}")));
        }
        if mu >= l {
            return Err(Error::InvalidBounds(format!("need mu < L, got mu={mu}, L={l}")));
        }
        Ok(Self { mu, l })
    }

    /// Bounds with `L = +inf`.
    pub fn nonsmooth(mu: f64) -> Result<Self> {
        Self::new(mu, f64::INFINITY)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn is_smooth(&self) -> bool {
        self.l.is_finite()
    }

    /// `1/(L - mu)`, zero when `L = +inf`.
    pub fn inv_gap(&self) -> f64 {
        if self.l.is_finite() {
            1.0 / (self.l - self.mu)
        } else {
            0.0
        }
    }

    pub fn contains(&self, curvature: f64, tol: f64) -> bool {
        curvature >= self.mu - tol && curvature <= self.l + tol
    }

    /// Bounds of `f - lambda * |x|^2 / 2`.
    pub fn shifted(&self, lambda: f64) -> Self {
        Self { mu: self.mu - lambda, l: self.l - lambda }
    }

    /// Bounds of `-f`; requires finite `L`.
    pub fn negated(&self) -> Result<Self> {
        if !self.is_smooth() {
            return Err(Error::InvalidBounds("cannot negate a function with L = +inf".into()));
        }
        Ok(Self { mu: -self.l, l: -self.mu })
    }
}

impl fmt::Display for CurvatureBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.mu, fmt_ext(self.l))
    }
}

pub(crate) fn fmt_ext(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

/// Parses a curvature value: a decimal number or `inf`.
pub fn parse_ext(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| format!("invalid number {s:?}: {e}")),
    }
}

#[derive(Serialize, Deserialize)]
struct RawBounds {
    mu: f64,
    #[serde(rename = "L", with = "ext_real")]
    l: f64,
}

impl TryFrom<RawBounds> for CurvatureBounds {
    type Error = Error;
    fn try_from(raw: RawBounds) -> Result<Self> {
        CurvatureBounds::new(raw.mu, raw.l)
    }
}

impl From<CurvatureBounds> for RawBounds {
    fn from(b: CurvatureBounds) -> Self {
        RawBounds { mu: b.mu, l: b.l }
    }
}

/// Serde adapter: `+inf` is written as the string `"inf"`; numbers pass through.
pub mod ext_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        struct ExtVisitor;
        impl Visitor<'_> for ExtVisitor {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
                match parse_ext(v).map_err(E::custom)? {
                    x if x == f64::INFINITY => Ok(x),
                    x => Err(E::custom(format!("only \"inf\" may be given as a string, got {x}"))),
                }
            }
        }
        d.deserialize_any(ExtVisitor)
    }
}

/// The four curvature parameters `(mu1, L1, mu2, L2)` of a DC pair `f1 - f2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvatures {
    pub mu1: f64,
    #[serde(rename = "L1", with = "ext_real")]
    pub l1: f64,
    pub mu2: f64,
    #[serde(rename = "L2", with = "ext_real")]
    pub l2: f64,
}

impl Curvatures {
    pub fn new(mu1: f64, l1: f64, mu2: f64, l2: f64) -> Self {
        Self { mu1, l1, mu2, l2 }
    }

    pub fn from_bounds(f1: &CurvatureBounds, f2: &CurvatureBounds) -> Self {
        Self::new(f1.mu(), f1.l(), f2.mu(), f2.l())
    }

    pub fn f1(&self) -> Result<CurvatureBounds> {
        CurvatureBounds::new(self.mu1, self.l1)
    }

    pub fn f2(&self) -> Result<CurvatureBounds> {
        CurvatureBounds::new(self.mu2, self.l2)
    }

    /// Both intervals well formed and `mu1 >= 0`.
    pub fn validate(&self) -> Result<()> {
        self.f1()?;
        self.f2()?;
        if self.mu1 < 0.0 {
            return Err(Error::Domain(format!("mu1 must be nonnegative, got {}", self.mu1)));
        }
        Ok(())
    }

    pub fn mu_sum(&self) -> f64 {
        self.mu1 + self.mu2
    }

    /// The mirrored quadruple `(mu2, L2, mu1, L1)` describing `-F = f2 - f1`.
    pub fn swapped(&self) -> Self {
        Self::new(self.mu2, self.l2, self.mu1, self.l1)
    }
}

impl fmt::Display for Curvatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu1={}, L1={}, mu2={}, L2={}",
            self.mu1,
            fmt_ext(self.l1),
            self.mu2,
            fmt_ext(self.l2)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_or_degenerate_intervals() {
        assert!(CurvatureBounds::new(1.0, 1.0).is_err());
        assert!(CurvatureBounds::new(2.0, 1.0).is_err());
        assert!(CurvatureBounds::new(f64::NEG_INFINITY, 1.0).is_err());
        assert!(CurvatureBounds::new(f64::NAN, 1.0).is_err());
        assert!(CurvatureBounds::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn infinite_l_has_zero_inverse_gap() {
        let b = CurvatureBounds::nonsmooth(0.5).unwrap();
        assert_eq!(b.inv_gap(), 0.0);
        assert_eq!(CurvatureBounds::new(1.0, 3.0).unwrap().inv_gap(), 0.5);
    }

    #[test]
    fn json_uses_inf_string() {
        let b = CurvatureBounds::nonsmooth(0.0).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"mu":0.0,"L":"inf"}"#);
        let back: CurvatureBounds = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<CurvatureBounds>(r#"{"mu":1,"L":1}"#).is_err());
        assert!(serde_json::from_str::<CurvatureBounds>(r#"{"mu":1,"L":"-inf"}"#).is_err());
    }

    #[test]
    fn shift_moves_both_ends() {
        let b = CurvatureBounds::new(1.0, 4.0).unwrap().shifted(1.5);
        assert_eq!((b.mu(), b.l()), (-0.5, 2.5));
        let n = CurvatureBounds::new(-1.0, 2.0).unwrap().negated().unwrap();
        assert_eq!((n.mu(), n.l()), (-2.0, 1.0));
    }
}
