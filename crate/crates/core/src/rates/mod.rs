//! Regime classification and rate formulas.

mod esum;
mod sample;
#[cfg(test)]
mod tests;

pub use esum::{e_sum, p_n};
pub use sample::{sample_curvatures, SampleDomain};

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bounds::{CurvatureBounds, Curvatures};
use crate::error::{Error, Result};
use crate::exact::{rat, sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

impl Regime {
    pub const ALL: [Regime; 6] = [Regime::P1, Regime::P2, Regime::P3, Regime::P4, Regime::P5, Regime::P6];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::P1 => "p1",
            Regime::P2 => "p2",
            Regime::P3 => "p3",
            Regime::P4 => "p4",
            Regime::P5 => "p5",
            Regime::P6 => "p6",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Regime::P1 | Regime::P2 => "f1, f2 convex; F nonconvex-nonconcave",
            Regime::P3 => "f1 strongly convex, f2 weakly convex; F nonconvex-nonconcave",
            Regime::P4 => "f1 strongly convex, f2 weakly convex; F convex",
            Regime::P5 => "f1 strongly convex, f2 weakly convex; F nonconcave",
            Regime::P6 => "f1 convex, f2 strongly convex; F concave",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown regime {s:?}"))
    }
}

/// How much is known about the regime beyond the two-step sublinear rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeStatus {
    /// The sublinear rate is exact for every `N`.
    TightAllN,
    /// A sharper linear rate is proven for every `N`.
    ProvenLinear,
    /// The sharper any-`N` rate is conjectured only.
    Conjectured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    #[serde(rename = "p")]
    pub p_value: f64,
    pub mu_sum: f64,
    pub status: RegimeStatus,
    pub description: String,
}

impl RegimeReport {
    /// `(mu1 + mu2) + p N`.
    pub fn denominator(&self, n: usize) -> f64 {
        self.mu_sum + self.p_value * n as f64
    }
}

/// Which statement a bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    /// Two-step sublinear rate, any regime.
    Sublinear,
    /// Linear rate on the convex, weakly convex `f2` domain.
    ConvexLinear,
    /// Linear rate when `L2 + mu2 <= 0`.
    StrongWeakLinear,
    /// Conjectured rate, `F` nonconvex-nonconcave with `mu2 < 0`.
    ConjNonconvex,
    /// Conjectured rate, `F` (strongly) convex.
    ConjConvex,
    /// Conjectured rate, `F` (strongly) concave.
    ConjConcave,
}

/// Quantity bounded by a rate: the smallest step or the last step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MinGap,
    LastGap,
}

/// Upper bound on `|x^k - x^{k+1}|^2 / 2` (minimum or last, per `metric`) given `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateValue {
    pub bound: f64,
    pub denominator: f64,
    pub formula: FormulaId,
    pub metric: Metric,
    pub proven: bool,
}

impl RateValue {
    fn new(formula: FormulaId, metric: Metric, denominator: f64, delta: f64, proven: bool) -> Self {
        let bound = if delta == 0.0 { 0.0 } else { delta / denominator };
        Self { bound, denominator, formula, metric, proven }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("initial gap must be finite and nonnegative, got {delta}")));
    }
    Ok(())
}

fn check_curvatures(c: &Curvatures) -> Result<()> {
    c.validate()?;
    if !(c.mu1 + c.mu2 > 0.0) {
        return Err(Error::Domain(format!("need mu1 + mu2 > 0, got {}", c.mu1 + c.mu2)));
    }
    Ok(())
}

/// Sign of `mu2 (L2 + mu1) + L2 mu1`, which is `>= 0` iff `mu2 >= -L2 mu1/(L2 + mu1)`.
fn threshold_sign(c: &Curvatures) -> Ordering {
    if c.l2 == f64::INFINITY {
        return sign(&(rat(c.mu2) + rat(c.mu1)));
    }
    let (m1, m2, l2) = (rat(c.mu1), rat(c.mu2), rat(c.l2));
    sign(&(m2 * (l2.clone() + m1.clone()) + l2 * m1))
}

/// `-L2 mu1 / (L2 + mu1)`, the p3/p5 boundary in `mu2`.
pub fn p5_threshold(mu1: f64, l2: f64) -> f64 {
    if l2 == f64::INFINITY {
        -mu1
    } else {
        -l2 * mu1 / (l2 + mu1)
    }
}

/// Value of `p_i` at `c`; no domain check.
pub fn regime_coefficient(regime: Regime, c: &Curvatures) -> f64 {
    let Curvatures { mu1, l1, mu2, l2 } = *c;
    match regime {
        Regime::P1 => {
            let inv = CurvatureBounds::new(mu2, l2).map(|b| b.inv_gap()).unwrap_or(0.0);
            mu1 + mu2 + (mu1 - mu2) * (mu1 - mu2) * inv
        }
        Regime::P2 => {
            let inv = CurvatureBounds::new(mu1, l1).map(|b| b.inv_gap()).unwrap_or(0.0);
            mu1 + mu2 + (mu1 - mu2) * (mu1 - mu2) * inv
        }
        Regime::P3 => {
            if l2 == f64::INFINITY {
                mu1 + mu2
            } else {
                (mu1 + mu2) * (l2 + mu1) / (l2 + mu2)
            }
        }
        Regime::P4 => mu1 * mu1 * (l2 + mu1) / (l2 * l2),
        Regime::P5 => mu1 * mu1 * (mu1 + mu2) / (mu2 * mu2),
        Regime::P6 => mu2 * mu2 * (l1 + mu2) / (l1 * l1),
    }
}

/// Active regime; on shared boundaries the lowest index wins.
pub fn classify_regime(c: &Curvatures) -> Result<RegimeReport> {
    check_curvatures(c)?;
    let Curvatures { mu1, l1, mu2, l2 } = *c;
    let regime = if mu2 >= 0.0 {
        if mu2 <= mu1 {
            if l2 > mu1 {
                Regime::P1
            } else {
                Regime::P4
            }
        } else if l1 > mu2 {
            Regime::P2
        } else {
            Regime::P6
        }
    } else if threshold_sign(c) != Ordering::Less {
        if l2 > mu1 {
            Regime::P3
        } else {
            Regime::P4
        }
    } else {
        Regime::P5
    };
    let status = match regime {
        Regime::P1 | Regime::P2 | Regime::P3 => RegimeStatus::TightAllN,
        Regime::P4 => RegimeStatus::ProvenLinear,
        Regime::P5 if l2 + mu2 <= 0.0 => RegimeStatus::ProvenLinear,
        Regime::P5 | Regime::P6 => RegimeStatus::Conjectured,
    };
    Ok(RegimeReport {
        regime,
        p_value: regime_coefficient(regime, c),
        mu_sum: mu1 + mu2,
        status,
        description: regime.description().to_string(),
    })
}

/// Two-step sublinear bound `delta / ((mu1 + mu2) + p N)` on the smallest step.
pub fn sublinear_rate_bound(c: &Curvatures, n: usize, delta: f64) -> Result<RateValue> {
    check_delta(delta)?;
    if n < 1 {
        return Err(Error::Domain("need N >= 1".into()));
    }
    let report = classify_regime(c)?;
    Ok(RateValue::new(FormulaId::Sublinear, Metric::MinGap, report.denominator(n), delta, true))
}

/// Domain of the proven linear rate with ratio `L2/mu1`.
pub fn in_convex_linear_domain(c: &Curvatures) -> bool {
    c.mu1 > 0.0
        && c.l2 >= 0.0
        && c.l2 <= c.mu1
        && c.mu1 + c.mu2 > 0.0
        && (c.mu2 >= 0.0 || threshold_sign(c) != Ordering::Less)
}

/// Domain of the proven linear rate with ratio `mu2/mu1`.
pub fn in_strong_weak_linear_domain(c: &Curvatures) -> bool {
    c.mu1 + c.mu2 > 0.0 && c.l2 + c.mu2 <= 0.0
}

/// Sharpest any-`N` rate: proven on the two linear-rate domains, conjectured elsewhere.
///
/// Fails when `mu2 >= 0` and `F` is nonconvex-nonconcave; the sublinear rate
/// covers that case.
pub fn tight_rate_bound(c: &Curvatures, n: usize, delta: f64) -> Result<RateValue> {
    check_delta(delta)?;
    check_curvatures(c)?;
    if n < 1 {
        return Err(Error::Domain("need N >= 1".into()));
    }
    let Curvatures { mu1, l1, mu2, l2 } = *c;
    let base = mu1 + mu2;
    if l2 <= mu1 {
        if in_convex_linear_domain(c) {
            let den = base + mu1 * e_sum(n, l2 / mu1);
            return Ok(RateValue::new(FormulaId::ConvexLinear, Metric::LastGap, den, delta, true));
        }
        if in_strong_weak_linear_domain(c) {
            let den = base + mu1 * e_sum(n, mu2 / mu1);
            return Ok(RateValue::new(FormulaId::StrongWeakLinear, Metric::LastGap, den, delta, true));
        }
        let den = base + mu1 * e_sum(n, l2 / mu1).min(e_sum(n, mu2 / mu1));
        return Ok(RateValue::new(FormulaId::ConjConvex, Metric::MinGap, den, delta, false));
    }
    if l1 <= mu2 {
        let den = base + mu2 * e_sum(n, l1 / mu2).min(e_sum(n, mu1 / mu2));
        return Ok(RateValue::new(FormulaId::ConjConcave, Metric::MinGap, den, delta, false));
    }
    if mu2 < 0.0 {
        let (eta, rho) = (l2 / mu1, mu2 / mu1);
        let pn = p_n(eta, rho, n)?;
        let den = base + mu1 * pn.min(e_sum(n, rho));
        return Ok(RateValue::new(FormulaId::ConjNonconvex, Metric::MinGap, den, delta, false));
    }
    Err(Error::Domain(format!(
        "no any-N formula for {c} (F nonconvex-nonconcave with mu2 >= 0); use the sublinear rate"
    )))
}

/// Every bound known to hold at `c`: the sublinear rate and any linear rate whose domain contains `c`.
pub fn proven_bounds(c: &Curvatures, n: usize, delta: f64) -> Result<Vec<RateValue>> {
    let mut out = vec![sublinear_rate_bound(c, n, delta)?];
    if let Ok(t) = tight_rate_bound(c, n, delta) {
        if t.proven {
            out.push(t);
        }
    }
    Ok(out)
}

/// Proven bounds plus the conjectured one, if any.
pub fn all_bounds(c: &Curvatures, n: usize, delta: f64) -> Result<Vec<RateValue>> {
    let mut out = vec![sublinear_rate_bound(c, n, delta)?];
    if let Ok(t) = tight_rate_bound(c, n, delta) {
        out.push(t);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl From<Ordering> for Sign {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// Exact sign of `T1 = mu1 ((L2 + mu1)/L2^2 - (mu1 + mu2)/mu2^2)`, defined for `mu2 < 0`.
pub fn t1_sign(mu1: f64, mu2: f64, l2: f64) -> Result<Sign> {
    if !(mu2 < 0.0) {
        return Err(Error::Domain(format!("T1 needs mu2 < 0, got {mu2}")));
    }
    if l2.is_nan() || l2 == f64::NEG_INFINITY || !mu1.is_finite() {
        return Err(Error::Domain("curvatures must be numbers".into()));
    }
    let m1 = rat(mu1);
    let m2 = rat(mu2);
    let s = if l2 == f64::INFINITY {
        // (L2 + mu1)/L2^2 vanishes
        sign(&-(m1.clone() * (m1 + m2)))
    } else if l2 == 0.0 {
        sign(&m1)
    } else {
        let l = rat(l2);
        let v: BigRational = m1.clone() * ((l.clone() + m1.clone()) * m2.clone() * m2.clone() - (m1 + m2) * l.clone() * l);
        sign(&v)
    };
    Ok(s.into())
}

/// Stepsize at which the PGD splitting crosses the p3/p5 boundary.
///
/// Bisects on `u = 1/gamma` over `(max((L_phi - mu_h)/2, 0), L_phi)`, where the
/// mapped curvatures give `mu2 (L2 + mu1) + L2 mu1 = (u - L_phi)(2u - mu_phi + mu_h) + (u - mu_phi)(u + mu_h)`.
pub fn pgd_threshold_stepsize(l_phi: f64, mu_phi: f64, mu_h: f64) -> Result<f64> {
    if !(l_phi > 0.0) || !l_phi.is_finite() || !(mu_phi < l_phi) || !(mu_h >= 0.0) {
        return Err(Error::Domain(format!(
            "need L_phi > 0, mu_phi < L_phi, mu_h >= 0; got {l_phi}, {mu_phi}, {mu_h}"
        )));
    }
    let q = |u: f64| (u - l_phi) * (2.0 * u - mu_phi + mu_h) + (u - mu_phi) * (u + mu_h);
    let mut lo = ((l_phi - mu_h) / 2.0).max(0.0);
    let mut hi = l_phi;
    let (qlo, qhi) = (q(lo), q(hi));
    if !(qlo < 0.0 && qhi > 0.0) {
        return Err(Error::NoRoot { lo: 1.0 / hi, hi: if lo > 0.0 { 1.0 / lo } else { f64::INFINITY } });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-12 * f64::EPSILON * hi {
            break;
        }
        if q(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(1.0 / (0.5 * (lo + hi)))
}
