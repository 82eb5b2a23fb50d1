use serde::{Deserialize, Serialize};

use super::lemmas::{certificate, LemmaId};
use super::{build_base, build_c1, build_c2, ExactCurvatures};
use crate::engine::Trajectory;
use crate::error::{Error, Result};

/// `LHS - RHS` of the lemma statement at iterations `k, k+1, k+2` of `traj`,
/// using the curvatures recorded in the trajectory.
pub fn numeric_check(lemma: LemmaId, traj: &Trajectory, k: usize) -> Result<f64> {
    if k + 2 >= traj.len() {
        return Err(Error::Index { index: k + 2, len: traj.len() });
    }
    let c = ExactCurvatures::<f64>::from_curvatures(&traj.meta.curvatures)?;
    let cert = certificate(lemma, &c)?;
    let df = traj.delta_f(k + cert.base_shift);
    Ok(df - 0.5 * cert.claim[0] * traj.dx(k).norm_squared() - 0.5 * cert.claim[1] * traj.dx(k + 1).norm_squared())
}

/// Terms of the sublinear-rate telescoping on one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Telescoping {
    /// Lemma slacks at `k = 0..N-1`.
    pub slacks: Vec<f64>,
    /// Slack of the one-step decrease on the step not covered by a lemma.
    pub final_slack: f64,
    /// Sum of the claimed coefficients times the half squared steps.
    pub weighted_gaps: f64,
    pub total_decrease: f64,
}

impl Telescoping {
    /// `sum slacks + final - (decrease - weighted)`, zero up to rounding.
    pub fn identity_error(&self) -> f64 {
        self.slacks.iter().sum::<f64>() + self.final_slack - (self.total_decrease - self.weighted_gaps)
    }
}

/// Sums a regime lemma over a whole run and closes it with the one-step decrease.
pub fn telescope(lemma: LemmaId, traj: &Trajectory) -> Result<Telescoping> {
    if matches!(lemma, LemmaId::Thm31(_) | LemmaId::Thm32(_)) {
        return Err(Error::Domain("telescoping applies to the regime lemmas".into()));
    }
    if traj.len() < 2 {
        return Err(Error::Index { index: 1, len: traj.len() });
    }
    let n = traj.len() - 2;
    let c = ExactCurvatures::<f64>::from_curvatures(&traj.meta.curvatures)?;
    let cert = certificate(lemma, &c)?;
    let gap = |k: usize| 0.5 * traj.dx(k).norm_squared();
    let mut slacks = Vec::with_capacity(n);
    let mut weighted = 0.0;
    for k in 0..n {
        slacks.push(numeric_check(lemma, traj, k)?);
        weighted += cert.claim[0] * gap(k) + cert.claim[1] * gap(k + 1);
    }
    let last = if cert.base_shift == 0 { n } else { 0 };
    let base = c.mu1 + c.mu2;
    let final_slack = traj.delta_f(last) - base * gap(last);
    weighted += base * gap(last);
    Ok(Telescoping { slacks, final_slack, weighted_gaps: weighted, total_decrease: traj.total_decrease() })
}

/// Slacks of `B[k]`, `C_f1[k]` and `C_f2[k]` at step `k` of a run.
///
/// Runs with curvature shifts are rejected since the recorded subgradients
/// then belong to different splittings.
pub fn step_slacks(traj: &Trajectory, k: usize) -> Result<[f64; 3]> {
    if k + 1 >= traj.len() {
        return Err(Error::Index { index: k + 1, len: traj.len() });
    }
    if traj.meta.shifts.as_ref().is_some_and(|s| s.iter().any(|&l| l != 0.0)) {
        return Err(Error::Domain("run uses curvature shifts".into()));
    }
    let c = ExactCurvatures::<f64>::from_curvatures(&traj.meta.curvatures)?;
    let zero = traj.points[0].clone() * 0.0;
    let dx = |j: usize| if j + 1 < traj.len() { traj.dx(j) } else { zero.clone() };
    let g = |j: usize| if j < traj.len() { traj.big_g(j) } else { zero.clone() };
    let vectors = [dx(k), dx(k + 1), g(k), g(k + 1), g(k + 2)];
    let df = |j: usize| if j + 1 < traj.len() { traj.delta_f(j) } else { 0.0 };
    let scalars = [df(k), df(k + 1)];
    Ok([
        build_base(&c, 0)?.evaluate(&vectors, &scalars),
        build_c1(&c, 0)?.evaluate(&vectors, &scalars),
        build_c2(&c, 0)?.evaluate(&vectors, &scalars),
    ])
}
