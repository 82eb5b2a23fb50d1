use serde::{Deserialize, Serialize};

use crate::bounds::Curvatures;
use crate::oracles::{check_interpolation, Point, Sample, SubgradientPolicy, Violation};
use crate::CurvatureBounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Dca,
    Pgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub kind: RunKind,
    /// Number of iterations is `n + 1`; the run stores `n + 2` points.
    #[serde(rename = "N")]
    pub n: usize,
    pub policy: SubgradientPolicy,
    /// Curvatures of the base splitting `(f1, f2)`.
    pub curvatures: Curvatures,
    /// PGD stepsizes, one per step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepsizes: Option<Vec<f64>>,
    /// Curvature shift used at each step, relative to the base splitting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_lo: Option<f64>,
}

/// A recorded DCA or PGD run `x^0, ..., x^{N+1}`.
///
/// `g1[k]` and `g2[k]` are the subgradients used by the algorithm, so
/// `g1[k + 1] == g2[k]` holds bit for bit. When the run shifts curvature
/// between steps they belong to the shifted pair of that step; `f1vals` and
/// `f2vals` always refer to the base splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Point>,
    pub g1: Vec<Point>,
    pub g2: Vec<Point>,
    pub f1vals: Vec<f64>,
    pub f2vals: Vec<f64>,
    pub fvals: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `x^k - x^{k+1}`.
    pub fn dx(&self, k: usize) -> Point {
        &self.points[k] - &self.points[k + 1]
    }

    /// `g1^k - g2^k`.
    pub fn big_g(&self, k: usize) -> Point {
        &self.g1[k] - &self.g2[k]
    }

    /// `F(x^k) - F(x^{k+1})`.
    pub fn delta_f(&self, k: usize) -> f64 {
        self.fvals[k] - self.fvals[k + 1]
    }

    /// `F(x^0) - F(x^{N+1})`.
    pub fn total_decrease(&self) -> f64 {
        self.fvals[0] - self.fvals[self.len() - 1]
    }

    /// Initial gap: `F(x^0) - F_lo` if a lower bound is known, else the total decrease.
    pub fn initial_gap(&self) -> f64 {
        match self.meta.f_lo {
            Some(lo) => self.fvals[0] - lo,
            None => self.total_decrease(),
        }
    }

    pub fn min_gap_sq(&self) -> f64 {
        (0..self.len() - 1).map(|k| self.dx(k).norm_squared()).fold(f64::INFINITY, f64::min)
    }

    pub fn last_gap_sq(&self) -> f64 {
        self.dx(self.len() - 2).norm_squared()
    }

    fn shift_at(&self, k: usize) -> f64 {
        self.meta.shifts.as_ref().map_or(0.0, |s| s[k.min(s.len() - 1)])
    }

    /// First-order samples of the base `f1` and `f2` along the run.
    pub fn base_samples(&self) -> (Vec<Sample>, Vec<Sample>) {
        let last = self.len() - 1;
        let mut s1 = Vec::with_capacity(self.len());
        let mut s2 = Vec::with_capacity(self.len());
        for (j, x) in self.points.iter().enumerate() {
            let l1 = self.shift_at(j.saturating_sub(1));
            let l2 = self.shift_at(j.min(last - 1));
            s1.push(Sample { x: x.clone(), g: &self.g1[j] + x * l1, f: self.f1vals[j] });
            s2.push(Sample { x: x.clone(), g: &self.g2[j] + x * l2, f: self.f2vals[j] });
        }
        (s1, s2)
    }

    /// Interpolation violations of the recorded data against the base curvature bounds.
    pub fn interpolation_violations(&self, tol: f64) -> (Vec<Violation>, Vec<Violation>) {
        let c = &self.meta.curvatures;
        let (s1, s2) = self.base_samples();
        let b1 = CurvatureBounds::new(c.mu1, c.l1).expect("stored curvatures are valid");
        let b2 = CurvatureBounds::new(c.mu2, c.l2).expect("stored curvatures are valid");
        (check_interpolation(&b1, &s1, tol), check_interpolation(&b2, &s2, tol))
    }
}

/// `argmin_k |x^k - x^{k+1}|^2` and its value, first index on ties.
pub fn best_gradient_mapping(traj: &Trajectory) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for k in 0..traj.len().saturating_sub(1) {
        let v = traj.dx(k).norm_squared();
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// `argmin_k |g1^k - g2^k|` and its value, first index on ties.
pub fn gradient_residual(traj: &Trajectory) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for k in 0..traj.len() {
        let v = traj.big_g(k).norm();
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}
