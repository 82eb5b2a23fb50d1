//! Randomized worst-case search and bound-soundness scans.

mod families;
mod interp;
mod scan;

pub use families::SearchFamily;
pub use scan::{grid, sweep, violation_scan, CellResult, FailureRecord, ScanReport, ScanSpec, SweepRow};

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::Curvatures;
use crate::engine::{dca_run, Trajectory};
use crate::error::{Error, Result};
use crate::oracles::SubgradientPolicy;
use crate::rates::{all_bounds, classify_regime, FormulaId, Metric, RateValue, RegimeReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub curvatures: Curvatures,
    #[serde(rename = "N")]
    pub n: usize,
    pub family: SearchFamily,
    /// Number of multistart trials.
    pub budget: usize,
    pub seed: u64,
    /// Stop after the first batch of trials reaching this ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_at: Option<f64>,
    /// Cost evaluations per local refinement; defaults to `400 n_params`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evals_per_trial: Option<usize>,
}

impl SearchSpec {
    pub fn new(curvatures: Curvatures, n: usize, family: SearchFamily, budget: usize, seed: u64) -> Self {
        Self { curvatures, n, family, budget, seed, stop_at: None, evals_per_trial: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub best_ratio: f64,
    pub best_trial: usize,
    pub trials_run: usize,
    /// Bound attaining the ratio.
    pub binding: FormulaId,
    pub bounds: Vec<RateValue>,
    pub regime: RegimeReport,
    pub family: SearchFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Trajectory>,
}

/// `max_i (gap_i / 2) den_i / delta` over the bounds, with the bound attaining it.
///
/// `gaps` are the squared step lengths `|x^k - x^{k+1}|^2`.
pub fn bound_ratio(gaps: &[f64], delta: f64, bounds: &[RateValue]) -> (f64, Option<FormulaId>) {
    if !(delta > 0.0) || gaps.is_empty() {
        return (0.0, None);
    }
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let last = *gaps.last().expect("nonempty");
    let mut best = (0.0, None);
    for b in bounds {
        let lhs = match b.metric {
            Metric::MinGap => min,
            Metric::LastGap => last,
        };
        let r = 0.5 * lhs * b.denominator / delta;
        if best.1.is_none() || r > best.0 {
            best = (r, Some(b.formula));
        }
    }
    best
}

/// Squared step lengths of a run.
pub fn gaps_of(traj: &Trajectory) -> Vec<f64> {
    (0..traj.len() - 1).map(|k| traj.dx(k).norm_squared()).collect()
}

/// Ratio of a trajectory against `bounds`, with `delta = F(x^0) - F(x^{N+1})`.
pub fn trajectory_ratio(traj: &Trajectory, bounds: &[RateValue]) -> (f64, Option<FormulaId>) {
    bound_ratio(&gaps_of(traj), traj.total_decrease(), bounds)
}

struct Problem<'a> {
    spec: &'a SearchSpec,
    bounds: &'a [RateValue],
    policy: SubgradientPolicy,
}

const INFEASIBLE_TOL: f64 = 1e-12;

/// Whether the decrease of a run is above round-off in its function values.
pub(crate) fn resolved(t: &Trajectory) -> bool {
    let scale = 1.0 + t.f1vals[0].abs() + t.f2vals[0].abs();
    t.total_decrease() > 1e-9 * scale
}

impl Problem<'_> {
    /// Negated ratio; infeasible interpolation data cost their relative cycle weight.
    fn cost_of(&self, p: &[f64]) -> f64 {
        let c = &self.spec.curvatures;
        match self.spec.family {
            SearchFamily::Interp { dim } => {
                let data = interp::unpack(p, self.spec.n, dim);
                let ev = interp::evaluate(&data, c);
                let s: f64 = ev.gaps.iter().sum();
                if !(s > 0.0) || !s.is_finite() {
                    return 0.0;
                }
                if ev.penalty > INFEASIBLE_TOL * s {
                    return ev.penalty / s;
                }
                -bound_ratio(&ev.gaps, ev.delta, self.bounds).0
            }
            fam => match families::build(fam, p, c).and_then(|(inst, x0)| dca_run(&inst, &x0, self.spec.n, self.policy)) {
                Ok(t) if resolved(&t) => {
                    let r = trajectory_ratio(&t, self.bounds).0;
                    if r.is_finite() {
                        -r
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            },
        }
    }

    fn witness(&self, p: &[f64]) -> Option<Trajectory> {
        let c = &self.spec.curvatures;
        match self.spec.family {
            SearchFamily::Interp { dim } => {
                let data = interp::unpack(p, self.spec.n, dim);
                let ev = interp::evaluate(&data, c);
                Some(interp::witness(&data, &ev, c))
            }
            fam => families::build(fam, p, c).and_then(|(inst, x0)| dca_run(&inst, &x0, self.spec.n, self.policy)).ok(),
        }
    }
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.cost_of(p))
    }
}

/// Nelder-Mead with dimension-adapted coefficients, from a simplex around `x0`.
fn refine(problem: &Problem<'_>, x0: Vec<f64>, step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let nf = n as f64;
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += step * (1.0 + x0[i].abs());
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .and_then(|s| s.with_alpha(1.0))
        .and_then(|s| s.with_gamma(1.0 + 2.0 / nf))
        .and_then(|s| s.with_rho((0.75 - 0.5 / nf).min(0.5)))
        .and_then(|s| s.with_sigma((1.0 - 1.0 / nf).max(0.5)))
        .expect("valid Nelder-Mead coefficients");
    let iters = (max_evals / 2).max(1) as u64;
    match Executor::new(ProblemRef(problem), solver).configure(|s| s.max_iters(iters)).run() {
        Ok(res) => {
            let st = res.state();
            let p = st.best_param.clone().unwrap_or(x0);
            (p, st.best_cost)
        }
        Err(_) => {
            let c = problem.cost_of(&x0);
            (x0, c)
        }
    }
}

struct ProblemRef<'a, 'b>(&'a Problem<'b>);

impl CostFunction for ProblemRef<'_, '_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        self.0.cost(p)
    }
}

fn trial(problem: &Problem<'_>, seed: u64, index: usize, max_evals: usize) -> (f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = problem.spec.family.n_params(problem.spec.n);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (p, c) = refine(problem, x0, 0.25, max_evals / 2);
    // restart around the first optimum with a smaller simplex
    let (p, c2) = refine(problem, p, 0.05, max_evals / 2);
    (-c.min(c2), p)
}

const BATCH: usize = 16;

/// Multistart search for the instance maximizing the ratio to the tightest applicable bound.
///
/// Deterministic for a given seed: trials draw from independent streams and
/// ties go to the lowest trial index.
pub fn search_worst(spec: &SearchSpec) -> Result<TightnessReport> {
    let regime = classify_regime(&spec.curvatures)?;
    if spec.budget < 1 {
        return Err(Error::Domain("budget must be at least 1".into()));
    }
    if spec.n < 1 {
        return Err(Error::Domain("need N >= 1".into()));
    }
    spec.family.validate()?;
    let bounds = all_bounds(&spec.curvatures, spec.n, 1.0)?;
    let n_params = spec.family.n_params(spec.n);
    let max_evals = spec.evals_per_trial.unwrap_or(400 * n_params);
    let policies = [SubgradientPolicy::Canonical, SubgradientPolicy::Left, SubgradientPolicy::Right];

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut run = 0;
    while run < spec.budget {
        let hi = (run + BATCH).min(spec.budget);
        let results: Vec<(f64, Vec<f64>)> = (run..hi)
            .into_par_iter()
            .map(|t| {
                let problem = Problem { spec, bounds: &bounds, policy: policies[t % 3] };
                trial(&problem, spec.seed, t, max_evals)
            })
            .collect();
        for (i, (r, p)) in results.into_iter().enumerate() {
            let t = run + i;
            if best.as_ref().is_none_or(|b| r > b.0) {
                best = Some((r, t, p));
            }
        }
        run = hi;
        if let (Some(target), Some(b)) = (spec.stop_at, &best) {
            if b.0 >= target {
                break;
            }
        }
    }
    let (best_ratio, best_trial, params) = best.expect("budget >= 1");
    let problem = Problem { spec, bounds: &bounds, policy: policies[best_trial % 3] };
    let witness = problem.witness(&params);
    let binding = witness
        .as_ref()
        .and_then(|t| trajectory_ratio(t, &bounds).1)
        .unwrap_or(bounds[0].formula);
    Ok(TightnessReport {
        best_ratio,
        best_trial,
        trials_run: run,
        binding,
        bounds,
        regime,
        family: spec.family,
        params: Some(params),
        witness,
    })
}
