use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{resolved, search_worst, trajectory_ratio, SearchFamily, SearchSpec};
use crate::bounds::{CurvatureBounds, Curvatures};
use crate::engine::{dca_run, DcInstance, Trajectory};
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, Piecewise1d, SubgradientPolicy};
use crate::rates::{all_bounds, classify_regime, FormulaId, Regime, RateValue};

/// `count` evenly spaced values from `lo` to `hi`.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Grid over `(mu2/mu1, L2/mu1)` at `mu1 = 1`, `L1 = l1_ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub mu2_ratios: Vec<f64>,
    pub l2_ratios: Vec<f64>,
    pub l1_ratio: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Multiplies every denominator; values above 1 tighten the bounds artificially.
    pub denominator_scale: f64,
}

impl ScanSpec {
    pub fn ratio_grid(size: usize, trials: usize, seed: u64) -> Self {
        Self {
            mu2_ratios: grid(-0.98, 2.5, size),
            l2_ratios: grid(-0.9, 4.0, size),
            l1_ratio: 2.0,
            n_values: (1..=6).collect(),
            trials,
            seed,
            tol: 1e-6,
            denominator_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub mu2_ratio: f64,
    pub l2_ratio: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    pub bound: FormulaId,
    pub proven: bool,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub mu2_ratio: f64,
    pub l2_ratio: f64,
    pub regime: Regime,
    /// Largest ratio to a proven bound.
    pub best_proven_ratio: f64,
    /// Largest ratio to the conjectured bound, if the cell has one.
    pub best_conjectured_ratio: Option<f64>,
    pub runs: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanReport {
    pub cells: Vec<CellResult>,
    /// Proven-bound violations.
    pub failures: Vec<FailureRecord>,
    /// Conjectured-bound violations.
    pub conjecture_failures: Vec<FailureRecord>,
    pub skipped_cells: usize,
}

fn random_pw<R: Rng>(rng: &mut R, b: &CurvatureBounds, extreme: Option<bool>) -> Result<FunctionOracle> {
    let pieces = match extreme {
        Some(_) => 1,
        None => rng.gen_range(1..=3),
    };
    let pick = |rng: &mut R| {
        let (mu, l) = (b.mu(), if b.is_smooth() { b.l() } else { b.mu() + 5.0 });
        match extreme {
            Some(low) => {
                if low {
                    mu
                } else {
                    l
                }
            }
            None => match rng.gen_range(0..4) {
                0 => mu,
                1 => l,
                _ => rng.gen_range(mu..=l),
            },
        }
    };
    let curv: Vec<f64> = (0..pieces).map(|_| pick(rng)).collect();
    let mut breaks: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let curv = &curv[..breaks.len() + 1];
    let jumps: Vec<f64> = breaks
        .iter()
        .map(|_| if b.is_smooth() { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    let p = Piecewise1d::from_curvatures(&breaks, curv, &jumps, rng.gen_range(-2.0..2.0), 0.0)?;
    FunctionOracle::piecewise(p, *b)
}

/// Random instance of the cell; the first four trials use the corner quadratics.
fn random_instance(c: &Curvatures, trial: usize, rng: &mut ChaCha8Rng) -> Result<DcInstance> {
    let (b1, b2) = (c.f1()?, c.f2()?);
    let corner = (trial < 4).then_some(trial);
    let f1 = random_pw(rng, &b1, corner.map(|t| t & 1 == 0))?;
    let f2 = random_pw(rng, &b2, corner.map(|t| t & 2 == 0))?;
    DcInstance::new(f1, f2)
}

/// Bounds scaled by `scale`, each marked with its provenance.
fn scaled_bounds(c: &Curvatures, n: usize, scale: f64) -> Result<Vec<RateValue>> {
    Ok(all_bounds(c, n, 1.0)?
        .into_iter()
        .map(|mut b| {
            b.denominator *= scale;
            b.bound = 1.0 / b.denominator;
            b
        })
        .collect())
}

/// Prefix of a run with `n + 1` steps.
pub(crate) fn truncated(t: &Trajectory, n: usize) -> Trajectory {
    let m = n + 2;
    let mut out = t.clone();
    out.points.truncate(m);
    out.g1.truncate(m);
    out.g2.truncate(m);
    out.f1vals.truncate(m);
    out.f2vals.truncate(m);
    out.fvals.truncate(m);
    out.meta.n = n;
    out
}

fn scan_cell(spec: &ScanSpec, r: f64, l: f64, cell_index: u64) -> Result<(CellResult, Vec<FailureRecord>, Vec<FailureRecord>)> {
    let c = Curvatures::new(1.0, spec.l1_ratio, r, l);
    let regime = classify_regime(&c)?.regime;
    let n_max = spec.n_values.iter().copied().max().unwrap_or(1);
    let per_n: Vec<(usize, Vec<RateValue>)> = spec
        .n_values
        .iter()
        .map(|&n| Ok((n, scaled_bounds(&c, n, spec.denominator_scale)?)))
        .collect::<Result<_>>()?;
    let mut cell = CellResult {
        mu2_ratio: r,
        l2_ratio: l,
        regime,
        best_proven_ratio: 0.0,
        best_conjectured_ratio: None,
        runs: 0,
        skipped: 0,
    };
    let mut fails = Vec::new();
    let mut conj = Vec::new();
    let policies = [SubgradientPolicy::Canonical, SubgradientPolicy::Left, SubgradientPolicy::Right];
    for trial in 0..spec.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(cell_index * 1_000_003 + trial as u64);
        let inst = random_instance(&c, trial, &mut rng)?;
        let x0 = DVector::from_element(1, rng.gen_range(-3.0..3.0));
        let full = match dca_run(&inst, &x0, n_max, policies[trial % 3]) {
            Ok(t) => t,
            Err(_) => {
                cell.skipped += 1;
                continue;
            }
        };
        cell.runs += 1;
        for (n, bounds) in &per_n {
            let t = truncated(&full, *n);
            if !resolved(&t) {
                continue;
            }
            for b in bounds {
                let (ratio, _) = trajectory_ratio(&t, std::slice::from_ref(b));
                let record = FailureRecord { mu2_ratio: r, l2_ratio: l, n: *n, trial, bound: b.formula, proven: b.proven, ratio };
                if b.proven {
                    cell.best_proven_ratio = cell.best_proven_ratio.max(ratio);
                    if ratio > 1.0 + spec.tol {
                        fails.push(record);
                    }
                } else {
                    let prev = cell.best_conjectured_ratio.unwrap_or(0.0);
                    cell.best_conjectured_ratio = Some(prev.max(ratio));
                    if ratio > 1.0 + spec.tol {
                        conj.push(record);
                    }
                }
            }
        }
    }
    Ok((cell, fails, conj))
}

/// Runs random instances in every valid grid cell and records every ratio
/// above `1 + tol` against a proven or conjectured bound.
pub fn violation_scan(spec: &ScanSpec) -> Result<ScanReport> {
    if spec.n_values.is_empty() || spec.n_values.contains(&0) {
        return Err(Error::Domain("N values must be positive".into()));
    }
    let cells: Vec<(usize, f64, f64)> = spec
        .mu2_ratios
        .iter()
        .flat_map(|&r| spec.l2_ratios.iter().map(move |&l| (r, l)))
        .enumerate()
        .map(|(i, (r, l))| (i, r, l))
        .collect();
    let valid = |r: f64, l: f64| r < l && 1.0 + r > 0.0 && spec.l1_ratio > 1.0;
    type Cell = (CellResult, Vec<FailureRecord>, Vec<FailureRecord>);
    let results: Vec<Option<Cell>> = cells
        .par_iter()
        .map(|&(i, r, l)| if valid(r, l) { scan_cell(spec, r, l, i as u64).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;
    let mut report = ScanReport::default();
    for res in results {
        match res {
            Some((cell, f, cf)) => {
                report.cells.push(cell);
                report.failures.extend(f);
                report.conjecture_failures.extend(cf);
            }
            None => report.skipped_cells += 1,
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu2_ratio: f64,
    #[serde(rename = "L2_ratio")]
    pub l2_ratio: f64,
    pub regime: Regime,
    /// Tightest applicable bound on the half squared step for a unit decrease.
    pub bound: f64,
    pub best_ratio: f64,
}

/// Regime map with searched tightness per cell.
pub fn sweep(
    mu2_ratios: &[f64],
    l2_ratios: &[f64],
    l1_ratio: f64,
    n: usize,
    family: SearchFamily,
    budget: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &r in mu2_ratios {
        for &l in l2_ratios {
            if !(r < l && 1.0 + r > 0.0) {
                continue;
            }
            let c = Curvatures::new(1.0, l1_ratio, r, l);
            let report = search_worst(&SearchSpec::new(c, n, family, budget, seed))?;
            let bound = report.bounds.iter().map(|b| b.bound).fold(f64::INFINITY, f64::min);
            rows.push(SweepRow { mu2_ratio: r, l2_ratio: l, regime: report.regime.regime, bound, best_ratio: report.best_ratio });
        }
    }
    Ok(rows)
}
