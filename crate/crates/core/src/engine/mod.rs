//! DCA and PGD runs, the PGD to DCA mapping and curvature-shift schedules.

mod trajectory;

pub use trajectory::{best_gradient_mapping, gradient_residual, RunKind, Trajectory, TrajectoryMeta};

use crate::bounds::{CurvatureBounds, Curvatures};
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, Point, SubgradientPolicy};

/// A pair `(f1, f2)` defining `F = f1 - f2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DcInstance {
    f1: FunctionOracle,
    f2: FunctionOracle,
}

impl DcInstance {
    /// Requires equal dimensions, `mu1 >= 0` and `mu1 + mu2 > 0` unless `mu1 = mu2 = 0`.
    pub fn new(f1: FunctionOracle, f2: FunctionOracle) -> Result<Self> {
        if f1.dim() != f2.dim() {
            return Err(Error::Dimension { expected: f1.dim(), got: f2.dim() });
        }
        let (mu1, mu2) = (f1.bounds().mu(), f2.bounds().mu());
        if mu1 < 0.0 {
            return Err(Error::Domain(format!("f1 must be convex, got mu1 = {mu1}")));
        }
        if !(mu1 + mu2 > 0.0 || (mu1 == 0.0 && mu2 == 0.0)) {
            return Err(Error::Domain(format!("need mu1 + mu2 > 0 or mu1 = mu2 = 0, got {mu1} + {mu2}")));
        }
        Ok(Self { f1, f2 })
    }

    pub fn f1(&self) -> &FunctionOracle {
        &self.f1
    }

    pub fn f2(&self) -> &FunctionOracle {
        &self.f2
    }

    pub fn dim(&self) -> usize {
        self.f1.dim()
    }

    pub fn curvatures(&self) -> Curvatures {
        Curvatures::from_bounds(self.f1.bounds(), self.f2.bounds())
    }

    pub fn objective(&self, x: &Point) -> Result<f64> {
        Ok(self.f1.eval(x)? - self.f2.eval(x)?)
    }
}

/// Runs `N + 1` DCA iterations from `x0`.
pub fn dca_run(inst: &DcInstance, x0: &Point, n: usize, policy: SubgradientPolicy) -> Result<Trajectory> {
    dca_run_shifted(inst, x0, n, policy, &vec![0.0; n + 1])
}

/// DCA where step `k` uses the pair `f_i - lambda_k |x|^2 / 2`.
pub fn dca_run_shifted(
    inst: &DcInstance,
    x0: &Point,
    n: usize,
    policy: SubgradientPolicy,
    lambdas: &[f64],
) -> Result<Trajectory> {
    if lambdas.len() != n + 1 {
        return Err(Error::Domain(format!("need {} shifts, got {}", n + 1, lambdas.len())));
    }
    if x0.len() != inst.dim() {
        return Err(Error::Dimension { expected: inst.dim(), got: x0.len() });
    }
    let shifted = lambdas.iter().any(|&l| l != 0.0);
    let mut points = Vec::with_capacity(n + 2);
    let mut g1 = Vec::with_capacity(n + 2);
    let mut g2 = Vec::with_capacity(n + 2);
    points.push(x0.clone());
    g1.push(inst.f1.subgradient(x0, policy)? - x0 * lambdas[0]);
    for (k, &lam) in lambdas.iter().enumerate() {
        let x = &points[k];
        let s = inst.f2.subgradient(x, policy)? - x * lam;
        let next = if lam == 0.0 {
            inst.f1.tilt_argmin_near(&s, x)?
        } else {
            inst.f1.shift_curvature(lam)?.tilt_argmin_near(&s, x)?
        };
        g2.push(s.clone());
        g1.push(s);
        points.push(next);
    }
    let last = &points[n + 1];
    g2.push(inst.f2.subgradient(last, policy)? - last * lambdas[n]);
    let f1vals = points.iter().map(|x| inst.f1.eval(x)).collect::<Result<Vec<_>>>()?;
    let f2vals = points.iter().map(|x| inst.f2.eval(x)).collect::<Result<Vec<_>>>()?;
    let fvals = f1vals.iter().zip(&f2vals).map(|(a, b)| a - b).collect();
    Ok(Trajectory {
        points,
        g1,
        g2,
        f1vals,
        f2vals,
        fvals,
        meta: TrajectoryMeta {
            id: None,
            kind: RunKind::Dca,
            n,
            policy,
            curvatures: inst.curvatures(),
            stepsizes: None,
            shifts: shifted.then(|| lambdas.to_vec()),
            f_lo: None,
        },
    })
}

/// Curvatures `(mu1, L1, mu2, L2)` of the splitting `f1 = h + |.|^2/(2 gamma)`,
/// `f2 = |.|^2/(2 gamma) - phi`.
pub fn map_pgd_to_dc(phi: &CurvatureBounds, h: &CurvatureBounds, gamma: f64) -> Result<Curvatures> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::Stepsize { gamma, upper: f64::INFINITY });
    }
    let u = 1.0 / gamma;
    Ok(Curvatures::new(u + h.mu(), u + h.l(), u - phi.l(), u - phi.mu()))
}

/// The concrete splitting whose DCA iterates are the PGD iterates.
pub fn dc_split_of_pgd(phi: &FunctionOracle, h: &FunctionOracle, gamma: f64) -> Result<DcInstance> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::Stepsize { gamma, upper: f64::INFINITY });
    }
    let f1 = h.shift_curvature(-1.0 / gamma)?;
    let f2 = phi.negate()?.shift_curvature(-1.0 / gamma)?;
    DcInstance::new(f1, f2)
}

/// Upper end of the admissible stepsize interval `(0, 2/(L_phi - mu_h))`.
pub fn pgd_stepsize_limit(phi: &CurvatureBounds, h: &CurvatureBounds) -> f64 {
    let gap = phi.l() - h.mu();
    if gap > 0.0 {
        2.0 / gap
    } else {
        f64::INFINITY
    }
}

/// One proximal gradient step, without stepsize validation.
pub fn pgd_step(phi: &FunctionOracle, h: &FunctionOracle, gamma: f64, x: &Point) -> Result<Point> {
    let grad = phi.subgradient(x, SubgradientPolicy::Canonical)?;
    h.prox(&(x - grad * gamma), gamma)
}

/// Runs `N + 1` PGD steps on `phi + h`.
///
/// `gammas` holds either one constant stepsize or one stepsize per step. The
/// recorded subgradients are those of the DCA splitting of each step; the
/// base splitting is the one of the first stepsize.
pub fn pgd_run(
    phi: &FunctionOracle,
    h: &FunctionOracle,
    gammas: &[f64],
    x0: &Point,
    n: usize,
) -> Result<Trajectory> {
    let steps: Vec<f64> = match gammas.len() {
        1 => vec![gammas[0]; n + 1],
        m if m == n + 1 => gammas.to_vec(),
        m => return Err(Error::Domain(format!("need 1 or {} stepsizes, got {m}", n + 1))),
    };
    if !phi.bounds().is_smooth() {
        return Err(Error::Domain("phi must be smooth (finite L)".into()));
    }
    if h.bounds().mu() < 0.0 {
        return Err(Error::Domain(format!("h must be convex, got mu_h = {}", h.bounds().mu())));
    }
    if phi.dim() != h.dim() || x0.len() != phi.dim() {
        return Err(Error::Dimension { expected: phi.dim(), got: x0.len().min(h.dim()) });
    }
    let upper = pgd_stepsize_limit(phi.bounds(), h.bounds());
    for &gamma in &steps {
        if !(gamma > 0.0 && gamma < upper) {
            return Err(Error::Stepsize { gamma, upper });
        }
    }
    let base = dc_split_of_pgd(phi, h, steps[0])?;
    let lambdas: Vec<f64> = steps.iter().map(|g| 1.0 / steps[0] - 1.0 / g).collect();
    let policy = SubgradientPolicy::Canonical;
    let mut points = Vec::with_capacity(n + 2);
    let mut g1 = Vec::with_capacity(n + 2);
    let mut g2 = Vec::with_capacity(n + 2);
    points.push(x0.clone());
    g1.push(h.subgradient(x0, policy)? + x0 / steps[0]);
    for &gamma in &steps {
        let x = points.last().expect("nonempty").clone();
        let s = &x / gamma - phi.subgradient(&x, policy)?;
        let next = pgd_step(phi, h, gamma, &x)?;
        g2.push(s.clone());
        g1.push(s);
        points.push(next);
    }
    let last = &points[n + 1];
    g2.push(last / steps[n] - phi.subgradient(last, policy)?);
    let f1vals = points.iter().map(|x| base.f1().eval(x)).collect::<Result<Vec<_>>>()?;
    let f2vals = points.iter().map(|x| base.f2().eval(x)).collect::<Result<Vec<_>>>()?;
    let fvals = points
        .iter()
        .map(|x| Ok(phi.eval(x)? + h.eval(x)?))
        .collect::<Result<Vec<_>>>()?;
    let shifted = lambdas.iter().any(|&l| l != 0.0);
    Ok(Trajectory {
        points,
        g1,
        g2,
        f1vals,
        f2vals,
        fvals,
        meta: TrajectoryMeta {
            id: None,
            kind: RunKind::Pgd,
            n,
            policy,
            curvatures: base.curvatures(),
            stepsizes: Some(steps),
            shifts: shifted.then_some(lambdas),
            f_lo: None,
        },
    })
}

/// The composite splitting `(phi - lambda |.|^2/2, h + lambda |.|^2/2)` with
/// stepsize `1/(1/gamma - lambda)`, whose PGD step equals that of `(phi, h, gamma)`.
pub fn shift_pgd_splitting(
    phi: &FunctionOracle,
    h: &FunctionOracle,
    gamma: f64,
    lambda: f64,
) -> Result<(FunctionOracle, FunctionOracle, f64)> {
    if !(gamma > 0.0) || !(lambda < 1.0 / gamma) {
        return Err(Error::Domain(format!("need gamma > 0 and lambda < 1/gamma, got {gamma}, {lambda}")));
    }
    Ok((phi.shift_curvature(lambda)?, h.shift_curvature(-lambda)?, 1.0 / (1.0 / gamma - lambda)))
}

/// Curvature shifts `lambda_k = mu1 - 1/gamma_k` for a DCA instance with
/// curvatures `mu1`, `mu2`, `L2`, from PGD stepsizes already evaluated at
/// `L_phi = mu1 - mu2`, `mu_phi = mu1 - L2`.
pub fn schedule_curvature_shift(mu1: f64, l2: f64, mu2: f64, gammas: &[f64]) -> Result<Vec<f64>> {
    if mu1 <= 0.0 {
        return Err(Error::Domain(format!("need mu1 > 0, got {mu1}")));
    }
    if !(mu2 < l2) {
        return Err(Error::InvalidBounds(format!("need mu2 < L2, got {mu2}, {l2}")));
    }
    let l_phi = mu1 - mu2;
    let upper = if l_phi > 0.0 { 2.0 / l_phi } else { f64::INFINITY };
    gammas
        .iter()
        .enumerate()
        .map(|(step, &gamma)| {
            if !(gamma > 0.0) {
                return Err(Error::Schedule { step, reason: format!("stepsize {gamma} is not positive") });
            }
            if gamma >= upper {
                return Err(Error::Schedule {
                    step,
                    reason: format!("stepsize {gamma} leaves mu1 + mu2 <= 0 (limit {upper})"),
                });
            }
            Ok(mu1 - 1.0 / gamma)
        })
        .collect()
}
