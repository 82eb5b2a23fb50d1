use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bounds::CurvatureBounds;

/// A first-order sample `(x, g, f(x))` with `g` a subgradient at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: DVector<f64>,
    pub g: DVector<f64>,
    pub f: f64,
}

/// An ordered pair `(i, j)` whose interpolation slack is below `-tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub slack: f64,
}

/// Slack of the interpolation inequality written at `x = x_i`, `y = x_j`.
pub fn interpolation_slack(bounds: &CurvatureBounds, xi: &Sample, xj: &Sample) -> f64 {
    let mu = bounds.mu();
    let d = &xi.x - &xj.x;
    let lhs = xi.f - xj.f - xj.g.dot(&d);
    let mut rhs = 0.5 * mu * d.norm_squared();
    let inv = bounds.inv_gap();
    if inv != 0.0 {
        let m = &xi.g - &xj.g - &d * mu;
        rhs += 0.5 * inv * m.norm_squared();
    }
    lhs - rhs
}

/// All ordered pairs violating the interpolation conditions of `F_{mu,L}`.
pub fn check_interpolation(bounds: &CurvatureBounds, samples: &[Sample], tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, si) in samples.iter().enumerate() {
        for (j, sj) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            let slack = interpolation_slack(bounds, si, sj);
            if slack < -tol {
                out.push(Violation { i, j, slack });
            }
        }
    }
    out
}
