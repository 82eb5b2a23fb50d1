//! Concrete oracle families: parameters map to a DC pair and a start point.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::{CurvatureBounds, Curvatures};
use crate::engine::DcInstance;
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, Piecewise1d, Point};

/// Instance family explored by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum SearchFamily {
    /// Interpolable iterate and subgradient data in `R^dim`.
    Interp { dim: usize },
    #[serde(rename = "quadratic-1d")]
    Quadratic1d,
    /// One-dimensional piecewise quadratics with up to three pieces.
    #[serde(rename = "pw-quadratic-1d")]
    PwQuadratic1d { pieces: usize },
    #[serde(rename = "quadratic-2d")]
    Quadratic2d,
}

impl std::str::FromStr for SearchFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        let num = |default: usize| -> std::result::Result<usize, String> {
            arg.map_or(Ok(default), |a| a.parse().map_err(|_| format!("bad family argument {a:?}")))
        };
        match name {
            "interp" => Ok(Self::Interp { dim: num(3)? }),
            "quadratic-1d" => Ok(Self::Quadratic1d),
            "pw-quadratic-1d" => Ok(Self::PwQuadratic1d { pieces: num(3)? }),
            "quadratic-2d" => Ok(Self::Quadratic2d),
            _ => Err(format!(
                "unknown family {s:?} (expected interp[:dim], quadratic-1d, pw-quadratic-1d[:pieces], quadratic-2d)"
            )),
        }
    }
}

impl std::fmt::Display for SearchFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Interp { dim } => write!(f, "interp:{dim}"),
            Self::Quadratic1d => f.write_str("quadratic-1d"),
            Self::PwQuadratic1d { pieces } => write!(f, "pw-quadratic-1d:{pieces}"),
            Self::Quadratic2d => f.write_str("quadratic-2d"),
        }
    }
}

impl SearchFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Interp { dim } if dim == 0 || dim > 8 => Err(Error::Domain(format!("interp dimension {dim} not in 1..=8"))),
            Self::PwQuadratic1d { pieces } if pieces == 0 || pieces > 3 => {
                Err(Error::Domain(format!("piece count {pieces} not in 1..=3")))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn n_params(&self, n: usize) -> usize {
        match *self {
            Self::Interp { dim } => super::interp::n_params(n, dim),
            Self::Quadratic1d => 5,
            Self::PwQuadratic1d { pieces } => 2 * (3 * pieces - 1) + 1,
            Self::Quadratic2d => 12,
        }
    }
}

/// Maps `r` into `[mu, L]`, reaching both ends.
fn curvature(r: f64, b: &CurvatureBounds) -> f64 {
    if b.is_smooth() {
        b.mu() + (b.l() - b.mu()) * (0.5 + r).clamp(0.0, 1.0)
    } else {
        b.mu() + r.max(0.0)
    }
}

fn pw(params: &[f64], pieces: usize, b: &CurvatureBounds) -> Result<FunctionOracle> {
    let curv: Vec<f64> = params[..pieces].iter().map(|&r| curvature(r, b)).collect();
    let mut breaks = Vec::with_capacity(pieces - 1);
    let mut t = 0.0;
    for (i, &r) in params[pieces..2 * pieces - 1].iter().enumerate() {
        t = if i == 0 { r } else { t + r.exp().max(1e-6) };
        breaks.push(t);
    }
    let jumps: Vec<f64> = params[2 * pieces - 1..3 * pieces - 2]
        .iter()
        .map(|&r| if b.is_smooth() { 0.0 } else { r.max(0.0) })
        .collect();
    let slope0 = params[3 * pieces - 2];
    let p = Piecewise1d::from_curvatures(&breaks, &curv, &jumps, slope0, 0.0)?;
    FunctionOracle::piecewise(p, *b)
}

fn quad2(params: &[f64], b: &CurvatureBounds) -> Result<FunctionOracle> {
    let (s, co) = params[0].sin_cos();
    let e1 = curvature(params[1], b);
    let e2 = curvature(params[2], b);
    let q = DMatrix::from_row_slice(2, 2, &[co, -s, s, co]);
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(vec![e1, e2])) * q.transpose();
    FunctionOracle::quadratic(a, DVector::from_column_slice(&params[3..5]), 0.0, *b)
}

/// Builds the DC pair and start point of a parameter vector.
pub(crate) fn build(family: SearchFamily, params: &[f64], c: &Curvatures) -> Result<(DcInstance, Point)> {
    let (b1, b2) = (c.f1()?, c.f2()?);
    match family {
        SearchFamily::Quadratic1d => {
            let f1 = FunctionOracle::quadratic_1d(curvature(params[0], &b1), params[1], 0.0, b1)?;
            let f2 = FunctionOracle::quadratic_1d(curvature(params[2], &b2), params[3], 0.0, b2)?;
            Ok((DcInstance::new(f1, f2)?, DVector::from_element(1, params[4])))
        }
        SearchFamily::PwQuadratic1d { pieces } => {
            let k = 3 * pieces - 1;
            let f1 = pw(&params[..k], pieces, &b1)?;
            let f2 = pw(&params[k..2 * k], pieces, &b2)?;
            Ok((DcInstance::new(f1, f2)?, DVector::from_element(1, params[2 * k])))
        }
        SearchFamily::Quadratic2d => {
            let f1 = quad2(&params[..5], &b1)?;
            let f2 = quad2(&params[5..10], &b2)?;
            Ok((DcInstance::new(f1, f2)?, DVector::from_column_slice(&params[10..12])))
        }
        SearchFamily::Interp { .. } => Err(Error::Domain("interp data has no oracle form".into())),
    }
}
