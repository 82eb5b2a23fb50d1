//! Curvature-bounded function oracles.

mod interp;
mod piecewise;
mod quadratic;

pub use interp::{check_interpolation, interpolation_slack, Sample, Violation};
pub use piecewise::{Piece, Piecewise1d, SubgradientPolicy};
pub use quadratic::Quadratic;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::{ext_real, CurvatureBounds};
use crate::error::{Error, Result};

pub type Point = DVector<f64>;

/// Concrete parametric form of an oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Quadratic(Quadratic),
    Piecewise(Piecewise1d),
}

/// A function in `F_{mu,L}` with exact evaluation, subgradients and tilted argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOracle {
    family: Family,
    bounds: CurvatureBounds,
}

const CURV_TOL: f64 = 1e-9;

impl FunctionOracle {
    pub fn new(family: Family, bounds: CurvatureBounds) -> Result<Self> {
        let (lo, hi) = match &family {
            Family::Quadratic(q) => q.eigen_range(),
            Family::Piecewise(p) => {
                if p.has_kinks() && bounds.is_smooth() {
                    return Err(Error::InvalidOracle(format!(
                        "kinked function declared with finite L = {}",
                        bounds.l()
                    )));
                }
                p.curvature_range()
            }
        };
        let scale = 1.0 + bounds.mu().abs().max(if bounds.is_smooth() { bounds.l().abs() } else { 0.0 });
        if !bounds.contains(lo, CURV_TOL * scale) || !bounds.contains(hi, CURV_TOL * scale) {
            return Err(Error::InvalidOracle(format!(
                "curvatures [{lo}, {hi}] outside declared bounds {bounds}"
            )));
        }
        Ok(Self { family, bounds })
    }

    pub fn quadratic(a: DMatrix<f64>, b: DVector<f64>, c: f64, bounds: CurvatureBounds) -> Result<Self> {
        Self::new(Family::Quadratic(Quadratic::new(a, b, c)?), bounds)
    }

    /// `a x^2/2 + b x + c` on the real line.
    pub fn quadratic_1d(a: f64, b: f64, c: f64, bounds: CurvatureBounds) -> Result<Self> {
        Self::new(Family::Quadratic(Quadratic::scalar(a, b, c)?), bounds)
    }

    /// Quadratic `a x^2/2` with the tightest valid bounds `[a, a + eps]`.
    pub fn scaled_square(a: f64) -> Self {
        let eps = 1e-9 * (1.0 + a.abs());
        Self::quadratic_1d(a, 0.0, 0.0, CurvatureBounds::new(a, a + eps).expect("eps > 0"))
            .expect("curvature inside bounds")
    }

    pub fn piecewise(f: Piecewise1d, bounds: CurvatureBounds) -> Result<Self> {
        Self::new(Family::Piecewise(f), bounds)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn bounds(&self) -> &CurvatureBounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            Family::Quadratic(q) => q.dim(),
            Family::Piecewise(_) => 1,
        }
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.family {
            Family::Quadratic(q) => q.eval(x),
            Family::Piecewise(p) => p.eval(x[0]),
        })
    }

    pub fn subgradient(&self, x: &Point, policy: SubgradientPolicy) -> Result<Point> {
        self.check_dim(x)?;
        Ok(match &self.family {
            Family::Quadratic(q) => q.gradient(x),
            Family::Piecewise(p) => DVector::from_element(1, p.subgradient(x[0], policy)),
        })
    }

    /// Minimum-norm `w` with `g` in the subdifferential at `w`.
    pub fn tilt_argmin(&self, g: &Point) -> Result<Point> {
        self.tilt_argmin_near(g, &DVector::zeros(self.dim()))
    }

    /// Element of `{w : g in subdifferential at w}` nearest to `anchor`.
    pub fn tilt_argmin_near(&self, g: &Point, anchor: &Point) -> Result<Point> {
        self.check_dim(g)?;
        self.check_dim(anchor)?;
        match &self.family {
            Family::Quadratic(q) => q.tilt_argmin_near(g, anchor),
            Family::Piecewise(p) => Ok(DVector::from_element(1, p.tilt_argmin_near(g[0], anchor[0])?)),
        }
    }

    /// `f - lambda |x|^2 / 2`.
    pub fn shift_curvature(&self, lambda: f64) -> Result<Self> {
        let family = match &self.family {
            Family::Quadratic(q) => Family::Quadratic(q.shifted(lambda)?),
            Family::Piecewise(p) => Family::Piecewise(p.shifted(lambda)?),
        };
        Ok(Self { family, bounds: self.bounds.shifted(lambda) })
    }

    /// `-f`, defined for smooth oracles only.
    pub fn negate(&self) -> Result<Self> {
        let bounds = self.bounds.negated()?;
        let family = match &self.family {
            Family::Quadratic(q) => Family::Quadratic(q.negated()?),
            Family::Piecewise(p) => Family::Piecewise(p.negated()?),
        };
        Ok(Self { family, bounds })
    }

    /// `argmin_w f(w) + |w - z|^2 / (2 gamma)`.
    pub fn prox(&self, z: &Point, gamma: f64) -> Result<Point> {
        if gamma <= 0.0 {
            return Err(Error::Domain(format!("prox parameter must be positive, got {gamma}")));
        }
        let shifted = self.shift_curvature(-1.0 / gamma)?;
        shifted.tilt_argmin_near(&(z / gamma), z)
    }

    pub fn sample(&self, x: &Point, policy: SubgradientPolicy) -> Result<Sample> {
        Ok(Sample { x: x.clone(), g: self.subgradient(x, policy)?, f: self.eval(x)? })
    }
}

/// JSON form of an oracle: `{"family", "params", "mu", "L"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    #[serde(flatten)]
    pub params: FamilyParams,
    pub mu: f64,
    #[serde(rename = "L", with = "ext_real")]
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum FamilyParams {
    Quadratic {
        a: MatrixParam,
        #[serde(default)]
        b: Option<VectorParam>,
        #[serde(default)]
        c: f64,
    },
    Pw1d {
        breakpoints: Vec<f64>,
        pieces: Vec<Piece>,
    },
}

/// A Hessian given as a scalar (1-D) or as rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixParam {
    Scalar(f64),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorParam {
    Scalar(f64),
    Entries(Vec<f64>),
}

impl TryFrom<&OracleSpec> for FunctionOracle {
    type Error = Error;
    fn try_from(spec: &OracleSpec) -> Result<Self> {
        let bounds = CurvatureBounds::new(spec.mu, spec.l)?;
        match &spec.params {
            FamilyParams::Quadratic { a, b, c } => {
                let a = match a {
                    MatrixParam::Scalar(v) => DMatrix::from_element(1, 1, *v),
                    MatrixParam::Rows(rows) => {
                        let n = rows.len();
                        if rows.iter().any(|r| r.len() != n) {
                            return Err(Error::InvalidOracle("Hessian rows must form a square".into()));
                        }
                        DMatrix::from_row_iterator(n, n, rows.iter().flatten().copied())
                    }
                };
                let n = a.nrows();
                let b = match b {
                    None => DVector::zeros(n),
                    Some(VectorParam::Scalar(v)) => DVector::from_element(1, *v),
                    Some(VectorParam::Entries(v)) => DVector::from_vec(v.clone()),
                };
                FunctionOracle::quadratic(a, b, *c, bounds)
            }
            FamilyParams::Pw1d { breakpoints, pieces } => {
                FunctionOracle::piecewise(Piecewise1d::new(breakpoints.clone(), pieces.clone())?, bounds)
            }
        }
    }
}

impl From<&FunctionOracle> for OracleSpec {
    fn from(f: &FunctionOracle) -> Self {
        let params = match &f.family {
            Family::Quadratic(q) => {
                let a = q.hessian();
                let rows = (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect();
                FamilyParams::Quadratic {
                    a: MatrixParam::Rows(rows),
                    b: Some(VectorParam::Entries(q.linear().iter().copied().collect())),
                    c: q.constant(),
                }
            }
            Family::Piecewise(p) => {
                FamilyParams::Pw1d { breakpoints: p.breaks().to_vec(), pieces: p.pieces().to_vec() }
            }
        };
        OracleSpec { params, mu: f.bounds.mu(), l: f.bounds.l() }
    }
}

impl Serialize for FunctionOracle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OracleSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionOracle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = OracleSpec::deserialize(d)?;
        FunctionOracle::try_from(&spec).map_err(serde::de::Error::custom)
    }
}
