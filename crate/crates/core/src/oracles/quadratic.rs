use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// `f(x) = x'Ax/2 + b'x + c` with symmetric `A`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl PartialEq for Quadratic {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c
    }
}

const SYM_TOL: f64 = 1e-12;

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidOracle(format!("Hessian is {}x{}", a.nrows(), a.ncols())));
        }
        if a.nrows() != b.len() {
            return Err(Error::Dimension { expected: a.nrows(), got: b.len() });
        }
        if a.nrows() == 0 {
            return Err(Error::InvalidOracle("empty Hessian".into()));
        }
        let scale = a.amax().max(1.0);
        if (&a - a.transpose()).amax() > SYM_TOL * scale {
            return Err(Error::InvalidOracle("Hessian is not symmetric".into()));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidOracle("non-finite coefficient".into()));
        }
        let a = (&a + a.transpose()) * 0.5;
        let eig = a.clone().symmetric_eigen();
        Ok(Self { a, b, c, eig })
    }

    /// One-dimensional `a x^2/2 + b x + c`.
    pub fn scalar(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, a), DVector::from_element(1, b), c)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn eigen_range(&self) -> (f64, f64) {
        let ev = &self.eig.eigenvalues;
        (ev.min(), ev.max())
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + self.c
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b
    }

    /// Solution of `A w + b = g` nearest to `anchor`.
    pub fn tilt_argmin_near(&self, g: &DVector<f64>, anchor: &DVector<f64>) -> Result<DVector<f64>> {
        if &self.gradient(anchor) == g {
            return Ok(anchor.clone());
        }
        let r = g - &self.b;
        let vecs = &self.eig.eigenvectors;
        let vals = &self.eig.eigenvalues;
        let lam_scale = vals.amax().max(1.0);
        let coords = vecs.transpose() * &r;
        let anchor_coords = vecs.transpose() * anchor;
        let mut w = DVector::zeros(self.dim());
        for i in 0..vals.len() {
            let lam = vals[i];
            let ci = if lam.abs() > 1e-13 * lam_scale {
                coords[i] / lam
            } else {
                if coords[i].abs() > 1e-10 * (1.0 + r.amax()) {
                    return Err(Error::Singular(fmt_vec(g)));
                }
                // free direction of the solution set
                anchor_coords[i]
            };
            w += vecs.column(i) * ci;
        }
        Ok(w)
    }

    pub fn shifted(&self, lambda: f64) -> Result<Self> {
        let n = self.dim();
        Self::new(&self.a - DMatrix::identity(n, n) * lambda, self.b.clone(), self.c)
    }

    pub fn negated(&self) -> Result<Self> {
        Self::new(-&self.a, -&self.b, -self.c)
    }
}

pub(crate) fn fmt_vec(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}
