use crate::error::{Error, Result};
use crate::exact::Scalar;

/// Inequality `affine . scalars - v^T gram v >= 0` over formal vector symbols.
///
/// `gram[i][j]` is the coefficient of `<v_i, v_j>`, kept symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<S> {
    pub gram: Vec<Vec<S>>,
    pub affine: Vec<S>,
}

/// Linear combination of the vector symbols, dense.
pub type Lin<S> = Vec<S>;

pub fn unit<S: Scalar>(n: usize, i: usize) -> Lin<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// `a - w b`.
pub fn lin_sub<S: Scalar>(a: &Lin<S>, w: &S, b: &Lin<S>) -> Lin<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - w.clone() * y.clone()).collect()
}

impl<S: Scalar> Form<S> {
    pub fn zeros(n: usize, n_affine: usize) -> Self {
        Self { gram: vec![vec![S::zero(); n]; n], affine: vec![S::zero(); n_affine] }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Adds `w |v|^2` to the quadratic part.
    pub fn add_square(&mut self, v: &Lin<S>, w: S) -> &mut Self {
        self.add_inner(v, v, w)
    }

    /// Adds `w <a, b>` to the quadratic part.
    pub fn add_inner(&mut self, a: &Lin<S>, b: &Lin<S>, w: S) -> &mut Self {
        let half = w / S::from_int(2);
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let t = a[i].clone() * b[j].clone() + a[j].clone() * b[i].clone();
                if !t.is_zero() {
                    self.gram[i][j] = self.gram[i][j].clone() + half.clone() * t;
                }
            }
        }
        self
    }

    pub fn add_affine(&mut self, i: usize, w: S) -> &mut Self {
        self.affine[i] = self.affine[i].clone() + w;
        self
    }

    /// `self + w other`.
    pub fn plus(&self, other: &Self, w: &S) -> Self {
        let gram = self
            .gram
            .iter()
            .zip(&other.gram)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.clone() + w.clone() * b.clone()).collect())
            .collect();
        let affine = self.affine.iter().zip(&other.affine).map(|(a, b)| a.clone() + w.clone() * b.clone()).collect();
        Self { gram, affine }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(other, &-S::one())
    }

    /// Largest absolute entry of the gram and affine parts.
    pub fn max_abs(&self) -> f64 {
        self.gram
            .iter()
            .flatten()
            .chain(&self.affine)
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Reindexes the symbols: symbol `i` becomes `perm[i]`, affine slot `j` becomes `aperm[j]`.
    pub fn permuted(&self, perm: &[usize], aperm: &[usize]) -> Self {
        let mut out = Self::zeros(self.dim(), self.affine.len());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.gram[perm[i]][perm[j]] = self.gram[i][j].clone();
            }
        }
        for (j, a) in self.affine.iter().enumerate() {
            out.affine[aperm[j]] = a.clone();
        }
        out
    }

    /// Substitutes `v_i = sum_r t[i][r] w_r` and `s_j = sum_r a[j][r] z_r`.
    pub fn lifted(&self, t: &[Lin<S>], a: &[Lin<S>]) -> Self {
        let m = t[0].len();
        let na = a[0].len();
        let mut out = Self::zeros(m, na);
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if self.gram[i][j].is_zero() {
                    continue;
                }
                for r in 0..m {
                    for s in 0..m {
                        let t2 = t[i][r].clone() * t[j][s].clone();
                        if !t2.is_zero() {
                            out.gram[r][s] = out.gram[r][s].clone() + self.gram[i][j].clone() * t2;
                        }
                    }
                }
            }
        }
        for (j, w) in self.affine.iter().enumerate() {
            for r in 0..na {
                out.affine[r] = out.affine[r].clone() + w.clone() * a[j][r].clone();
            }
        }
        out
    }

    /// Slack `affine . scalars - sum gram_ij <v_i, v_j>` at concrete values.
    pub fn evaluate(&self, vectors: &[nalgebra::DVector<f64>], scalars: &[f64]) -> f64 {
        let mut quad = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let g = self.gram[i][j].to_f64();
                if g != 0.0 {
                    quad += g * vectors[i].dot(&vectors[j]);
                }
            }
        }
        let aff: f64 = self.affine.iter().zip(scalars).map(|(a, s)| a.to_f64() * s).sum();
        aff - quad
    }
}

/// Positive semidefiniteness of a symmetric matrix by symmetric elimination.
///
/// A zero pivot is accepted only if its remaining row is zero as well.
pub fn is_psd<S: Scalar>(m: &[Vec<S>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let scale = S::from_f64(1.0 + m.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max));
    let tol = S::tolerance() * scale;
    for k in 0..n {
        let p = a[k][k].clone();
        if p < -tol.clone() {
            return false;
        }
        if p <= tol {
            if (k + 1..n).any(|j| a[k][j] > tol || a[k][j] < -tol.clone()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = a[i][k].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a[i][j].clone() - f.clone() * a[k][j].clone();
                a[i][j] = v;
            }
        }
    }
    true
}

pub(crate) fn check_nonneg<S: Scalar>(name: &'static str, v: &S) -> Result<()> {
    if v.is_neg_beyond_tol() {
        return Err(Error::Weight { name, value: v.to_f64() });
    }
    Ok(())
}
