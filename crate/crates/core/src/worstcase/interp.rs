//! Search directly over interpolable DCA data.
//!
//! The variables are the steps `dx_k` and the differences `G_k` in `R^d`,
//! with `x^{N+1} = 0` and `g2^{N+1} = 0`. The data extend to functions of the
//! two classes iff the max-plus closure of the interpolation constraints has
//! no positive cycle; the smallest decrease `F(x^0) - F(x^{N+1})` consistent
//! with the data is read off the same closure.

use nalgebra::DVector;

use crate::bounds::Curvatures;
use crate::engine::{RunKind, Trajectory, TrajectoryMeta};
use crate::oracles::SubgradientPolicy;

pub(crate) struct InterpData {
    pub x: Vec<Vec<f64>>,
    pub g1: Vec<Vec<f64>>,
    pub g2: Vec<Vec<f64>>,
}

pub(crate) fn n_params(n: usize, d: usize) -> usize {
    (2 * n + 3) * d
}

pub(crate) fn unpack(v: &[f64], n: usize, d: usize) -> InterpData {
    let m = n + 2;
    let dx = |k: usize| &v[k * d..(k + 1) * d];
    let big_g = |k: usize| &v[(n + 1 + k) * d..(n + 2 + k) * d];
    let mut x = vec![vec![0.0; d]; m];
    for k in (0..=n).rev() {
        for i in 0..d {
            x[k][i] = x[k + 1][i] + dx(k)[i];
        }
    }
    let mut g2 = vec![vec![0.0; d]; m];
    for k in (0..=n).rev() {
        for i in 0..d {
            g2[k][i] = g2[k + 1][i] + big_g(k + 1)[i];
        }
    }
    let mut g1 = Vec::with_capacity(m);
    g1.push((0..d).map(|i| g2[0][i] + big_g(0)[i]).collect());
    for k in 1..m {
        g1.push(g2[k - 1].clone());
    }
    InterpData { x, g1, g2 }
}

/// Longest-path closure of `f_i >= f_j + W[j][i]`.
pub(crate) fn closure(x: &[Vec<f64>], g: &[Vec<f64>], mu: f64, l: f64) -> Vec<Vec<f64>> {
    let m = x.len();
    let d = x[0].len();
    let inv = if l.is_finite() { 1.0 / (l - mu) } else { 0.0 };
    let mut w = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..m {
            if i == j {
                continue;
            }
            let (mut lin, mut dd, mut rr) = (0.0, 0.0, 0.0);
            for t in 0..d {
                let dx = x[i][t] - x[j][t];
                let r = g[i][t] - g[j][t] - mu * dx;
                lin += g[j][t] * dx;
                dd += dx * dx;
                rr += r * r;
            }
            w[j][i] = lin + 0.5 * mu * dd + 0.5 * inv * rr;
        }
    }
    for k in 0..m {
        for i in 0..m {
            let wik = w[i][k];
            for j in 0..m {
                let c = wik + w[k][j];
                if c > w[i][j] {
                    w[i][j] = c;
                }
            }
        }
    }
    w
}

pub(crate) struct Evaluated {
    /// Sum of positive cycle weights over both closures.
    pub penalty: f64,
    pub delta: f64,
    pub gaps: Vec<f64>,
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
}

pub(crate) fn evaluate(data: &InterpData, c: &Curvatures) -> Evaluated {
    let m = data.x.len();
    let d1 = closure(&data.x, &data.g1, c.mu1, c.l1);
    let d2 = closure(&data.x, &data.g2, c.mu2, c.l2);
    let penalty: f64 = (0..m).map(|i| d1[i][i].max(0.0) + d2[i][i].max(0.0)).sum();
    let delta = d1[m - 1][0] + d2[0][m - 1];
    let gaps = (0..m - 1)
        .map(|k| data.x[k].iter().zip(&data.x[k + 1]).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    Evaluated { penalty, delta, gaps, d1, d2 }
}

/// A trajectory realizing the data with the smallest consistent decrease.
pub(crate) fn witness(data: &InterpData, ev: &Evaluated, c: &Curvatures) -> Trajectory {
    let m = data.x.len();
    let f1vals: Vec<f64> = (0..m).map(|i| ev.d1[m - 1][i]).collect();
    let f2vals: Vec<f64> = (0..m).map(|i| ev.d2[0][i]).collect();
    let fvals = f1vals.iter().zip(&f2vals).map(|(a, b)| a - b).collect();
    let vecs = |v: &[Vec<f64>]| v.iter().map(|p| DVector::from_column_slice(p)).collect::<Vec<_>>();
    Trajectory {
        points: vecs(&data.x),
        g1: vecs(&data.g1),
        g2: vecs(&data.g2),
        f1vals,
        f2vals,
        fvals,
        meta: TrajectoryMeta {
            id: None,
            kind: RunKind::Dca,
            n: m - 2,
            policy: SubgradientPolicy::Canonical,
            curvatures: *c,
            stepsizes: None,
            shifts: None,
            f_lo: None,
        },
    }
}
