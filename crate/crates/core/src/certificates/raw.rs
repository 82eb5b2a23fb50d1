//! The base inequalities rebuilt from function values and subgradients.
//!
//! Raw vectors are `x0, x1, x2, g1_0, g2_0, g2_1, g2_2` (the DCA identity
//! `g1_{j+1} = g2_j` removes the other `g1`); raw scalars are
//! `f1_0, f1_1, f1_2, f2_0, f2_1, f2_2`.

use super::form::{lin_sub, unit, Form, Lin};
use super::{ExactCurvatures, N_SYMBOLS};
use crate::exact::Scalar;

pub const N_RAW: usize = 7;
pub const N_RAW_SCALARS: usize = 6;

fn x(j: usize) -> usize {
    j
}

fn g1(j: usize) -> usize {
    if j == 0 {
        3
    } else {
        g2(j - 1)
    }
}

fn g2(j: usize) -> usize {
    4 + j
}

/// Which function and which ordered pair of consecutive iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitive {
    /// `f1` at `(x^k, x^{k+1})`.
    F1Forward,
    /// `f1` at `(x^{k+1}, x^k)`.
    F1Backward,
    F2Forward,
    F2Backward,
}

/// `f(a) - f(b) - <g_b, a - b> >= mu/2 |a - b|^2 + |g_a - g_b - mu(a - b)|^2 / (2(L - mu))`.
pub fn primitive<S: Scalar>(c: &ExactCurvatures<S>, which: Primitive, shift: usize) -> Form<S> {
    let (k, k1) = (shift, shift + 1);
    let (first, forward) = match which {
        Primitive::F1Forward => (true, true),
        Primitive::F1Backward => (true, false),
        Primitive::F2Forward => (false, true),
        Primitive::F2Backward => (false, false),
    };
    let (a, b) = if forward { (k, k1) } else { (k1, k) };
    let (mu, inv, g, fo) = if first {
        (c.mu1.clone(), c.inv1(), g1 as fn(usize) -> usize, 0)
    } else {
        (c.mu2.clone(), c.inv2(), g2 as fn(usize) -> usize, 3)
    };
    let e = |i| unit::<S>(N_RAW, i);
    let d = lin_sub(&e(x(a)), &S::one(), &e(x(b)));
    let gd = lin_sub(&e(g(a)), &S::one(), &e(g(b)));
    let two = S::from_int(2);
    let mut f = Form::zeros(N_RAW, N_RAW_SCALARS);
    f.add_affine(fo + a, S::one())
        .add_affine(fo + b, -S::one())
        .add_inner(&e(g(b)), &d, S::one())
        .add_square(&d, mu.clone() / two.clone())
        .add_square(&lin_sub(&gd, &mu, &d), inv / two);
    f
}

/// Rewrites a five-symbol form in raw variables.
pub fn lift<S: Scalar>(f: &Form<S>) -> Form<S> {
    let e = |i| unit::<S>(N_RAW, i);
    let one = S::one();
    let t: Vec<Lin<S>> = vec![
        lin_sub(&e(x(0)), &one, &e(x(1))),
        lin_sub(&e(x(1)), &one, &e(x(2))),
        lin_sub(&e(g1(0)), &one, &e(g2(0))),
        lin_sub(&e(g1(1)), &one, &e(g2(1))),
        lin_sub(&e(g1(2)), &one, &e(g2(2))),
    ];
    debug_assert_eq!(t.len(), N_SYMBOLS);
    let s = |i| unit::<S>(N_RAW_SCALARS, i);
    // dF_j = f1_j - f2_j - f1_{j+1} + f2_{j+1}
    let df = |j: usize| {
        let mut v = s(j);
        v[3 + j] = -one.clone();
        v[j + 1] = -one.clone();
        v[4 + j] = one.clone();
        v
    };
    f.lifted(&t, &[df(0), df(1)])
}
