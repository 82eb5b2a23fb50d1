#![allow(dead_code)]

use dcrates::engine::{dca_run, DcInstance, Trajectory};
use dcrates::oracles::Piecewise1d;
use dcrates::{CurvatureBounds, Curvatures, FunctionOracle, Point, SubgradientPolicy};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Curvature drawn from `[mu, L]`, often at an end.
pub fn curvature<R: Rng>(rng: &mut R, b: &CurvatureBounds) -> f64 {
    let hi = if b.is_smooth() { b.l() } else { b.mu() + 5.0 };
    match rng.gen_range(0..4) {
        0 => b.mu(),
        1 => hi,
        _ => rng.gen_range(b.mu()..=hi),
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Point {
    DVector::from_fn(d, |_, _| rng.gen_range(-scale..scale))
}

/// Random rotation of a diagonal with entries in the bounds.
pub fn random_quadratic<R: Rng>(rng: &mut R, d: usize, b: &CurvatureBounds) -> FunctionOracle {
    let eig: Vec<f64> = (0..d).map(|_| curvature(rng, b)).collect();
    let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(eig)) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    FunctionOracle::quadratic(a, random_vector(rng, d, 2.0), rng.gen_range(-1.0..1.0), *b).expect("valid quadratic")
}

/// One-dimensional piecewise quadratic, kinked only when nonsmooth.
pub fn random_piecewise<R: Rng>(rng: &mut R, b: &CurvatureBounds) -> FunctionOracle {
    let pieces = rng.gen_range(1..=3);
    let mut breaks: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let curv: Vec<f64> = (0..=breaks.len()).map(|_| curvature(rng, b)).collect();
    let jumps: Vec<f64> = breaks.iter().map(|_| if b.is_smooth() { 0.0 } else { rng.gen_range(0.0..1.5) }).collect();
    let p = Piecewise1d::from_curvatures(&breaks, &curv, &jumps, rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0))
        .expect("valid pieces");
    FunctionOracle::piecewise(p, *b).expect("valid piecewise")
}

/// Random oracle of dimension `d`; piecewise ones only in 1-D.
pub fn random_oracle<R: Rng>(rng: &mut R, d: usize, b: &CurvatureBounds) -> FunctionOracle {
    if d == 1 && rng.gen_bool(0.6) {
        random_piecewise(rng, b)
    } else {
        random_quadratic(rng, d, b)
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, c: &Curvatures) -> DcInstance {
    let (b1, b2) = (c.f1().unwrap(), c.f2().unwrap());
    let d = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=3) };
    DcInstance::new(random_oracle(rng, d, &b1), random_oracle(rng, d, &b2)).unwrap()
}

pub fn random_run<R: Rng>(rng: &mut R, c: &Curvatures, n: usize) -> Trajectory {
    let inst = random_instance(rng, c);
    let x0 = random_vector(rng, inst.dim(), 3.0);
    let policy = [SubgradientPolicy::Canonical, SubgradientPolicy::Left, SubgradientPolicy::Right][rng.gen_range(0..3)];
    dca_run(&inst, &x0, n, policy).unwrap()
}

/// `1 + max |f_i(x^k)|`; absolute tolerances apply to unit-scaled data.
pub fn value_scale(t: &Trajectory) -> f64 {
    1.0 + t.f1vals.iter().chain(&t.f2vals).fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Both interpolation checks at `tol` relative to [`value_scale`].
pub fn assert_interpolable(t: &Trajectory, tol: f64) {
    let (v1, v2) = t.interpolation_violations(tol * value_scale(t));
    assert!(v1.is_empty() && v2.is_empty(), "f1: {v1:?}\nf2: {v2:?}");
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// `(phi, h, gamma, x0)` with `phi` smooth, `h` convex and `gamma` admissible.
pub fn random_pgd<R: Rng>(rng: &mut R) -> (FunctionOracle, FunctionOracle, f64, Point) {
    let d = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=3) };
    let mu_phi = rng.gen_range(-2.0..1.0);
    let phi_b = CurvatureBounds::new(mu_phi, mu_phi + rng.gen_range(0.1..3.0)).unwrap();
    let mu_h = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) };
    let h_b = if d == 1 && rng.gen_bool(0.5) {
        CurvatureBounds::nonsmooth(mu_h).unwrap()
    } else {
        CurvatureBounds::new(mu_h, mu_h + rng.gen_range(0.1..2.0)).unwrap()
    };
    let phi = random_quadratic(rng, d, &phi_b);
    let h = random_oracle(rng, d, &h_b);
    let limit = dcrates::engine::pgd_stepsize_limit(&phi_b, &h_b).min(10.0);
    let gamma = limit * rng.gen_range(0.05..0.95);
    (phi, h, gamma, random_vector(rng, d, 3.0))
}
