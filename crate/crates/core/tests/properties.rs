mod common;

use common::*;
use dcrates::certificates::{
    certificate, combine, mirrored, square_identities, step_slacks, telescope, verify_descent_lemma, verify_report, ExactCurvatures,
    LemmaId,
};
use dcrates::engine::{dc_split_of_pgd, dca_run, pgd_run, pgd_step, shift_pgd_splitting};
use dcrates::oracles::check_interpolation;
use dcrates::rates::{
    classify_regime, e_sum, p5_threshold, p_n, regime_coefficient, sample_curvatures, sublinear_rate_bound,
    tight_rate_bound, Regime, SampleDomain,
};
use dcrates::{CurvatureBounds, Curvatures, SubgradientPolicy};
use proptest::prelude::*;
use rand::Rng;

/// `+-v` with `lo < v < hi`.
fn signed(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (any::<bool>(), lo..hi).prop_map(|(neg, v)| if neg { -v } else { v })
}

fn regime() -> impl Strategy<Value = Regime> {
    prop::sample::select(Regime::ALL.to_vec())
}

fn random_bounds<R: Rng>(rng: &mut R, smooth: bool) -> CurvatureBounds {
    let mu = rng.gen_range(-2.0..3.0);
    if smooth {
        CurvatureBounds::new(mu, mu + rng.gen_range(0.05..5.0)).unwrap()
    } else {
        CurvatureBounds::nonsmooth(mu).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn oracle_samples_are_interpolable(seed in any::<u64>(), d in 1usize..4) {
        let mut r = rng(seed);
        let b = random_bounds(&mut r, true);
        let f = random_oracle(&mut r, d, &b);
        let samples: Vec<_> = (0..24)
            .map(|i| f.sample(&random_vector(&mut r, d, 3.0), [SubgradientPolicy::Canonical, SubgradientPolicy::Left][i % 2]).unwrap())
            .collect();
        prop_assert!(check_interpolation(&b, &samples, 1e-9).is_empty());
    }

    #[test]
    fn subgradient_is_policy_free_off_kinks(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = random_bounds(&mut r, false);
        let f = random_piecewise(&mut r, &b);
        let x = random_vector(&mut r, 1, 3.0);
        let g = f.subgradient(&x, SubgradientPolicy::Canonical).unwrap();
        prop_assert_eq!(&f.subgradient(&x, SubgradientPolicy::Left).unwrap(), &g);
        prop_assert_eq!(&f.subgradient(&x, SubgradientPolicy::Right).unwrap(), &g);
    }

    #[test]
    fn tilt_argmin_returns_a_minimizer(seed in any::<u64>(), d in 1usize..4, smooth in any::<bool>()) {
        let mut r = rng(seed);
        let mu = r.gen_range(0.05..3.0);
        let b = if smooth { CurvatureBounds::new(mu, mu + 2.0).unwrap() } else { CurvatureBounds::nonsmooth(mu).unwrap() };
        let f = random_oracle(&mut r, d, &b);
        let g = random_vector(&mut r, d, 4.0);
        let x = f.tilt_argmin(&g).unwrap();
        let fx = f.eval(&x).unwrap();
        for _ in 0..100 {
            let y = random_vector(&mut r, d, 5.0);
            let slack = f.eval(&y).unwrap() - fx - g.dot(&(&y - &x));
            prop_assert!(slack >= -1e-9, "slack {slack}");
        }
    }

    #[test]
    fn curvature_shift_round_trip(seed in any::<u64>(), d in 1usize..4, lambda in -3.0f64..3.0) {
        let mut r = rng(seed);
        let smooth = r.gen_bool(0.5);
        let b = random_bounds(&mut r, smooth);
        let f = random_oracle(&mut r, d, &b);
        let back = f.shift_curvature(lambda).unwrap().shift_curvature(-lambda).unwrap();
        for _ in 0..10 {
            let x = random_vector(&mut r, d, 3.0);
            let (a, c) = (f.eval(&x).unwrap(), back.eval(&x).unwrap());
            prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {c}");
        }
    }

    #[test]
    fn dca_runs_decrease_and_satisfy_base_inequalities(seed in any::<u64>(), reg in regime(), n in 1usize..8) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(reg), &mut r);
        let t = random_run(&mut r, &c, n);
        assert_interpolable(&t, 1e-9);
        let scale = value_scale(&t);
        for k in 0..=n {
            prop_assert_eq!(&t.g1[k + 1], &t.g2[k]);
            let decrease = t.delta_f(k) - 0.5 * c.mu_sum() * t.dx(k).norm_squared();
            prop_assert!(decrease >= -1e-9 * scale, "step {k}: {decrease}");
            for (name, s) in ["B", "C_f1", "C_f2"].iter().zip(step_slacks(&t, k).unwrap()) {
                prop_assert!(s >= -1e-9 * scale, "{name} at step {k}: {s}");
            }
        }
    }

    #[test]
    fn telescoping_reproduces_the_decrease(seed in any::<u64>(), reg in regime(), n in 1usize..8) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(reg), &mut r);
        let t = random_run(&mut r, &c, n);
        let tel = telescope(LemmaId::for_regime(reg), &t).unwrap();
        let scale = value_scale(&t);
        prop_assert!(tel.identity_error().abs() <= 1e-8 * scale, "{}", tel.identity_error());
        for s in &tel.slacks {
            prop_assert!(*s >= -1e-8 * scale, "{s}");
        }
        // lemma sum bounds the decrease by the regime denominator times the smallest step
        let denom = classify_regime(&c).unwrap().denominator(n);
        prop_assert!(t.total_decrease() >= 0.5 * denom * t.min_gap_sq() - 1e-8 * scale);
    }

    #[test]
    fn regime_lemmas_verify(seed in any::<u64>(), reg in regime()) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(reg), &mut r);
        let ec = ExactCurvatures::<f64>::from_curvatures(&c).unwrap();
        let dec = verify_descent_lemma(LemmaId::for_regime(reg), &ec).unwrap();
        prop_assert!(dec.min_coefficient() >= -1e-12);
        let claim: f64 = dec.claim.iter().sum();
        prop_assert!(close(claim, regime_coefficient(reg, &c), 1e-10));
        if dec.leftover_max > 1e-10 {
            // mu2 close to L2 leaves rounding above the threshold
            let exact = verify_report(LemmaId::for_regime(reg), &c, true).unwrap();
            prop_assert!(exact.min_coefficient >= 0.0 && exact.leftover_max == 0.0, "{exact:?}");
        }
    }

    #[test]
    fn mirrored_certificates_agree(seed in any::<u64>(), pair in prop::sample::select(vec![(Regime::P1, Regime::P2), (Regime::P4, Regime::P6)])) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(pair.0), &mut r);
        let ec = ExactCurvatures::<f64>::from_curvatures(&c).unwrap();
        let es = ec.swapped();
        let a = certificate(LemmaId::for_regime(pair.0), &ec).unwrap();
        let b = certificate(LemmaId::for_regime(pair.1), &es).unwrap();
        let fa = combine(a.base_shift, &a.beta1, &a.beta2, &ec).unwrap().minus(&a.claim_form());
        let fb = combine(b.base_shift, &b.beta1, &b.beta2, &es).unwrap().minus(&b.claim_form());
        let diff = mirrored(&fa).minus(&fb).max_abs();
        prop_assert!(diff <= 1e-12 * (1.0 + fa.max_abs()), "{diff}");
    }

    #[test]
    fn square_identities_vanish(mu_i in -5.0f64..5.0, mu_j in signed(1e-3, 10.0)) {
        for f in square_identities(&mu_i, &mu_j).unwrap() {
            prop_assert!(f.max_abs() <= 1e-12 * (1.0 + mu_i.abs() + mu_j.abs()).powi(3));
        }
    }

    #[test]
    fn classification_covers_the_domain(seed in any::<u64>()) {
        let mut r = rng(seed);
        for _ in 0..200 {
            let mu1 = r.gen_range(0.0..5.0);
            let mu2 = r.gen_range(-5.0..5.0);
            if mu1 + mu2 <= 0.0 {
                continue;
            }
            let l1 = if r.gen_bool(0.1) { f64::INFINITY } else { mu1 + r.gen_range(1e-3..5.0) };
            let l2 = if r.gen_bool(0.1) { f64::INFINITY } else { mu2 + r.gen_range(1e-3..5.0) };
            let rep = classify_regime(&Curvatures::new(mu1, l1, mu2, l2)).unwrap();
            prop_assert!(rep.p_value > 0.0);
        }
    }

    #[test]
    fn tight_denominators_grow_with_n(seed in any::<u64>(), reg in regime()) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(reg), &mut r);
        if let Ok(first) = tight_rate_bound(&c, 1, 1.0) {
            let mut prev = first.denominator;
            for n in 2..=12 {
                let d = tight_rate_bound(&c, n, 1.0).unwrap().denominator;
                prop_assert!(d >= prev * (1.0 - 1e-12), "N={n}: {d} < {prev}");
                prev = d;
            }
        }
    }

    #[test]
    fn single_step_rates_agree(seed in any::<u64>(), reg in prop::sample::select(vec![Regime::P3, Regime::P4, Regime::P5, Regime::P6])) {
        let mut r = rng(seed);
        let c = sample_curvatures(SampleDomain::Regime(reg), &mut r);
        let t = tight_rate_bound(&c, 1, 1.0).unwrap();
        let s = sublinear_rate_bound(&c, 1, 1.0).unwrap();
        prop_assert!(close(t.denominator, s.denominator, 1e-12), "{} vs {} at {c}", t.denominator, s.denominator);
    }

    #[test]
    fn e_sum_recursion(k in 0usize..40, z in signed(0.2, 5.0)) {
        let next = e_sum(k + 1, z);
        let expected = e_sum(k, z) + z.powi(-(2 * k as i32 + 1)) + z.powi(-(2 * k as i32 + 2));
        prop_assert!(close(next, expected, 1e-10), "{next} vs {expected}");
    }

    #[test]
    fn p_n_single_step(eta in 0.1f64..3.0, rho in -0.95f64..-0.05) {
        let v = p_n(eta, rho, 1).unwrap();
        prop_assert!(v.is_finite());
    }

    #[test]
    fn pgd_matches_dca_on_the_splitting(seed in any::<u64>(), n in 0usize..11) {
        let mut r = rng(seed);
        let (phi, h, gamma, x0) = random_pgd(&mut r);
        let p = pgd_run(&phi, &h, &[gamma], &x0, n).unwrap();
        let d = dca_run(&dc_split_of_pgd(&phi, &h, gamma).unwrap(), &x0, n, SubgradientPolicy::Canonical).unwrap();
        for (a, b) in p.points.iter().zip(&d.points) {
            prop_assert!((a - b).amax() <= 1e-12 * (1.0 + a.amax()), "{a} vs {b}");
        }
        assert_interpolable(&p, 1e-9);
    }

    #[test]
    fn curvature_shift_changes_only_the_stepsize(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (phi, h, gamma, x) = random_pgd(&mut r);
        let lambda = r.gen_range(-h.bounds().mu()..2.0).min(0.999 / gamma);
        let (phi2, h2, g2) = shift_pgd_splitting(&phi, &h, gamma, lambda).unwrap();
        prop_assert!(h2.bounds().mu() >= 0.0);
        let a = pgd_step(&phi, &h, gamma, &x).unwrap();
        let b = pgd_step(&phi2, &h2, g2, &x).unwrap();
        prop_assert!((&a - &b).amax() <= 1e-12 * (1.0 + a.amax()), "{a} vs {b}");
    }
}

#[test]
fn boundary_coefficients_agree() {
    let mut r = rng(11);
    for _ in 0..100 {
        let mu1: f64 = r.gen_range(0.1..10.0);
        let l1 = mu1 + r.gen_range(0.1..5.0);
        let l2 = r.gen_range(0.1..10.0);
        let agree = |a: Regime, b: Regime, c: &Curvatures| {
            let (pa, pb) = (regime_coefficient(a, c), regime_coefficient(b, c));
            assert!(close(pa, pb, 1e-12), "{a}/{b} at {c}: {pa} vs {pb}");
        };
        // mu1 = mu2
        agree(Regime::P1, Regime::P2, &Curvatures::new(mu1, l1, mu1, mu1 + l2));
        // mu2 on the p5 threshold
        let c = Curvatures::new(mu1, l1, p5_threshold(mu1, l2), l2);
        if l2 > mu1 {
            agree(Regime::P3, Regime::P5, &c);
        } else {
            agree(Regime::P4, Regime::P5, &c);
        }
        // mu2 = 0
        agree(Regime::P1, Regime::P3, &Curvatures::new(mu1, l1, 0.0, mu1 + l2));
        // L2 = mu1
        let mu2 = r.gen_range(p5_threshold(mu1, mu1)..mu1 * 0.99);
        let c = Curvatures::new(mu1, l1, mu2, mu1);
        agree(if mu2 >= 0.0 { Regime::P1 } else { Regime::P3 }, Regime::P4, &c);
    }
}
