use super::*;

fn c(mu1: f64, l1: f64, mu2: f64, l2: f64) -> Curvatures {
    Curvatures::new(mu1, l1, mu2, l2)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn e_sum_values() {
    assert_eq!(e_sum(0, 0.3), 0.0);
    assert_eq!(e_sum(1, 0.0), f64::INFINITY);
    assert_eq!(e_sum(3, f64::INFINITY), 0.0);
    assert!(close(e_sum(1, 0.5), 6.0, 1e-15));
    assert!(close(e_sum(2, 2.0), 0.9375, 1e-15));
    assert!(close(e_sum(1, -0.6), -5.0 / 3.0 + 25.0 / 9.0, 1e-14));
    // closed form branch agrees with direct summation
    let direct: f64 = (1..=2 * 600).map(|j| 1.1f64.powi(-j)).sum();
    assert!(close(e_sum(600, 1.1), direct, 1e-12));
}

#[test]
fn p_n_small_cases() {
    assert!(close(p_n(2.0, -0.5, 1).unwrap(), 1.0, 1e-14));
    assert!(p_n(0.5, 0.5, 1).is_err());
    assert!(p_n(0.5, -0.5, 1).is_err());
    assert!(p_n(0.0, -0.5, 1).is_err());
    for n in 1..6 {
        let lim = p_n(f64::INFINITY, -0.3, n).unwrap();
        assert!(close(lim, p_n(1e9, -0.3, n).unwrap(), 1e-7), "N={n}");
    }
}

#[test]
fn classification_table() {
    let cases = [
        (c(1.0, 2.0, 0.5, 3.0), Regime::P1, RegimeStatus::TightAllN),
        (c(0.5, 3.0, 1.0, 2.0), Regime::P2, RegimeStatus::TightAllN),
        (c(1.0, 2.0, -0.5, 3.0), Regime::P3, RegimeStatus::TightAllN),
        (c(1.0, 2.0, -0.4, 0.9), Regime::P4, RegimeStatus::ProvenLinear),
        (c(1.0, 2.0, -0.8, 3.0), Regime::P5, RegimeStatus::Conjectured),
        (c(1.0, 2.0, -0.6, 0.5), Regime::P5, RegimeStatus::ProvenLinear),
        (c(0.2, 1.0, 1.5, 3.0), Regime::P6, RegimeStatus::Conjectured),
    ];
    for (cv, r, s) in cases {
        let rep = classify_regime(&cv).unwrap();
        assert_eq!((rep.regime, rep.status), (r, s), "{cv}");
    }
}

#[test]
fn boundaries_go_to_lowest_index() {
    // mu2 = mu1
    assert_eq!(classify_regime(&c(1.0, 2.0, 1.0, 3.0)).unwrap().regime, Regime::P1);
    // mu2 on the p3/p5 threshold: -L2 mu1/(L2 + mu1) = -0.75
    assert_eq!(classify_regime(&c(1.0, 2.0, -0.75, 3.0)).unwrap().regime, Regime::P3);
    // L2 = mu1 between p3 and p4
    assert_eq!(classify_regime(&c(1.0, 2.0, -0.2, 1.0)).unwrap().regime, Regime::P4);
    // with L2 = mu1 the p3 and p4 coefficients agree
    let cv = c(1.0, 2.0, -0.2, 1.0);
    assert!(close(regime_coefficient(Regime::P3, &cv), regime_coefficient(Regime::P4, &cv), 1e-15));
}

#[test]
fn nonsmooth_f2() {
    let rep = classify_regime(&c(1.0, f64::INFINITY, -0.5, f64::INFINITY)).unwrap();
    assert_eq!(rep.regime, Regime::P3);
    assert_eq!(rep.p_value, 0.5);
    let rep = classify_regime(&c(1.0, f64::INFINITY, 0.5, f64::INFINITY)).unwrap();
    assert_eq!((rep.regime, rep.p_value), (Regime::P1, 1.5));
}

#[test]
fn domain_errors() {
    assert!(classify_regime(&c(1.0, 2.0, -1.0, 3.0)).is_err());
    assert!(classify_regime(&c(-1.0, 2.0, 3.0, 4.0)).is_err());
    assert!(sublinear_rate_bound(&c(1.0, 2.0, 0.5, 3.0), 0, 1.0).is_err());
    assert!(sublinear_rate_bound(&c(1.0, 2.0, 0.5, 3.0), 1, -1.0).is_err());
    assert!(tight_rate_bound(&c(1.0, 2.0, 0.5, 3.0), 2, 1.0).is_err());
}

#[test]
fn worst_case_denominators() {
    // optimal values of the performance estimation problem, N = 1, 2, 3
    let sub = |cv: Curvatures, n| sublinear_rate_bound(&cv, n, 1.0).unwrap().denominator;
    let tight = |cv: Curvatures, n| tight_rate_bound(&cv, n, 1.0).unwrap().denominator;
    for (n, d) in [(1, 3.1), (2, 4.7), (3, 6.3)] {
        assert!(close(sub(c(1.0, 2.0, 0.5, 3.0), n), d, 1e-12));
    }
    for (n, d) in [(1, 1.3), (2, 2.1), (3, 2.9)] {
        assert!(close(sub(c(1.0, 2.0, -0.5, 3.0), n), d, 1e-12));
    }
    for (n, d) in [(1, 2.94568), (2, 5.84158), (3, 9.41676)] {
        assert!(close(tight(c(1.0, 2.0, -0.4, 0.9), n), d, 1e-5));
    }
    for (n, d) in [(1, 1.51111), (2, 4.59753), (3, 13.17092)] {
        assert!(close(tight(c(1.0, 2.0, -0.6, 0.5), n), d, 1e-5));
    }
    assert!(close(sub(c(1.0, 2.0, -0.8, 3.0), 1), 0.5125, 1e-12));
    assert!(close(sub(c(0.2, 1.0, 1.5, 3.0), 1), 7.325, 1e-12));
    for (n, d) in [(1, 7.325), (2, 19.98125), (3, 48.45775)] {
        assert!(close(tight(c(0.2, 1.0, 1.5, 3.0), n), d, 1e-5));
    }
}

#[test]
fn linear_rates_reduce_to_sublinear_at_one_step() {
    for cv in [c(1.0, 2.0, -0.4, 0.9), c(1.0, 2.0, -0.6, 0.5), c(1.0, 2.0, -0.8, 3.0), c(0.2, 1.0, 1.5, 3.0), c(1.0, 2.0, -0.5, 3.0)] {
        let s = sublinear_rate_bound(&cv, 1, 1.0).unwrap().denominator;
        let t = tight_rate_bound(&cv, 1, 1.0).unwrap().denominator;
        assert!(close(t, s, 1e-12), "{cv}: {t} vs {s}");
    }
}

#[test]
fn proven_flag() {
    assert!(tight_rate_bound(&c(1.0, 2.0, -0.4, 0.9), 3, 1.0).unwrap().proven);
    assert!(tight_rate_bound(&c(1.0, 2.0, -0.6, 0.5), 3, 1.0).unwrap().proven);
    assert!(!tight_rate_bound(&c(1.0, 2.0, -0.8, 3.0), 3, 1.0).unwrap().proven);
    assert!(!tight_rate_bound(&c(0.2, 1.0, 1.5, 3.0), 3, 1.0).unwrap().proven);
}

#[test]
fn t1_sign_cases() {
    assert!(t1_sign(1.0, 0.5, 2.0).is_err());
    assert_eq!(t1_sign(1.0, -0.5, 0.0).unwrap(), Sign::Positive);
    assert_eq!(t1_sign(1.0, -0.5, f64::INFINITY).unwrap(), Sign::Negative);
    // on the threshold mu2 = -L2 mu1/(L2 + mu1) with exact values
    assert_eq!(t1_sign(1.0, -0.5, 1.0).unwrap(), Sign::Zero);
    assert_eq!(t1_sign(1.0, -0.4, 1.0).unwrap(), Sign::Negative);
    assert_eq!(t1_sign(1.0, -0.6, 1.0).unwrap(), Sign::Positive);
}

#[test]
fn threshold_stepsize() {
    for l in [0.5, 1.0, 3.0, 10.0] {
        let g = pgd_threshold_stepsize(l, -l, 0.0).unwrap();
        assert!((g - 3f64.sqrt() / l).abs() <= 1e-10 / l.max(1.0), "{g}");
    }
    assert!(pgd_threshold_stepsize(0.0, -1.0, 0.0).is_err());
}

#[test]
fn conjectured_nonconcave_matches_worst_case() {
    let cv = c(1.0, 2.0, -0.8, 3.0);
    for (n, d) in [(2, 0.88182), (3, 1.24545)] {
        let t = tight_rate_bound(&cv, n, 1.0).unwrap().denominator;
        assert!(close(t, d, 1e-5), "{n}: {t}");
    }
}

#[test]
fn samplers_land_in_their_regime() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for r in Regime::ALL {
        for _ in 0..500 {
            let cv = sample_curvatures(SampleDomain::Regime(r), &mut rng);
            let got = classify_regime(&cv).unwrap().regime;
            // p4 and p5 share the L2 <= mu1 boundary with p3 only on measure zero sets
            assert_eq!(got, r, "{cv}");
        }
    }
    for _ in 0..500 {
        assert!(in_convex_linear_domain(&sample_curvatures(SampleDomain::ConvexLinear, &mut rng)));
        assert!(in_strong_weak_linear_domain(&sample_curvatures(SampleDomain::StrongWeakLinear, &mut rng)));
    }
}
