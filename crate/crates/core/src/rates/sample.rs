use rand::Rng;

use super::{in_convex_linear_domain, in_strong_weak_linear_domain, p5_threshold, Regime};
use crate::bounds::Curvatures;

/// Sets of curvature quadruples that can be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleDomain {
    Regime(Regime),
    /// `0 < L2 <= mu1`, `mu2 >= -L2 mu1/(L2 + mu1)`.
    ConvexLinear,
    /// `L2 + mu2 <= 0 < mu1 + mu2`.
    StrongWeakLinear,
}

fn scale<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // log-uniform on [0.1, 10]
    10f64.powf(rng.gen_range(-1.0..1.0))
}

fn above<R: Rng + ?Sized>(rng: &mut R, lo: f64, infinite_prob: f64) -> f64 {
    if rng.gen_bool(infinite_prob) {
        f64::INFINITY
    } else {
        lo + lo.abs().max(0.1) * rng.gen_range(1e-3..5.0)
    }
}

fn between<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// A random point of `domain`; boundaries have positive probability only through rounding.
pub fn sample_curvatures<R: Rng + ?Sized>(domain: SampleDomain, rng: &mut R) -> Curvatures {
    let mu1 = scale(rng);
    let inside = |c: &Curvatures| c.validate().is_ok() && c.mu1 + c.mu2 > 0.0;
    loop {
        let c = match domain {
            SampleDomain::Regime(Regime::P1) => {
                let mu2 = mu1 * rng.gen_range(0.0..=1.0);
                let l2 = above(rng, mu1, 0.1);
                Curvatures::new(mu1, above(rng, mu1, 0.2), mu2, l2)
            }
            SampleDomain::Regime(Regime::P2) => sample_curvatures(SampleDomain::Regime(Regime::P1), rng).swapped(),
            SampleDomain::Regime(Regime::P3) => {
                let l2 = above(rng, mu1, 0.1);
                let mu2 = between(rng, p5_threshold(mu1, l2), 0.0);
                if mu2 >= 0.0 {
                    continue;
                }
                Curvatures::new(mu1, above(rng, mu1, 0.2), mu2, l2)
            }
            SampleDomain::Regime(Regime::P4) | SampleDomain::ConvexLinear => {
                let l2 = mu1 * rng.gen_range(0.01..=1.0);
                let mu2 = between(rng, p5_threshold(mu1, l2), l2);
                Curvatures::new(mu1, above(rng, mu1, 0.2), mu2, l2)
            }
            SampleDomain::Regime(Regime::P5) => {
                let mu2 = -mu1 * rng.gen_range(0.01..0.99);
                let l2 = between(rng, mu2, -mu1 * mu2 / (mu1 + mu2));
                Curvatures::new(mu1, above(rng, mu1, 0.2), mu2, l2)
            }
            SampleDomain::StrongWeakLinear => {
                let mu2 = -mu1 * rng.gen_range(0.01..0.99);
                let l2 = between(rng, mu2, -mu2);
                Curvatures::new(mu1, above(rng, mu1, 0.2), mu2, l2)
            }
            SampleDomain::Regime(Regime::P6) => {
                let mu2 = scale(rng);
                let mu1 = mu2 * rng.gen_range(0.0..=1.0);
                let l1 = between(rng, mu1, mu2);
                if l1 <= 0.0 {
                    continue;
                }
                Curvatures::new(mu1, l1, mu2, above(rng, mu2, 0.2))
            }
        };
        let ok = inside(&c)
            && match domain {
                SampleDomain::ConvexLinear => in_convex_linear_domain(&c),
                SampleDomain::StrongWeakLinear => in_strong_weak_linear_domain(&c),
                SampleDomain::Regime(_) => true,
            };
        if ok {
            return c;
        }
    }
}
