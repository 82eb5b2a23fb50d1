use crate::error::{Error, Result};

/// `E_k(z) = sum_{j=1}^{2k} z^{-j}`.
///
/// Accepts any real `z`; negative ratios `mu2/mu1` occur in the weakly
/// convex regimes. `E_k(0) = +inf` for `k >= 1` and `E_k(+inf) = 0`.
pub fn e_sum(k: usize, z: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if z == 0.0 {
        return f64::INFINITY;
    }
    if z.is_infinite() {
        return 0.0;
    }
    if z == 1.0 {
        return 2.0 * k as f64;
    }
    if k <= 512 || (z - 1.0).abs() < 1e-3 {
        // Horner on r = 1/z: r(1 + r(1 + ... ))
        let r = 1.0 / z;
        let mut acc = 0.0;
        for _ in 0..2 * k {
            acc = r * (1.0 + acc);
        }
        return acc;
    }
    (-1.0 + z.powi(-2 * k as i32)) / (1.0 - z)
}

/// `P_N(eta, rho)` from the conjectured nonconvex rate; `eta = inf` takes the limit.
pub fn p_n(eta: f64, rho: f64, n: usize) -> Result<f64> {
    if eta == rho || eta + rho == 0.0 {
        return Err(Error::Domain(format!("P_N is singular at eta = {eta}, rho = {rho}")));
    }
    if eta == 0.0 || rho == 0.0 || eta.is_nan() || eta == f64::NEG_INFINITY || !rho.is_finite() {
        return Err(Error::Domain(format!("P_N needs nonzero eta, rho with rho finite; got {eta}, {rho}")));
    }
    let sum: f64 = (0..=n).map(|k| (e_sum(k, eta) - e_sum(k, rho)).max(0.0)).sum();
    let (lead, inner) = if eta == f64::INFINITY {
        (1.0 + rho, -(1.0 - rho))
    } else {
        ((1.0 + eta) * (1.0 + rho) / (eta + rho), (1.0 - eta) * (1.0 - rho) / (eta - rho))
    };
    Ok(lead * (n as f64 + inner * sum))
}
