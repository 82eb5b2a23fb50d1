use serde::{Deserialize, Serialize};

use super::lemmas::{certificate, LemmaId};
use super::ExactCurvatures;
use crate::bounds::CurvatureBounds;
use crate::engine::map_pgd_to_dc;
use crate::error::{Error, Result};

/// Two readings of the PGD descent lemma for `h` convex and nonsmooth, next to
/// the regime p3 claim under the PGD to DCA mapping.
///
/// Each pair is the coefficients of `|dx[k]|^2/2` and `|dx[k+1]|^2/2`. The
/// `scaled` reading takes the displayed curvatures as `gamma L_phi` and
/// `gamma mu_phi`; `literal` takes them as given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgdLemmaReadings {
    pub scaled: [f64; 2],
    pub literal: [f64; 2],
    pub mapped_p3: [f64; 2],
    pub scaled_matches: bool,
    pub literal_matches: bool,
}

fn displayed(a: f64, b: f64, gamma: f64) -> [f64; 2] {
    let d = gamma * (2.0 - a - b);
    [((2.0 - a) * (2.0 - b) - 1.0) / d, 1.0 / d]
}

fn agree(x: [f64; 2], y: [f64; 2]) -> bool {
    x.iter().zip(&y).all(|(a, b)| (a - b).abs() <= 1e-10 * (1.0 + b.abs()))
}

pub fn pgd_lemma_readings(l_phi: f64, mu_phi: f64, gamma: f64) -> Result<PgdLemmaReadings> {
    let phi = CurvatureBounds::new(mu_phi, l_phi)?;
    let h = CurvatureBounds::nonsmooth(0.0)?;
    let c = map_pgd_to_dc(&phi, &h, gamma)?;
    if !(c.l2 + c.mu2 != 0.0) {
        return Err(Error::Domain(format!("gamma (L_phi + mu_phi) = 2 at gamma = {gamma}")));
    }
    let cert = certificate(LemmaId::P3, &ExactCurvatures::<f64>::from_curvatures(&c)?)?;
    let mapped_p3 = cert.claim;
    let scaled = displayed(gamma * l_phi, gamma * mu_phi, gamma);
    let literal = displayed(l_phi, mu_phi, gamma);
    Ok(PgdLemmaReadings {
        scaled,
        literal,
        mapped_p3,
        scaled_matches: agree(scaled, mapped_p3),
        literal_matches: agree(literal, mapped_p3),
    })
}
