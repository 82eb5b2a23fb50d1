use std::fmt;

use serde::{Deserialize, Serialize};

use super::form::{is_psd, lin_sub, Form, Lin};
use super::{combine, e, half, ExactCurvatures, DX0, DX1, G0, G1, G2, N_SYMBOLS};
use crate::bounds::Curvatures;
use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::rates::Regime;

/// A two-iteration descent lemma: the six regime lemmas and the telescoping
/// steps of the two linear-rate theorems (with their step index `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "lemma", content = "k")]
pub enum LemmaId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    Thm31(usize),
    Thm32(usize),
}

impl LemmaId {
    pub const REGIMES: [LemmaId; 6] = [LemmaId::P1, LemmaId::P2, LemmaId::P3, LemmaId::P4, LemmaId::P5, LemmaId::P6];

    /// The descent lemma of a regime.
    pub fn for_regime(r: Regime) -> Self {
        match r {
            Regime::P1 => Self::P1,
            Regime::P2 => Self::P2,
            Regime::P3 => Self::P3,
            Regime::P4 => Self::P4,
            Regime::P5 => Self::P5,
            Regime::P6 => Self::P6,
        }
    }

    /// Parses `p1`..`p6`, `thm31`, `thm32`; `k` is used by the last two.
    pub fn parse(name: &str, k: usize) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "p1" => Self::P1,
            "p2" => Self::P2,
            "p3" => Self::P3,
            "p4" => Self::P4,
            "p5" => Self::P5,
            "p6" => Self::P6,
            "thm31" => Self::Thm31(k),
            "thm32" => Self::Thm32(k),
            other => return Err(Error::Domain(format!("unknown lemma {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
            Self::P5 => "p5",
            Self::P6 => "p6",
            Self::Thm31(_) => "thm31",
            Self::Thm32(_) => "thm32",
        }
    }

    /// 0 if the lemma bounds `dF[k]`, 1 if it bounds `dF[k+1]`.
    pub fn base_shift(&self) -> usize {
        match self {
            Self::P2 | Self::P6 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Thm31(k) | Self::Thm32(k) => write!(f, "{}(k={k})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareTerm<S> {
    pub label: String,
    pub lin: Lin<S>,
    pub coefficient: S,
}

/// Multipliers, claimed right-hand side and square completion of one lemma.
///
/// The lemma states `dF[base] >= claim[0]/2 |dx[k]|^2 + claim[1]/2 |dx[k+1]|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<S> {
    pub lemma: LemmaId,
    pub base_shift: usize,
    pub beta1: S,
    pub beta2: S,
    pub claim: [S; 2],
    pub squares: Vec<SquareTerm<S>>,
}

impl<S: Scalar> Certificate<S> {
    /// The claimed inequality as a form.
    pub fn claim_form(&self) -> Form<S> {
        let mut f = Form::zeros(N_SYMBOLS, 2);
        f.add_affine(self.base_shift, S::one())
            .add_square(&e(DX0), half(self.claim[0].clone()))
            .add_square(&e(DX1), half(self.claim[1].clone()));
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareDecomposition<S> {
    pub lemma: LemmaId,
    pub curvatures: Curvatures,
    pub beta1: S,
    pub beta2: S,
    pub claim: [S; 2],
    pub terms: Vec<SquareTerm<S>>,
    pub leftover: Vec<Vec<S>>,
    pub leftover_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub square: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub lemma: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub curvatures: Curvatures,
    pub beta1: f64,
    pub beta2: f64,
    pub claim_dx_k: f64,
    pub claim_dx_k1: f64,
    pub terms: Vec<TermReport>,
    pub min_coefficient: f64,
    pub leftover_max: f64,
}

impl<S: Scalar> SquareDecomposition<S> {
    pub fn min_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.to_f64()).fold(f64::INFINITY, f64::min)
    }

    pub fn report(&self) -> DecompositionReport {
        let k = match self.lemma {
            LemmaId::Thm31(k) | LemmaId::Thm32(k) => Some(k),
            _ => None,
        };
        DecompositionReport {
            lemma: self.lemma.name().to_string(),
            k,
            curvatures: self.curvatures,
            beta1: self.beta1.to_f64(),
            beta2: self.beta2.to_f64(),
            claim_dx_k: self.claim[0].to_f64(),
            claim_dx_k1: self.claim[1].to_f64(),
            terms: self
                .terms
                .iter()
                .map(|t| TermReport { square: t.label.clone(), coefficient: t.coefficient.to_f64() })
                .collect(),
            min_coefficient: self.min_coefficient(),
            leftover_max: self.leftover_max,
        }
    }
}

const G_NAMES: [&str; 3] = ["G[k]", "G[k+1]", "G[k+2]"];
const DX_NAMES: [&str; 2] = ["dx[k]", "dx[k+1]"];

fn square<S: Scalar>(g: usize, m: &S, m_name: &str, dx: usize, coefficient: S) -> SquareTerm<S> {
    SquareTerm {
        label: format!("{} - {}*{}", G_NAMES[g - G0], m_name, DX_NAMES[dx - DX0]),
        lin: lin_sub(&e(g), m, &e(dx)),
        coefficient,
    }
}

fn need_finite<S: Clone>(v: &Option<S>, what: &str, lemma: LemmaId) -> Result<S> {
    v.clone().ok_or_else(|| Error::Domain(format!("{lemma} needs a finite {what}")))
}

fn need_nonzero<S: Scalar>(v: &S, what: &str, lemma: LemmaId) -> Result<()> {
    if v.is_zero() {
        return Err(Error::Domain(format!("{lemma} needs {what} != 0")));
    }
    Ok(())
}

/// `sum_{j=1}^{2k} z^{-j}` in exact arithmetic.
fn e_sum_exact<S: Scalar>(k: usize, z: &S) -> S {
    let r = S::one() / z.clone();
    let mut acc = S::zero();
    for _ in 0..2 * k {
        acc = r.clone() * (S::one() + acc);
    }
    acc
}

/// Multipliers and square completion of `lemma` at `c`; no sign checks.
pub fn certificate<S: Scalar>(lemma: LemmaId, c: &ExactCurvatures<S>) -> Result<Certificate<S>> {
    let one = S::one();
    let two = S::from_int(2);
    let (m1, m2) = (c.mu1.clone(), c.mu2.clone());
    let (inv1, inv2) = (c.inv1(), c.inv2());
    let msum = m1.clone() + m2.clone();
    let zero = S::zero();
    // 1 + 2 mu inv = (L + mu)/(L - mu)
    let amp1 = one.clone() + two.clone() * m1.clone() * inv1.clone();
    let amp2 = one.clone() + two.clone() * m2.clone() * inv2.clone();

    let (beta1, beta2, claim, squares) = match lemma {
        LemmaId::P1 => {
            need_nonzero(&m1, "mu1", lemma)?;
            let w = (m1.clone() - m2.clone()) * inv2.clone();
            let c0 = m1.clone() + m2.clone() * (one.clone() - w.clone());
            let c1 = m1.clone() * w.clone();
            let sq = vec![
                square(G0, &m1, "mu1", DX0, half(inv1)),
                square(G1, &m1, "mu1", DX0, m2.clone() * inv2 / (two.clone() * m1.clone())),
                square(G1, &m1, "mu1", DX1, w.clone() * amp1 / (two * m1.clone())),
            ];
            (w, zero, [c0, c1], sq)
        }
        LemmaId::P2 => {
            need_nonzero(&m2, "mu2", lemma)?;
            let w = (m2.clone() - m1.clone()) * inv1.clone();
            let c1 = m2.clone() + m1.clone() * (one.clone() - w.clone());
            let c0 = m2.clone() * w.clone();
            let sq = vec![
                square(G2, &m2, "mu2", DX1, half(inv2)),
                square(G1, &m2, "mu2", DX1, m1.clone() * inv1 / (two.clone() * m2.clone())),
                square(G1, &m2, "mu2", DX0, w.clone() * amp2 / (two * m2.clone())),
            ];
            (zero, w, [c0, c1], sq)
        }
        LemmaId::P3 => match &c.l2 {
            None => {
                let sq = vec![square(G0, &m1, "mu1", DX0, half(inv1)), square(G1, &m1, "mu1", DX1, S::zero())];
                (zero.clone(), zero.clone(), [msum, S::zero()], sq)
            }
            Some(l2) => {
                let d = l2.clone() + m2.clone();
                need_nonzero(&d, "L2 + mu2", lemma)?;
                let c0 = msum - m2.clone() * m2.clone() / d.clone();
                let c1 = m1.clone() * m1.clone() / d.clone();
                let sq = vec![square(G0, &m1, "mu1", DX0, half(inv1)), square(G1, &m1, "mu1", DX1, amp1 / (two * d.clone()))];
                (m1.clone() / d.clone(), -m2.clone() / d, [c0, c1], sq)
            }
        },
        LemmaId::P4 => {
            let l2 = need_finite(&c.l2, "L2", lemma)?;
            need_nonzero(&l2, "L2", lemma)?;
            let l2sq = l2.clone() * l2.clone();
            let lm = l2.clone() + m1.clone();
            let b1 = m1.clone() * lm.clone() / l2sq.clone();
            let b2 = m1.clone() / l2.clone();
            let c1 = m1.clone() * m1.clone() * lm.clone() / l2sq.clone();
            let gap = l2.clone() - m2.clone();
            let mixed = (msum - m2.clone() * m2.clone() * lm.clone() / l2sq.clone()) / (two.clone() * gap.clone() * gap);
            let sq = vec![
                square(G0, &m1, "mu1", DX0, half(inv1)),
                square(G1, &m1, "mu1", DX1, amp1 * lm / (two * l2sq)),
                square(G1, &l2, "L2", DX0, mixed),
            ];
            (b1, b2, [S::zero(), c1], sq)
        }
        LemmaId::P5 => {
            let l2 = need_finite(&c.l2, "L2", lemma)?;
            need_nonzero(&m2, "mu2", lemma)?;
            let m2sq = m2.clone() * m2.clone();
            let b1 = m1.clone() * msum.clone() / m2sq.clone();
            let b2 = msum.clone() / -m2.clone();
            let c1 = m1.clone() * m1.clone() * msum.clone() / m2sq.clone();
            let gap = l2.clone() - m2.clone();
            let mixed = ((l2.clone() + m1.clone()) - l2.clone() * l2 * msum.clone() / m2sq.clone())
                / (two.clone() * gap.clone() * gap);
            let sq = vec![
                square(G0, &m1, "mu1", DX0, half(inv1)),
                square(G1, &m1, "mu1", DX1, amp1 * msum / (two * m2sq)),
                square(G1, &m2, "mu2", DX0, mixed),
            ];
            (b1, b2, [S::zero(), c1], sq)
        }
        LemmaId::P6 => {
            let l1 = need_finite(&c.l1, "L1", lemma)?;
            need_nonzero(&l1, "L1", lemma)?;
            let l1sq = l1.clone() * l1.clone();
            let lm = l1.clone() + m2.clone();
            let b1 = m2.clone() / l1.clone();
            let b2 = m2.clone() * lm.clone() / l1sq.clone();
            let c0 = m2.clone() * m2.clone() * lm.clone() / l1sq.clone();
            let mixed = (m1.clone() * m2.clone() + l1.clone() * msum) * inv1 / (two.clone() * l1sq.clone());
            let sq = vec![
                square(G2, &m2, "mu2", DX1, half(inv2)),
                square(G1, &m2, "mu2", DX0, lm * amp2 / (two * l1sq)),
                square(G1, &l1, "L1", DX1, mixed),
            ];
            (b1, b2, [c0, S::zero()], sq)
        }
        LemmaId::Thm31(k) | LemmaId::Thm32(k) => {
            let l2 = need_finite(&c.l2, "L2", lemma)?;
            need_nonzero(&m1, "mu1", lemma)?;
            let convex = matches!(lemma, LemmaId::Thm31(_));
            let z = if convex { l2.clone() / m1.clone() } else { m2.clone() / m1.clone() };
            need_nonzero(&z, if convex { "L2" } else { "mu2" }, lemma)?;
            let big = e_sum_exact(k + 1, &z);
            let prev = e_sum_exact(k, &z);
            let c0 = -(prev * m1.clone());
            let c1 = big.clone() * m1.clone();
            let gap = l2.clone() - m2.clone();
            let t = (l2.clone() + m2.clone()) * big.clone() / m1.clone();
            let (b2, mixed) = if convex {
                (z.clone() * big.clone() - one.clone(), square(G1, &l2, "L2", DX0, (t - one) / (two.clone() * gap)))
            } else {
                (-(z.clone() * big.clone()), square(G1, &m2, "mu2", DX0, (one - t) / (two.clone() * gap)))
            };
            let sq = vec![
                square(G0, &m1, "mu1", DX0, half(inv1)),
                square(G1, &m1, "mu1", DX1, big.clone() * amp1 / (two * m1.clone())),
                mixed,
            ];
            (big, b2, [c0, c1], sq)
        }
    };
    Ok(Certificate { lemma, base_shift: lemma.base_shift(), beta1, beta2, claim, squares })
}

/// Re-derives `lemma` at `c`: combines the base inequalities with the
/// certificate multipliers, subtracts the claim and checks that the residual
/// is the listed sum of squares with nonnegative coefficients.
pub fn verify_descent_lemma<S: Scalar>(lemma: LemmaId, c: &ExactCurvatures<S>) -> Result<SquareDecomposition<S>> {
    let cert = certificate(lemma, c)?;
    let combined = combine(cert.base_shift, &cert.beta1, &cert.beta2, c)?;
    let residual = combined.minus(&cert.claim_form());
    for t in &cert.squares {
        if t.coefficient.is_neg_beyond_tol() {
            return Err(Error::Decomposition(format!(
                "{lemma}: coefficient of |{}|^2 is {} < 0",
                t.label,
                t.coefficient.to_f64()
            )));
        }
    }
    let mut sos = Form::zeros(N_SYMBOLS, 2);
    for t in &cert.squares {
        sos.add_square(&t.lin, t.coefficient.clone());
    }
    let leftover = residual.minus(&sos);
    let leftover_max = leftover.max_abs();
    let tol = S::tolerance().to_f64() * 100.0 * (1.0 + residual.max_abs());
    if leftover_max > tol && !is_psd(&leftover.gram) {
        return Err(Error::Decomposition(format!(
            "{lemma}: residual is not the listed sum of squares (leftover {leftover_max:e} is not PSD)"
        )));
    }
    Ok(SquareDecomposition {
        lemma,
        curvatures: c.to_f64(),
        beta1: cert.beta1,
        beta2: cert.beta2,
        claim: cert.claim,
        terms: cert.squares,
        leftover: leftover.gram,
        leftover_max,
    })
}
