//! Descent-lemma certificates as quadratic forms in five vector symbols.
//!
//! Symbols are `dx[k], dx[k+1], G[k], G[k+1], G[k+2]` with
//! `dx[j] = x^j - x^{j+1}` and `G[j] = g1^j - g2^j`; the scalar slots are
//! `dF[k]` and `dF[k+1]`. Every inequality reads `affine - quadratic >= 0`.

mod form;
mod lemmas;
mod numeric;
mod pgd;
pub mod raw;

pub use form::{is_psd, lin_sub, unit, Form, Lin};
pub use lemmas::{certificate, verify_descent_lemma, Certificate, DecompositionReport, LemmaId, SquareDecomposition, SquareTerm};
pub use numeric::{numeric_check, step_slacks, telescope, Telescoping};
pub use pgd::{pgd_lemma_readings, PgdLemmaReadings};

use crate::bounds::Curvatures;
use crate::error::{Error, Result};
use crate::exact::Scalar;
use form::check_nonneg;

pub const DX0: usize = 0;
pub const DX1: usize = 1;
pub const G0: usize = 2;
pub const G1: usize = 3;
pub const G2: usize = 4;
pub const N_SYMBOLS: usize = 5;
pub const SYMBOL_NAMES: [&str; N_SYMBOLS] = ["dx[k]", "dx[k+1]", "G[k]", "G[k+1]", "G[k+2]"];
pub const AFFINE_NAMES: [&str; 2] = ["dF[k]", "dF[k+1]"];

/// Descent inequality over the five symbols.
pub type QuadraticInequality<S> = Form<S>;

/// Curvatures in an exact or floating scalar type; `None` is an infinite upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCurvatures<S> {
    pub mu1: S,
    pub l1: Option<S>,
    pub mu2: S,
    pub l2: Option<S>,
}

impl<S: Scalar> ExactCurvatures<S> {
    pub fn from_curvatures(c: &Curvatures) -> Result<Self> {
        c.f1()?;
        c.f2()?;
        let ext = |v: f64| if v == f64::INFINITY { None } else { Some(S::from_f64(v)) };
        Ok(Self { mu1: S::from_f64(c.mu1), l1: ext(c.l1), mu2: S::from_f64(c.mu2), l2: ext(c.l2) })
    }

    /// `1/(L1 - mu1)`, zero when `L1` is infinite.
    pub fn inv1(&self) -> S {
        self.l1.as_ref().map_or_else(S::zero, |l| S::one() / (l.clone() - self.mu1.clone()))
    }

    pub fn inv2(&self) -> S {
        self.l2.as_ref().map_or_else(S::zero, |l| S::one() / (l.clone() - self.mu2.clone()))
    }

    /// Exchanges the roles of `f1` and `f2`.
    pub fn swapped(&self) -> Self {
        Self { mu1: self.mu2.clone(), l1: self.l2.clone(), mu2: self.mu1.clone(), l2: self.l1.clone() }
    }

    pub fn to_f64(&self) -> Curvatures {
        let ext = |v: &Option<S>| v.as_ref().map_or(f64::INFINITY, |x| x.to_f64());
        Curvatures::new(self.mu1.to_f64(), ext(&self.l1), self.mu2.to_f64(), ext(&self.l2))
    }
}

fn e<S: Scalar>(i: usize) -> Lin<S> {
    unit(N_SYMBOLS, i)
}

fn half<S: Scalar>(v: S) -> S {
    v / S::from_int(2)
}

fn check_shift(shift: usize) -> Result<()> {
    if shift > 1 {
        return Err(Error::Domain(format!("shift must be 0 or 1, got {shift}")));
    }
    Ok(())
}

/// `dF[s] >= (mu1 + mu2)/2 |dx[s]|^2 + |G[s+1] - mu2 dx[s]|^2/(2(L2 - mu2)) + |G[s] - mu1 dx[s]|^2/(2(L1 - mu1))`.
pub fn build_base<S: Scalar>(c: &ExactCurvatures<S>, shift: usize) -> Result<QuadraticInequality<S>> {
    check_shift(shift)?;
    let dx = e::<S>(DX0 + shift);
    let g = e::<S>(G0 + shift);
    let gn = e::<S>(G1 + shift);
    let mut f = Form::zeros(N_SYMBOLS, 2);
    f.add_affine(shift, S::one())
        .add_square(&dx, half(c.mu1.clone() + c.mu2.clone()))
        .add_square(&lin_sub(&gn, &c.mu2, &dx), half(c.inv2()))
        .add_square(&lin_sub(&g, &c.mu1, &dx), half(c.inv1()));
    Ok(f)
}

/// `<G[s], dx[s]> >= mu1 |dx[s]|^2 + |G[s] - mu1 dx[s]|^2/(L1 - mu1)`.
pub fn build_c1<S: Scalar>(c: &ExactCurvatures<S>, shift: usize) -> Result<QuadraticInequality<S>> {
    check_shift(shift)?;
    let dx = e::<S>(DX0 + shift);
    let g = e::<S>(G0 + shift);
    let mut f = Form::zeros(N_SYMBOLS, 2);
    f.add_square(&dx, c.mu1.clone())
        .add_square(&lin_sub(&g, &c.mu1, &dx), c.inv1())
        .add_inner(&g, &dx, -S::one());
    Ok(f)
}

/// `<G[s+1], dx[s]> >= mu2 |dx[s]|^2 + |G[s+1] - mu2 dx[s]|^2/(L2 - mu2)`.
pub fn build_c2<S: Scalar>(c: &ExactCurvatures<S>, shift: usize) -> Result<QuadraticInequality<S>> {
    check_shift(shift)?;
    let dx = e::<S>(DX0 + shift);
    let g = e::<S>(G1 + shift);
    let mut f = Form::zeros(N_SYMBOLS, 2);
    f.add_square(&dx, c.mu2.clone())
        .add_square(&lin_sub(&g, &c.mu2, &dx), c.inv2())
        .add_inner(&g, &dx, -S::one());
    Ok(f)
}

/// `B[base_shift] + beta1 C_f1[k+1] + beta2 C_f2[k]`.
///
/// Both multiplied inequalities only involve `G[k+1]`, which is the link
/// between the two iterations for either base shift.
pub fn combine<S: Scalar>(base_shift: usize, beta1: &S, beta2: &S, c: &ExactCurvatures<S>) -> Result<QuadraticInequality<S>> {
    check_nonneg("beta1", beta1)?;
    check_nonneg("beta2", beta2)?;
    let mut f = build_base(c, base_shift)?;
    if !beta1.is_zero() {
        f = f.plus(&build_c1(c, 1)?, beta1);
    }
    if !beta2.is_zero() {
        f = f.plus(&build_c2(c, 0)?, beta2);
    }
    Ok(f)
}

/// Time reversal of the symbols: `dx[k] <-> dx[k+1]`, `G[k] <-> G[k+2]`, `dF[k] <-> dF[k+1]`.
pub fn mirrored<S: Scalar>(f: &QuadraticInequality<S>) -> QuadraticInequality<S> {
    f.permuted(&[DX1, DX0, G2, G1, G0], &[1, 0])
}

/// The two identities used to complete squares, as residual forms that must vanish.
///
/// With `G = G[k+1]`, `dx = dx[k]`:
/// `-<G, dx> = (|G - mu_j dx|^2 - |G|^2 - mu_j^2 |dx|^2) / (2 mu_j)` and
/// `|G - mu_i dx|^2 = r |G - mu_j dx|^2 - r(1 - r) mu_j^2 |dx|^2 + (1 - r)|G|^2`, `r = mu_i/mu_j`.
pub fn square_identities<S: Scalar>(mu_i: &S, mu_j: &S) -> Result<[Form<S>; 2]> {
    if mu_j.is_zero() {
        return Err(Error::Domain("mu_j must be nonzero".into()));
    }
    let g = e::<S>(G1);
    let dx = e::<S>(DX0);
    let gj = lin_sub(&g, mu_j, &dx);
    let two_mj = S::from_int(2) * mu_j.clone();

    let mut first = Form::zeros(N_SYMBOLS, 2);
    first
        .add_inner(&g, &dx, -S::one())
        .add_square(&gj, -S::one() / two_mj.clone())
        .add_square(&g, S::one() / two_mj.clone())
        .add_square(&dx, mu_j.clone() * mu_j.clone() / two_mj);

    let r = mu_i.clone() / mu_j.clone();
    let one_r = S::one() - r.clone();
    let mut second = Form::zeros(N_SYMBOLS, 2);
    second
        .add_square(&lin_sub(&g, mu_i, &dx), S::one())
        .add_square(&gj, -r.clone())
        .add_square(&dx, r * one_r.clone() * mu_j.clone() * mu_j.clone())
        .add_square(&g, -one_r);
    Ok([first, second])
}

/// Verifies `lemma` at `c` in exact rational arithmetic or in `f64`.
pub fn verify_report(lemma: LemmaId, c: &Curvatures, exact: bool) -> Result<DecompositionReport> {
    if exact {
        let ec = ExactCurvatures::<num_rational::BigRational>::from_curvatures(c)?;
        Ok(verify_descent_lemma(lemma, &ec)?.report())
    } else {
        let ec = ExactCurvatures::<f64>::from_curvatures(c)?;
        Ok(verify_descent_lemma(lemma, &ec)?.report())
    }
}
