//! Darlington lift: from a rational Nevanlinna function `f = P/q` in `d`
//! variables to a Cayley inner `g` in `d + 1` variables with `g(z, i) = f(z)`,
//! and the classical one-variable two-port realization built on top of it.
//!
//! Writing `P = i·P1 + P2` and `q = i·q1 + q2` with `P1, P2` Hermitian-coefficient
//! and `q1, q2` real-coefficient, the lift is
//!
//! ```text
//! g(z, w) = (w·P1(z) + P2(z)) / (w·q1(z) + q2(z))
//! ```
//!
//! The split is not invariant under multiplying `(P, q)` by a unimodular
//! constant, so [`lift`] always works on the normalized representative.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::rotate_to_nevanlinna;
use crate::linalg::C64;
use crate::poly::{MatrixPoly, PolyError};
use crate::rational::{RationalError, RationalMatrixFunction};
use crate::univariate;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DarlingtonError {
    #[error("both halves of the denominator vanish")]
    ZeroDenominatorPencil,
    #[error("expected a scalar function, got {0}x{0}")]
    NotScalar(usize),
    #[error("expected a function of one variable, got {0}")]
    NotOneVariable(usize),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

// Exact for IEEE doubles: a swap, a sign flip and a halving.
fn div_2i(c: C64) -> C64 {
    C64::new(c.im * 0.5, -c.re * 0.5)
}

fn half(c: C64) -> C64 {
    C64::new(c.re * 0.5, c.im * 0.5)
}

fn times_i(c: C64) -> C64 {
    C64::new(-c.im, c.re)
}

/// Hermitian/real split of a numerator and denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub p1: MatrixPoly,
    pub p2: MatrixPoly,
    pub q1: MatrixPoly,
    pub q2: MatrixPoly,
}

impl Decomposition {
    /// `(i·P1 + P2, i·q1 + q2)`.
    pub fn reconstruct(&self) -> (MatrixPoly, MatrixPoly) {
        let join =
            |a: &MatrixPoly, b: &MatrixPoly| a.map_coeffs(|m| m.map(times_i)).add(b).expect("halves share a shape");
        (join(&self.p1, &self.p2), join(&self.q1, &self.q2))
    }
}

/// `P1 = (P − P̄*)/2i`, `P2 = (P + P̄*)/2`, and likewise for `q`.
pub fn decompose(p: &MatrixPoly, q: &MatrixPoly) -> Result<Decomposition, DarlingtonError> {
    if q.dim() != 1 {
        return Err(DarlingtonError::NotScalar(q.dim()));
    }
    if q.is_zero() {
        return Err(RationalError::ZeroDenominator.into());
    }
    let split = |x: &MatrixPoly| -> Result<(MatrixPoly, MatrixPoly), PolyError> {
        let bar = x.bar_reflect();
        let im = x.sub(&bar)?.map_coeffs(|m| m.map(div_2i));
        let re = x.add(&bar)?.map_coeffs(|m| m.map(half));
        Ok((im, re))
    };
    let (p1, p2) = split(p)?;
    let (q1, q2) = split(q)?;
    Ok(Decomposition { p1, p2, q1, q2 })
}

#[derive(Debug, Clone)]
pub struct DarlingtonLift {
    pub decomposition: Decomposition,
    /// Lifted function in `d + 1` variables; the new variable is last.
    pub g: RationalMatrixFunction,
    pub source: RationalMatrixFunction,
}

/// Builds `g = (w·P1 + P2)/(w·q1 + q2)` from the normalized representation of `f`.
///
/// The caller is responsible for `f` being Nevanlinna with a coprime
/// representation; see [`crate::classes::check_nevanlinna`] and
/// [`crate::rational::coprime_probe`].
pub fn lift(f: &RationalMatrixFunction) -> Result<DarlingtonLift, DarlingtonError> {
    let normalized = f.normalize();
    let dec = decompose(normalized.num(), normalized.den())?;
    if dec.q1.is_zero() && dec.q2.is_zero() {
        return Err(DarlingtonError::ZeroDenominatorPencil);
    }
    let pencil = |a: &MatrixPoly, b: &MatrixPoly| -> Result<MatrixPoly, PolyError> {
        a.append_variable().mul_last_variable().add(&b.append_variable())
    };
    let num = pencil(&dec.p1, &dec.p2)?;
    let den = pencil(&dec.q1, &dec.q2)?;
    let g = RationalMatrixFunction::new(num, den)?;
    Ok(DarlingtonLift { decomposition: dec, g, source: f.clone() })
}

/// `g(z, i)`.
pub fn restrict_at_i(lift: &DarlingtonLift) -> RationalMatrixFunction {
    lift.g.substitute_last(I).expect("restriction of a lift keeps a nonzero denominator")
}

/// Scalar compression `η P η* / q`.
pub fn compress(f: &RationalMatrixFunction, eta: &[C64]) -> Result<RationalMatrixFunction, DarlingtonError> {
    if eta.iter().all(|c| c.norm() == 0.0) {
        return Err(RationalError::ZeroEta.into());
    }
    let num = f.num().compress(eta)?;
    Ok(RationalMatrixFunction::new(num, f.den().clone())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationVariant {
    /// `z = a − b (dd + r)⁻¹ c`.
    Lft,
    /// The input is already Cayley inner; `a = z`.
    LosslessTrivial,
    /// The lift is affine in the termination: `G(λ, μ) = a + μ·e`.
    AffineResidual,
}

/// How the product `b·c` was split between the off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffDiagonalSplit {
    /// `c = h/q̃1`, `b = −h(−λ)/q̃1(−λ)` from a para-Hermitian spectral
    /// factorization; `[[a, b], [c, dd]]` is then lossless.
    Lossless,
    /// `c = 1`, `b` carries the whole product.
    UnitColumn,
}

#[derive(Debug, Clone)]
pub struct LftRealization {
    pub variant: RealizationVariant,
    pub split: Option<OffDiagonalSplit>,
    pub a: RationalMatrixFunction,
    pub b: RationalMatrixFunction,
    pub c: RationalMatrixFunction,
    pub dd: RationalMatrixFunction,
    /// Termination slope for [`RealizationVariant::AffineResidual`].
    pub e: Option<RationalMatrixFunction>,
    pub r: f64,
    /// `G(λ, μ)`, the positive-real-frame lift with `G(λ, r) = z(λ)`.
    pub two_port: RationalMatrixFunction,
}

impl LftRealization {
    /// Value of the terminated network at `λ` with load `μ`.
    pub fn terminated(&self, lambda: C64, mu: C64) -> Result<C64, RationalError> {
        let at = |f: &RationalMatrixFunction| f.eval(&[lambda]).map(|m| m[(0, 0)]);
        match self.variant {
            RealizationVariant::Lft => Ok(at(&self.a)? - at(&self.b)? * at(&self.c)? / (at(&self.dd)? + mu)),
            RealizationVariant::LosslessTrivial => at(&self.a),
            RealizationVariant::AffineResidual => {
                let e = self.e.as_ref().expect("affine realization carries e");
                Ok(at(&self.a)? + mu * at(e)?)
            }
        }
    }

    /// `Z(λ) = [[a, b], [c, dd]]` over a common denominator.
    pub fn impedance_matrix(&self) -> Result<RationalMatrixFunction, RationalError> {
        RationalMatrixFunction::from_scalar_entries(&[
            vec![self.a.clone(), self.b.clone()],
            vec![self.c.clone(), self.dd.clone()],
        ])
    }
}

fn coefficients(p: &MatrixPoly) -> Vec<C64> {
    let n = p.total_degree().map_or(0, |d| d as usize + 1);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (idx, c) in p.terms() {
        out[idx.exponents()[0] as usize] = c[(0, 0)];
    }
    out
}

fn from_coefficients(coeffs: &[C64]) -> MatrixPoly {
    MatrixPoly::scalar_from_terms(1, coeffs.iter().enumerate().map(|(k, &c)| (vec![k as u32], c)))
        .expect("finite coefficients")
}

fn two_variable(p1: &MatrixPoly, p2: &MatrixPoly) -> MatrixPoly {
    p1.append_variable().mul_last_variable().add(&p2.append_variable()).expect("same shape")
}

/// Realizes a scalar positive real `z(λ)` as a lossless two-port terminated
/// by `r = 1`.
///
/// The function is rotated to the Nevanlinna frame, lifted, and rotated back,
/// giving `G(λ, μ) = (μ·p̃1 + p̃2)/(μ·q̃1 + q̃2)` with `G(λ, 1) = z(λ)`. When
/// `q̃1 ≢ 0` this is `a − b (dd + μ)⁻¹ c` with `a = p̃1/q̃1`, `dd = q̃2/q̃1`
/// and `b·c = (p̃1 q̃2 − p̃2 q̃1)/q̃1²`.
pub fn realize_1d(z_pr: &RationalMatrixFunction) -> Result<LftRealization, DarlingtonError> {
    if z_pr.dim() != 1 {
        return Err(DarlingtonError::NotScalar(z_pr.dim()));
    }
    if z_pr.nvars() != 1 {
        return Err(DarlingtonError::NotOneVariable(z_pr.nvars()));
    }
    let rotated = rotate_to_nevanlinna(z_pr).normalize();
    let dec = decompose(rotated.num(), rotated.den())?;

    // G(λ, μ) = −i·g(iλ, iμ), rewritten with μ appearing linearly.
    let at_i_lambda = |p: &MatrixPoly| p.scale_variables(&[I]).expect("one variable");
    let mut pieces =
        [at_i_lambda(&dec.p1), at_i_lambda(&dec.p2).scale(-I), at_i_lambda(&dec.q1).scale(I), at_i_lambda(&dec.q2)];
    align_phase(&mut pieces);
    let [p1, p2, q1, q2] = pieces;
    let two_port = RationalMatrixFunction::new(two_variable(&p1, &p2), two_variable(&q1, &q2))?;

    let zero = RationalMatrixFunction::polynomial(MatrixPoly::zero(1, 1));
    if q1.is_zero() {
        if p1.is_zero() {
            return Ok(LftRealization {
                variant: RealizationVariant::LosslessTrivial,
                split: None,
                a: z_pr.clone(),
                b: zero.clone(),
                c: zero.clone(),
                dd: zero,
                e: None,
                r: 1.0,
                two_port,
            });
        }
        return Ok(LftRealization {
            variant: RealizationVariant::AffineResidual,
            split: None,
            a: RationalMatrixFunction::new(p2, q2.clone())?,
            b: zero.clone(),
            c: zero.clone(),
            dd: zero,
            e: Some(RationalMatrixFunction::new(p1, q2)?),
            r: 1.0,
            two_port,
        });
    }

    let a = RationalMatrixFunction::new(p1.clone(), q1.clone())?;
    let dd = RationalMatrixFunction::new(q2.clone(), q1.clone())?;
    let w = p1.mul(&q2)?.sub(&p2.mul(&q1)?)?;
    let (split, b, c) = match lossless_split(&w, &q1) {
        Some((b, c)) => (OffDiagonalSplit::Lossless, b, c),
        None => {
            let b = RationalMatrixFunction::new(w, q1.mul(&q1)?)?;
            let c = RationalMatrixFunction::polynomial(MatrixPoly::scalar_constant(1, C64::new(1.0, 0.0)));
            (OffDiagonalSplit::UnitColumn, b, c)
        }
    };
    Ok(LftRealization { variant: RealizationVariant::Lft, split: Some(split), a, b, c, dd, e: None, r: 1.0, two_port })
}

// Rotates the four pieces by a common unimodular constant so the largest
// coefficient is real positive; snaps to real coefficients when every
// imaginary part is at rounding level.
fn align_phase(pieces: &mut [MatrixPoly; 4]) {
    let largest = pieces
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c[(0, 0)]).collect::<Vec<_>>())
        .fold(C64::new(0.0, 0.0), |best, c| if c.norm() > best.norm() { c } else { best });
    if largest.norm() == 0.0 {
        return;
    }
    let u = largest.conj() / largest.norm();
    for p in pieces.iter_mut() {
        *p = p.scale(u);
    }
    let scale = largest.norm();
    let nearly_real = pieces.iter().all(|p| p.terms().all(|(_, c)| c[(0, 0)].im.abs() <= 1e-12 * scale));
    if nearly_real {
        for p in pieces.iter_mut() {
            *p = p.map_coeffs(|m| m.map(|c| C64::new(c.re, 0.0)));
        }
    }
}

/// Splits `b·c = w/q²` as `c = h/q`, `b = −h(−λ)/q(−λ)` with
/// `h(λ)·h(−λ) = −s·w(λ)` where `q(−λ) = s·q(λ)`. Needs real coefficients,
/// a parity for `q`, and `−s·w` even with paired imaginary-axis roots.
fn lossless_split(w: &MatrixPoly, q: &MatrixPoly) -> Option<(RationalMatrixFunction, RationalMatrixFunction)> {
    if !w.has_real_coeffs() || !q.has_real_coeffs() || w.is_zero() {
        return None;
    }
    let qc = coefficients(q);
    let qscale = univariate::max_abs(&qc);
    let odd_vanishes = |v: &[C64], s: f64| v.iter().skip(1).step_by(2).all(|c| c.norm() <= 1e-12 * s);
    let even_vanishes = |v: &[C64], s: f64| v.iter().step_by(2).all(|c| c.norm() <= 1e-12 * s);
    let parity = if odd_vanishes(&qc, qscale) {
        1.0
    } else if even_vanishes(&qc, qscale) {
        -1.0
    } else {
        return None;
    };
    let v: Vec<C64> = coefficients(w).iter().map(|&c| c * -parity).collect();
    let vscale = univariate::max_abs(&v);
    if !odd_vanishes(&v, vscale) {
        return None;
    }
    // V(λ) = U(λ²)
    let u: Vec<C64> = v.iter().step_by(2).copied().collect();
    let u = univariate::trim(&u);
    let n = u.len() - 1;
    let kappa_sq = if n.is_multiple_of(2) { u[n].re } else { -u[n].re };
    if kappa_sq <= 0.0 {
        return None;
    }
    let mut h_roots = Vec::with_capacity(n);
    let mut axis = Vec::new();
    for x in univariate::roots(&u) {
        let s = x.sqrt();
        if s.norm() <= 1e-9 * vscale.max(1.0) {
            h_roots.push(C64::new(0.0, 0.0));
        } else if s.re.abs() > 1e-7 * (1.0 + s.norm()) {
            h_roots.push(-s);
        } else {
            axis.push(s.im.abs());
        }
    }
    if axis.len() % 2 == 1 {
        return None;
    }
    axis.sort_by(f64::total_cmp);
    for pair in axis.chunks(2) {
        if (pair[0] - pair[1]).abs() > 1e-4 * (1.0 + pair[0]) {
            return None;
        }
        let omega = 0.5 * (pair[0] + pair[1]);
        h_roots.push(C64::new(0.0, omega));
        h_roots.push(C64::new(0.0, -omega));
    }
    let h = univariate::from_roots(&h_roots, C64::new(kappa_sq.sqrt(), 0.0));
    let hscale = univariate::max_abs(&h);
    if h.iter().any(|c| c.im.abs() > 1e-8 * hscale) {
        return None;
    }
    let h: Vec<C64> = h.iter().map(|c| C64::new(c.re, 0.0)).collect();
    let h_para: Vec<C64> = h.iter().enumerate().map(|(k, &c)| if k % 2 == 1 { -c } else { c }).collect();
    let check = univariate::mul(&h, &h_para);
    let defect = univariate::add(&check, &univariate::scale(&v, C64::new(-1.0, 0.0)));
    if univariate::max_abs(&defect) > 1e-8 * vscale {
        return None;
    }
    let c = RationalMatrixFunction::new(from_coefficients(&h), q.clone()).ok()?;
    let b_num = from_coefficients(&h_para).scale(C64::new(-parity, 0.0));
    let b = RationalMatrixFunction::new(b_num, q.clone()).ok()?;
    Some((b, c))
}
