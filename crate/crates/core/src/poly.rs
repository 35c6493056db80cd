//! Sparse multivariate polynomials with square complex matrix coefficients.
//!
//! Scalars are the `m = 1` case. Terms are kept in a `BTreeMap` ordered by
//! graded lexicographic order on exponents, so iteration and printing are
//! deterministic. A term is removed only when its coefficient is exactly zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{fmt_complex, ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("coefficient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("expected {expected} point coordinates, got {got}")]
    PointLength { expected: usize, got: usize },
}

/// Exponent vector of a monomial.
///
/// Ordered graded-lexicographically: total degree first, then
/// lexicographically with `z1` most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// `z_k` (zero-based `k`).
    pub fn unit(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn monomial_value(&self, z: &[C64]) -> C64 {
        self.0.iter().zip(z).fold(C64::new(1.0, 0.0), |acc, (&e, &zk)| if e == 0 { acc } else { acc * zk.powu(e) })
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` variables with `dim × dim` complex matrix coefficients.
#[derive(Clone, PartialEq)]
pub struct MatrixPoly {
    nvars: usize,
    dim: usize,
    terms: BTreeMap<MultiIndex, ComplexMatrix>,
}

impl MatrixPoly {
    pub fn zero(nvars: usize, dim: usize) -> Self {
        Self { nvars, dim, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: ComplexMatrix) -> Self {
        let dim = c.dim();
        Self::zero(nvars, dim).with_term(MultiIndex::zero(nvars), c)
    }

    pub fn scalar_constant(nvars: usize, c: C64) -> Self {
        Self::constant(nvars, ComplexMatrix::scalar(1, c))
    }

    /// `z_k · I` (zero-based `k`).
    pub fn variable(nvars: usize, k: usize, dim: usize) -> Self {
        Self::zero(nvars, dim).with_term(MultiIndex::unit(nvars, k), ComplexMatrix::identity(dim))
    }

    /// Scalar monomial `c · z^exponents`.
    pub fn scalar_monomial(exponents: Vec<u32>, c: C64) -> Self {
        let nvars = exponents.len();
        Self::zero(nvars, 1).with_term(MultiIndex::new(exponents), ComplexMatrix::scalar(1, c))
    }

    /// Builds from `(exponents, coefficient)` pairs, summing repeated
    /// exponents and checking shapes.
    pub fn from_terms(
        nvars: usize,
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, ComplexMatrix)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars, dim);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(PolyError::VariableMismatch(nvars, exp.len()));
            }
            if c.dim() != dim {
                return Err(PolyError::DimensionMismatch(dim, c.dim()));
            }
            if !c.is_finite() {
                return Err(PolyError::NonFinite);
            }
            p.accumulate(MultiIndex::new(exp), &c);
        }
        Ok(p)
    }

    /// Scalar polynomial from `(exponents, coefficient)` pairs.
    pub fn scalar_from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, C64)>,
    ) -> Result<Self, PolyError> {
        Self::from_terms(nvars, 1, terms.into_iter().map(|(e, c)| (e, ComplexMatrix::scalar(1, c))))
    }

    /// Matrix polynomial whose `(i, j)` entry is `entries[i][j]`; every
    /// entry must be scalar with the same variable count.
    pub fn from_entries(entries: &[Vec<MatrixPoly>]) -> Result<Self, PolyError> {
        let dim = entries.len();
        let nvars = entries.first().and_then(|r| r.first()).map_or(0, |p| p.nvars);
        let mut out = Self::zero(nvars, dim);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != dim {
                return Err(PolyError::DimensionMismatch(dim, row.len()));
            }
            for (j, e) in row.iter().enumerate() {
                if e.dim != 1 {
                    return Err(PolyError::DimensionMismatch(1, e.dim));
                }
                if e.nvars != nvars {
                    return Err(PolyError::VariableMismatch(nvars, e.nvars));
                }
                for (idx, c) in &e.terms {
                    let mut m = ComplexMatrix::zeros(dim);
                    m[(i, j)] = c[(0, 0)];
                    out.accumulate(idx.clone(), &m);
                }
            }
        }
        Ok(out)
    }

    fn with_term(mut self, idx: MultiIndex, c: ComplexMatrix) -> Self {
        if !c.is_zero() {
            self.terms.insert(idx, c);
        }
        self
    }

    fn accumulate(&mut self, idx: MultiIndex, c: &ComplexMatrix) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&idx) {
            Some(existing) => existing + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &ComplexMatrix)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Option<&ComplexMatrix> {
        self.terms.get(&MultiIndex::new(exponents.to_vec()))
    }

    /// Graded-lex leading term.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &ComplexMatrix)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Degree in variable `k`.
    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|e| e.0[k]).max().unwrap_or(0)
    }

    /// Largest entry magnitude over all coefficients.
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VariableMismatch(self.nvars, other.nvars));
        }
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.accumulate(idx.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// Product; a scalar factor on either side multiplies every entry.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VariableMismatch(self.nvars, other.nvars));
        }
        let dim = match (self.dim, other.dim) {
            (a, b) if a == b => a,
            (1, b) => b,
            (a, 1) => a,
            (a, b) => return Err(PolyError::DimensionMismatch(a, b)),
        };
        let mut out = Self::zero(self.nvars, dim);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let prod = match (ca.dim(), cb.dim()) {
                    (x, y) if x == y => ca * cb,
                    (1, _) => cb.scale(ca[(0, 0)]),
                    _ => ca.scale(cb[(0, 0)]),
                };
                out.accumulate(ia.add(ib), &prod);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_coeffs(|m| m.scale(c))
    }

    /// Applies `f` to every coefficient, dropping results that are exactly zero.
    pub fn map_coeffs(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut out = Self::zero(self.nvars, self.dim);
        for (idx, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(idx.clone(), v);
            }
        }
        out
    }

    pub fn evaluate(&self, z: &[C64]) -> Result<ComplexMatrix, PolyError> {
        if z.len() != self.nvars {
            return Err(PolyError::PointLength { expected: self.nvars, got: z.len() });
        }
        let mut acc = ComplexMatrix::zeros(self.dim);
        for (idx, c) in &self.terms {
            let mono = idx.monomial_value(z);
            acc = &acc + &c.scale(mono);
        }
        Ok(acc)
    }

    /// Scalar value; only meaningful for `dim == 1`.
    pub fn evaluate_scalar(&self, z: &[C64]) -> Result<C64, PolyError> {
        if self.dim != 1 {
            return Err(PolyError::DimensionMismatch(1, self.dim));
        }
        Ok(self.evaluate(z)?[(0, 0)])
    }

    /// `z ↦ P(z̄)*`: conjugate-transpose every coefficient.
    pub fn bar_reflect(&self) -> Self {
        self.map_coeffs(ComplexMatrix::adjoint)
    }

    pub fn has_hermitian_coeffs(&self) -> bool {
        self.terms.values().all(ComplexMatrix::is_hermitian_exact)
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.as_slice().iter().all(|x| x.im == 0.0))
    }

    /// Replaces the last variable by `c`.
    pub fn substitute_last(&self, c: C64) -> Self {
        assert!(self.nvars >= 1, "substitute_last needs at least one variable");
        let mut out = Self::zero(self.nvars - 1, self.dim);
        for (idx, coeff) in &self.terms {
            let (head, last) = idx.0.split_at(self.nvars - 1);
            let factor = c.powu(last[0]);
            out.accumulate(MultiIndex::new(head.to_vec()), &coeff.scale(factor));
        }
        out
    }

    /// Coefficient of `z^α` multiplied by `∏ factors_k^{α_k}`, i.e.
    /// `z ↦ P(factors ⊙ z)`.
    pub fn scale_variables(&self, factors: &[C64]) -> Result<Self, PolyError> {
        if factors.len() != self.nvars {
            return Err(PolyError::PointLength { expected: self.nvars, got: factors.len() });
        }
        let mut out = Self::zero(self.nvars, self.dim);
        for (idx, c) in &self.terms {
            out.accumulate(idx.clone(), &c.scale(idx.monomial_value(factors)));
        }
        Ok(out)
    }

    /// Same polynomial viewed in `nvars + 1` variables (new variable last).
    pub fn append_variable(&self) -> Self {
        let mut out = Self::zero(self.nvars + 1, self.dim);
        for (idx, c) in &self.terms {
            let mut e = idx.0.clone();
            e.push(0);
            out.terms.insert(MultiIndex(e), c.clone());
        }
        out
    }

    /// Multiplies by the last variable.
    pub fn mul_last_variable(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.dim);
        for (idx, c) in &self.terms {
            let mut e = idx.0.clone();
            *e.last_mut().expect("at least one variable") += 1;
            out.terms.insert(MultiIndex(e), c.clone());
        }
        out
    }

    /// `∂P/∂z_k` (zero-based `k`).
    pub fn partial_derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.dim);
        for (idx, c) in &self.terms {
            let e = idx.0[k];
            if e == 0 {
                continue;
            }
            let mut lowered = idx.0.clone();
            lowered[k] -= 1;
            out.accumulate(MultiIndex(lowered), &c.scale(C64::new(e as f64, 0.0)));
        }
        out
    }

    /// Scalar polynomial of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.nvars, 1);
        for (idx, c) in &self.terms {
            let v = c[(i, j)];
            if v.re != 0.0 || v.im != 0.0 {
                out.terms.insert(idx.clone(), ComplexMatrix::scalar(1, v));
            }
        }
        out
    }

    /// Scalar polynomial `η P η*` for a row vector `η`.
    pub fn compress(&self, eta: &[C64]) -> Result<Self, PolyError> {
        if eta.len() != self.dim {
            return Err(PolyError::DimensionMismatch(self.dim, eta.len()));
        }
        Ok(Self::scalar_from_terms(
            self.nvars,
            self.terms.iter().map(|(idx, c)| {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        s += eta[i] * c[(i, j)] * eta[j].conj();
                    }
                }
                (idx.0.clone(), s)
            }),
        )
        .expect("shapes checked"))
    }

    /// Drops terms whose largest entry is at most `tol`, and zeroes
    /// individual real or imaginary parts at most `tol` in the rest.
    pub fn clean(&self, tol: f64) -> Self {
        let chop = |x: f64| if x.abs() <= tol { 0.0 } else { x };
        self.map_coeffs(|c| {
            if c.max_abs() <= tol {
                ComplexMatrix::zeros(c.dim())
            } else {
                c.map(|v| C64::new(chop(v.re), chop(v.im)))
            }
        })
    }

    /// Entrywise `|a - b| <= tol` over all coefficients.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.nvars != other.nvars || self.dim != other.dim {
            return false;
        }
        match self.sub(other) {
            Ok(diff) => diff.max_coeff_abs() <= tol,
            Err(_) => false,
        }
    }

    /// Restriction to the complex line `a + t b` as a univariate polynomial
    /// in `t`, returned entrywise as ascending coefficient vectors
    /// (row-major over the matrix entries).
    pub fn restrict_to_line(&self, a: &[C64], b: &[C64]) -> Vec<Vec<C64>> {
        assert_eq!(a.len(), self.nvars);
        assert_eq!(b.len(), self.nvars);
        let line: Vec<Vec<C64>> = a.iter().zip(b).map(|(&ak, &bk)| vec![ak, bk]).collect();
        let mut out = vec![Vec::<C64>::new(); self.dim * self.dim];
        for (idx, c) in &self.terms {
            let mut mono = vec![C64::new(1.0, 0.0)];
            for (k, &e) in idx.0.iter().enumerate() {
                for _ in 0..e {
                    mono = crate::univariate::mul(&mono, &line[k]);
                }
            }
            for (slot, &coef) in out.iter_mut().zip(c.as_slice()) {
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                if slot.len() < mono.len() {
                    slot.resize(mono.len(), C64::new(0.0, 0.0));
                }
                for (s, m) in slot.iter_mut().zip(&mono) {
                    *s += coef * m;
                }
            }
        }
        out
    }
}

impl fmt::Debug for MatrixPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixPoly(d={}, m={}; {})", self.nvars, self.dim, self)
    }
}

/// Leading term first, variables named `z1..zd`.
impl fmt::Display for MatrixPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let coeff = if self.dim == 1 { format!("({})", fmt_complex(c[(0, 0)])) } else { format!("{c:?}") };
            write!(f, "{coeff}")?;
            for (k, &e) in idx.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", k + 1)?,
                    _ => write!(f, "*z{}^{}", k + 1, e)?,
                }
            }
        }
        Ok(())
    }
}
