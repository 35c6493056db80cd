//! Small dense complex matrices.
//!
//! Dimensions in this crate are tiny (the matrix size of a function value),
//! so everything here is plain row-major storage with textbook kernels:
//! cyclic Jacobi for Hermitian spectra and partially pivoted Gaussian
//! elimination for solves.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;
const HERMITIAN_REL_TOL: f64 = 1e-10;
const PIVOT_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} vs norm {norm:.3e})")]
    NotHermitian { asymmetry: f64, norm: f64 },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `c * I`.
    pub fn scalar(n: usize, c: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds from row slices; panics if rows are ragged or not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix rows must form a square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&c| f(c)).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|x| x * c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Matrix imaginary part `(A - A*)/2i`, which is Hermitian.
    pub fn imag_part(&self) -> Self {
        (self - &self.adjoint()).scale(C64::new(0.0, -0.5))
    }

    /// Entrywise imaginary parts, `(A - conj(A))/2i`.
    pub fn entrywise_imag(&self) -> Self {
        self.map(|c| C64::new(c.im, 0.0))
    }

    pub fn is_hermitian_exact(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i..n).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    /// Max entrywise distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch(self.n, other.n))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|c| -c)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", fmt_complex(self[(i, j)]))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            return write!(f, "{}", fmt_complex(self[(0, 0)]));
        }
        fmt::Debug::fmt(self, f)
    }
}

/// Formats as `a+bi` / `a-bi`.
pub fn fmt_complex(c: C64) -> String {
    if c.im.is_sign_negative() && c.im != 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im.abs())
    }
}

/// Eigenvalues of a Hermitian matrix (ascending) by cyclic complex Jacobi.
///
/// The input is symmetrized first; use [`hermitian_min_eig`] when the
/// Hermitian precondition itself has to be enforced.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.dim();
    let mut a = h.hermitian_part();
    let scale = a.frobenius_norm();
    if n == 0 {
        return Vec::new();
    }
    let tol = JACOBI_REL_TOL * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.total_cmp(y));
    eigs
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// One two-sided rotation annihilating a[p][q]. The unitary is a phase on
// column q (making a[p][q] real) followed by a real Jacobi rotation.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // V restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;
    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eig(h: &ComplexMatrix) -> Result<f64, LinalgError> {
    let norm = h.frobenius_norm();
    let asymmetry = (h - &h.adjoint()).frobenius_norm();
    if asymmetry > HERMITIAN_REL_TOL * norm {
        return Err(LinalgError::NotHermitian { asymmetry, norm });
    }
    Ok(hermitian_eigenvalues(h).first().copied().unwrap_or(0.0))
}

/// Largest singular value, via the spectrum of `S* S`.
pub fn max_singular_value(s: &ComplexMatrix) -> f64 {
    let gram = &s.adjoint() * s;
    hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.check_same_dim(b)?;
    let n = a.dim();
    let mut lu = a.clone();
    let mut x = b.clone();
    let floor = PIVOT_REL_TOL * a.max_abs();
    for col in 0..n {
        let (piv, pmag) =
            (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= floor || pmag == 0.0 {
            return Err(LinalgError::Singular);
        }
        if piv != col {
            for j in 0..n {
                lu.data.swap(piv * n + j, col * n + j);
                x.data.swap(piv * n + j, col * n + j);
            }
        }
        let inv = lu[(col, col)].inv();
        for r in (col + 1)..n {
            let factor = lu[(r, col)] * inv;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..n {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = lu[(col, col)].inv();
        for j in 0..n {
            let mut acc = x[(col, j)];
            for k in (col + 1)..n {
                acc -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = acc * inv;
        }
    }
    Ok(x)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    solve(a, &ComplexMatrix::identity(a.dim()))
}

/// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`.
pub fn condition_one(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    let inv = inverse(a)?;
    Ok(a.norm_one() * inv.norm_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn min_eig_examples() {
        assert_eq!(hermitian_min_eig(&ComplexMatrix::identity(3)).unwrap(), 1.0);
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(-3.0, 0.0)]);
        assert_eq!(hermitian_min_eig(&d).unwrap(), -3.0);
        let swap = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((hermitian_min_eig(&swap).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn min_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_min_eig(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_2x2() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]]);
        let e = hermitian_eigenvalues(&m);
        assert!(e[0].abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14, "{e:?}");
    }

    #[test]
    fn solve_examples() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 1.0)]]);
        assert_eq!(solve(&ComplexMatrix::identity(2), &m).unwrap(), m);
        let half = solve(&ComplexMatrix::scalar(2, c(2.0, 0.0)), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(half, ComplexMatrix::scalar(2, c(0.5, 0.0)));
        let swap = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(solve(&swap, &ComplexMatrix::identity(2)).unwrap(), swap);
    }

    #[test]
    fn solve_singular() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(solve(&m, &ComplexMatrix::identity(2)), Err(LinalgError::Singular));
        assert_eq!(solve(&ComplexMatrix::zeros(2), &ComplexMatrix::identity(2)), Err(LinalgError::Singular));
    }

    #[test]
    fn singular_value_examples() {
        assert_eq!(max_singular_value(&ComplexMatrix::zeros(2)), 0.0);
        let perm = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert!((max_singular_value(&perm) - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::from_diag(&[c(0.5, 0.0), c(2.0, 0.0)]);
        assert!((max_singular_value(&d) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fmt_complex_signs() {
        assert_eq!(fmt_complex(c(0.0, 1.0)), "0+1i");
        assert_eq!(fmt_complex(c(-1.5, -2.0)), "-1.5-2i");
        assert_eq!(fmt_complex(c(2.0, 0.0)), "2+0i");
    }
}
