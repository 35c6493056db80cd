#![allow(dead_code)]

use darlington_core::linalg::{ComplexMatrix, C64};
use darlington_core::poly::MatrixPoly;
use darlington_core::rational::RationalMatrixFunction;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sp(nvars: usize, terms: &[(&[u32], C64)]) -> MatrixPoly {
    MatrixPoly::scalar_from_terms(nvars, terms.iter().map(|(e, v)| (e.to_vec(), *v))).unwrap()
}

pub fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

pub fn matrix(m: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), m * m).prop_map(move |v| {
        let rows: Vec<Vec<C64>> = v.chunks(m).map(|r| r.to_vec()).collect();
        ComplexMatrix::from_rows(&rows)
    })
}

pub fn hermitian(m: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(m).prop_map(|a| a.hermitian_part())
}

pub fn psd(m: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(m).prop_map(|a| &a * &a.adjoint())
}

/// Up to six terms, exponents at most 2 per variable.
pub fn poly(nvars: usize, m: usize) -> impl Strategy<Value = MatrixPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, nvars), matrix(m)), 1..=6)
        .prop_map(move |terms| MatrixPoly::from_terms(nvars, m, terms).unwrap())
}

pub fn nonzero_scalar_poly(nvars: usize) -> impl Strategy<Value = MatrixPoly> {
    poly(nvars, 1).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn point(nvars: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), nvars)
}

pub fn upper_point(nvars: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-5.0..5.0f64, 0.01..5.0f64).prop_map(|(re, im)| C64::new(re, im)), nvars)
}

/// Any rational function with a nonzero scalar denominator.
pub fn rational(nvars: usize, m: usize) -> impl Strategy<Value = RationalMatrixFunction> {
    (poly(nvars, m), nonzero_scalar_poly(nvars)).prop_map(|(p, q)| RationalMatrixFunction::new(p, q).unwrap())
}

/// `H0 + iC + Σ z_k B_k` with `B_k, C ⪰ 0`: Nevanlinna by construction.
pub fn nevanlinna_pencil(nvars: usize, m: usize) -> impl Strategy<Value = RationalMatrixFunction> {
    (hermitian(m), psd(m), prop::collection::vec(psd(m), nvars)).prop_map(move |(h, cm, b)| {
        let i = C64::new(0.0, 1.0);
        let mut terms = vec![(vec![0; nvars], &h + &cm.scale(i))];
        for (k, bk) in b.into_iter().enumerate() {
            let mut e = vec![0; nvars];
            e[k] = 1;
            terms.push((e, bk));
        }
        RationalMatrixFunction::polynomial(MatrixPoly::from_terms(nvars, m, terms).unwrap())
    })
}

/// Scalar `−1/(Σ b_k z_k + h + i·c)` with `b_k ≥ 0`, `c ≥ 0`, not all zero.
pub fn nevanlinna_resolvent(nvars: usize) -> impl Strategy<Value = RationalMatrixFunction> {
    (prop::collection::vec(0.1..3.0f64, nvars), -3.0..3.0f64, 0.0..2.0f64).prop_map(move |(b, h, cc)| {
        let mut terms: Vec<(Vec<u32>, C64)> = vec![(vec![0; nvars], C64::new(h, cc))];
        for (k, bk) in b.into_iter().enumerate() {
            let mut e = vec![0; nvars];
            e[k] = 1;
            terms.push((e, C64::new(bk, 0.0)));
        }
        let den = MatrixPoly::scalar_from_terms(nvars, terms).unwrap();
        RationalMatrixFunction::new(MatrixPoly::scalar_constant(nvars, C64::new(-1.0, 0.0)), den).unwrap()
    })
}
