//! Fixed test corpora shared by the unit tests, the acceptance suite and the
//! CLI examples.
//!
//! Random members are generated from a fixed seed, so the corpus is the same
//! on every run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, C64};
use crate::poly::MatrixPoly;
use crate::rational::RationalMatrixFunction;

const CORPUS_SEED: u64 = 0x5EED_0001;
const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sp(nvars: usize, terms: &[(&[u32], C64)]) -> MatrixPoly {
    MatrixPoly::scalar_from_terms(nvars, terms.iter().map(|(e, v)| (e.to_vec(), *v))).expect("well-formed terms")
}

fn rsp(nvars: usize, terms: &[(&[u32], f64)]) -> MatrixPoly {
    MatrixPoly::scalar_from_terms(nvars, terms.iter().map(|(e, v)| (e.to_vec(), c(*v, 0.0))))
        .expect("well-formed terms")
}

fn ratio(num: MatrixPoly, den: MatrixPoly) -> RationalMatrixFunction {
    RationalMatrixFunction::new(num, den).expect("nonzero scalar denominator")
}

#[derive(Debug, Clone)]
pub struct NamedFunction {
    pub name: String,
    pub f: RationalMatrixFunction,
}

impl NamedFunction {
    fn new(name: &str, f: RationalMatrixFunction) -> Self {
        Self { name: name.to_string(), f }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> ComplexMatrix {
    let rows: Vec<Vec<C64>> =
        (0..m).map(|_| (0..m).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

fn random_hermitian(rng: &mut ChaCha8Rng, m: usize) -> ComplexMatrix {
    random_matrix(rng, m).hermitian_part()
}

/// `A A* + shift·I`.
fn random_psd(rng: &mut ChaCha8Rng, m: usize, shift: f64) -> ComplexMatrix {
    let a = random_matrix(rng, m);
    &(&a * &a.adjoint()) + &ComplexMatrix::scalar(m, c(shift, 0.0))
}

fn random_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // Any 2x2 unitary with determinant one has the form [[a, -b̄], [b, ā]].
    let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n));
    ComplexMatrix::from_rows(&[vec![a, -b.conj()], vec![b, a.conj()]])
}

/// `Σ_k z_k·B_k + A0` as a matrix polynomial in `B.len()` variables.
fn affine_pencil(a0: &ComplexMatrix, b: &[ComplexMatrix]) -> MatrixPoly {
    let d = b.len();
    let mut terms = vec![(vec![0; d], a0.clone())];
    for (k, bk) in b.iter().enumerate() {
        let mut e = vec![0; d];
        e[k] = 1;
        terms.push((e, bk.clone()));
    }
    MatrixPoly::from_terms(d, a0.dim(), terms).expect("consistent shapes")
}

/// `−M⁻¹` for a 2x2 matrix polynomial, as `−adj(M) / det(M)`.
fn neg_inverse_2x2(m: &MatrixPoly) -> RationalMatrixFunction {
    let e = |i, j| m.entry(i, j);
    let det = e(0, 0).mul(&e(1, 1)).and_then(|x| x.sub(&e(0, 1).mul(&e(1, 0))?)).expect("scalar entries");
    let num = MatrixPoly::from_entries(&[vec![e(1, 1).neg(), e(0, 1)], vec![e(1, 0), e(0, 0).neg()]])
        .expect("scalar entries");
    ratio(num, det)
}

/// Nevanlinna functions spanning `d ∈ {1, 2, 3}` and `m ∈ {1, 2}`.
pub fn nevanlinna_corpus() -> Vec<NamedFunction> {
    let one = c(1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = vec![
        NamedFunction::new("i", RationalMatrixFunction::polynomial(sp(1, &[(&[0], I)]))),
        NamedFunction::new("z1", RationalMatrixFunction::polynomial(sp(1, &[(&[1], one)]))),
        NamedFunction::new("z1+i", RationalMatrixFunction::polynomial(sp(1, &[(&[1], one), (&[0], I)]))),
        NamedFunction::new("-1/(z1+i)", ratio(sp(1, &[(&[0], -one)]), sp(1, &[(&[1], one), (&[0], I)]))),
        NamedFunction::new("-1/(z1+z2)", ratio(sp(2, &[(&[0, 0], -one)]), sp(2, &[(&[1, 0], one), (&[0, 1], one)]))),
    ];

    let diag = RationalMatrixFunction::from_scalar_entries(&[
        vec![
            RationalMatrixFunction::polynomial(sp(2, &[(&[1, 0], one)])),
            RationalMatrixFunction::polynomial(MatrixPoly::zero(2, 1)),
        ],
        vec![
            RationalMatrixFunction::polynomial(MatrixPoly::zero(2, 1)),
            ratio(sp(2, &[(&[0, 0], -one)]), sp(2, &[(&[0, 1], one), (&[0, 0], I)])),
        ],
    ])
    .expect("uniform entries");
    out.push(NamedFunction::new("diag(z1,-1/(z2+i))", diag));

    // H0 + Σ z_k B_k + iC with B_k, C positive semidefinite.
    let h0 = random_hermitian(&mut rng, 2);
    let cpart = random_psd(&mut rng, 2, 0.0).scale(I);
    let b: Vec<_> = (0..3).map(|_| random_psd(&mut rng, 2, 0.0)).collect();
    out.push(NamedFunction::new(
        "psd-pencil-d3",
        RationalMatrixFunction::polynomial(affine_pencil(&(&h0 + &cpart), &b)),
    ));

    // −(H + z1 B1 + z2 B2)⁻¹ with B_k positive definite.
    let h = random_hermitian(&mut rng, 2);
    let b: Vec<_> = (0..2).map(|_| random_psd(&mut rng, 2, 0.5)).collect();
    out.push(NamedFunction::new("neg-resolvent-d2", neg_inverse_2x2(&affine_pencil(&h, &b))));

    // U diag(z1, z2) U*.
    let u = random_unitary(&mut rng);
    let cols: Vec<ComplexMatrix> = (0..2)
        .map(|k| {
            let mut proj = ComplexMatrix::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    proj[(i, j)] = u[(i, k)] * u[(j, k)].conj();
                }
            }
            proj
        })
        .collect();
    out.push(NamedFunction::new(
        "unitary-diag-d2",
        RationalMatrixFunction::polynomial(affine_pencil(&ComplexMatrix::zeros(2), &cols)),
    ));

    // −(z B + H + iC)⁻¹.
    let b = random_psd(&mut rng, 2, 0.5);
    let h = random_hermitian(&mut rng, 2);
    let cpart = random_psd(&mut rng, 2, 0.0).scale(I);
    out.push(NamedFunction::new("neg-resolvent-d1", neg_inverse_2x2(&affine_pencil(&(&h + &cpart), &[b]))));

    // b·z − Σ c_j/(z − a_j) with c_j > 0, b ≥ 0.
    let poles: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.2..2.0))).collect();
    let slope = rng.gen_range(0.0..1.0);
    let z = rsp(1, &[(&[1], 1.0)]);
    let lin = |a: f64| rsp(1, &[(&[1], 1.0), (&[0], -a)]);
    let den = poles.iter().fold(rsp(1, &[(&[0], 1.0)]), |acc, &(a, _)| acc.mul(&lin(a)).expect("scalar"));
    let mut num = z.scale(c(slope, 0.0)).mul(&den).expect("scalar");
    for (j, &(_, cj)) in poles.iter().enumerate() {
        let others = poles
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(rsp(1, &[(&[0], cj)]), |acc, (_, &(a, _))| acc.mul(&lin(a)).expect("scalar"));
        num = num.sub(&others).expect("scalar");
    }
    out.push(NamedFunction::new("partial-fractions-d1", ratio(num, den)));

    out.push(NamedFunction::new(
        "-1/(z1+2z2+z3+i)",
        ratio(
            sp(3, &[(&[0, 0, 0], -one)]),
            sp(3, &[(&[1, 0, 0], one), (&[0, 1, 0], c(2.0, 0.0)), (&[0, 0, 1], one), (&[0, 0, 0], I)]),
        ),
    ));
    out.push(NamedFunction::new(
        "(z1z2-1)/(z1+z2)",
        ratio(rsp(2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)]), rsp(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)])),
    ));
    out
}

/// A real pair `(p, q)` for the stability probes.
#[derive(Debug, Clone)]
pub struct StabilityPair {
    pub name: String,
    pub p: MatrixPoly,
    pub q: MatrixPoly,
    /// `p + i·q` has a zero planted in the open poly-half-plane.
    pub planted: bool,
}

/// Ten pairs with `Im(p/q) ≥ 0` on `Π^d` and ten with a zero of `p + iq`
/// planted in `Π^d`.
pub fn stability_corpus() -> Vec<StabilityPair> {
    type Terms<'a> = &'a [(&'a [u32], f64)];
    let pair = |name: &str, d: usize, p: Terms, q: Terms, planted: bool| StabilityPair {
        name: name.to_string(),
        p: rsp(d, p),
        q: rsp(d, q),
        planted,
    };
    vec![
        pair("z1 | 1", 1, &[(&[1], 1.0)], &[(&[0], 1.0)], false),
        pair("z1+z2 | 1", 2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)], &[(&[0, 0], 1.0)], false),
        pair("z1z2-1 | z1+z2", 2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)], &[(&[1, 0], 1.0), (&[0, 1], 1.0)], false),
        pair("z1^2-1 | z1", 1, &[(&[2], 1.0), (&[0], -1.0)], &[(&[1], 1.0)], false),
        pair("z1z2 | z1+z2", 2, &[(&[1, 1], 1.0)], &[(&[1, 0], 1.0), (&[0, 1], 1.0)], false),
        pair("-1 | z1", 1, &[(&[0], -1.0)], &[(&[1], 1.0)], false),
        pair("z1+2z2+3 | 1", 2, &[(&[1, 0], 1.0), (&[0, 1], 2.0), (&[0, 0], 3.0)], &[(&[0, 0], 1.0)], false),
        pair("z1^3-3z1 | z1^2-1", 1, &[(&[3], 1.0), (&[1], -3.0)], &[(&[2], 1.0), (&[0], -1.0)], false),
        pair(
            "z1+0.5z2+z3 | 1",
            3,
            &[(&[1, 0, 0], 1.0), (&[0, 1, 0], 0.5), (&[0, 0, 1], 1.0)],
            &[(&[0, 0, 0], 1.0)],
            false,
        ),
        pair("z1z2-1 | z1", 2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)], &[(&[1, 0], 1.0)], false),
        pair("z1^2 | 1", 1, &[(&[2], 1.0)], &[(&[0], 1.0)], true),
        pair("z1^2+z2 | 1", 2, &[(&[2, 0], 1.0), (&[0, 1], 1.0)], &[(&[0, 0], 1.0)], true),
        pair("z1z2 | 1", 2, &[(&[1, 1], 1.0)], &[(&[0, 0], 1.0)], true),
        pair("z1^3 | 1", 1, &[(&[3], 1.0)], &[(&[0], 1.0)], true),
        pair("z1 | z1^2+1", 1, &[(&[1], 1.0)], &[(&[2], 1.0), (&[0], 1.0)], true),
        pair("z1-z2 | 1", 2, &[(&[1, 0], 1.0), (&[0, 1], -1.0)], &[(&[0, 0], 1.0)], true),
        pair("z1^2+2 | z1", 1, &[(&[2], 1.0), (&[0], 2.0)], &[(&[1], 1.0)], true),
        pair("z1z2+1 | z1", 2, &[(&[1, 1], 1.0), (&[0, 0], 1.0)], &[(&[1, 0], 1.0)], true),
        pair(
            "z1+z2+z3^2 | 1",
            3,
            &[(&[1, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 2], 1.0)],
            &[(&[0, 0, 0], 1.0)],
            true,
        ),
        pair("1 | z1^2", 1, &[(&[0], 1.0)], &[(&[2], 1.0)], true),
    ]
}

/// Scalar positive real functions of one variable `λ`.
pub fn positive_real_corpus() -> Vec<NamedFunction> {
    vec![
        NamedFunction::new("1/(l+1)", ratio(rsp(1, &[(&[0], 1.0)]), rsp(1, &[(&[1], 1.0), (&[0], 1.0)]))),
        NamedFunction::new(
            "(l^2+l+1)/(l^2+2l+1)",
            ratio(rsp(1, &[(&[2], 1.0), (&[1], 1.0), (&[0], 1.0)]), rsp(1, &[(&[2], 1.0), (&[1], 2.0), (&[0], 1.0)])),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shapes() {
        let corpus = nevanlinna_corpus();
        assert!(corpus.len() >= 12);
        for d in 1..=3 {
            assert!(corpus.iter().any(|n| n.f.nvars() == d), "no item with d = {d}");
        }
        for m in 1..=2 {
            assert!(corpus.iter().any(|n| n.f.dim() == m), "no item with m = {m}");
        }
        let s = stability_corpus();
        assert_eq!(s.len(), 20);
        assert_eq!(s.iter().filter(|p| p.planted).count(), 10);
        assert!(s.iter().all(|p| p.p.has_real_coeffs() && p.q.has_real_coeffs()));
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = nevanlinna_corpus();
        let b = nevanlinna_corpus();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.f.num(), y.f.num());
            assert_eq!(x.f.den(), y.f.den());
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng);
        let err = (&(&u * &u.adjoint()) - &ComplexMatrix::identity(2)).max_abs();
        assert!(err < 1e-14);
    }
}
