//! Rational matrix functions `f(z) = P(z)/q(z)` with a scalar common
//! denominator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, C64};
use crate::poly::{MatrixPoly, PolyError};
use crate::univariate;

/// Relative coefficient tolerance for [`identity_equal`].
pub const IDENTITY_TOL: f64 = 1e-12;
/// Default relative pole floor for [`RationalMatrixFunction::eval`].
pub const DEFAULT_DEN_FLOOR: f64 = 1e-12;
/// Degree-drop tolerance used by the line gcd.
pub const GCD_TOL: f64 = 1e-10;

const LINE_RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("denominator must be scalar, got {0}x{0} coefficients")]
    DenominatorNotScalar(usize),
    #[error("denominator {value:.3e} below pole floor {floor:.3e}")]
    NearPole { value: f64, floor: f64 },
    #[error("compression vector is zero")]
    ZeroEta,
    #[error("every sampled line restricted the input to zero")]
    DegenerateLine,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, PartialEq)]
pub struct RationalMatrixFunction {
    num: MatrixPoly,
    den: MatrixPoly,
    normalized: bool,
}

impl RationalMatrixFunction {
    pub fn new(num: MatrixPoly, den: MatrixPoly) -> Result<Self, RationalError> {
        if den.dim() != 1 {
            return Err(RationalError::DenominatorNotScalar(den.dim()));
        }
        if num.nvars() != den.nvars() {
            return Err(PolyError::VariableMismatch(num.nvars(), den.nvars()).into());
        }
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self { num, den, normalized: false })
    }

    /// `P / 1`.
    pub fn polynomial(num: MatrixPoly) -> Self {
        let den = MatrixPoly::scalar_constant(num.nvars(), C64::new(1.0, 0.0));
        Self { num, den, normalized: false }
    }

    pub fn num(&self) -> &MatrixPoly {
        &self.num
    }

    pub fn den(&self) -> &MatrixPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Evaluation with the default relative pole floor.
    pub fn eval(&self, z: &[C64]) -> Result<ComplexMatrix, RationalError> {
        self.eval_with_floor(z, DEFAULT_DEN_FLOOR)
    }

    /// Evaluation, rejecting points where `|q(z)|` is at most
    /// `rel_floor · max|coeff(q)|`.
    pub fn eval_with_floor(&self, z: &[C64], rel_floor: f64) -> Result<ComplexMatrix, RationalError> {
        let q = self.den.evaluate_scalar(z)?;
        let floor = rel_floor * self.den.max_coeff_abs();
        if q.norm().is_nan() || q.norm() <= floor {
            return Err(RationalError::NearPole { value: q.norm(), floor });
        }
        Ok(self.num.evaluate(z)?.scale(q.inv()))
    }

    /// Scales numerator and denominator so the graded-lex leading coefficient
    /// of the denominator is exactly 1.
    pub fn normalize(&self) -> Self {
        let (_, lead) = self.den.leading_term().expect("denominator is nonzero");
        let lead = lead[(0, 0)];
        if lead == C64::new(1.0, 0.0) {
            return Self { normalized: true, ..self.clone() };
        }
        let div = |m: &ComplexMatrix| m.map(|c| c / lead);
        Self { num: self.num.map_coeffs(div), den: self.den.map_coeffs(div), normalized: true }
    }

    /// Substitutes `c` for the last variable in numerator and denominator.
    pub fn substitute_last(&self, c: C64) -> Result<Self, RationalError> {
        Self::new(self.num.substitute_last(c), self.den.substitute_last(c))
    }

    /// `z ↦ f(factors ⊙ z)`.
    pub fn scale_variables(&self, factors: &[C64]) -> Result<Self, RationalError> {
        Self::new(self.num.scale_variables(factors)?, self.den.scale_variables(factors)?)
    }

    /// `c · f`.
    pub fn scale(&self, c: C64) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone(), normalized: self.normalized }
    }

    /// Scalar function of entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Self {
        Self { num: self.num.entry(i, j), den: self.den.clone(), normalized: self.normalized }
    }

    /// Assembles a matrix function from scalar entries over the product of
    /// their distinct denominators.
    pub fn from_scalar_entries(entries: &[Vec<RationalMatrixFunction>]) -> Result<Self, RationalError> {
        let flat: Vec<&RationalMatrixFunction> = entries.iter().flatten().collect();
        let first = flat.first().ok_or(RationalError::ZeroDenominator)?;
        let nvars = first.nvars();
        let mut dens: Vec<MatrixPoly> = Vec::new();
        for e in &flat {
            if e.dim() != 1 {
                return Err(PolyError::DimensionMismatch(1, e.dim()).into());
            }
            let d = e.normalize().den;
            if !dens.iter().any(|x| x.approx_eq(&d, 0.0)) {
                dens.push(d);
            }
        }
        let mut common = MatrixPoly::scalar_constant(nvars, C64::new(1.0, 0.0));
        for d in &dens {
            common = common.mul(d)?;
        }
        let mut rows = Vec::with_capacity(entries.len());
        for row in entries {
            let mut out_row = Vec::with_capacity(row.len());
            for e in row {
                let n = e.normalize();
                let mut num = n.num.clone();
                let mut skipped = false;
                for d in &dens {
                    if !skipped && d.approx_eq(&n.den, 0.0) {
                        skipped = true;
                        continue;
                    }
                    num = num.mul(d)?;
                }
                out_row.push(num);
            }
            rows.push(out_row);
        }
        Self::new(MatrixPoly::from_entries(&rows)?, common)
    }
}

impl std::fmt::Debug for RationalMatrixFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl std::fmt::Display for RationalMatrixFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// True iff `num_f·den_h − num_h·den_f` vanishes entrywise to within
/// [`IDENTITY_TOL`] times the largest coefficient among the four operands.
/// Functions of different shape are never equal.
pub fn identity_equal(f: &RationalMatrixFunction, h: &RationalMatrixFunction) -> bool {
    identity_residual(f, h).is_some_and(|(res, scale)| res <= IDENTITY_TOL * scale)
}

/// `(max |coeff of cross difference|, max |coeff of operands|)`, or `None`
/// on shape mismatch.
pub fn identity_residual(f: &RationalMatrixFunction, h: &RationalMatrixFunction) -> Option<(f64, f64)> {
    if f.nvars() != h.nvars() || f.dim() != h.dim() {
        return None;
    }
    let lhs = f.num.mul(&h.den).ok()?;
    let rhs = h.num.mul(&f.den).ok()?;
    let res = lhs.sub(&rhs).ok()?.max_coeff_abs();
    let scale = [&f.num, &f.den, &h.num, &h.den].iter().map(|p| p.max_coeff_abs()).fold(0.0, f64::max);
    Some((res, scale))
}

/// Outcome of the randomized coprimality probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoprimeOutcome {
    CoprimeProbable,
    CommonFactorFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoprimeVerdict {
    pub verdict: CoprimeOutcome,
    pub lines_tested: usize,
    /// Degree of the joint univariate gcd on each tested line.
    pub gcd_degrees: Vec<usize>,
}

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Probes whether `p` (scalar or matrix) and scalar `q` share a factor by
/// restricting both to random complex lines `a + t·b` and running a
/// floating Euclid on the restrictions.
///
/// Every nonzero entry of `p` and one random compression `η p η*` are
/// scalarized; a line reports the degree of the gcd of `q` with all of them.
pub fn coprime_probe(p: &MatrixPoly, q: &MatrixPoly, lines: usize, seed: u64) -> Result<CoprimeVerdict, RationalError> {
    if q.dim() != 1 {
        return Err(RationalError::DenominatorNotScalar(q.dim()));
    }
    if q.is_zero() {
        return Err(RationalError::ZeroDenominator);
    }
    if p.nvars() != q.nvars() {
        return Err(PolyError::VariableMismatch(p.nvars(), q.nvars()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p.dim();
    let eta: Vec<C64> = (0..m).map(|_| random_complex(&mut rng)).collect();
    let mut scalars: Vec<MatrixPoly> =
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| p.entry(i, j)).filter(|e| !e.is_zero()).collect();
    scalars.push(p.compress(&eta)?);

    let nvars = q.nvars();
    let mut degrees = Vec::with_capacity(lines);
    for _ in 0..lines {
        let mut found = None;
        for _ in 0..LINE_RETRIES {
            let a: Vec<C64> = (0..nvars).map(|_| random_complex(&mut rng)).collect();
            let b: Vec<C64> = (0..nvars).map(|_| random_complex(&mut rng)).collect();
            if let Some(deg) = line_gcd_degree(&scalars, q, p.is_zero(), &a, &b) {
                found = Some(deg);
                break;
            }
        }
        if let Some(deg) = found {
            degrees.push(deg);
        }
    }
    if degrees.is_empty() {
        return Err(RationalError::DegenerateLine);
    }
    let verdict = if degrees.contains(&0) {
        CoprimeOutcome::CoprimeProbable
    } else if degrees.windows(2).all(|w| w[0] == w[1]) {
        CoprimeOutcome::CommonFactorFound
    } else {
        CoprimeOutcome::Inconclusive
    };
    Ok(CoprimeVerdict { verdict, lines_tested: degrees.len(), gcd_degrees: degrees })
}

fn line_gcd_degree(scalars: &[MatrixPoly], q: &MatrixPoly, p_is_zero: bool, a: &[C64], b: &[C64]) -> Option<usize> {
    let qt = univariate::trim_tol(&q.restrict_to_line(a, b)[0], 0.0);
    if univariate::max_abs(&qt) <= GCD_TOL * q.max_coeff_abs() {
        return None;
    }
    let mut g = qt;
    let mut any_nonzero = false;
    for s in scalars {
        let st = s.restrict_to_line(a, b).swap_remove(0);
        if univariate::max_abs(&st) <= GCD_TOL * s.max_coeff_abs() {
            continue;
        }
        any_nonzero = true;
        g = univariate::gcd(&g, &st, GCD_TOL)?;
        if g.len() == 1 {
            return Some(0);
        }
    }
    if !any_nonzero && !p_is_zero {
        return None;
    }
    let g = univariate::trim_tol(&g, GCD_TOL * univariate::max_abs(&g));
    Some(g.len().saturating_sub(1))
}
