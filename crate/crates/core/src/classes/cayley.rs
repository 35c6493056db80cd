use super::sampling::{PointSampler, Stream};
use super::{CheckReport, ClassError, SampleConfig, Tolerances, Verdict};
use crate::linalg::{condition_one, max_singular_value, solve, ComplexMatrix, C64};
use crate::rational::{RationalError, RationalMatrixFunction};

const I: C64 = C64::new(0.0, 1.0);
const MAX_CONDITION: f64 = 1e12;
const MAX_DRAWS_PER_SAMPLE: usize = 20;

fn to_half_plane(w: &[C64]) -> Vec<C64> {
    let one = C64::new(1.0, 0.0);
    w.iter().map(|&wk| I * (one + wk) / (one - wk)).collect()
}

fn cayley_at(f: &RationalMatrixFunction, w: &[C64]) -> Result<ComplexMatrix, ClassError> {
    let fz = f.eval(&to_half_plane(w))?;
    let shift = ComplexMatrix::scalar(f.dim(), I);
    let plus = &fz + &shift;
    let cond = condition_one(&plus).unwrap_or(f64::INFINITY);
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(ClassError::SingularCayley(cond));
    }
    // F and (F + iI)⁻¹ commute, so a left solve gives the same S.
    solve(&plus, &(&fz - &shift)).map_err(|_| ClassError::SingularCayley(f64::INFINITY))
}

/// `S(w) = (F − iI)(F + iI)⁻¹` with `F = f(z)`, `z_k = i(1 + w_k)/(1 − w_k)`.
pub fn double_cayley_eval(f: &RationalMatrixFunction, w: &[C64]) -> Result<ComplexMatrix, ClassError> {
    if w.len() != f.nvars() {
        return Err(
            RationalError::Poly(crate::poly::PolyError::PointLength { expected: f.nvars(), got: w.len() }).into()
        );
    }
    if w.iter().any(|wk| wk.norm().is_nan() || wk.norm() >= 1.0) {
        return Err(ClassError::OutsideDisk);
    }
    cayley_at(f, w)
}

/// Samples the open polydisk and checks `σ_max(S(w)) ≤ 1 + psd_slack`.
///
/// Margin is `1 + psd_slack − σ_max`. Pole and singular points are redrawn.
pub fn check_double_cayley_contractive(
    f: &RationalMatrixFunction,
    cfg: &SampleConfig,
    tol: &Tolerances,
) -> CheckReport {
    let mut report = CheckReport::new("double-cayley-contractive", cfg.seed);
    let mut sampler = PointSampler::new(cfg, f.nvars(), Stream::Disk);
    let (mut accepted, mut draws) = (0, 0);
    while accepted < cfg.count && draws < cfg.count * MAX_DRAWS_PER_SAMPLE {
        draws += 1;
        let w = sampler.disk();
        let Ok(s) = cayley_at(f, &w) else { continue };
        accepted += 1;
        report.observe(1.0 + tol.psd_slack - max_singular_value(&s), &w);
    }
    report.samples_used = accepted;
    report.rejected = draws - accepted;
    report.verdict = if report.worst_margin < 0.0 {
        Verdict::Fail
    } else if accepted < cfg.count {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    report
}

/// Largest `‖S S* − I‖_F` over `cfg.count` torus samples, and where it
/// occurred. Points where `S` is undefined are skipped.
pub fn torus_unitarity_defect(f: &RationalMatrixFunction, cfg: &SampleConfig) -> (f64, Option<Vec<C64>>) {
    let mut sampler = PointSampler::new(cfg, f.nvars(), Stream::Torus);
    let eye = ComplexMatrix::identity(f.dim());
    let mut worst = (0.0, None);
    for _ in 0..cfg.count {
        let w = sampler.torus();
        let Ok(s) = cayley_at(f, &w) else { continue };
        let defect = (&(&s * &s.adjoint()) - &eye).frobenius_norm();
        if defect > worst.0 || worst.1.is_none() {
            worst = (defect, Some(w));
        }
    }
    worst
}
