use std::collections::BTreeMap;

use super::sampling::{PointSampler, Stream};
use super::{CheckReport, SampleConfig, Tolerances, Verdict};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, C64};
use crate::rational::{RationalMatrixFunction, IDENTITY_TOL};

const I: C64 = C64::new(0.0, 1.0);
const MAX_DRAWS_PER_SAMPLE: usize = 20;

/// `f′(z) = i·f(−i·z)`: right half-planes to upper half-planes.
pub fn rotate_to_nevanlinna(f: &RationalMatrixFunction) -> RationalMatrixFunction {
    let factors = vec![-I; f.nvars()];
    let num = f.num().scale_variables(&factors).expect("one factor per variable").scale(I);
    let den = f.den().scale_variables(&factors).expect("one factor per variable");
    RationalMatrixFunction::new(num, den).expect("rotation keeps a nonzero denominator")
}

/// `f(λ) = −i·f′(i·λ)`, the inverse of [`rotate_to_nevanlinna`].
pub fn rotate_to_positive_real(f: &RationalMatrixFunction) -> RationalMatrixFunction {
    let factors = vec![I; f.nvars()];
    let num = f.num().scale_variables(&factors).expect("one factor per variable").scale(-I);
    let den = f.den().scale_variables(&factors).expect("one factor per variable");
    RationalMatrixFunction::new(num, den).expect("rotation keeps a nonzero denominator")
}

/// Draws `cfg.count` non-pole points from `draw` (plus `extra`), feeding each
/// value to `visit`. Returns `(accepted, rejected)`.
fn sweep(
    f: &RationalMatrixFunction,
    cfg: &SampleConfig,
    tol: &Tolerances,
    mut draw: impl FnMut() -> Vec<C64>,
    extra: Vec<Vec<C64>>,
    mut visit: impl FnMut(&[C64], &ComplexMatrix),
) -> (usize, usize) {
    let (mut accepted, mut rejected) = (0, 0);
    let budget = cfg.count.saturating_mul(MAX_DRAWS_PER_SAMPLE);
    let mut draws = 0;
    while accepted < cfg.count && draws < budget {
        draws += 1;
        let z = draw();
        match f.eval_with_floor(&z, tol.den_floor) {
            Ok(v) => {
                accepted += 1;
                visit(&z, &v);
            }
            Err(_) => rejected += 1,
        }
    }
    for z in extra {
        match f.eval_with_floor(&z, tol.den_floor) {
            Ok(v) => {
                accepted += 1;
                visit(&z, &v);
            }
            Err(_) => rejected += 1,
        }
    }
    (accepted, rejected)
}

fn finish(report: &mut CheckReport, accepted: usize, rejected: usize, wanted: usize) {
    report.samples_used = accepted;
    report.rejected = rejected;
    report.verdict = if report.worst_margin < 0.0 {
        Verdict::Fail
    } else if accepted < wanted {
        report.note = Some(format!("only {accepted} of {wanted} samples avoided the poles"));
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
}

/// Samples `Π^d` and checks `λ_min((f − f*)/2i) ≥ −psd_slack`.
///
/// The reported margin is `λ_min + psd_slack`, so a negative margin is a
/// violation.
pub fn check_nevanlinna(f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
    let mut report = CheckReport::new("nevanlinna", cfg.seed);
    let mut sampler = PointSampler::new(cfg, f.nvars(), Stream::UpperHalf);
    let mut edge_sampler = PointSampler::new(&cfg.derived(0xED6E), f.nvars(), Stream::UpperHalf);
    let extra = if cfg.include_edge_points { edge_sampler.upper_edges() } else { Vec::new() };
    let (accepted, rejected) = sweep(
        f,
        cfg,
        tol,
        || sampler.upper(),
        extra,
        |z, v| {
            let min_eig = hermitian_eigenvalues(&v.imag_part())[0];
            report.observe(min_eig + tol.psd_slack, z);
        },
    );
    finish(&mut report, accepted, rejected, cfg.count);
    report
}

/// Relative size of the imaginary part at a point, `‖Im F‖ / (1 + ‖F‖)`.
pub(crate) fn reality_defect(v: &ComplexMatrix) -> f64 {
    v.imag_part().frobenius_norm() / (1.0 + v.frobenius_norm())
}

fn algebraic_reality(f: &RationalMatrixFunction) -> bool {
    let n = f.normalize();
    let scale = n.num().max_coeff_abs().max(n.den().max_coeff_abs());
    n.num().bar_reflect().approx_eq(n.num(), IDENTITY_TOL * scale)
        && n.den().bar_reflect().approx_eq(n.den(), IDENTITY_TOL * scale)
}

/// Nevanlinna check plus reality on `[−R, R]^d`: fails when
/// `‖Im f(x)‖_F > reality_slack·(1 + ‖f(x)‖_F)` at a sampled real point.
///
/// The margin is the smaller of the two slack-adjusted margins. The
/// coefficient-level test `P̄* = P`, `q̄ = q` (after normalizing) is reported
/// in `algebraic_reality` and does not affect the verdict.
pub fn check_cayley_inner(f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
    let nev = check_nevanlinna(f, cfg, tol);
    let mut real = CheckReport::new("reality", cfg.seed);
    let mut sampler = PointSampler::new(cfg, f.nvars(), Stream::Real);
    let (accepted, rejected) = sweep(
        f,
        cfg,
        tol,
        || sampler.real(),
        Vec::new(),
        |x, v| {
            real.observe(tol.reality_slack - reality_defect(v), x);
        },
    );
    finish(&mut real, accepted, rejected, cfg.count);

    let mut report = CheckReport::new("cayley-inner", cfg.seed);
    report.samples_used = nev.samples_used + real.samples_used;
    report.rejected = nev.rejected + real.rejected;
    let primary =
        if nev.is_fail() || (!real.is_fail() && nev.worst_margin <= real.worst_margin) { &nev } else { &real };
    report.worst_margin = primary.worst_margin;
    report.witness = primary.witness.clone();
    report.verdict = match (nev.verdict, real.verdict) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    };
    report.note = Some(format!(
        "nevanlinna margin {:.3e}; reality margin {:.3e}; failing part: {}",
        nev.worst_margin,
        real.worst_margin,
        match (nev.is_fail(), real.is_fail()) {
            (true, true) => "both",
            (true, false) => "nevanlinna",
            (false, true) => "reality",
            (false, false) => "none",
        }
    ));
    report.algebraic_reality = Some(algebraic_reality(f));
    report
}

// Witnesses found in the rotated frame map back by λ = −i·z.
fn unrotate(mut report: CheckReport, name: &str) -> CheckReport {
    report.checker = name.to_string();
    let back = |p: Vec<C64>| p.into_iter().map(|z| -I * z).collect::<Vec<_>>();
    report.witness = report.witness.map(back);
    report.counter_witness = report.counter_witness.map(back);
    report
}

/// `Re f ⪰ 0` on the right poly-half-plane, via the Nevanlinna check of the
/// rotated function. Witnesses are reported in the `λ` frame.
pub fn check_positive_real(f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
    unrotate(check_nevanlinna(&rotate_to_nevanlinna(f), cfg, tol), "positive-real")
}

/// Positive real and lossless: `Re f = 0` on the imaginary axes.
pub fn check_positive_real_cayley_inner(
    f: &RationalMatrixFunction,
    cfg: &SampleConfig,
    tol: &Tolerances,
) -> CheckReport {
    unrotate(check_cayley_inner(&rotate_to_nevanlinna(f), cfg, tol), "positive-real-cayley-inner")
}

/// A sampled membership test selectable by name.
pub trait ClassChecker: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn check(&self, f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport;
}

pub struct Nevanlinna;
pub struct CayleyInner;
pub struct PositiveReal;
pub struct PositiveRealCayleyInner;

impl ClassChecker for Nevanlinna {
    fn name(&self) -> &'static str {
        "nevanlinna"
    }
    fn summary(&self) -> &'static str {
        "Im f(z) >= 0 on the upper poly-half-plane"
    }
    fn check(&self, f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
        check_nevanlinna(f, cfg, tol)
    }
}

impl ClassChecker for CayleyInner {
    fn name(&self) -> &'static str {
        "cayley-inner"
    }
    fn summary(&self) -> &'static str {
        "Nevanlinna and Hermitian-valued at real points"
    }
    fn check(&self, f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
        check_cayley_inner(f, cfg, tol)
    }
}

impl ClassChecker for PositiveReal {
    fn name(&self) -> &'static str {
        "positive-real"
    }
    fn summary(&self) -> &'static str {
        "Re f(λ) >= 0 on the right poly-half-plane"
    }
    fn check(&self, f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
        check_positive_real(f, cfg, tol)
    }
}

impl ClassChecker for PositiveRealCayleyInner {
    fn name(&self) -> &'static str {
        "positive-real-cayley-inner"
    }
    fn summary(&self) -> &'static str {
        "positive real with Re f = 0 on the imaginary axes"
    }
    fn check(&self, f: &RationalMatrixFunction, cfg: &SampleConfig, tol: &Tolerances) -> CheckReport {
        check_positive_real_cayley_inner(f, cfg, tol)
    }
}

/// Checkers keyed by name.
pub struct CheckerRegistry {
    checkers: BTreeMap<&'static str, Box<dyn ClassChecker>>,
}

impl CheckerRegistry {
    pub fn empty() -> Self {
        Self { checkers: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Nevanlinna));
        r.register(Box::new(CayleyInner));
        r.register(Box::new(PositiveReal));
        r.register(Box::new(PositiveRealCayleyInner));
        r
    }

    /// Replaces any checker already registered under the same name.
    pub fn register(&mut self, checker: Box<dyn ClassChecker>) {
        self.checkers.insert(checker.name(), checker);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ClassChecker> {
        self.checkers.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checkers.keys().copied().collect()
    }
}

impl Default for CheckerRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
