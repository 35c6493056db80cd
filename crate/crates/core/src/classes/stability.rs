use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{PointSampler, Stream};
use super::{CheckReport, ClassError, PencilProbe, SampleConfig, Tolerances, Verdict};
use crate::linalg::C64;
use crate::poly::MatrixPoly;

/// Pencil members tried by [`lemma11_probe`].
pub const PENCIL_MEMBERS: usize = 50;

const ZERO_REL: f64 = 1e-10;
const NEWTON_STARTS: usize = 20;
const NEWTON_ITERS: usize = 50;
const MAX_HALVINGS: usize = 30;
const MAX_DRAWS_PER_SAMPLE: usize = 20;

fn require_scalar(p: &MatrixPoly) -> Result<(), ClassError> {
    if !p.is_scalar() {
        return Err(ClassError::NotScalar(p.dim()));
    }
    Ok(())
}

struct Minimizer<'a> {
    p: &'a MatrixPoly,
    grad: Vec<MatrixPoly>,
    floor: f64,
    radius: f64,
}

impl<'a> Minimizer<'a> {
    fn new(p: &'a MatrixPoly, cfg: &SampleConfig) -> Self {
        let grad = (0..p.nvars()).map(|k| p.partial_derivative(k)).collect();
        Self { p, grad, floor: cfg.imag_floor / 2.0, radius: cfg.box_radius }
    }

    fn value(&self, z: &[C64]) -> f64 {
        self.p.evaluate_scalar(z).expect("point length matches").norm()
    }

    fn project(&self, z: &mut [C64]) {
        for zk in z {
            zk.im = zk.im.max(self.floor);
        }
    }

    /// Damped minimum-norm Newton steps on `p(z) = 0`, i.e. descent on `|p|²`,
    /// staying in `Im z_k ≥ ε/2`.
    fn refine(&self, start: &[C64], target: f64) -> (Vec<C64>, f64) {
        let mut z = start.to_vec();
        let mut best = self.value(&z);
        for _ in 0..NEWTON_ITERS {
            if best < target {
                break;
            }
            let v = self.p.evaluate_scalar(&z).expect("point length matches");
            let g: Vec<C64> = self.grad.iter().map(|d| d.evaluate_scalar(&z).expect("point length matches")).collect();
            let gn: f64 = g.iter().map(|c| c.norm_sqr()).sum();
            if gn == 0.0 || !gn.is_finite() {
                break;
            }
            let mut step: Vec<C64> = g.iter().map(|gk| -v * gk.conj() / gn).collect();
            let len = step.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if len > self.radius {
                step.iter_mut().for_each(|c| *c *= self.radius / len);
            }
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..MAX_HALVINGS {
                let mut trial: Vec<C64> = z.iter().zip(&step).map(|(a, s)| a + s * t).collect();
                self.project(&mut trial);
                let val = self.value(&trial);
                if val < best {
                    z = trial;
                    best = val;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (z, best)
    }
}

/// Searches `Π^d` for a zero of `p`.
///
/// Samples the box, then refines the 20 smallest `|p|` samples. Fails when a
/// point with `|p| < 1e-10 · max|coefficient|` turns up; otherwise the verdict
/// is `no-counterexample`. The margin is `|p|/scale − 1e-10` at the best point.
pub fn check_stable(p: &MatrixPoly, cfg: &SampleConfig, _tol: &Tolerances) -> Result<CheckReport, ClassError> {
    require_scalar(p)?;
    if p.is_zero() {
        return Err(ClassError::ZeroPolynomial);
    }
    cfg.validate()?;
    let scale = p.max_coeff_abs();
    let target = ZERO_REL * scale;
    let mut report = CheckReport::new("stable", cfg.seed);

    let mut sampler = PointSampler::new(cfg, p.nvars(), Stream::UpperHalf);
    let mut points: Vec<Vec<C64>> = (0..cfg.count).map(|_| sampler.upper()).collect();
    if cfg.include_edge_points {
        points.extend(PointSampler::new(&cfg.derived(0xED6E), p.nvars(), Stream::UpperHalf).upper_edges());
    }
    let min = Minimizer::new(p, cfg);
    let mut scored: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, z)| (min.value(z), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    report.samples_used = points.len();

    for &(_, i) in scored.iter().take(NEWTON_STARTS) {
        let (z, val) = min.refine(&points[i], target);
        report.observe(val / scale - ZERO_REL, &z);
        if val < target {
            break;
        }
    }
    report.verdict = if report.worst_margin < 0.0 { Verdict::Fail } else { Verdict::NoCounterexample };
    Ok(report)
}

/// Real coefficients plus [`check_stable`].
pub fn check_real_stable(p: &MatrixPoly, cfg: &SampleConfig, tol: &Tolerances) -> Result<CheckReport, ClassError> {
    require_scalar(p)?;
    if !p.has_real_coeffs() {
        let mut report = CheckReport::new("real-stable", cfg.seed);
        report.verdict = Verdict::Fail;
        report.note = Some("coefficients are not real".into());
        return Ok(report);
    }
    let mut report = check_stable(p, cfg, tol)?;
    report.checker = "real-stable".into();
    Ok(report)
}

/// Verdicts of the three equivalent stability forms for a real pair `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma11Report {
    /// `p + i·q` stable in `d` variables.
    pub form_i: CheckReport,
    /// `p + z_{d+1}·q` real stable in `d + 1` variables.
    pub form_ii: CheckReport,
    /// Every nonzero `αp + βq` real stable. Witness belongs to `failing_member`.
    pub form_iii: CheckReport,
    pub failing_member: Option<PencilProbe>,
    pub members_tested: usize,
    pub members_skipped: usize,
}

impl Lemma11Report {
    pub fn verdicts(&self) -> [Verdict; 3] {
        [self.form_i.verdict, self.form_ii.verdict, self.form_iii.verdict]
    }

    /// All three forms fail, or none does.
    pub fn agree(&self) -> bool {
        let f = self.verdicts().map(Verdict::is_fail);
        f[0] == f[1] && f[1] == f[2]
    }
}

fn require_real_pair(p: &MatrixPoly, q: &MatrixPoly) -> Result<(), ClassError> {
    require_scalar(p)?;
    require_scalar(q)?;
    if p.nvars() != q.nvars() {
        return Err(ClassError::Poly(crate::poly::PolyError::VariableMismatch(p.nvars(), q.nvars())));
    }
    if !p.has_real_coeffs() || !q.has_real_coeffs() {
        return Err(ClassError::NotReal);
    }
    Ok(())
}

/// Angles `θ ∈ [0, π)`, so no two members are antipodal.
fn pencil_angles(cfg: &SampleConfig) -> Vec<f64> {
    let mut sampler = PointSampler::new(cfg, 0, Stream::Pencil);
    let mut out: Vec<f64> = Vec::with_capacity(PENCIL_MEMBERS);
    while out.len() < PENCIL_MEMBERS {
        let t = sampler.rng().gen_range(0.0..std::f64::consts::PI);
        if out.iter().all(|&s| s != t) {
            out.push(t);
        }
    }
    out
}

pub fn lemma11_probe(
    p: &MatrixPoly,
    q: &MatrixPoly,
    cfg: &SampleConfig,
    tol: &Tolerances,
) -> Result<Lemma11Report, ClassError> {
    require_real_pair(p, q)?;
    let i = C64::new(0.0, 1.0);
    let combined = p.add(&q.scale(i))?;
    if combined.is_zero() {
        return Err(ClassError::ZeroPolynomial);
    }
    let mut form_i = check_stable(&combined, cfg, tol)?;
    form_i.checker = "lemma11-i".into();

    let lifted = p.append_variable().add(&q.append_variable().mul_last_variable())?;
    let mut form_ii = check_real_stable(&lifted, cfg, tol)?;
    form_ii.checker = "lemma11-ii".into();

    let mut form_iii = CheckReport::new("lemma11-iii", cfg.seed);
    form_iii.verdict = Verdict::NoCounterexample;
    let (mut tested, mut skipped) = (0, 0);
    let mut failing_member = None;
    for (j, theta) in pencil_angles(cfg).into_iter().enumerate() {
        let (alpha, beta) = (theta.cos(), theta.sin());
        let member = p.scale(C64::new(alpha, 0.0)).add(&q.scale(C64::new(beta, 0.0)))?;
        if member.is_zero() {
            skipped += 1;
            continue;
        }
        tested += 1;
        let r = check_real_stable(&member, &cfg.derived(j as u64), tol)?;
        form_iii.samples_used += r.samples_used;
        if r.worst_margin < form_iii.worst_margin {
            form_iii.worst_margin = r.worst_margin;
            form_iii.witness = r.witness.clone();
        }
        if r.is_fail() {
            form_iii.verdict = Verdict::Fail;
            form_iii.worst_margin = r.worst_margin;
            form_iii.witness = r.witness;
            failing_member = Some(PencilProbe { alpha, beta, eta: vec![C64::new(1.0, 0.0)] });
            break;
        }
    }
    form_iii.note = Some(format!("{tested} members tested, {skipped} identically zero"));
    Ok(Lemma11Report { form_i, form_ii, form_iii, failing_member, members_tested: tested, members_skipped: skipped })
}

/// Tests whether `Im(p/q)` keeps one sign on `Π^d`.
///
/// `witness` attains the smallest `Im(p/q)`, `counter_witness` the largest.
/// The margin is `max(min Im, −max Im) + reality_slack`, negative exactly
/// when both signs occur beyond the slack.
pub fn lemma12_probe(
    p: &MatrixPoly,
    q: &MatrixPoly,
    cfg: &SampleConfig,
    tol: &Tolerances,
) -> Result<CheckReport, ClassError> {
    require_real_pair(p, q)?;
    if p.is_zero() || q.is_zero() {
        return Err(ClassError::ZeroPolynomial);
    }
    cfg.validate()?;
    let floor = tol.den_floor * q.max_coeff_abs();
    let mut report = CheckReport::new("lemma12", cfg.seed);
    let mut sampler = PointSampler::new(cfg, p.nvars(), Stream::UpperHalf);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_at, mut hi_at) = (None, None);
    let (mut accepted, mut draws) = (0, 0);
    while accepted < cfg.count && draws < cfg.count * MAX_DRAWS_PER_SAMPLE {
        draws += 1;
        let z = sampler.upper();
        let qv = q.evaluate_scalar(&z)?;
        if qv.norm() <= floor {
            continue;
        }
        accepted += 1;
        let im = (p.evaluate_scalar(&z)? / qv).im;
        if im < lo {
            lo = im;
            lo_at = Some(z.clone());
        }
        if im > hi {
            hi = im;
            hi_at = Some(z);
        }
    }
    report.samples_used = accepted;
    report.rejected = draws - accepted;
    report.worst_margin = lo.max(-hi) + tol.reality_slack;
    report.witness = lo_at;
    report.counter_witness = hi_at;
    report.verdict = if report.worst_margin < 0.0 {
        Verdict::Fail
    } else if accepted < cfg.count {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    report.note = Some(format!("Im(p/q) ranged over [{lo:.3e}, {hi:.3e}]"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sp(nvars: usize, terms: &[(&[u32], f64, f64)]) -> MatrixPoly {
        MatrixPoly::scalar_from_terms(nvars, terms.iter().map(|(e, re, im)| (e.to_vec(), c(*re, *im)))).unwrap()
    }

    fn cfg() -> SampleConfig {
        SampleConfig::default().with_count(300)
    }

    #[test]
    fn stable_examples() {
        let tol = Tolerances::default();
        let r = check_stable(&sp(1, &[(&[1], 1.0, 0.0), (&[0], 0.0, 1.0)]), &cfg(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::NoCounterexample);

        let p = sp(1, &[(&[1], 1.0, 0.0), (&[0], 0.0, -1.0)]);
        let r = check_stable(&p, &cfg(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert!((w[0] - c(0.0, 1.0)).norm() < 1e-6);
        assert!(p.evaluate_scalar(&w).unwrap().norm() < 1e-10);

        let r = check_stable(&sp(2, &[(&[1, 0], 1.0, 0.0), (&[0, 1], 1.0, 0.0)]), &cfg(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::NoCounterexample);
    }

    #[test]
    fn stable_rejects_bad_input() {
        let tol = Tolerances::default();
        assert_eq!(check_stable(&MatrixPoly::zero(1, 1), &cfg(), &tol), Err(ClassError::ZeroPolynomial));
        assert_eq!(check_stable(&MatrixPoly::variable(1, 0, 2), &cfg(), &tol), Err(ClassError::NotScalar(2)));
    }

    #[test]
    fn real_stable_examples() {
        let tol = Tolerances::default();
        let sum = sp(2, &[(&[1, 0], 1.0, 0.0), (&[0, 1], 1.0, 0.0)]);
        assert_eq!(check_real_stable(&sum, &cfg(), &tol).unwrap().verdict, Verdict::NoCounterexample);

        let shifted = sp(1, &[(&[1], 1.0, 0.0), (&[0], 0.0, 1.0)]);
        let r = check_real_stable(&shifted, &cfg(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.note.unwrap().contains("not real"));

        let hyperbola = sp(2, &[(&[1, 1], 1.0, 0.0), (&[0, 0], -1.0, 0.0)]);
        assert_eq!(check_real_stable(&hyperbola, &cfg(), &tol).unwrap().verdict, Verdict::NoCounterexample);
    }

    #[test]
    fn lemma11_examples() {
        let tol = Tolerances::default();
        let z1 = sp(1, &[(&[1], 1.0, 0.0)]);
        let one = sp(1, &[(&[0], 1.0, 0.0)]);
        let r = lemma11_probe(&z1, &one, &cfg(), &tol).unwrap();
        assert_eq!(r.verdicts(), [Verdict::NoCounterexample; 3]);
        assert_eq!(r.members_tested, PENCIL_MEMBERS);

        let sq = sp(1, &[(&[2], 1.0, 0.0)]);
        let r = lemma11_probe(&sq, &one, &cfg(), &tol).unwrap();
        assert_eq!(r.verdicts(), [Verdict::Fail; 3]);
        let m = r.failing_member.unwrap();
        let member = sq.scale(c(m.alpha, 0.0)).add(&one.scale(c(m.beta, 0.0))).unwrap();
        let w = r.form_iii.witness.unwrap();
        assert!(member.evaluate_scalar(&w).unwrap().norm() < 1e-10 * member.max_coeff_abs());

        let r = lemma11_probe(&one, &MatrixPoly::zero(1, 1), &cfg(), &tol).unwrap();
        assert_eq!(r.form_i.verdict, Verdict::NoCounterexample);
        assert_eq!(r.form_ii.verdict, Verdict::NoCounterexample);
        assert_eq!(r.members_tested + r.members_skipped, PENCIL_MEMBERS);
    }

    #[test]
    fn lemma11_orientation_counterexample() {
        // p = -z1, q = 1: -z1 + i vanishes at i, yet every pencil member
        // -αz1 + β has its root on the real line.
        let tol = Tolerances::default();
        let p = sp(1, &[(&[1], -1.0, 0.0)]);
        let q = sp(1, &[(&[0], 1.0, 0.0)]);
        let r = lemma11_probe(&p, &q, &cfg(), &tol).unwrap();
        assert_eq!(r.form_i.verdict, Verdict::Fail);
        assert_eq!(r.form_ii.verdict, Verdict::Fail);
        assert_eq!(r.form_iii.verdict, Verdict::NoCounterexample);
        assert!(!r.agree());
    }

    #[test]
    fn lemma11_requires_real_pair() {
        let tol = Tolerances::default();
        let p = sp(1, &[(&[1], 1.0, 0.0), (&[0], 0.0, 1.0)]);
        let q = sp(1, &[(&[0], 1.0, 0.0)]);
        assert_eq!(lemma11_probe(&p, &q, &cfg(), &tol), Err(ClassError::NotReal));
    }

    #[test]
    fn lemma12_examples() {
        let tol = Tolerances::default();
        let one = sp(1, &[(&[0], 1.0, 0.0)]);
        assert_eq!(lemma12_probe(&sp(1, &[(&[1], 1.0, 0.0)]), &one, &cfg(), &tol).unwrap().verdict, Verdict::Pass);
        assert_eq!(lemma12_probe(&sp(1, &[(&[1], -1.0, 0.0)]), &one, &cfg(), &tol).unwrap().verdict, Verdict::Pass);

        let sq = sp(1, &[(&[2], 1.0, 0.0)]);
        let r = lemma12_probe(&sq, &one, &cfg(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let lo = sq.evaluate_scalar(&r.witness.unwrap()).unwrap().im;
        let hi = sq.evaluate_scalar(&r.counter_witness.unwrap()).unwrap().im;
        assert!(lo < -tol.reality_slack && hi > tol.reality_slack);
    }

    #[test]
    fn pencil_angles_are_deterministic_and_half_circle() {
        let a = pencil_angles(&cfg());
        assert_eq!(a, pencil_angles(&cfg()));
        assert!(a.iter().all(|t| (0.0..std::f64::consts::PI).contains(t)));
    }
}
