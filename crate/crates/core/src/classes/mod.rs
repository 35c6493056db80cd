//! Sampled class-membership checkers, stability falsifiers and the
//! evaluation-level double Cayley transform.
//!
//! Every checker is deterministic for a fixed [`SampleConfig::seed`]. A
//! `fail` verdict always carries the offending point; re-evaluating the
//! function there reproduces the violation. Nothing here certifies
//! membership: a `pass` only means no sampled point violated the condition.

mod cayley;
mod membership;
pub mod sampling;
mod stability;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::darlington::DarlingtonError;
use crate::linalg::C64;
use crate::poly::PolyError;
use crate::rational::RationalError;

pub use cayley::{check_double_cayley_contractive, double_cayley_eval, torus_unitarity_defect};
pub use membership::{
    check_cayley_inner, check_nevanlinna, check_positive_real, check_positive_real_cayley_inner, rotate_to_nevanlinna,
    rotate_to_positive_real, CayleyInner, CheckerRegistry, ClassChecker, Nevanlinna, PositiveReal,
    PositiveRealCayleyInner,
};
pub use stability::{check_real_stable, check_stable, lemma11_probe, lemma12_probe, Lemma11Report, PENCIL_MEMBERS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("expected a scalar polynomial, got {0}x{0} coefficients")]
    NotScalar(usize),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("expected real coefficients")]
    NotReal,
    #[error("point lies outside the open unit polydisk")]
    OutsideDisk,
    #[error("F + iI is numerically singular (condition {0:.3e})")]
    SingularCayley(f64),
    #[error("invalid sample configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Darlington(#[from] DarlingtonError),
}

/// Seeded sampling box `Re ∈ [−R, R]`, `Im ∈ [ε, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    pub box_radius: f64,
    pub imag_floor: f64,
    pub include_edge_points: bool,
}

pub const DEFAULT_SEED: u64 = 0xDA71;

impl Default for SampleConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, count: 1000, box_radius: 10.0, imag_floor: 1e-3, include_edge_points: false }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        if self.count < 1 {
            return Err(ClassError::InvalidConfig("count must be at least 1"));
        }
        if self.box_radius.is_nan() || self.box_radius <= 0.0 {
            return Err(ClassError::InvalidConfig("box radius must be positive"));
        }
        if !(self.imag_floor > 0.0 && self.imag_floor < self.box_radius) {
            return Err(ClassError::InvalidConfig("imaginary floor must lie in (0, R)"));
        }
        Ok(())
    }

    /// Same box, different seed.
    pub(crate) fn derived(&self, salt: u64) -> Self {
        let seed = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt.wrapping_add(1));
        Self { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub psd_slack: f64,
    pub reality_slack: f64,
    /// Relative to the largest denominator coefficient.
    pub den_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { psd_slack: 1e-8, reality_slack: 1e-8, den_floor: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// Falsifier found nothing. Not a certificate.
    NoCounterexample,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checker: String,
    pub verdict: Verdict,
    pub samples_used: usize,
    /// Samples discarded near poles and redrawn.
    pub rejected: usize,
    /// Smallest observed margin, slack already applied: negative means violated.
    pub worst_margin: f64,
    /// Point attaining `worst_margin`.
    pub witness: Option<Vec<C64>>,
    /// Second point for two-sided conditions (sign changes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counter_witness: Option<Vec<C64>>,
    pub seed: u64,
    /// Coefficient-level reality test, when the checker runs one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebraic_reality: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub(crate) fn new(checker: &str, seed: u64) -> Self {
        Self {
            checker: checker.to_string(),
            verdict: Verdict::Pass,
            samples_used: 0,
            rejected: 0,
            worst_margin: f64::INFINITY,
            witness: None,
            counter_witness: None,
            seed,
            algebraic_reality: None,
            note: None,
        }
    }

    pub fn is_fail(&self) -> bool {
        self.verdict.is_fail()
    }

    /// Keeps the smaller margin; ties keep the earlier point.
    pub(crate) fn observe(&mut self, margin: f64, point: &[C64]) {
        if margin < self.worst_margin || self.witness.is_none() {
            self.worst_margin = margin;
            self.witness = Some(point.to_vec());
        }
    }
}

/// Real pencil coefficients and a compression vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilProbe {
    pub alpha: f64,
    pub beta: f64,
    pub eta: Vec<C64>,
}

impl PencilProbe {
    pub fn is_valid(&self) -> bool {
        (self.alpha != 0.0 || self.beta != 0.0) && self.eta.iter().any(|c| c.norm() > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SampleConfig::default().validate().is_ok());
        assert!(SampleConfig::default().with_count(0).validate().is_err());
        let bad = SampleConfig { imag_floor: 20.0, ..SampleConfig::default() };
        assert!(bad.validate().is_err());
        let bad = SampleConfig { box_radius: -1.0, ..SampleConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let c = SampleConfig::default();
        assert_ne!(c.derived(0).seed, c.derived(1).seed);
        assert_eq!(c.derived(3), c.derived(3));
    }

    #[test]
    fn pencil_probe_validity() {
        let one = C64::new(1.0, 0.0);
        assert!(PencilProbe { alpha: 1.0, beta: 0.0, eta: vec![one] }.is_valid());
        assert!(!PencilProbe { alpha: 0.0, beta: 0.0, eta: vec![one] }.is_valid());
        assert!(!PencilProbe { alpha: 1.0, beta: 1.0, eta: vec![C64::new(0.0, 0.0)] }.is_valid());
    }
}
