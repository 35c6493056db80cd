//! On-disk formats and command implementations for the `darlington` binary.
//!
//! Commands return an [`Outcome`] instead of printing, so the binary and the
//! tests share one code path.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use darlington_core::classes::{
    check_cayley_inner, check_nevanlinna, check_real_stable, check_stable, lemma11_probe, lemma12_probe, CheckReport,
    CheckerRegistry, SampleConfig, Tolerances, Verdict, DEFAULT_SEED,
};
use darlington_core::darlington::{lift, realize_1d, RealizationVariant};
use darlington_core::linalg::{ComplexMatrix, C64};
use darlington_core::poly::MatrixPoly;
use darlington_core::rational::{coprime_probe, identity_equal, CoprimeVerdict, RationalError, RationalMatrixFunction};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "DARLINGTON_SEED";
const COPRIME_LINES: usize = 8;

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAIL: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const PRECONDITION: u8 = 3;
    pub const IDENTITY: u8 = 4;
    pub const CLASS: u8 = 5;
    pub const INCONCLUSIVE: u8 = 6;
    pub const NEAR_POLE: u8 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("evaluation hit a pole: {0}")]
    NearPole(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => exit::PARSE,
            CliError::Precondition(_) => exit::PRECONDITION,
            CliError::NearPole(_) => exit::NEAR_POLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Nevanlinna,
    PositiveReal,
}

/// One monomial: exponents and an `m × m` matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub schema_version: u32,
    pub d: usize,
    pub m: usize,
    pub frame: Frame,
    pub num_terms: Vec<TermRecord>,
    pub den_terms: Vec<TermRecord>,
}

fn records(p: &MatrixPoly) -> Vec<TermRecord> {
    p.terms()
        .map(|(idx, c)| TermRecord {
            exponents: idx.exponents().to_vec(),
            // `+ 0.0` turns -0.0 into 0.0.
            matrix: c.rows().into_iter().map(|row| row.iter().map(|z| [z.re + 0.0, z.im + 0.0]).collect()).collect(),
        })
        .collect()
}

fn poly_from_records(terms: &[TermRecord], d: usize, m: usize, what: &str) -> Result<MatrixPoly, CliError> {
    let mut out = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        if t.exponents.len() != d {
            return Err(CliError::Parse(format!("{what} term {k}: {} exponents, expected {d}", t.exponents.len())));
        }
        if t.matrix.len() != m || t.matrix.iter().any(|r| r.len() != m) {
            return Err(CliError::Parse(format!("{what} term {k}: matrix is not {m}x{m}")));
        }
        let rows: Vec<Vec<C64>> =
            t.matrix.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
        out.push((t.exponents.clone(), ComplexMatrix::from_rows(&rows)));
    }
    MatrixPoly::from_terms(d, m, out).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

impl FunctionFile {
    pub fn from_function(f: &RationalMatrixFunction, frame: Frame) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            d: f.nvars(),
            m: f.dim(),
            frame,
            num_terms: records(f.num()),
            den_terms: records(f.den()),
        }
    }

    pub fn to_function(&self) -> Result<RationalMatrixFunction, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.m == 0 {
            return Err(CliError::Parse("m must be at least 1".into()));
        }
        let num = poly_from_records(&self.num_terms, self.d, self.m, "num_terms")?;
        let den = poly_from_records(&self.den_terms, self.d, 1, "den_terms")?;
        RationalMatrixFunction::new(num, den).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("function files serialize");
        fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.into(), source })
    }
}

fn load(path: &Path) -> Result<(RationalMatrixFunction, Frame), CliError> {
    let file = FunctionFile::read(path)?;
    Ok((file.to_function()?, file.frame))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub checker: String,
    pub point: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub verdicts: Vec<CheckReport>,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coprime: Option<CoprimeVerdict>,
}

impl ReportFile {
    fn new(command: &str, inputs: &[&Path], cfg: &SampleConfig, tol: &Tolerances) -> Self {
        Self {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            seed: cfg.seed,
            tolerances: tol.clone(),
            verdicts: Vec::new(),
            witnesses: Vec::new(),
            coprime: None,
        }
    }

    fn push(&mut self, report: CheckReport) {
        if report.is_fail() {
            if let Some(point) = &report.witness {
                self.witnesses.push(Witness { checker: report.checker.clone(), point: point.clone() });
            }
        }
        self.verdicts.push(report);
    }

    /// The `verdicts` array alone, as written to disk.
    pub fn verdicts_json(&self) -> String {
        serde_json::to_string(&self.verdicts).expect("reports serialize")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("reports serialize");
        fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.into(), source })
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub report: Option<ReportFile>,
}

impl Outcome {
    fn new(code: u8, stdout: String) -> Self {
        Self { code, stdout, report: None }
    }
}

/// `--seed` wins, then `$DARLINGTON_SEED`, then the fixed default. A seed of
/// zero draws one from entropy.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    let seed = match flag {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Parse(format!("{SEED_ENV}={v} is not an integer")))?,
            Err(_) => DEFAULT_SEED,
        },
    };
    Ok(if seed == 0 { rand::random::<u64>() | 1 } else { seed })
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: usize,
    pub edges: bool,
}

impl RunOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, samples: SampleConfig::default().count, edges: false }
    }

    fn config(&self) -> Result<SampleConfig, CliError> {
        let cfg = SampleConfig {
            include_edge_points: self.edges,
            ..SampleConfig::with_seed(self.seed).with_count(self.samples)
        };
        cfg.validate().map_err(|e| CliError::Precondition(e.to_string()))?;
        Ok(cfg)
    }
}

fn describe(report: &CheckReport) -> String {
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NoCounterexample => "no counterexample found",
    };
    let mut line = format!(
        "{:<28} {:<24} margin {:>11.3e}  samples {}",
        report.checker, verdict, report.worst_margin, report.samples_used
    );
    if report.is_fail() {
        if let Some(w) = &report.witness {
            let _ = write!(line, "\n  witness: {}", fmt_point(w));
        }
        if let Some(w) = &report.counter_witness {
            let _ = write!(line, "\n  counter-witness: {}", fmt_point(w));
        }
    }
    if let Some(note) = &report.note {
        let _ = write!(line, "\n  note: {note}");
    }
    line
}

fn fmt_point(z: &[C64]) -> String {
    let parts: Vec<String> = z.iter().map(|&c| darlington_core::linalg::fmt_complex(c)).collect();
    format!("({})", parts.join(", "))
}

/// Fail beats inconclusive beats pass.
fn class_code(reports: &[CheckReport]) -> u8 {
    if reports.iter().any(CheckReport::is_fail) {
        exit::FAIL
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        exit::INCONCLUSIVE
    } else {
        exit::OK
    }
}

pub fn cmd_lift(input: &Path, output: &Path) -> Result<Outcome, CliError> {
    let (f, frame) = load(input)?;
    if frame != Frame::Nevanlinna {
        return Err(CliError::Precondition("lift expects a function in the nevanlinna frame".into()));
    }
    let l = lift(&f).map_err(|e| CliError::Precondition(e.to_string()))?;
    FunctionFile::from_function(&l.g, Frame::Nevanlinna).write(output)?;
    let dec = &l.decomposition;
    let mut out = String::new();
    let _ = writeln!(out, "P1 = {}", dec.p1);
    let _ = writeln!(out, "P2 = {}", dec.p2);
    let _ = writeln!(out, "q1 = {}", dec.q1);
    let _ = writeln!(out, "q2 = {}", dec.q2);
    let _ = writeln!(out, "g(z1..z{}) = {}", l.g.nvars(), l.g);
    let _ = writeln!(out, "wrote {}", output.display());
    Ok(Outcome::new(exit::OK, out))
}

/// Class checks run first: a non-Nevanlinna `f` or non-inner `g` exits 5
/// whatever the identity says; otherwise a failed identity exits 4.
pub fn cmd_verify(f_path: &Path, g_path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (f, _) = load(f_path)?;
    let (g, _) = load(g_path)?;
    if g.nvars() != f.nvars() + 1 || g.dim() != f.dim() {
        return Err(CliError::Precondition(format!(
            "g must have one more variable than f and the same size (f: d={}, m={}; g: d={}, m={})",
            f.nvars(),
            f.dim(),
            g.nvars(),
            g.dim()
        )));
    }
    let cfg = opts.config()?;
    let tol = Tolerances::default();
    let mut report = ReportFile::new("verify", &[f_path, g_path], &cfg, &tol);
    let restricted = g.substitute_last(C64::new(0.0, 1.0));
    let identity = restricted.as_ref().is_ok_and(|r| identity_equal(r, &f));
    let checks = vec![check_nevanlinna(&f, &cfg, &tol), check_cayley_inner(&g, &cfg, &tol)];

    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {}", "identity f(z) = g(z, i)", if identity { "pass" } else { "FAIL" });
    for r in &checks {
        let _ = writeln!(out, "{}", describe(r));
    }
    let code = match class_code(&checks) {
        exit::FAIL => exit::CLASS,
        _ if !identity => exit::IDENTITY,
        c => c,
    };
    for r in checks {
        report.push(r);
    }
    Ok(Outcome { code, stdout: out, report: Some(report) })
}

pub fn cmd_check(path: &Path, class: &str, coprime: bool, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (f, _) = load(path)?;
    let registry = CheckerRegistry::with_builtins();
    let checker = registry.get(class).ok_or_else(|| {
        CliError::Precondition(format!("unknown class {class}; known: {}", registry.names().join(", ")))
    })?;
    let cfg = opts.config()?;
    let tol = Tolerances::default();
    let mut report = ReportFile::new("check", &[path], &cfg, &tol);
    let r = checker.check(&f, &cfg, &tol);
    let mut out = describe(&r) + "\n";
    let code = class_code(std::slice::from_ref(&r));
    report.push(r);
    if coprime {
        let v = coprime_probe(f.num(), f.den(), COPRIME_LINES, cfg.seed)
            .map_err(|e| CliError::Precondition(e.to_string()))?;
        let verdict = serde_json::to_value(v.verdict).expect("serializes");
        let _ = writeln!(out, "coprime probe: {} (gcd degrees {:?})", verdict.as_str().unwrap_or("?"), v.gcd_degrees);
        report.coprime = Some(v);
    }
    Ok(Outcome { code, stdout: out, report: Some(report) })
}

/// Scalar polynomial stored as a function file with a constant denominator.
fn load_poly(path: &Path) -> Result<MatrixPoly, CliError> {
    let (f, _) = load(path)?;
    if f.dim() != 1 {
        return Err(CliError::Precondition(format!("{}: expected a scalar polynomial", path.display())));
    }
    if f.den().total_degree() != Some(0) {
        return Err(CliError::Precondition(format!("{}: denominator must be constant", path.display())));
    }
    let c = f.den().coeff(&vec![0; f.nvars()]).expect("constant term present")[(0, 0)];
    Ok(f.num().scale(C64::new(1.0, 0.0) / c))
}

#[derive(Debug, Clone, Default)]
pub struct StableArgs {
    pub real: bool,
    pub pencil: Option<PathBuf>,
    pub lemma11: Option<PathBuf>,
    pub lemma12: Option<PathBuf>,
}

pub fn cmd_stable(path: &Path, args: &StableArgs, opts: &RunOptions) -> Result<Outcome, CliError> {
    let p = load_poly(path)?;
    let cfg = opts.config()?;
    let tol = Tolerances::default();
    let mut inputs = vec![path];
    inputs.extend([&args.pencil, &args.lemma11, &args.lemma12].into_iter().flatten().map(PathBuf::as_path));
    let mut report = ReportFile::new("stable", &inputs, &cfg, &tol);
    let pre = |e: darlington_core::classes::ClassError| CliError::Precondition(e.to_string());
    let mut out = String::new();

    let only_probes = args.pencil.is_some() || args.lemma11.is_some() || args.lemma12.is_some();
    if !only_probes || args.real {
        let r =
            if args.real { check_real_stable(&p, &cfg, &tol) } else { check_stable(&p, &cfg, &tol) }.map_err(pre)?;
        let _ = writeln!(out, "{}", describe(&r));
        report.push(r);
    }
    if let Some(q_path) = &args.pencil {
        let q = load_poly(q_path)?;
        let l = lemma11_probe(&p, &q, &cfg, &tol).map_err(pre)?;
        let _ = writeln!(out, "{}", describe(&l.form_iii));
        if let Some(m) = &l.failing_member {
            let _ = writeln!(out, "  failing member: {}*p + {}*q", m.alpha, m.beta);
        }
        report.push(l.form_iii);
    }
    if let Some(q_path) = &args.lemma11 {
        let q = load_poly(q_path)?;
        let l = lemma11_probe(&p, &q, &cfg, &tol).map_err(pre)?;
        let _ = writeln!(out, "form                         verdict");
        for r in [&l.form_i, &l.form_ii, &l.form_iii] {
            let _ = writeln!(out, "{}", describe(r));
        }
        if let Some(m) = &l.failing_member {
            let _ = writeln!(out, "  failing member: {}*p + {}*q", m.alpha, m.beta);
        }
        let _ = writeln!(out, "agreement: {}", if l.agree() { "yes" } else { "NO" });
        report.push(l.form_i);
        report.push(l.form_ii);
        report.push(l.form_iii);
    }
    if let Some(q_path) = &args.lemma12 {
        let q = load_poly(q_path)?;
        let r = lemma12_probe(&p, &q, &cfg, &tol).map_err(pre)?;
        let _ = writeln!(out, "{}", describe(&r));
        report.push(r);
    }
    let code = class_code(&report.verdicts);
    Ok(Outcome { code, stdout: out, report: Some(report) })
}

pub fn cmd_realize1d(path: &Path, out_dir: &Path) -> Result<Outcome, CliError> {
    let (z, frame) = load(path)?;
    if frame != Frame::PositiveReal {
        return Err(CliError::Precondition("realize1d expects a function in the positive-real frame".into()));
    }
    if z.nvars() != 1 || z.dim() != 1 {
        return Err(CliError::Precondition("realize1d expects a scalar function of one variable".into()));
    }
    let real = realize_1d(&z).map_err(|e| CliError::Precondition(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io { path: out_dir.into(), source })?;
    let variant = serde_json::to_value(real.variant).expect("serializes");
    let mut out = String::new();
    let _ = writeln!(out, "variant = {}", variant.as_str().unwrap_or("?"));
    if let Some(split) = real.split {
        let split = serde_json::to_value(split).expect("serializes");
        let _ = writeln!(out, "split = {}", split.as_str().unwrap_or("?"));
    }
    let mut pieces = vec![("a", &real.a), ("b", &real.b), ("c", &real.c), ("dd", &real.dd)];
    if let Some(e) = &real.e {
        pieces.push(("e", e));
    }
    for (name, f) in pieces {
        let _ = writeln!(out, "{name} = {f}");
        let file = out_dir.join(format!("{name}.json"));
        FunctionFile::from_function(f, Frame::PositiveReal).write(&file)?;
    }
    let _ = writeln!(out, "r = {}", real.r);
    if real.variant == RealizationVariant::Lft {
        let _ = writeln!(out, "z = a - b (dd + r)^-1 c");
    }
    let _ = writeln!(out, "wrote {}", out_dir.display());
    Ok(Outcome::new(exit::OK, out))
}

/// Parses `a+bi,c+di,...`.
pub fn parse_point(s: &str) -> Result<Vec<C64>, CliError> {
    s.split(',')
        .map(|part| {
            let t = part.trim();
            C64::from_str(t).map_err(|_| CliError::Parse(format!("not a complex number: {t:?}")))
        })
        .collect()
}

pub fn cmd_eval(path: &Path, at: &str) -> Result<Outcome, CliError> {
    let (f, _) = load(path)?;
    let z = parse_point(at)?;
    if z.len() != f.nvars() {
        return Err(CliError::Precondition(format!("expected {} coordinates, got {}", f.nvars(), z.len())));
    }
    match f.eval(&z) {
        Ok(v) => Ok(Outcome::new(exit::OK, format!("{v}\n"))),
        Err(e @ RationalError::NearPole { .. }) => Err(CliError::NearPole(e.to_string())),
        Err(e) => Err(CliError::Precondition(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_point_accepts_complex_forms() {
        let z = parse_point("1+2i, -0.5-1i,3, 2i").unwrap();
        assert_eq!(z, vec![C64::new(1.0, 2.0), C64::new(-0.5, -1.0), C64::new(3.0, 0.0), C64::new(0.0, 2.0)]);
        assert!(parse_point("1+").is_err());
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        let mut pass = CheckReport {
            checker: "x".into(),
            verdict: Verdict::Pass,
            samples_used: 1,
            rejected: 0,
            worst_margin: 1.0,
            witness: None,
            counter_witness: None,
            seed: 1,
            algebraic_reality: None,
            note: None,
        };
        assert_eq!(class_code(std::slice::from_ref(&pass)), exit::OK);
        pass.verdict = Verdict::Inconclusive;
        assert_eq!(class_code(std::slice::from_ref(&pass)), exit::INCONCLUSIVE);
        let mut fail = pass.clone();
        fail.verdict = Verdict::Fail;
        assert_eq!(class_code(&[pass, fail]), exit::FAIL);
    }

    #[test]
    fn function_file_validation() {
        let mut file = FunctionFile {
            schema_version: 1,
            d: 1,
            m: 1,
            frame: Frame::Nevanlinna,
            num_terms: vec![TermRecord { exponents: vec![1], matrix: vec![vec![[1.0, 0.0]]] }],
            den_terms: vec![TermRecord { exponents: vec![0], matrix: vec![vec![[1.0, 0.0]]] }],
        };
        assert!(file.to_function().is_ok());
        file.num_terms[0].exponents = vec![1, 0];
        assert!(matches!(file.to_function(), Err(CliError::Parse(_))));
        file.num_terms[0].exponents = vec![1];
        file.den_terms.clear();
        assert!(matches!(file.to_function(), Err(CliError::Parse(_))));
    }
}
