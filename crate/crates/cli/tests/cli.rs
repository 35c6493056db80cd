use std::path::{Path, PathBuf};
use std::process::Command;

use darlington_cli::{Frame, FunctionFile, ReportFile};
use darlington_core::corpus::nevanlinna_corpus;
use darlington_core::poly::MatrixPoly;
use darlington_core::rational::{identity_equal, RationalMatrixFunction};
use darlington_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_darlington"));
    cmd.env_remove("DARLINGTON_SEED");
    cmd
}

fn run(cmd: &mut Command) -> (i32, String) {
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn sp(nvars: usize, terms: &[(&[u32], C64)]) -> MatrixPoly {
    MatrixPoly::scalar_from_terms(nvars, terms.iter().map(|(e, v)| (e.to_vec(), *v))).unwrap()
}

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn write(dir: &TempDir, name: &str, f: &RationalMatrixFunction, frame: Frame) -> PathBuf {
    let path = dir.path().join(name);
    FunctionFile::from_function(f, frame).write(&path).unwrap();
    path
}

fn read(path: &Path) -> RationalMatrixFunction {
    FunctionFile::read(path).unwrap().to_function().unwrap()
}

fn poly(p: MatrixPoly) -> RationalMatrixFunction {
    RationalMatrixFunction::polynomial(p)
}

#[test]
fn lift_examples() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "i.json", &poly(sp(1, &[(&[0], I)])), Frame::Nevanlinna);
    let g = dir.path().join("g.json");
    let (code, _) = run(bin().arg("lift").arg(&f).arg(&g));
    assert_eq!(code, 0);
    assert!(identity_equal(&read(&g), &poly(sp(2, &[(&[0, 1], ONE)]))));

    let f = write(&dir, "z1.json", &poly(sp(1, &[(&[1], ONE)])), Frame::Nevanlinna);
    let (code, _) = run(bin().arg("lift").arg(&f).arg(&g));
    assert_eq!(code, 0);
    let file = FunctionFile::read(&g).unwrap();
    assert_eq!(file.d, 2);
    assert!(file.num_terms.iter().all(|t| t.exponents[1] == 0));
    assert!(identity_equal(&read(&g), &poly(sp(2, &[(&[1, 0], ONE)]))));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(bin().arg("lift").arg(&bad).arg(dir.path().join("x.json"))).0, 2);
    assert_eq!(run(bin().arg("check").arg(&bad)).0, 2);
    assert_eq!(run(bin().arg("lift").arg(dir.path().join("missing.json")).arg(&bad)).0, 2);
    assert_eq!(run(bin().arg("frobnicate")).0, 2);
}

#[test]
fn lift_rejects_positive_real_frame() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "l.json", &poly(sp(1, &[(&[1], ONE)])), Frame::PositiveReal);
    assert_eq!(run(bin().arg("lift").arg(&f).arg(dir.path().join("g.json"))).0, 3);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", &poly(sp(1, &[(&[1], ONE), (&[0], I)])), Frame::Nevanlinna);
    let g = write(&dir, "g.json", &poly(sp(2, &[(&[1, 0], ONE), (&[0, 1], ONE)])), Frame::Nevanlinna);
    let bad_g =
        write(&dir, "g2.json", &poly(sp(2, &[(&[1, 0], ONE), (&[0, 1], C64::new(2.0, 0.0))])), Frame::Nevanlinna);
    let neg = write(&dir, "neg.json", &poly(sp(1, &[(&[1], -ONE)])), Frame::Nevanlinna);
    let samples = ["--samples", "300"];
    assert_eq!(run(bin().arg("verify").arg(&f).arg(&g).args(samples)).0, 0);
    assert_eq!(run(bin().arg("verify").arg(&f).arg(&bad_g).args(samples)).0, 4);
    assert_eq!(run(bin().arg("verify").arg(&neg).arg(&g).args(samples)).0, 5);
    assert_eq!(run(bin().arg("verify").arg(&f).arg(&f).args(samples)).0, 3);
}

#[test]
fn check_exit_codes_and_witness() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", &poly(sp(1, &[(&[1], ONE)])), Frame::Nevanlinna);
    let neg = write(&dir, "neg.json", &poly(sp(1, &[(&[1], -ONE)])), Frame::Nevanlinna);
    let shifted = write(&dir, "zi.json", &poly(sp(1, &[(&[1], ONE), (&[0], I)])), Frame::Nevanlinna);
    assert_eq!(run(bin().arg("check").arg(&z)).0, 0);
    let (code, out) = run(bin().arg("check").arg(&neg));
    assert_eq!(code, 1);
    assert!(out.contains("witness"));
    assert_eq!(run(bin().args(["check", "--class", "cayley-inner"]).arg(&z)).0, 0);
    assert_eq!(run(bin().args(["check", "--class", "cayley-inner"]).arg(&shifted)).0, 1);
    assert_eq!(run(bin().args(["check", "--class", "positive-real"]).arg(&z)).0, 0);
    assert_eq!(run(bin().args(["check", "--class", "schur"]).arg(&z)).0, 3);

    let report = dir.path().join("r.json");
    let (code, out) = run(bin().args(["check", "--coprime", "--report"]).arg(&report).arg(&z));
    assert_eq!(code, 0);
    assert!(out.contains("coprime-probable"));
    let parsed: ReportFile = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed.seed, 0xDA71);
    assert!(parsed.coprime.is_some());
}

#[test]
fn stable_commands() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &poly(sp(1, &[(&[2], ONE)])), Frame::Nevanlinna);
    let q = write(&dir, "q.json", &poly(sp(1, &[(&[0], ONE)])), Frame::Nevanlinna);
    let z = write(&dir, "z.json", &poly(sp(1, &[(&[1], ONE)])), Frame::Nevanlinna);
    let zi = write(&dir, "zi.json", &poly(sp(1, &[(&[1], ONE), (&[0], -I)])), Frame::Nevanlinna);
    let s = ["--samples", "300"];
    assert_eq!(run(bin().arg("stable").arg(&z).args(s)).0, 0);
    assert_eq!(run(bin().arg("stable").arg(&zi).args(s)).0, 1);
    assert_eq!(run(bin().args(["stable", "--real"]).arg(&zi).args(s)).0, 1);
    let (code, out) = run(bin().arg("stable").arg(&p).arg("--lemma11").arg(&q).args(s));
    assert_eq!(code, 1);
    assert!(out.contains("agreement: yes"), "{out}");
    let (code, out) = run(bin().arg("stable").arg(&z).arg("--lemma11").arg(&q).args(s));
    assert_eq!(code, 0);
    assert!(out.contains("agreement: yes"), "{out}");
    assert_eq!(run(bin().arg("stable").arg(&p).arg("--lemma12").arg(&q).args(s)).0, 1);
    assert_eq!(run(bin().arg("stable").arg(&z).arg("--pencil").arg(&q).args(s)).0, 0);

    let rational = RationalMatrixFunction::new(sp(1, &[(&[0], ONE)]), sp(1, &[(&[1], ONE)])).unwrap();
    let r = write(&dir, "r.json", &rational, Frame::Nevanlinna);
    assert_eq!(run(bin().arg("stable").arg(&r)).0, 3);
}

#[test]
fn realize_examples() {
    let dir = TempDir::new().unwrap();
    let lam = write(&dir, "lam.json", &poly(sp(1, &[(&[1], ONE)])), Frame::PositiveReal);
    let (code, out) = run(bin().arg("realize1d").arg(&lam).arg("--out-dir").arg(dir.path().join("a")));
    assert_eq!(code, 0);
    assert!(out.contains("variant = lossless-trivial"));

    let z = RationalMatrixFunction::new(sp(1, &[(&[0], ONE)]), sp(1, &[(&[1], ONE), (&[0], ONE)])).unwrap();
    let zp = write(&dir, "z.json", &z, Frame::PositiveReal);
    let out_dir = dir.path().join("b");
    let (code, out) = run(bin().arg("realize1d").arg(&zp).arg("--out-dir").arg(&out_dir));
    assert_eq!(code, 0);
    assert!(out.contains("variant = lft"));
    assert!(out.contains("r = 1"));
    let [a, b, c, dd] = ["a", "b", "c", "dd"].map(|n| read(&out_dir.join(format!("{n}.json"))));
    for k in 0..20 {
        let lam = C64::new(0.1 + k as f64, 0.5 * k as f64 - 3.0);
        let at = |f: &RationalMatrixFunction| f.eval(&[lam]).unwrap()[(0, 0)];
        let recon = at(&a) - at(&b) * at(&c) / (at(&dd) + 1.0);
        let want = at(&z);
        assert!((recon - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    let wrong = write(&dir, "w.json", &z, Frame::Nevanlinna);
    assert_eq!(run(bin().arg("realize1d").arg(&wrong)).0, 3);
}

#[test]
fn eval_examples() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", &poly(sp(1, &[(&[1], ONE)])), Frame::Nevanlinna);
    let (code, out) = run(bin().arg("eval").arg(&z).args(["--at", "i"]));
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0+1i");
    assert_eq!(run(bin().arg("eval").arg(&z).args(["--at", "1,2"])).0, 3);
    assert_eq!(run(bin().arg("eval").arg(&z).args(["--at", "zz"])).0, 2);
    let r = RationalMatrixFunction::new(sp(1, &[(&[0], ONE)]), sp(1, &[(&[1], ONE)])).unwrap();
    let rp = write(&dir, "r.json", &r, Frame::Nevanlinna);
    assert_eq!(run(bin().arg("eval").arg(&rp).args(["--at", "0"])).0, 7);
    let (code, out) = run(bin().arg("eval").arg(&rp).args(["--at", "-2"]));
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-0.5+0i");
}

#[test]
fn seed_resolution() {
    let dir = TempDir::new().unwrap();
    let z = write(&dir, "z.json", &poly(sp(1, &[(&[1], ONE)])), Frame::Nevanlinna);
    let report = |cmd: &mut Command| {
        let path = dir.path().join("rep.json");
        run(cmd.arg("--report").arg(&path).arg(&z).args(["--samples", "50"]));
        let r: ReportFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        r.seed
    };
    assert_eq!(report(bin().arg("check")), 0xDA71);
    assert_eq!(report(bin().arg("check").env("DARLINGTON_SEED", "77")), 77);
    assert_eq!(report(bin().arg("check").env("DARLINGTON_SEED", "77").args(["--seed", "5"])), 5);
    assert_ne!(report(bin().arg("check").args(["--seed", "0"])), 0);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let neg = write(&dir, "neg.json", &poly(sp(2, &[(&[1, 0], -ONE), (&[0, 1], ONE)])), Frame::Nevanlinna);
    let mut texts = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("rep{k}.json"));
        run(bin().args(["check", "--report"]).arg(&path).arg(&neg));
        texts.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn function_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("f.json");
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cplx = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    for k in 0..100 {
        let nvars = 1 + k % 3;
        let m = 1 + k % 2;
        let mut num = MatrixPoly::zero(nvars, m);
        for _ in 0..4 {
            let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..3)).collect();
            let rows: Vec<Vec<C64>> = (0..m).map(|_| (0..m).map(|_| cplx(&mut rng)).collect()).collect();
            let term =
                MatrixPoly::from_terms(nvars, m, [(e, darlington_core::ComplexMatrix::from_rows(&rows))]).unwrap();
            num = num.add(&term).unwrap();
        }
        let den =
            MatrixPoly::scalar_from_terms(nvars, [(vec![1; nvars], cplx(&mut rng)), (vec![0; nvars], ONE)]).unwrap();
        let f = RationalMatrixFunction::new(num, den).unwrap();
        FunctionFile::from_function(&f, Frame::Nevanlinna).write(&path).unwrap();
        let back = read(&path);
        assert!(identity_equal(&back, &f));
        assert_eq!(back.num(), f.num(), "bit-exact round trip");
    }
    for item in nevanlinna_corpus() {
        FunctionFile::from_function(&item.f, Frame::Nevanlinna).write(&path).unwrap();
        assert_eq!(read(&path).num(), item.f.num(), "{}", item.name);
    }
}
