//! Dense univariate complex polynomials as ascending coefficient vectors.
//!
//! Used for line restrictions in the coprimality probe and for the spectral
//! factor in the one-variable realization.

use crate::linalg::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Drops trailing (highest-degree) exact zeros.
pub fn trim(p: &[C64]) -> Vec<C64> {
    let mut v = p.to_vec();
    while v.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
        v.pop();
    }
    v
}

/// Drops trailing coefficients with magnitude at most `tol`.
pub fn trim_tol(p: &[C64], tol: f64) -> Vec<C64> {
    let mut v = p.to_vec();
    while v.last().is_some_and(|c| c.norm() <= tol) {
        v.pop();
    }
    v
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[C64]) -> Option<usize> {
    let t = trim(p);
    if t.is_empty() {
        None
    } else {
        Some(t.len() - 1)
    }
}

pub fn eval(p: &[C64], t: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(ZERO) + b.get(i).copied().unwrap_or(ZERO)).collect()
}

pub fn scale(a: &[C64], c: C64) -> Vec<C64> {
    a.iter().map(|&x| x * c).collect()
}

pub fn max_abs(p: &[C64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Divides by the leading coefficient. `p` must be trimmed and nonzero.
pub fn monic(p: &[C64]) -> Vec<C64> {
    let lead = *p.last().expect("monic of zero polynomial");
    p.iter().map(|&c| c / lead).collect()
}

/// Remainder of `a` modulo a monic `b`.
fn rem_monic(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (k, &bk) in b.iter().enumerate() {
            r[shift + k] -= lead * bk;
        }
        r.pop();
    }
    r
}

/// Monic gcd by Euclid on monic remainders. A remainder is treated as zero
/// once every coefficient is at most `tol` times the scale of the current
/// pair; leading coefficients below that level are dropped before
/// normalizing. Returns `None` when both inputs vanish.
pub fn gcd(a: &[C64], b: &[C64], tol: f64) -> Option<Vec<C64>> {
    let a = trim_tol(a, tol * max_abs(a));
    let b = trim_tol(b, tol * max_abs(b));
    let (mut x, mut y) = match (a.is_empty(), b.is_empty()) {
        (true, true) => return None,
        (true, false) => return Some(monic(&b)),
        (false, true) => return Some(monic(&a)),
        _ => (monic(&a), monic(&b)),
    };
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        if y.len() == 1 {
            return Some(vec![ONE]);
        }
        let scale = max_abs(&x).max(max_abs(&y)).max(1.0);
        let r = trim_tol(&rem_monic(&x, &y), tol * scale);
        if r.is_empty() {
            return Some(y);
        }
        x = y;
        y = monic(&r);
    }
}

/// All complex roots by Aberth–Ehrlich iteration followed by Newton polish.
/// `p` must have a nonzero leading coefficient.
pub fn roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p);
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let p = monic(&p);
    let dp: Vec<C64> = p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + p[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pk = eval(&p, z[k]);
            let dpk = eval(&dp, z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let ratio = pk / dpk;
            let sum: C64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (ONE - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let d = eval(&dp, *zk);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(&p, *zk) / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *zk -= step;
        }
    }
    z
}

/// `lead · ∏ (t − r)`.
pub fn from_roots(roots: &[C64], lead: C64) -> Vec<C64> {
    roots.iter().fold(vec![lead], |acc, &r| mul(&acc, &[-r, ONE]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gcd_of_shared_root() {
        // (t - 1)(t + 2) and (t - 1)(t - 3)
        let a = from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)], ONE);
        let b = from_roots(&[c(1.0, 0.0), c(3.0, 0.0)], c(2.0, 1.0));
        let g = gcd(&a, &b, 1e-10).unwrap();
        assert_eq!(g.len(), 2);
        assert!((g[0] + ONE).norm() < 1e-12);
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let a = from_roots(&[c(1.0, 1.0)], ONE);
        let b = from_roots(&[c(-1.0, 0.5), c(2.0, 0.0)], ONE);
        assert_eq!(gcd(&a, &b, 1e-10).unwrap(), vec![ONE]);
    }

    #[test]
    fn gcd_with_zero() {
        let a = vec![c(2.0, 0.0), c(1.0, 0.0)];
        assert_eq!(gcd(&a, &[], 1e-10).unwrap(), vec![c(2.0, 0.0), ONE]);
        assert!(gcd(&[], &[ZERO], 1e-10).is_none());
    }

    #[test]
    fn roots_recover_known_roots() {
        let rs = [c(1.0, 0.0), c(-0.5, 2.0), c(-0.5, -2.0), c(3.0, 0.1)];
        let p = from_roots(&rs, c(2.0, 0.0));
        let found = roots(&p);
        for r in rs {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "{r} not found in {found:?}");
        }
    }

    #[test]
    fn roots_of_t4_plus_1() {
        let p = vec![ONE, ZERO, ZERO, ZERO, ONE];
        for r in roots(&p) {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(eval(&p, r).norm() < 1e-12);
        }
    }
}
