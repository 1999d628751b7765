use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Relative correction size at which a root is considered converged.
    pub tol: f64,
    /// Certification: `|p(z)| <= certify * max|c| * max(1,|z|)^deg`.
    pub certify: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-14, certify: 1e-8 }
    }
}

/// Newton ratio `p(z)/p'(z)`, evaluated on the reversed polynomial outside
/// the unit disc to keep the powers bounded.
fn newton_ratio(c: &[C64], z: C64) -> (C64, C64) {
    let d = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, p / dp)
    } else {
        let y = 1.0 / z;
        let mut q = C64::new(0.0, 0.0);
        let mut dq = C64::new(0.0, 0.0);
        for a in c.iter() {
            dq = dq * y + q;
            q = q * y + a;
        }
        // p = z^d q(y), p' = z^(d-1) (d q - y q')
        let p = z.powu(d as u32) * q;
        (p, z * q / (d as f64 * q - y * dq))
    }
}

fn residual_ok(c: &[C64], z: C64, cmax: f64, certify: f64) -> bool {
    let d = c.len() - 1;
    let (p, _) = newton_ratio(c, z);
    p.norm() <= certify * cmax * z.norm().max(1.0).powi(d as i32)
}

/// Starting points from the upper convex hull of `(k, ln|c_k|)`: each hull
/// edge fixes a radius and the number of roots near it.
fn initial_guesses(c: &[C64]) -> Vec<C64> {
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| (k, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(c.len() - 1);
    for (seg, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let r = ((li - lj) / m as f64).exp();
        for q in 0..m {
            let angle = TAU * q as f64 / m as f64 + TAU * seg as f64 / c.len() as f64 + 0.4;
            out.push(C64::from_polar(r, angle));
        }
    }
    out
}

/// `|p(z)|` below which the value is indistinguishable from rounding.
fn rounding_level(c: &[C64], z: C64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for a in c.iter().rev() {
        acc = acc * r + a.norm();
    }
    4.0 * f64::EPSILON * acc
}

fn aberth(c: &[C64], opts: &RootOptions) -> (Vec<C64>, bool) {
    let mut z = initial_guesses(c);
    let d = z.len();
    let mut done = vec![false; d];
    for _ in 0..opts.max_iter {
        let mut all = true;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let (p, ratio) = newton_ratio(c, z[k]);
            if p.norm() <= rounding_level(c, z[k]) {
                done[k] = true;
                continue;
            }
            let mut s = C64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    s += 1.0 / (z[k] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() <= opts.tol * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            return (z, true);
        }
    }
    let converged = done.iter().all(|x| *x);
    (z, converged)
}

fn companion_roots(c: &[C64]) -> Option<Vec<C64>> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    nalgebra::Schur::try_new(m, 1e-15, 100 * d)?.eigenvalues().map(|v| v.iter().copied().collect())
}

/// All roots of `sum c_k z^k` (ascending coefficients, degree >= 1).
///
/// Aberth-Ehrlich simultaneous iteration, falling back to companion-matrix
/// eigenvalues; every returned root has its residual certified against the
/// undeflated polynomial.
pub fn polynomial_roots(c: &[C64], opts: &RootOptions) -> Result<Vec<C64>> {
    if c.len() < 2 {
        return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
    }
    if c[c.len() - 1] == C64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("leading coefficient is zero".into()));
    }
    let cmax = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let (z, converged) = aberth(c, opts);
    if converged && z.iter().all(|&r| residual_ok(c, r, cmax, opts.certify)) {
        return Ok(z);
    }
    if let Some(z2) = companion_roots(c) {
        if z2.iter().all(|&r| residual_ok(c, r, cmax, opts.certify)) {
            return Ok(z2);
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, partial: z })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(r: &[C64]) -> Vec<C64> {
        let mut c = vec![C64::new(1.0, 0.0)];
        for &z in r {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * z;
            }
            c = next;
        }
        c
    }

    #[test]
    fn linear() {
        let r = polynomial_roots(&[C64::new(-2.0, 0.0), C64::new(1.0, 0.0)], &RootOptions::default()).unwrap();
        assert!((r[0] - 2.0).norm() < 1e-15);
    }

    #[test]
    fn widely_spread_roots() {
        let want = [C64::new(0.03, 0.0), C64::new(-0.015, 0.026), C64::new(30.0, 1.0), C64::new(0.7, -0.2), C64::new(-1.0, 0.0)];
        let c = from_roots(&want);
        let mut got = polynomial_roots(&c, &RootOptions::default()).unwrap();
        for w in want {
            let (i, d) = got.iter().enumerate().map(|(i, g)| (i, (g - w).norm())).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            assert!(d < 1e-9 * w.norm().max(1.0), "{w} off by {d}");
            got.remove(i);
        }
    }

    #[test]
    fn companion_agrees() {
        let c = from_roots(&[C64::new(1.5, 0.5), C64::new(-0.3, 0.0), C64::new(0.0, 2.0)]);
        let mut a = companion_roots(&c).unwrap();
        let mut b = polynomial_roots(&c, &RootOptions::default()).unwrap();
        let key = |z: &C64| (z.re * 1e6).round() as i64 * 1_000_000_000 + (z.im * 1e6).round() as i64;
        a.sort_by_key(key);
        b.sort_by_key(key);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9);
        }
    }
}
