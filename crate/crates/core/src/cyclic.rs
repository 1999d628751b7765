//! Fourier coefficients of log-modulus (`A_n`, cosine series) and phase
//! (`B_n`, sine series) of a cyclic amplitude, from its zeros and from
//! samples.
//!
//! For `chi(z) = prod_k (1 - z/z_k)`, `z = exp(i s)`:
//!
//! ```text
//! A_0 = -sum_{|z|<1} ln|z_k|
//! A_n = -[ sum_{|z|>=1} z_k^-n + sum_{|z|<1} z_k^n ] / n
//! B_n = -[ sum_{|z|>=1} z_k^-n - sum_{|z|<1} (z_k^n - 2(-1)^n) ] / n
//! ```
//!
//! The `(-1)^n` term is the sawtooth series of the linear phase `R s`
//! carried by the `R` zeros inside the unit circle.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{wrap_angle, PolarDecomposition};
use crate::zeros::{ZeroClass, ZeroSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromZeros,
    FromSamples,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::FromZeros => "from_zeros",
            Provenance::FromSamples => "from_samples",
        }
    }
}

/// `log|chi| = sum A_n cos(n s)`, `arg chi = sum B_n sin(n s)`.
///
/// Both arrays have `n_max + 1` entries; `b[0]` is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub n_max: usize,
    pub provenance: Provenance,
    /// Largest imaginary part (zeros) or odd/even leakage (samples) seen.
    pub imag_residue: f64,
    /// Net winding of the phase over one period, when known.
    pub winding: Option<i64>,
}

impl FourierPair {
    /// Converts a pair of `chi = prod(1 - z/z_k)` into the pair of the
    /// amplitude `c0 z^low chi`.
    pub fn for_amplitude(&self, low: i64, c0: C64) -> FourierPair {
        let mut out = self.clone();
        out.a[0] += c0.norm().ln();
        for n in 1..=self.n_max {
            out.b[n] -= 2.0 * low as f64 * sign_alt(n) / n as f64;
        }
        out.winding = self.winding.map(|w| w + low);
        out
    }

    /// `A_n - B_n` for `n = 1..=n_max`.
    pub fn a_minus_b(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.a[n] - self.b[n]).collect()
    }
}

fn sign_alt(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Zero-derived coefficients of `chi = prod(1 - z/z_k)`.
pub fn coefficients_from_zeros(zs: &ZeroSet, n_max: usize) -> Result<FourierPair> {
    if !zs.is_complete() {
        return Err(Error::IncompleteZeroSet { found: zs.total_multiplicity(), degree: zs.degree });
    }
    let r: usize = zs.minus_group().map(|e| e.multiplicity).sum();
    let mut a = vec![0.0; n_max + 1];
    let mut b = vec![0.0; n_max + 1];
    a[0] = -zs.minus_group().map(|e| e.multiplicity as f64 * e.z.norm().ln()).sum::<f64>();
    let mut residue: f64 = 0.0;
    for n in 1..=n_max {
        let mut plus = C64::new(0.0, 0.0);
        let mut minus = C64::new(0.0, 0.0);
        for e in &zs.entries {
            let m = e.multiplicity as f64;
            if e.class == ZeroClass::Upper {
                minus += m * e.z.powu(n as u32);
            } else {
                plus += m * e.z.powi(-(n as i32));
            }
        }
        residue = residue.max(plus.im.abs()).max(minus.im.abs());
        let nf = n as f64;
        a[n] = -(plus.re + minus.re) / nf;
        b[n] = -(plus.re - minus.re + 2.0 * r as f64 * sign_alt(n)) / nf;
    }
    let tolerance = 1e-10 * (zs.degree.max(1) as f64);
    if residue > tolerance {
        return Err(Error::ImaginaryResidue { residue, tolerance });
    }
    Ok(FourierPair {
        a,
        b,
        n_max,
        provenance: Provenance::FromZeros,
        imag_residue: residue,
        winding: Some(r as i64),
    })
}

/// A cyclic signal with its real-axis zeros divided out.
///
/// `phi(s) = phi~(s) prod_k (1 - exp(i(s - s_k)))^(m_k)` with `phi~` smooth and
/// non-vanishing; `arg phi~ = winding * s + rho(s)` with `rho` periodic.
#[derive(Debug, Clone)]
pub(crate) struct Regularized {
    /// Angle of each sample, `omega * t`.
    pub s: Vec<f64>,
    pub log_modulus: Vec<f64>,
    pub rho: Vec<f64>,
    pub winding: i64,
    /// `(s_k, m_k)` of the divided-out axis zeros.
    pub axis: Vec<(f64, u32)>,
}

pub(crate) fn regularize(polar: &PolarDecomposition) -> Result<Regularized> {
    let grid = polar.grid;
    let omega = grid
        .fundamental()
        .ok_or_else(|| Error::NotCyclic("cyclic analysis needs a grid with a period".into()))?;
    let n = grid.len();
    let s: Vec<f64> = grid.times().iter().map(|t| omega * t).collect();
    let axis: Vec<(f64, u32)> = polar.axis_zeros.iter().map(|z| (omega * z.time, z.order)).collect();
    let values = polar.reassemble();

    let mut bad = polar.zero_flags.clone();
    let mut tilde = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        if bad[j] {
            continue;
        }
        let mut f = C64::new(1.0, 0.0);
        for &(sk, m) in &axis {
            let d = wrap_angle(s[j] - sk);
            if d.abs() < 1e-9 {
                bad[j] = true;
                break;
            }
            f *= (1.0 - C64::from_polar(1.0, d)).powu(m);
        }
        if !bad[j] {
            tilde[j] = values[j] / f;
        }
    }
    if bad.iter().all(|b| *b) {
        return Err(Error::DegenerateSignal);
    }
    // fill excluded samples by cubic interpolation from good neighbours
    let good = |k: isize| !bad[k.rem_euclid(n as isize) as usize];
    for j in 0..n {
        if !bad[j] {
            continue;
        }
        let mut pts: Vec<isize> = Vec::with_capacity(4);
        for dir in [-1isize, 1] {
            let mut k = j as isize + dir;
            let mut got = 0;
            while got < 2 && (k - j as isize).abs() < n as isize {
                if good(k) {
                    pts.push(k);
                    got += 1;
                }
                k += dir;
            }
        }
        let x = j as f64;
        let mut acc = C64::new(0.0, 0.0);
        for (a, &ka) in pts.iter().enumerate() {
            let mut w = 1.0;
            for (b, &kb) in pts.iter().enumerate() {
                if a != b {
                    w *= (x - kb as f64) / (ka as f64 - kb as f64);
                }
            }
            acc += w * tilde[ka.rem_euclid(n as isize) as usize];
        }
        tilde[j] = acc;
    }

    let log_modulus: Vec<f64> = tilde.iter().map(|v| v.norm().ln()).collect();
    let raw: Vec<f64> = tilde.iter().map(|v| v.arg()).collect();
    let mut psi = vec![raw[0]; n];
    for j in 1..n {
        let d = wrap_angle(raw[j] - raw[j - 1]);
        if d.abs() > PI - 0.1 {
            return Err(Error::UndersampledPhase { index: j, step: d });
        }
        psi[j] = psi[j - 1] + d;
    }
    let closing = psi[n - 1] + wrap_angle(raw[0] - raw[n - 1]);
    let winding = ((closing - psi[0]) / TAU).round() as i64;
    let rho = psi.iter().zip(&s).map(|(p, sj)| p - winding as f64 * sj).collect();
    Ok(Regularized { s, log_modulus, rho, winding, axis })
}

/// Cosine and sine projections `(c_n, s_n)`, `n = 0..=n_max`, of one period
/// sampled at angles `s` (uniform, one full turn).
fn projections(x: &[f64], s0: f64, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut data: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut data);
    let mut c = vec![0.0; n_max + 1];
    let mut sn = vec![0.0; n_max + 1];
    for k in 0..=n_max {
        let f = data[k] * C64::from_polar(1.0, -(k as f64) * s0) / n as f64;
        let scale = if k == 0 { 1.0 } else { 2.0 };
        c[k] = scale * f.re;
        sn[k] = -scale * f.im;
    }
    (c, sn)
}

/// Sample-derived coefficients of the amplitude represented by `polar`.
///
/// Real-axis zeros recorded in `polar.axis_zeros` are divided out, the smooth
/// quotient is projected, and the exact series of the divided factors and of
/// the secular phase `winding * s` (as a sawtooth) are added back.
pub fn coefficients_from_samples(polar: &PolarDecomposition, n_max: usize) -> Result<FourierPair> {
    let n = polar.grid.len();
    if n < 8 * n_max {
        return Err(Error::TooFewSamples { needed: 8 * n_max, got: n });
    }
    let reg = regularize(polar)?;
    let (mut a, lm_sin) = projections(&reg.log_modulus, reg.s[0], n_max);
    let (rho_cos, mut b) = projections(&reg.rho, reg.s[0], n_max);
    b[0] = 0.0;
    let mut residue: f64 = 0.0;
    for k in 1..=n_max {
        let nf = k as f64;
        residue = residue.max(lm_sin[k].abs()).max(rho_cos[k].abs());
        for &(sk, m) in &reg.axis {
            let c = (nf * sk).cos() / nf;
            a[k] -= m as f64 * c;
            b[k] -= m as f64 * c;
        }
        b[k] -= 2.0 * reg.winding as f64 * sign_alt(k) / nf;
    }
    Ok(FourierPair {
        a,
        b,
        n_max,
        provenance: Provenance::FromSamples,
        imag_residue: residue,
        winding: Some(reg.winding),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_max: usize,
    /// `|A1_n - A2_n|`, `n = 0..=n_max`
    pub diff_a: Vec<f64>,
    /// `|B1_n - B2_n|`, `n = 0..=n_max` (entry 0 unused)
    pub diff_b: Vec<f64>,
    pub rel_a: Vec<f64>,
    pub rel_b: Vec<f64>,
    pub max_abs: f64,
    pub l2: f64,
    /// L2 with weights `1/n` when axis zeros are present (mean convergence).
    pub weighted_l2: f64,
    /// `|z_k + 1|` for every zero, when a zero set was supplied.
    pub near_minus_one: Option<Vec<f64>>,
}

/// Per-index differences of two pairs, compared up to the smaller order.
pub fn compare(p1: &FourierPair, p2: &FourierPair, zs: Option<&ZeroSet>) -> ComparisonReport {
    let n_max = p1.n_max.min(p2.n_max);
    let rel = |d: f64, x: f64, y: f64| {
        let m = x.abs().max(y.abs());
        if m > 0.0 {
            d / m
        } else {
            0.0
        }
    };
    let diff_a: Vec<f64> = (0..=n_max).map(|n| (p1.a[n] - p2.a[n]).abs()).collect();
    let diff_b: Vec<f64> = (0..=n_max).map(|n| if n == 0 { 0.0 } else { (p1.b[n] - p2.b[n]).abs() }).collect();
    let rel_a = (0..=n_max).map(|n| rel(diff_a[n], p1.a[n], p2.a[n])).collect();
    let rel_b = (0..=n_max).map(|n| rel(diff_b[n], p1.b[n], p2.b[n])).collect();
    let max_abs = diff_a.iter().chain(&diff_b).fold(0.0f64, |m, v| m.max(*v));
    let l2 = diff_a.iter().chain(&diff_b).map(|v| v * v).sum::<f64>().sqrt();
    let axis_heavy = zs.is_some_and(|z| z.count(ZeroClass::Axis) > 0);
    let weighted_l2 = (0..=n_max)
        .map(|n| {
            let w = if axis_heavy && n > 0 { 1.0 / n as f64 } else { 1.0 };
            w * (diff_a[n].powi(2) + diff_b[n].powi(2))
        })
        .sum::<f64>()
        .sqrt();
    let near_minus_one = zs.map(|z| z.expanded().iter().map(|zk| (zk + 1.0).norm()).collect());
    ComparisonReport { n_max, diff_a, diff_b, rel_a, rel_b, max_abs, l2, weighted_l2, near_minus_one }
}

/// `n,A_n,B_n,provenance`; several pairs share one header.
pub fn write_fourier_csv<W: Write>(w: W, pairs: &[&FourierPair]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let e = Error::from;
    wr.write_record(["n", "A_n", "B_n", "provenance"]).map_err(e)?;
    for p in pairs {
        for n in 0..=p.n_max {
            wr.write_record([n.to_string(), p.a[n].to_string(), p.b[n].to_string(), p.provenance.as_str().to_string()])
                .map_err(e)?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{to_polar, ComplexSignal, TimeGrid};
    use crate::zeros::{find_zeros, RootOptions, TrigPolynomial, DEFAULT_AXIS_TOL};

    fn zeros_of(c: &[f64]) -> (TrigPolynomial, ZeroSet) {
        let p = TrigPolynomial::new(1.0, 0, c.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap();
        let zs = find_zeros(&p, &RootOptions::default(), DEFAULT_AXIS_TOL).unwrap();
        (p, zs)
    }

    fn samples(f: impl Fn(C64) -> C64, n: usize) -> PolarDecomposition {
        let g = TimeGrid::centered_periodic(TAU, n).unwrap();
        let s = ComplexSignal::sample(g, "", |t| f(C64::from_polar(1.0, t))).unwrap();
        to_polar(&s, None).unwrap()
    }

    #[test]
    fn single_outside_zero() {
        // 1 - z/2: A_n = B_n = -2^-n/n
        let (_, zs) = zeros_of(&[1.0, -0.5]);
        let p = coefficients_from_zeros(&zs, 3).unwrap();
        assert!(p.a[0].abs() < 1e-15);
        for n in 1..=3 {
            let want = -(0.5f64).powi(n as i32) / n as f64;
            assert!((p.a[n] - want).abs() < 1e-15 && (p.b[n] - want).abs() < 1e-15);
        }
        let s = coefficients_from_samples(&samples(|z| 1.0 - z / 2.0, 256), 3).unwrap();
        let cmp = compare(&p, &s, Some(&zs));
        assert!(cmp.max_abs < 1e-8, "{cmp:?}");
    }

    #[test]
    fn single_inside_zero() {
        // 1 - 2z: zero at 1/2
        let (_, zs) = zeros_of(&[1.0, -2.0]);
        let p = coefficients_from_zeros(&zs, 4).unwrap();
        assert!((p.a[0] - 2f64.ln()).abs() < 1e-15);
        for n in 1..=4 {
            let nf = n as f64;
            let h = 0.5f64.powi(n as i32);
            assert!((p.a[n] + h / nf).abs() < 1e-15);
            assert!((p.b[n] - (h - 2.0 * sign_alt(n)) / nf).abs() < 1e-15);
        }
        let s = coefficients_from_samples(&samples(|z| 1.0 - 2.0 * z, 512), 4).unwrap();
        assert!(compare(&p, &s, None).max_abs < 1e-8);
        assert_eq!(s.winding, Some(1));
    }

    #[test]
    fn cosine_log_modulus() {
        let g = TimeGrid::centered_periodic(TAU, 256).unwrap();
        let t = g.times();
        let p = PolarDecomposition::from_parts(g, t.iter().map(|x| x.cos()).collect(), vec![0.0; 256]).unwrap();
        let f = coefficients_from_samples(&p, 8).unwrap();
        assert!((f.a[1] - 1.0).abs() < 1e-10);
        for n in 0..=8 {
            if n != 1 {
                assert!(f.a[n].abs() < 1e-10);
            }
            assert!(f.b[n].abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_samples() {
        let p = samples(|z| 1.0 - z / 2.0, 64);
        assert!(matches!(coefficients_from_samples(&p, 9), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn incomplete_set_rejected() {
        let (_, mut zs) = zeros_of(&[1.0, -0.5]);
        zs.degree = 2;
        assert!(matches!(coefficients_from_zeros(&zs, 2), Err(Error::IncompleteZeroSet { .. })));
    }

    #[test]
    fn axis_zero_divided_out() {
        // (1 + z)^2 (1 - z/3): double zero on the axis at s = pi
        let f = |z: C64| (1.0 + z).powu(2) * (1.0 - z / 3.0);
        let (_, zs) = zeros_of(&[1.0, 2.0 - 1.0 / 3.0, 1.0 - 2.0 / 3.0, -1.0 / 3.0]);
        let from_z = coefficients_from_zeros(&zs, 16).unwrap();
        let polar = samples(f, 1024);
        assert_eq!(polar.axis_zeros.len(), 1);
        assert_eq!(polar.axis_zeros[0].order, 2);
        let from_s = coefficients_from_samples(&polar, 16).unwrap();
        let cmp = compare(&from_z, &from_s, Some(&zs));
        assert!(cmp.max_abs < 1e-9, "max {}", cmp.max_abs);
    }

    #[test]
    fn amplitude_conversion_matches_samples() {
        // phi = 3 z^-2 (1 - z/2)(1 - 4z)
        let f = |z: C64| 3.0 * z.powi(-2) * (1.0 - z / 2.0) * (1.0 - 4.0 * z);
        let (_, zs) = zeros_of(&[1.0, -4.5, 2.0]);
        let chi = coefficients_from_zeros(&zs, 10).unwrap();
        let phi = chi.for_amplitude(-2, C64::new(3.0, 0.0));
        let s = coefficients_from_samples(&samples(f, 512), 10).unwrap();
        assert!(compare(&phi, &s, None).max_abs < 1e-9);
        assert_eq!(s.winding, phi.winding);
    }

    #[test]
    fn csv_layout() {
        let (_, zs) = zeros_of(&[1.0, -0.5]);
        let p = coefficients_from_zeros(&zs, 2).unwrap();
        let mut buf = Vec::new();
        write_fourier_csv(&mut buf, &[&p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,A_n,B_n,provenance");
        assert_eq!(text.lines().count(), 4);
    }
}
