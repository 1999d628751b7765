use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// Conjugate series of one sampled period: harmonic `k` is multiplied by
/// `i sign(k)`; the mean and the Nyquist bin go to zero.
pub(crate) fn spectral_periodic(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut data: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut data);
    data[0] = C64::new(0.0, 0.0);
    for (k, d) in data.iter_mut().enumerate().skip(1) {
        let harmonic = if 2 * k < n {
            1.0
        } else if 2 * k == n {
            0.0
        } else {
            -1.0
        };
        *d *= C64::new(0.0, harmonic);
    }
    planner.plan_fft_inverse(n).process(&mut data);
    data.iter().map(|v| v.re / n as f64).collect()
}

/// Coefficient-space conjugation: `(a_n cos + b_n sin) -> (b_n cos - a_n sin)`.
/// Returns `(a', b')`; index 0 is the mean and is annihilated.
pub fn conjugate_coefficients(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a2: Vec<f64> = b.to_vec();
    let mut b2: Vec<f64> = a.iter().map(|v| -v).collect();
    if let Some(x) = a2.first_mut() {
        *x = 0.0;
    }
    if let Some(x) = b2.first_mut() {
        *x = 0.0;
    }
    (a2, b2)
}

/// Cotangent-kernel quadrature over one period at selected samples:
/// `H[f](s) = (1/2pi) PV int f(s') cot((s' - s)/2) ds'`, with the singular
/// part subtracted and the removable point filled by `2 f'(s)`.
pub fn periodic_pv_at(f: &[f64], indices: &[usize]) -> Vec<f64> {
    let n = f.len();
    let ds = 2.0 * PI / n as f64;
    let cot: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / (0.5 * d as f64 * ds).tan() }).collect();
    indices
        .par_iter()
        .map(|&j| {
            let fj = f[j];
            let mut s = 0.0;
            for (k, &fk) in f.iter().enumerate() {
                if k != j {
                    let d = (k + n - j) % n;
                    s += (fk - fj) * cot[d];
                }
            }
            let deriv = (f[(j + 1) % n] - f[(j + n - 1) % n]) / (2.0 * ds);
            (s + 2.0 * deriv) * ds / (2.0 * PI)
        })
        .collect()
}
