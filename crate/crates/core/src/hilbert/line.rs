use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::signal::TimeGrid;

/// Discrete band-limited line transform: `H[f]_j = -(2/pi) sum_{m odd} f_{j-m} / m`.
///
/// Evaluated as a zero-padded (linear, not circular) FFT convolution, so
/// nothing wraps around the window ends. Scratch buffers are per call.
pub fn spectral_line(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    let mut kernel = vec![C64::new(0.0, 0.0); len];
    for m in (1..n).step_by(2) {
        let w = 2.0 / (PI * m as f64);
        kernel[m] = C64::new(-w, 0.0);
        kernel[len - m] = C64::new(w, 0.0);
    }
    let mut data: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
    data.resize(len, C64::new(0.0, 0.0));
    fwd.process(&mut kernel);
    fwd.process(&mut data);
    for (d, k) in data.iter_mut().zip(&kernel) {
        *d *= k;
    }
    inv.process(&mut data);
    let scale = 1.0 / len as f64;
    data[..n].iter().map(|v| v.re * scale).collect()
}

/// Principal-value quadrature at selected samples.
///
/// Each sample owns a cell of width `dt`; with `a`, `b` the outer cell edges,
/// `H[f](t) = (1/pi) [ int (f(t') - f(t)) / (t' - t) dt' + f(t) ln((b - t)/(t - a)) ]`
/// and the subtracted integrand is summed by the midpoint rule, its removable
/// singularity filled with a central-difference derivative.
pub fn pv_line_at(f: &[f64], grid: &TimeGrid, indices: &[usize]) -> Vec<f64> {
    let n = f.len();
    let dt = grid.dt();
    let inv: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / d as f64 }).collect();
    let deriv = |j: usize| -> f64 {
        if j == 0 {
            (f[1] - f[0]) / dt
        } else if j == n - 1 {
            (f[n - 1] - f[n - 2]) / dt
        } else {
            (f[j + 1] - f[j - 1]) / (2.0 * dt)
        }
    };
    indices
        .par_iter()
        .map(|&j| {
            let fj = f[j];
            let mut s = 0.0;
            for k in 0..j {
                s -= (f[k] - fj) * inv[j - k];
            }
            for k in j + 1..n {
                s += (f[k] - fj) * inv[k - j];
            }
            s += deriv(j) * dt;
            // distances to the outer cell edges, in cells
            let right = (n - j) as f64 - 0.5;
            let left = j as f64 + 0.5;
            s += fj * (right / left).ln();
            s / PI
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz(c: f64) -> impl Fn(f64) -> f64 {
        move |t| c.sqrt() / (t * t + c)
    }

    #[test]
    fn lorentzian_spectral() {
        let g = TimeGrid::symmetric(200.0, 1 << 15).unwrap();
        let t = g.times();
        let f: Vec<f64> = t.iter().map(|&x| lorentz(1.0)(x)).collect();
        let h = spectral_line(&f);
        let mut worst: f64 = 0.0;
        for (k, &x) in t.iter().enumerate() {
            if x.abs() <= 20.0 {
                worst = worst.max((h[k] + x / (x * x + 1.0)).abs());
            }
        }
        assert!(worst < 1e-6, "worst {worst}");
    }

    #[test]
    fn lorentzian_pv() {
        let g = TimeGrid::symmetric(400.0, 80001).unwrap();
        let t = g.times();
        let f: Vec<f64> = t.iter().map(|&x| lorentz(4.0)(x)).collect();
        let idx: Vec<usize> = (0..80001).step_by(500).filter(|&k| t[k].abs() <= 20.0).collect();
        let h = pv_line_at(&f, &g, &idx);
        for (&k, hv) in idx.iter().zip(&h) {
            let x = t[k];
            assert!((hv + x / (x * x + 4.0)).abs() < 1e-5, "t={x} got {hv}");
        }
    }
}
