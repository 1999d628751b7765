use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ComplexSignal, TimeGrid};
use crate::C64;

type Evaluator = Arc<dyn Fn(f64) -> DMatrix<C64> + Send + Sync>;

/// `H(t) = G h(t)`: a Hermitian matrix-valued function of time.
#[derive(Clone)]
pub struct MatrixHamiltonian {
    dim: usize,
    scale: f64,
    drive: Option<f64>,
    eval: Evaluator,
}

impl std::fmt::Debug for MatrixHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixHamiltonian")
            .field("dim", &self.dim)
            .field("scale", &self.scale)
            .field("drive", &self.drive)
            .finish()
    }
}

impl MatrixHamiltonian {
    /// `scale` is the energy unit `G`; `drive` the fastest external frequency, if any.
    pub fn new(dim: usize, scale: f64, drive: Option<f64>, eval: Evaluator) -> Self {
        Self { dim, scale, drive, eval }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn evaluate(&self, t: f64) -> DMatrix<C64> {
        (self.eval)(t)
    }

    pub fn hermiticity_defect(&self, t: f64) -> f64 {
        let h = self.evaluate(t);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |d h_nm / dt| / G` over `times`, with `h = H/G` (central differences).
    pub fn adiabaticity_ratio(&self, times: &[f64]) -> f64 {
        let eps = 1e-5;
        let g2 = self.scale * self.scale;
        times
            .iter()
            .map(|&t| {
                let d = (self.evaluate(t + eps) - self.evaluate(t - eps)) / C64::new(2.0 * eps, 0.0);
                d.iter().map(|v| v.norm()).fold(0.0, f64::max) / g2
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// RK4 steps per grid interval.
    pub substeps: usize,
    /// Largest tolerated `| |c|^2 - 1 |`.
    pub norm_limit: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self { substeps: 1, norm_limit: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub components: Vec<ComplexSignal>,
    pub norm_drift: f64,
    pub adiabaticity_ratio: f64,
    /// Whether the step resolves both `1/(G max|h|)` and the drive period.
    pub resolution_ok: bool,
}

fn rk4_step(h: &MatrixHamiltonian, t: f64, dt: f64, c: &DVector<C64>) -> Result<DVector<C64>> {
    let mi = C64::new(0.0, -1.0);
    let hm = h.evaluate(t);
    let size = hm.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let defect = h.hermiticity_defect(t);
    if defect > 1e-12 * size {
        return Err(Error::NonHermitian { t, defect });
    }
    let half = h.evaluate(t + 0.5 * dt);
    let k1 = &hm * c * mi;
    let k2 = &half * (c + &k1 * C64::new(0.5 * dt, 0.0)) * mi;
    let k3 = &half * (c + &k2 * C64::new(0.5 * dt, 0.0)) * mi;
    let k4 = h.evaluate(t + dt) * (c + &k3 * C64::new(dt, 0.0)) * mi;
    Ok(c + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0))
}

/// Classical RK4 for `i dC/dt = H(t) C` with `C(t0) = c0`, `t0` a grid point;
/// integrates forwards and backwards from `t0` to cover the grid.
pub fn propagate(
    h: &MatrixHamiltonian,
    c0: &[C64],
    t0: f64,
    grid: &TimeGrid,
    opts: &PropagateOptions,
) -> Result<Propagation> {
    if c0.len() != h.dim() {
        return Err(Error::InvalidInput(format!("initial state has {} components, H has dimension {}", c0.len(), h.dim())));
    }
    let norm: f64 = c0.iter().map(|v| v.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("initial state must be normalized, |c0|^2 = {norm}")));
    }
    if opts.substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be at least 1".into()));
    }
    let k0 = grid
        .index_of(t0)
        .filter(|&k| (grid.time(k) - t0).abs() <= 1e-9 * grid.dt())
        .ok_or_else(|| Error::InvalidParameter(format!("initial time {t0} is not a grid point")))?;
    let n = grid.len();
    let step = grid.dt() / opts.substeps as f64;
    let mut out = vec![DVector::<C64>::zeros(h.dim()); n];
    out[k0] = DVector::from_column_slice(c0);
    let mut drift: f64 = 0.0;
    for dir in [1isize, -1] {
        let mut c = out[k0].clone();
        let mut k = k0 as isize;
        while (0..n as isize).contains(&(k + dir)) {
            let mut t = grid.time(k as usize);
            let dt = dir as f64 * step;
            for _ in 0..opts.substeps {
                c = rk4_step(h, t, dt, &c)?;
                t += dt;
            }
            k += dir;
            out[k as usize] = c.clone();
            drift = drift.max((c.norm_squared() - 1.0).abs());
        }
    }
    if drift > opts.norm_limit {
        return Err(Error::StepTooLarge { drift, limit: opts.norm_limit });
    }
    let times = grid.times();
    let hmax = times
        .iter()
        .step_by((n / 64).max(1))
        .map(|&t| h.evaluate(t).iter().map(|v| v.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let mut bound = std::f64::consts::TAU / (10.0 * hmax.max(f64::MIN_POSITIVE));
    if let Some(w) = h.drive {
        bound = bound.min(std::f64::consts::TAU / (100.0 * w));
    }
    let ratio = h.adiabaticity_ratio(&times[..].iter().step_by((n / 512).max(1)).copied().collect::<Vec<_>>());
    let components = (0..h.dim())
        .map(|i| ComplexSignal::new(*grid, out.iter().map(|c| c[i]).collect(), format!("c{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Propagation { components, norm_drift: drift, adiabaticity_ratio: ratio, resolution_ok: step <= bound })
}
