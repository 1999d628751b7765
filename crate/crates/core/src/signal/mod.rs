//! Time grids, sampled complex signals and their polar decomposition.

mod io;
mod polar;
mod trend;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub use io::{read_polar_csv, read_signal_csv, write_polar_csv, write_signal_csv};
pub use polar::{to_polar, AxisZero, PolarDecomposition};
pub use trend::{fit_trend, subtract_trend, FitRegion, TrendKind, TrendRecord, TrendRequest, TrendTerm};

/// Uniform sampling grid `t_k = t_start + k*dt`, `k = 0..n`.
///
/// A cyclic grid carries its period and samples exactly one period with the
/// endpoint excluded, so `period == n * dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    n: usize,
    period: Option<f64>,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidGrid(format!("dt must be positive and finite, got {dt}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        if !t_start.is_finite() {
            return Err(Error::InvalidGrid("t_start must be finite".into()));
        }
        Ok(Self { t_start, dt, n, period: None })
    }

    /// One full period starting at `t_start`.
    pub fn periodic(t_start: f64, period: f64, n: usize) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        let mut g = Self::new(t_start, period / n.max(1) as f64, n)?;
        g.period = Some(period);
        Ok(g)
    }

    /// One full period on `[-period/2, period/2)`.
    pub fn centered_periodic(period: f64, n: usize) -> Result<Self> {
        Self::periodic(-0.5 * period, period, n)
    }

    /// Line grid on `[-half_width, half_width]`, both endpoints included.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        Self::new(-half_width, 2.0 * half_width / (n.max(2) - 1) as f64, n)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn period(&self) -> Option<f64> {
        self.period
    }
    pub fn is_cyclic(&self) -> bool {
        self.period.is_some()
    }

    /// Fundamental angular frequency `2*pi/period` of a cyclic grid.
    pub fn fundamental(&self) -> Option<f64> {
        self.period.map(|p| std::f64::consts::TAU / p)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Midpoint of the sampled interval (of the period for cyclic grids).
    pub fn center(&self) -> f64 {
        match self.period {
            Some(p) => self.t_start + 0.5 * p,
            None => 0.5 * (self.t_start + self.t_end()),
        }
    }

    /// Half of the covered span: `period/2` or `(t_end - t_start)/2`.
    pub fn half_width(&self) -> f64 {
        match self.period {
            Some(p) => 0.5 * p,
            None => 0.5 * (self.t_end() - self.t_start),
        }
    }

    /// Index of the sample nearest to `t`, if `t` lies within half a step of the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = ((t - self.t_start) / self.dt).round();
        if x < 0.0 || x >= self.n as f64 {
            return None;
        }
        let k = x as usize;
        ((self.time(k) - t).abs() <= 0.5 * self.dt).then_some(k)
    }
}

/// Uniformly sampled complex amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub grid: TimeGrid,
    pub values: Vec<C64>,
    pub label: String,
}

impl ComplexSignal {
    pub fn new(grid: TimeGrid, values: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at sample {k}")));
        }
        Ok(Self { grid, values, label: label.into() })
    }

    /// Samples `f` on every grid point.
    pub fn sample(grid: TimeGrid, label: impl Into<String>, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = grid.times().into_iter().map(f).collect();
        Self::new(grid, values, label)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}
