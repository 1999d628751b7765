use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::trend::TrendRecord;
use super::{wrap_angle, ComplexSignal, TimeGrid};
use crate::error::{Error, Result};
use crate::C64;

/// Default modulus floor relative to the largest sample.
pub const DEFAULT_FLOOR: f64 = 1e-10;

/// Steps within this distance of pi are ambiguous for nearest-branch unwrapping.
const AMBIGUITY_MARGIN: f64 = 0.1;

/// Relative modulus below which a pi step or a local minimum is read as a
/// nearby real-axis zero rather than an undersampled phase.
const NEAR_ZERO: f64 = 1e-3;

/// A zero of the amplitude on (or within half a sample of) the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisZero {
    /// Estimated location on the time axis.
    pub time: f64,
    /// Nearest grid sample.
    pub index: usize,
    /// Order estimated from the local log-modulus slope.
    pub order: u32,
}

/// `log|phi| + i arg(phi)` on a grid.
///
/// `trend` holds whatever analytic terms were subtracted from the two arrays;
/// [`PolarDecomposition::reassemble`] adds them back.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarDecomposition {
    pub grid: TimeGrid,
    pub log_modulus: Vec<f64>,
    pub phase: Vec<f64>,
    pub trend: TrendRecord,
    pub zero_flags: Vec<bool>,
    pub axis_zeros: Vec<AxisZero>,
}

impl PolarDecomposition {
    /// Builds a decomposition directly from arrays (no zero detection).
    pub fn from_parts(grid: TimeGrid, log_modulus: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if log_modulus.len() != n || phase.len() != n {
            return Err(Error::InvalidInput("array length does not match grid".into()));
        }
        if log_modulus.iter().chain(&phase).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value".into()));
        }
        Ok(Self {
            grid,
            log_modulus,
            phase,
            trend: TrendRecord::default(),
            zero_flags: vec![false; n],
            axis_zeros: Vec::new(),
        })
    }

    /// Log-modulus with the recorded trend added back.
    pub fn full_log_modulus(&self) -> Vec<f64> {
        self.grid
            .times()
            .iter()
            .zip(&self.log_modulus)
            .map(|(&t, &v)| v + self.trend.eval_log_modulus(t))
            .collect()
    }

    /// Phase with the recorded trend added back.
    pub fn full_phase(&self) -> Vec<f64> {
        self.grid
            .times()
            .iter()
            .zip(&self.phase)
            .map(|(&t, &v)| v + self.trend.eval_phase(t))
            .collect()
    }

    /// Complex samples `exp(log_modulus + i phase)` including the trend.
    pub fn reassemble(&self) -> Vec<C64> {
        self.full_log_modulus()
            .into_iter()
            .zip(self.full_phase())
            .map(|(l, p)| C64::from_polar(l.exp(), p))
            .collect()
    }

    /// Same decomposition with the trend folded back into the arrays.
    pub fn with_trend_restored(&self) -> Self {
        Self {
            log_modulus: self.full_log_modulus(),
            phase: self.full_phase(),
            trend: TrendRecord::default(),
            ..self.clone()
        }
    }

    pub fn flagged_count(&self) -> usize {
        self.zero_flags.iter().filter(|f| **f).count()
    }
}

/// Polar decomposition with nearest-branch phase unwrapping.
///
/// Samples with `|v| < floor` are flagged; the phase is held across them and
/// the branch is chosen from the next good sample, which lets odd-order
/// real-axis zeros flip the sign. A step of nearly pi between two adjacent
/// good samples is accepted only when one of them is small (a zero crossing
/// between samples); otherwise the phase is undersampled.
///
/// `floor = None` uses `1e-10 * max|v|`.
pub fn to_polar(signal: &ComplexSignal, floor: Option<f64>) -> Result<PolarDecomposition> {
    let v = &signal.values;
    let n = v.len();
    let maxabs = signal.max_abs();
    if maxabs == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    let floor = floor.unwrap_or(DEFAULT_FLOOR * maxabs);
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!("modulus floor must be positive, got {floor}")));
    }
    let modulus: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let mut flags: Vec<bool> = modulus.iter().map(|&m| m < floor).collect();
    let log_modulus: Vec<f64> = modulus.iter().map(|&m| m.max(f64::MIN_POSITIVE).ln()).collect();
    let raw: Vec<f64> = v.iter().map(|z| z.arg()).collect();

    let first = flags.iter().position(|f| !f).ok_or(Error::DegenerateSignal)?;
    let mut phase = vec![0.0; n];
    phase[first] = raw[first];
    let mut crossings = Vec::new();
    let mut prev = first;
    for k in first + 1..n {
        if flags[k] {
            continue;
        }
        let d = wrap_angle(raw[k] - raw[prev]);
        if prev + 1 == k && d.abs() > PI - AMBIGUITY_MARGIN {
            // a crossing between samples shows as a dip on both sides
            let dip = (prev == 0 || modulus[prev] < 0.75 * modulus[prev - 1])
                && (k + 1 == n || modulus[k] < 0.75 * modulus[k + 1]);
            if !dip && modulus[prev].min(modulus[k]) >= NEAR_ZERO * maxabs {
                return Err(Error::UndersampledPhase { index: k, step: d });
            }
            crossings.push(prev);
        }
        phase[k] = phase[prev] + d;
        prev = k;
    }
    // hold the phase across flagged samples
    for k in 0..n {
        if flags[k] {
            phase[k] = if k < first { phase[first] } else { phase[k - 1] };
        }
    }
    for &k in &crossings {
        flags[k] = true;
        flags[k + 1] = true;
    }

    let axis_zeros = locate_axis_zeros(&signal.grid, v, &modulus, &log_modulus, floor, &crossings, maxabs);

    Ok(PolarDecomposition {
        grid: signal.grid,
        log_modulus,
        phase,
        trend: TrendRecord::default(),
        zero_flags: flags,
        axis_zeros,
    })
}

fn locate_axis_zeros(
    grid: &TimeGrid,
    v: &[C64],
    modulus: &[f64],
    log_modulus: &[f64],
    floor: f64,
    crossings: &[usize],
    maxabs: f64,
) -> Vec<AxisZero> {
    let n = v.len();
    let dt = grid.dt();
    let below: Vec<bool> = modulus.iter().map(|&m| m < floor).collect();
    let mut claimed = vec![false; n];
    let mut found = Vec::new();

    // clusters of samples under the floor
    let mut k = 0;
    while k < n {
        if !below[k] {
            k += 1;
            continue;
        }
        let lo = k;
        while k < n && below[k] {
            k += 1;
        }
        let hi = k - 1;
        let time = 0.5 * (grid.time(lo) + grid.time(hi));
        for c in claimed.iter_mut().take(hi + 1).skip(lo) {
            *c = true;
        }
        let order = estimate_order(grid, log_modulus, time, lo, hi, false);
        found.push(AxisZero { time, index: (lo + hi) / 2, order });
    }

    // sign flips between two adjacent samples
    for &k in crossings {
        if claimed[k] || claimed[k + 1] {
            continue;
        }
        claimed[k] = true;
        claimed[k + 1] = true;
        let dv = v[k + 1] - v[k];
        let tau = (-(v[k].conj() * dv).re / dv.norm_sqr()).clamp(0.0, 1.0);
        let time = grid.time(k) + tau * dt;
        let index = if tau < 0.5 { k } else { k + 1 };
        found.push(AxisZero { time, index, order: estimate_order(grid, log_modulus, time, k, k + 1, true) });
    }

    // deep local minima: even-order zeros falling between samples
    for k in 1..n.saturating_sub(1) {
        if claimed[k - 1] || claimed[k] || claimed[k + 1] {
            continue;
        }
        if modulus[k] >= NEAR_ZERO * maxabs || modulus[k] > modulus[k - 1] || modulus[k] > modulus[k + 1] {
            continue;
        }
        // quadratic through the three samples in units of dt, centred on k
        let a = v[k];
        let b = 0.5 * (v[k + 1] - v[k - 1]);
        let c = 0.5 * (v[k + 1] + v[k - 1]) - v[k];
        if c.norm() == 0.0 {
            continue;
        }
        let disc = (b * b - 4.0 * a * c).sqrt();
        let r1 = (-b + disc) / (2.0 * c);
        let r2 = (-b - disc) / (2.0 * c);
        let mid = 0.5 * (r1 + r2);
        if (r1 - r2).norm() < 1.0 && mid.im.abs() <= 0.5 && mid.re.abs() <= 1.0 && r1.im.abs() <= 0.5 && r2.im.abs() <= 0.5 {
            let time = grid.time(k) + mid.re * dt;
            claimed[k] = true;
            let order = estimate_order(grid, log_modulus, time, k, k, false);
            found.push(AxisZero { time, index: k, order });
        }
    }
    found.sort_by(|a, b| a.time.total_cmp(&b.time));
    found
}

/// Order `m` of a zero at `time` from `log|v| ~ m ln|t - time|`, using one
/// sample just outside the cluster `[lo, hi]` and one at about twice the
/// distance, on each side where available.
fn estimate_order(grid: &TimeGrid, lm: &[f64], time: f64, lo: usize, hi: usize, odd: bool) -> u32 {
    let n = lm.len() as isize;
    let cyclic = grid.is_cyclic();
    let dt = grid.dt();
    let idx = |j: isize| -> Option<usize> {
        if (0..n).contains(&j) {
            Some(j as usize)
        } else if cyclic {
            Some(j.rem_euclid(n) as usize)
        } else {
            None
        }
    };
    let mut estimates = Vec::new();
    for dir in [-1isize, 1] {
        let j1 = if dir > 0 { hi as isize + 1 } else { lo as isize - 1 };
        let d1 = (grid.t_start() + j1 as f64 * dt - time).abs();
        let step = ((d1 / dt).round() as isize).max(1);
        let j2 = j1 + dir * step;
        let d2 = (grid.t_start() + j2 as f64 * dt - time).abs();
        if let (Some(a), Some(b)) = (idx(j1), idx(j2)) {
            if d1 > 0.0 && d2 > d1 {
                estimates.push((lm[b] - lm[a]) / (d2 / d1).ln());
            }
        }
    }
    if estimates.is_empty() {
        return 1;
    }
    let m = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let mut order = m.round().max(1.0) as u32;
    if odd && order.is_multiple_of(2) {
        order = if m > order as f64 { order + 1 } else { order.saturating_sub(1).max(1) };
    }
    order
}
