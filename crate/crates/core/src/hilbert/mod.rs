//! Conjugate (Hilbert) transforms.
//!
//! Convention throughout: `H[f](t) = (1/pi) PV int f(t') / (t' - t) dt'`,
//! so `H[cos] = -sin` and `H[sin] = cos`. For an amplitude whose zeros lie
//! only in the upper half t-plane, `arg = +H[log|.|]` and `log|.| = -H[arg]`;
//! the sign `sigma` flips both for lower-half zeros.

mod line;
mod pairs;
mod periodic;
mod tails;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeGrid;

pub use line::{pv_line_at, spectral_line};
pub use pairs::{conjugate_of_term, dictionary, periodic_dictionary, ConjugatePair, PairKind};
pub use periodic::{conjugate_coefficients, periodic_pv_at};
pub use tails::{conjugate_with_tails, ConjugateOutput, TailOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PvQuadrature,
    Spectral,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pv" | "pv_quadrature" => Ok(Method::PvQuadrature),
            "spectral" | "fft" => Ok(Method::Spectral),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}' (pv_quadrature, spectral)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::PvQuadrature => "pv_quadrature",
            Method::Spectral => "spectral",
        })
    }
}

/// The `+-` of the reciprocal relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(format!("unknown sign '{s}'"))),
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ModulusToPhase,
    PhaseToModulus,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::ModulusToPhase => "modulus_to_phase",
            Direction::PhaseToModulus => "phase_to_modulus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformOptions {
    pub method: Method,
    /// Integration window half-width around the grid centre; `None` uses the
    /// whole grid.
    pub half_width: Option<f64>,
    /// Half-width of the neighbourhoods of real-axis zeros excluded from
    /// residual metrics; `None` means `10*dt`.
    pub exclusion: Option<f64>,
    pub sign: Sign,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self { method: Method::Spectral, half_width: None, exclusion: None, sign: Sign::Plus }
    }
}

impl TransformOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.half_width {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("window half-width must be positive, got {t}")));
            }
        }
        if let Some(d) = self.exclusion {
            if !(d >= 0.0) {
                return Err(Error::InvalidParameter(format!("exclusion must be non-negative, got {d}")));
            }
        }
        Ok(())
    }

    pub fn exclusion_for(&self, grid: &TimeGrid) -> f64 {
        self.exclusion.unwrap_or(10.0 * grid.dt())
    }
}

fn check_input(f: &[f64], grid: &TimeGrid) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::InvalidInput(format!("{} samples for a grid of {}", f.len(), grid.len())));
    }
    if let Some(k) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite input at sample {k}")));
    }
    Ok(())
}

/// `sigma * H[f]` on the real line. Samples farther than the window
/// half-width from the grid centre are treated as zero.
pub fn hilbert_line(f: &[f64], grid: &TimeGrid, opts: &TransformOptions) -> Result<Vec<f64>> {
    check_input(f, grid)?;
    opts.validate()?;
    let windowed;
    let f = match opts.half_width {
        Some(t) if t < grid.half_width() => {
            let c = grid.center();
            windowed = f
                .iter()
                .enumerate()
                .map(|(k, &v)| if (grid.time(k) - c).abs() <= t { v } else { 0.0 })
                .collect::<Vec<_>>();
            &windowed[..]
        }
        _ => f,
    };
    let mut out = match opts.method {
        Method::Spectral => spectral_line(f),
        Method::PvQuadrature => {
            let idx: Vec<usize> = (0..f.len()).collect();
            pv_line_at(f, grid, &idx)
        }
    };
    let s = opts.sign.value();
    out.iter_mut().for_each(|v| *v *= s);
    Ok(out)
}

/// `sigma * H[f]` for one period of a cyclic signal (conjugate Fourier series).
pub fn hilbert_periodic(f: &[f64], grid: &TimeGrid, opts: &TransformOptions) -> Result<Vec<f64>> {
    check_input(f, grid)?;
    opts.validate()?;
    if !grid.is_cyclic() {
        return Err(Error::NotCyclic("periodic transform needs a grid with a period".into()));
    }
    let mut out = match opts.method {
        Method::Spectral => periodic::spectral_periodic(f),
        Method::PvQuadrature => {
            let idx: Vec<usize> = (0..f.len()).collect();
            periodic_pv_at(f, &idx)
        }
    };
    let s = opts.sign.value();
    out.iter_mut().for_each(|v| *v *= s);
    Ok(out)
}
