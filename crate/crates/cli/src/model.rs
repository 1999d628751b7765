use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use timekk::models::{propagate, PropagateOptions};
use timekk::signal::{ComplexSignal, TimeGrid, TrendKind};
use timekk::{ExpandingParams, FrozenGaussianParams, PacketParams, PhaseSplit, TwoStateParams, C64};

use crate::config::{GridSpec, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TwoState,
    Packet,
    Expanding,
    Frozen,
    Synthetic,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TwoState => "two_state",
            ModelKind::Packet => "packet",
            ModelKind::Expanding => "expanding",
            ModelKind::Frozen => "frozen",
            ModelKind::Synthetic => "synthetic",
        }
    }

    /// Accepted parameter keys with their defaults as printed by `--show-config`.
    pub fn keys(self) -> &'static [(&'static str, &'static str)] {
        match self {
            ModelKind::TwoState => &[("omega", "1"), ("ratio", "8"), ("g", "none"), ("eps", "0")],
            ModelKind::Packet => &[("m", "1"), ("delta", "1"), ("k_mom", "0"), ("x", "1")],
            ModelKind::Expanding => {
                &[("c", "1"), ("omega0", "1"), ("m", "1"), ("x", "1"), ("f1", "preset"), ("f2", "preset")]
            }
            ModelKind::Frozen => &[("m", "1"), ("omega", "1"), ("x0", "1"), ("x", "0.5")],
            ModelKind::Synthetic => &[("zeros", "2"), ("omega", "1")],
        }
    }
}

impl FromStr for ModelKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "two_state" => ModelKind::TwoState,
            "packet" => ModelKind::Packet,
            "expanding" => ModelKind::Expanding,
            "frozen" => ModelKind::Frozen,
            "synthetic" => ModelKind::Synthetic,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown model '{s}' (two_state, packet, expanding, frozen, synthetic)"
                )))
            }
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    TwoState { p: TwoStateParams, eps: f64 },
    Packet(PacketParams),
    Expanding { p: ExpandingParams, split: PhaseSplit },
    Frozen(FrozenGaussianParams),
    /// `prod (1 - exp(i omega t) / z_k)`
    Synthetic { zeros: Vec<C64>, omega: f64 },
}

/// Analysis settings a model brings to `verify` on a line grid.
pub struct LineTails {
    pub modulus: Vec<TrendKind>,
    pub phase: Vec<TrendKind>,
    pub metric_half_width: f64,
}

fn get(params: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, CliError> {
    match params.get(key) {
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("bad value for {key}: '{v}'"))),
        None => Ok(default),
    }
}

fn usage(e: timekk::Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl RunConfig {
    pub fn build_model(&self) -> Result<Model, CliError> {
        let p = &self.params;
        Ok(match self.model {
            ModelKind::TwoState => {
                let omega = get(p, "omega", 1.0)?;
                let params = match (p.contains_key("g"), p.contains_key("ratio")) {
                    (true, true) => return Err(CliError::Usage("give either g or ratio, not both".into())),
                    (true, false) => TwoStateParams::new(get(p, "g", 0.0)?, omega),
                    _ => TwoStateParams::from_ratio(get(p, "ratio", 8.0)?, omega),
                }
                .map_err(usage)?;
                Model::TwoState { p: params, eps: get(p, "eps", 0.0)? }
            }
            ModelKind::Packet => Model::Packet(
                PacketParams::new(get(p, "m", 1.0)?, get(p, "delta", 1.0)?, get(p, "k_mom", 0.0)?, get(p, "x", 1.0)?)
                    .map_err(usage)?,
            ),
            ModelKind::Expanding => {
                let params =
                    ExpandingParams::new(get(p, "c", 1.0)?, get(p, "omega0", 1.0)?, get(p, "m", 1.0)?, get(p, "x", 1.0)?)
                        .map_err(usage)?;
                let split = match (p.get("f1"), p.get("f2")) {
                    (None, None) => PhaseSplit::preset(&params),
                    (Some(_), Some(_)) => PhaseSplit::from_fractions(get(p, "f1", 0.5)?, get(p, "f2", 0.5)?).map_err(usage)?,
                    _ => return Err(CliError::Usage("give both f1 and f2, or neither for the preset".into())),
                };
                Model::Expanding { p: params, split }
            }
            ModelKind::Frozen => Model::Frozen(
                FrozenGaussianParams::new(get(p, "m", 1.0)?, get(p, "omega", 1.0)?, get(p, "x0", 1.0)?, get(p, "x", 0.5)?)
                    .map_err(usage)?,
            ),
            ModelKind::Synthetic => {
                let text = p.get("zeros").map(String::as_str).unwrap_or("2");
                let zeros = text
                    .split(';')
                    .map(|s| {
                        s.trim()
                            .parse::<C64>()
                            .map_err(|_| CliError::Usage(format!("bad zero '{s}' (e.g. 2 or 0.5+0.1i)")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if zeros.iter().any(|z| z.norm() == 0.0) {
                    return Err(CliError::Usage("zeros must be nonzero".into()));
                }
                let omega = get(p, "omega", 1.0)?;
                if omega.is_nan() || omega <= 0.0 {
                    return Err(CliError::Usage("omega must be positive".into()));
                }
                Model::Synthetic { zeros, omega }
            }
        })
    }
}

impl Model {
    pub fn default_grid(&self) -> GridSpec {
        match self {
            Model::TwoState { p, .. } => GridSpec::Periodic { n: 4096, period: p.amplitude_period() },
            Model::Packet(_) => GridSpec::Line { t0: -100.0, dt: 200.0 / 32768.0, n: 32769 },
            Model::Expanding { .. } => GridSpec::Line { t0: -200.0, dt: 400.0 / 65536.0, n: 65537 },
            Model::Frozen(f) => GridSpec::Periodic { n: 1024, period: TAU / f.omega },
            Model::Synthetic { omega, .. } => GridSpec::Periodic { n: 1024, period: TAU / omega },
        }
    }

    /// Whether the samples come from the integrator rather than a closed form.
    pub fn is_propagated(&self) -> bool {
        matches!(self, Model::TwoState { eps, .. } if *eps != 0.0)
    }

    /// The amplitude as the model defines it.
    pub fn sample(&self, grid: &TimeGrid) -> Result<ComplexSignal, CliError> {
        let s = match self {
            Model::TwoState { p, eps } if *eps != 0.0 => return propagate_ground(p, *eps, grid),
            Model::TwoState { p, .. } => ComplexSignal::sample(*grid, "c_g", |t| p.amplitude(C64::new(t, 0.0))),
            Model::Packet(p) => {
                let v = grid
                    .times()
                    .iter()
                    .map(|&t| p.log_amplitude(C64::new(t, 0.0)).map(|l| l.exp()))
                    .collect::<timekk::Result<Vec<_>>>()?;
                ComplexSignal::new(*grid, v, "packet")
            }
            Model::Expanding { p, split } => ComplexSignal::sample(*grid, "expanding", |t| {
                C64::new(p.log_modulus(t), p.phase(split, t)).exp()
            }),
            Model::Frozen(f) => ComplexSignal::sample(*grid, "frozen", |t| f.log_g(t).exp()),
            Model::Synthetic { zeros, omega } => ComplexSignal::sample(*grid, "synthetic", |t| {
                let z = C64::from_polar(1.0, omega * t);
                zeros.iter().map(|zk| 1.0 - z / zk).product()
            }),
        };
        Ok(s?)
    }

    /// The signal handed to the analyses: the frozen packet loses its known
    /// secular trend, everything else is sampled as is.
    pub fn analysis_signal(&self, grid: &TimeGrid) -> Result<ComplexSignal, CliError> {
        match self {
            Model::Frozen(f) => {
                let v = grid.times().iter().map(|&t| f.remainder(t).map(|l| l.exp())).collect::<timekk::Result<Vec<_>>>()?;
                Ok(ComplexSignal::new(*grid, v, "frozen_remainder")?)
            }
            _ => self.sample(grid),
        }
    }

    /// `(chi_+, chi_-)` samples for split verification.
    pub fn split_parts(&self, grid: &TimeGrid) -> Option<(ComplexSignal, ComplexSignal)> {
        let Model::Expanding { p, split } = self else { return None };
        let plus = ComplexSignal::sample(*grid, "chi_plus", |t| p.split_logs(split, t).0.exp()).ok()?;
        let minus = ComplexSignal::sample(*grid, "chi_minus", |t| p.split_logs(split, t).1.exp()).ok()?;
        Some((plus, minus))
    }

    pub fn line_tails(&self) -> Option<LineTails> {
        match self {
            Model::Packet(p) => {
                // the log-modulus grows like -(1/4) ln(t^2 + c) with sqrt c = 2 m delta^2
                let c = (2.0 * p.m * p.delta * p.delta).powi(2);
                Some(LineTails {
                    modulus: vec![TrendKind::LogQuadratic { c }],
                    phase: vec![TrendKind::Arctan { c }],
                    metric_half_width: 20.0,
                })
            }
            Model::Expanding { p, .. } => Some(LineTails {
                modulus: vec![TrendKind::LogQuadratic { c: p.c }],
                phase: vec![TrendKind::Arctan { c: p.c }],
                metric_half_width: 20.0,
            }),
            _ => None,
        }
    }

    /// Error unless the model repeats itself (integer `K/omega` for the two-level model).
    pub fn require_cyclic(&self) -> Result<(), CliError> {
        match self {
            Model::TwoState { p, .. } if !p.is_cyclic() => Err(timekk::Error::NotCyclic(format!(
                "K/omega = {} is not an integer",
                p.ratio()
            ))
            .into()),
            Model::Packet(_) | Model::Expanding { .. } => {
                Err(timekk::Error::NotCyclic(format!("model {} lives on the whole line", self.kind())).into())
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::TwoState { .. } => ModelKind::TwoState,
            Model::Packet(_) => ModelKind::Packet,
            Model::Expanding { .. } => ModelKind::Expanding,
            Model::Frozen(_) => ModelKind::Frozen,
            Model::Synthetic { .. } => ModelKind::Synthetic,
        }
    }
}

/// Ground-state amplitude of the (perturbed) two-level model from the
/// integrator, with enough sub-steps for `dt <= period / 40000`.
pub fn propagate_ground(p: &TwoStateParams, eps: f64, grid: &TimeGrid) -> Result<ComplexSignal, CliError> {
    let fine = p.amplitude_period() / 40000.0;
    let substeps = (grid.dt() / fine).ceil().max(1.0) as usize;
    let h = p.perturbed_hamiltonian(eps);
    let start = if grid.index_of(0.0).is_some() { 0.0 } else { grid.t_start() };
    if start != 0.0 {
        return Err(CliError::Usage("the propagated model needs t = 0 on the grid".into()));
    }
    let out = propagate(&h, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.0, grid, &PropagateOptions { substeps, ..Default::default() })?;
    let mut s = out.components.into_iter().next().expect("two components");
    s.label = "c_g".into();
    Ok(s)
}
