use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use timekk::hilbert::{Method, Sign};
use timekk::signal::TimeGrid;

use crate::error::CliError;
use crate::model::ModelKind;

#[derive(Debug, Parser)]
#[command(name = "timekk", version, about = "Modulus/phase reciprocity for time-dependent amplitudes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandName,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandName {
    /// Sample a model amplitude on a grid.
    ModelSample,
    /// Zeros of a cyclic amplitude in one principal window.
    Zeros,
    /// Fourier coefficients from zeros and from samples.
    Fourier,
    /// Reconstruct phase from modulus and back, and report residuals.
    Verify,
    /// Integrate the two-level Schrodinger equation.
    Propagate,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::ModelSample => "model-sample",
            CommandName::Zeros => "zeros",
            CommandName::Fourier => "fourier",
            CommandName::Verify => "verify",
            CommandName::Propagate => "propagate",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// `two_state`, `packet`, `expanding`, `frozen` or `synthetic`
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Model parameter, repeatable.
    #[arg(long = "param", global = true, value_name = "K=V")]
    pub params: Vec<String>,
    /// `n,period` (cyclic, starting at 0) or `t0,dt,n`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// `spectral` or `pv`.
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// `auto`, `+` or `-`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sign: Option<String>,
    /// Primary output file (default stdout); extra outputs are written next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Read the signal from a `t,re,im` file instead of sampling a model.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Period of the `--input` samples, when cyclic.
    #[arg(long, global = true)]
    pub period: Option<f64>,
    /// Coefficient order for `fourier`, fit order for `zeros`
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    /// Half-width of the neighbourhoods of real-axis zeros left out of residuals.
    #[arg(long, global = true)]
    pub exclusion: Option<f64>,
    /// Relative coefficient truncation for polynomial fits.
    #[arg(long, global = true)]
    pub truncate: Option<f64>,
    /// Compare propagated amplitudes with the closed form.
    #[arg(long = "cross-check", global = true)]
    pub cross_check: bool,
    /// Print the resolved configuration and exit.
    #[arg(long = "show-config", global = true)]
    pub show_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// `n` samples of one period starting at `t = 0`.
    Periodic { n: usize, period: f64 },
    Line { t0: f64, dt: f64, n: usize },
}

impl GridSpec {
    pub fn to_grid(self) -> Result<TimeGrid, CliError> {
        let g = match self {
            GridSpec::Periodic { n, period } => TimeGrid::periodic(0.0, period, n),
            GridSpec::Line { t0, dt, n } => TimeGrid::new(t0, dt, n),
        };
        g.map_err(|e| CliError::Usage(e.to_string()))
    }
}

impl FromStr for GridSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("bad grid '{s}': expected n,period or t0,dt,n"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
        let count = |x: &str| x.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            [n, p] => Ok(GridSpec::Periodic { n: count(n)?, period: num(p)? }),
            [t0, dt, n] => Ok(GridSpec::Line { t0: num(t0)?, dt: num(dt)?, n: count(n)? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GridSpec::Periodic { n, period } => write!(f, "{n},{period}"),
            GridSpec::Line { t0, dt, n } => write!(f, "{t0},{dt},{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChoice {
    Auto,
    Fixed(Sign),
}

impl FromStr for SignChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "auto" {
            return Ok(SignChoice::Auto);
        }
        s.parse::<Sign>()
            .map(SignChoice::Fixed)
            .map_err(|_| CliError::Usage(format!("bad sign '{s}' (auto, + or -)")))
    }
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignChoice::Auto => f.write_str("auto"),
            SignChoice::Fixed(s) => write!(f, "{s}"),
        }
    }
}

/// Everything one invocation needs, after defaults, file and flags are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub model: ModelKind,
    /// Model parameters as given; validated against `model`.
    pub params: BTreeMap<String, String>,
    pub grid: Option<GridSpec>,
    pub method: Method,
    pub sign: SignChoice,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub input: Option<PathBuf>,
    pub period: Option<f64>,
    pub n_max: Option<usize>,
    pub exclusion: Option<f64>,
    pub truncate: Option<f64>,
    pub cross_check: bool,
}

/// Parses flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn load_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad value for {key}: '{v}'")))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut map = match &cli.flags.config {
            Some(p) => load_file(p)?,
            None => BTreeMap::new(),
        };
        let f = &cli.flags;
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        set("model", f.model.clone());
        set("grid", f.grid.clone());
        set("method", f.method.clone());
        set("sign", f.sign.clone());
        set("out", f.out.as_ref().map(|p| p.display().to_string()));
        set("format", f.format.clone());
        set("input", f.input.as_ref().map(|p| p.display().to_string()));
        set("period", f.period.map(|x| x.to_string()));
        set("n_max", f.n_max.map(|x| x.to_string()));
        set("exclusion", f.exclusion.map(|x| x.to_string()));
        set("truncate", f.truncate.map(|x| x.to_string()));
        if f.cross_check {
            map.insert("cross_check".into(), "true".into());
        }
        for kv in &f.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--param expects key=value, got '{kv}'")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(cli.command, map)
    }

    pub fn from_map(command: CommandName, mut map: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut take = |k: &str| map.remove(k);
        let model: ModelKind = take("model").as_deref().unwrap_or("two_state").parse()?;
        let grid = take("grid").map(|v| v.parse()).transpose()?;
        let method = match take("method") {
            Some(v) => v.parse::<Method>().map_err(|_| CliError::Usage(format!("unknown method '{v}' (spectral or pv)")))?,
            None => Method::Spectral,
        };
        let sign = take("sign").map(|v| v.parse()).transpose()?.unwrap_or(SignChoice::Auto);
        let out = take("out").map(PathBuf::from);
        let format = take("format").map(|v| v.parse()).transpose()?.unwrap_or(Format::Csv);
        let input = take("input").map(PathBuf::from);
        let period = take("period").map(|v| parse("period", &v)).transpose()?;
        let n_max = take("n_max").map(|v| parse("n_max", &v)).transpose()?;
        let exclusion = take("exclusion").map(|v| parse("exclusion", &v)).transpose()?;
        let truncate = take("truncate").map(|v| parse("truncate", &v)).transpose()?;
        let cross_check = take("cross_check").map(|v| parse("cross_check", &v)).transpose()?.unwrap_or(false);
        let params = map;
        for k in params.keys() {
            if !model.keys().iter().any(|(name, _)| name == k) {
                let known: Vec<&str> = model.keys().iter().map(|(n, _)| *n).collect();
                return Err(CliError::Usage(format!(
                    "unknown parameter '{k}' for model {} (known: {})",
                    model.name(),
                    known.join(", ")
                )));
            }
        }
        let cfg = RunConfig {
            command,
            model,
            params,
            grid,
            method,
            sign,
            out,
            format,
            input,
            period,
            n_max,
            exclusion,
            truncate,
            cross_check,
        };
        // parameter values are checked now so bad input is a usage error
        cfg.build_model()?;
        Ok(cfg)
    }

    /// `key = value` lines for every setting, defaults included.
    pub fn show(&self) -> Result<String, CliError> {
        let model = self.build_model()?;
        let grid = match self.grid {
            Some(g) => g.to_string(),
            None => model.default_grid().to_string(),
        };
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let mut lines = vec![
            format!("command = {}", self.command.as_str()),
            format!("model = {}", self.model.name()),
            format!("grid = {grid}"),
            format!("method = {}", self.method),
            format!("sign = {}", self.sign),
            format!("format = {}", self.format),
            format!("out = {}", opt(self.out.as_ref().map(|p| p.display().to_string()))),
            format!("input = {}", opt(self.input.as_ref().map(|p| p.display().to_string()))),
            format!("period = {}", opt(self.period.map(|x| x.to_string()))),
            format!("n_max = {}", opt(self.n_max.map(|x| x.to_string()))),
            format!("exclusion = {}", opt(self.exclusion.map(|x| x.to_string()))),
            format!("truncate = {}", opt(self.truncate.map(|x| x.to_string()))),
            format!("cross_check = {}", self.cross_check),
        ];
        for (k, default) in self.model.keys() {
            let v = self.params.get(*k).cloned().unwrap_or_else(|| default.to_string());
            lines.push(format!("{k} = {v}"));
        }
        Ok(lines.join("\n") + "\n")
    }
}
