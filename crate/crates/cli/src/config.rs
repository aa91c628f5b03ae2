//! Flat `key = value` sweep configuration files.
//!
//! Blank lines and text after `#` are ignored. Recognized keys:
//!
//! | key          | value                                  |
//! |--------------|----------------------------------------|
//! | `alpha`      | comma-separated positive reals         |
//! | `beta_start` | real                                   |
//! | `beta_stop`  | real                                   |
//! | `beta_step`  | positive real                          |
//! | `states`     | comma-separated state indices          |
//! | `measures`   | comma-separated measure names          |
//! | `output`     | path                                   |
//! | `format`     | `csv` or `json`                        |
//! | `basis_size` | positive integer                       |
//! | `gamma_mode` | `full`, `even`, `odd` or a number      |

use std::path::PathBuf;
use std::str::FromStr;

use dwell::sweep::{Format, Measure};
use dwell::{Error, GammaMode, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub alpha: Option<Vec<f64>>,
    pub beta_start: Option<f64>,
    pub beta_stop: Option<f64>,
    pub beta_step: Option<f64>,
    pub states: Option<Vec<usize>>,
    pub measures: Option<Vec<Measure>>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub basis_size: Option<usize>,
    pub gamma_mode: Option<GammaMode>,
}

pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad {what} entry '{s}'")))
        })
        .collect()
}

fn parse_one<T: FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{}' for {what}", text.trim())))
}

pub fn parse_gamma_mode(text: &str) -> Result<GammaMode> {
    match text.trim().to_ascii_lowercase().as_str() {
        "full" => Ok(GammaMode::FullBasis),
        "even" => Ok(GammaMode::EvenParity),
        "odd" => Ok(GammaMode::OddParity),
        other => other
            .parse::<f64>()
            .map(GammaMode::Manual)
            .map_err(|_| Error::InvalidConfig(format!("unknown gamma mode '{other}'"))),
    }
}

pub fn parse_measures(text: &str) -> Result<Vec<Measure>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Measure::from_str)
        .collect()
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = SweepConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "alpha" => c.alpha = Some(parse_list(value, "alpha")?),
                "beta_start" => c.beta_start = Some(parse_one(value, "beta_start")?),
                "beta_stop" => c.beta_stop = Some(parse_one(value, "beta_stop")?),
                "beta_step" => c.beta_step = Some(parse_one(value, "beta_step")?),
                "states" => c.states = Some(parse_list(value, "states")?),
                "measures" => c.measures = Some(parse_measures(value)?),
                "output" => c.output = Some(PathBuf::from(value)),
                "format" => c.format = Some(value.parse()?),
                "basis_size" => c.basis_size = Some(parse_one(value, "basis_size")?),
                "gamma_mode" => c.gamma_mode = Some(parse_gamma_mode(value)?),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: SweepConfig) -> Self {
        SweepConfig {
            alpha: over.alpha.or(self.alpha),
            beta_start: over.beta_start.or(self.beta_start),
            beta_stop: over.beta_stop.or(self.beta_stop),
            beta_step: over.beta_step.or(self.beta_step),
            states: over.states.or(self.states),
            measures: over.measures.or(self.measures),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
            basis_size: over.basis_size.or(self.basis_size),
            gamma_mode: over.gamma_mode.or(self.gamma_mode),
        }
    }
}
