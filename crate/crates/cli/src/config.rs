//! Run parameters, read from a JSON file and from command-line flags.
//!
//! Both sources fill the same [`Params`] record; a flag overrides the file
//! value of the same name. Unknown keys are rejected when the file is parsed,
//! and keys that a command does not use are rejected before it runs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use chsh_phase::{Family, Sampling, SchemeKind, SourceModel};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// State family: phi or psi
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,

    /// State phase
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,

    /// Compensation scheme: rotating, fixed-pair or experimental
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,

    /// Analysis angle of channel A (compensate)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_a: Option<f64>,

    /// Analysis angle of channel B (compensate)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_b: Option<f64>,

    /// Analyzer angle of channel A (probs, simulate)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,

    /// Analyzer angle of channel B (probs, simulate)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,

    /// First phase of the smax grid
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_min: Option<f64>,

    /// Last phase of the smax grid
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_max: Option<f64>,

    /// Number of grid points (smax, scan-fit)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    /// First compensator setting of the scan
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_start: Option<f64>,

    /// End of the scan (excluded, except for the rotating scheme)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_stop: Option<f64>,

    /// Convergence tolerance of the numeric maximizer
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Detected pairs per second
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_rate: Option<f64>,

    /// Seconds per measurement point
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration_time: Option<f64>,

    /// Background coincidences per second
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accidental_rate: Option<f64>,

    /// RNG seed
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Count sampling: poisson or expected
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<String>,

    /// Number of repeated measurements (simulate)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,

    /// CSV output path; a run manifest is written beside it
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Read input angles in degrees instead of radians
    #[arg(long, num_args = 0, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<bool>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),+) => {
        Params { $($field: $flags.$field.or($file.$field)),+ }
    };
}

impl Params {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `self` with every unset field taken from `file`.
    pub fn over(self, file: Params) -> Params {
        overlay!(
            self,
            file,
            family,
            phi,
            scheme,
            alpha_a,
            alpha_b,
            a,
            b,
            phi_min,
            phi_max,
            points,
            grid_start,
            grid_stop,
            tol,
            pair_rate,
            integration_time,
            accidental_rate,
            seed,
            sampling,
            repeats,
            out,
            degrees
        )
    }

    /// Names of the fields that are set.
    pub fn keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Fails on any set field outside `allowed`; `out` and `degrees` are always allowed.
    pub fn restrict(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        let extra: Vec<String> = self
            .keys()
            .into_iter()
            .filter(|k| k != "out" && k != "degrees" && !allowed.contains(&k.as_str()))
            .collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "{command} does not take: {}",
                extra.join(", ")
            )))
        }
    }

    fn degrees(&self) -> bool {
        self.degrees.unwrap_or(false)
    }

    /// An angle in radians, converted from degrees if requested.
    pub fn angle(&self, name: &str, value: Option<f64>, default: f64) -> Result<f64, CliError> {
        match value {
            None => Ok(default),
            Some(x) if !x.is_finite() => Err(CliError::Usage(format!("{name} must be finite, got {x}"))),
            Some(x) if self.degrees() => Ok(x.to_radians()),
            Some(x) => Ok(x),
        }
    }

    pub fn required_angle(&self, name: &str, value: Option<f64>) -> Result<f64, CliError> {
        match value {
            None => Err(CliError::Usage(format!("missing required parameter {name}"))),
            Some(_) => self.angle(name, value, 0.0),
        }
    }

    pub fn family(&self) -> Result<Family, CliError> {
        self.family
            .as_deref()
            .unwrap_or("phi")
            .parse()
            .map_err(CliError::from_core)
    }

    pub fn scheme(&self) -> Result<SchemeKind, CliError> {
        match self.scheme.as_deref() {
            None => Err(CliError::Usage("missing required parameter scheme".into())),
            Some(s) => s.parse().map_err(CliError::from_core),
        }
    }

    pub fn source_model(&self) -> Result<SourceModel, CliError> {
        let d = SourceModel::default();
        let sampling: Sampling = match self.sampling.as_deref() {
            None => d.sampling,
            Some(s) => s.parse().map_err(CliError::from_core)?,
        };
        let m = SourceModel {
            pair_rate: self.pair_rate.unwrap_or(d.pair_rate),
            integration_time: self.integration_time.unwrap_or(d.integration_time),
            accidental_rate: self.accidental_rate.unwrap_or(d.accidental_rate),
            seed: self.seed.unwrap_or(d.seed),
            sampling,
        };
        m.validate().map_err(CliError::from_core)?;
        Ok(m)
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        let t = self.tol.unwrap_or(1e-9);
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(CliError::Usage(format!("tol must be positive, got {t}")))
        }
    }
}

/// Phase grid for `smax`: both ends included.
pub fn phase_grid(p: &Params) -> Result<Vec<f64>, CliError> {
    let lo = p.angle("phi_min", p.phi_min, 0.0)?;
    let hi = p.angle("phi_max", p.phi_max, PI)?;
    let n = p.points.unwrap_or(181);
    if n == 0 {
        return Err(CliError::Usage("points must be at least 1".into()));
    }
    if n > 1 && hi <= lo {
        return Err(CliError::Usage(format!("phi_max ({hi}) must exceed phi_min ({lo})")));
    }
    Ok(chsh_phase::closed_grid(lo, hi, n))
}
