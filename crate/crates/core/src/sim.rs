//! Seeded coincidence-count simulation and compensator-scan fringes.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::{outcome_probs, OutcomeProbs};
use crate::compensation::{diagonal_scan_config, DeviceSettings, SchemeKind};
use crate::optimize::SplitMix64;
use crate::poisson::{sample_poisson, MAX_MEAN};
use crate::states::{make_state, Family};
use crate::Error;

/// How counts are produced from their expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sampling {
    /// Independent Poisson draws.
    #[default]
    Poisson,
    /// Expected counts, rounded to integers in [`CountRecord`]; the fitting
    /// code reads the unrounded values from [`FringePoint::expected`].
    Expected,
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Poisson => "poisson",
            Sampling::Expected => "expected",
        })
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(Sampling::Poisson),
            "expected" | "noiseless" => Ok(Sampling::Expected),
            _ => Err(Error::InvalidArgument(format!(
                "unknown sampling '{s}' (expected poisson or expected)"
            ))),
        }
    }
}

/// Photon-pair source and detection model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    /// Detected pairs per second.
    pub pair_rate: f64,
    /// Seconds per measurement point.
    pub integration_time: f64,
    /// Background coincidences per second, spread evenly over the four outcomes.
    pub accidental_rate: f64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self {
            pair_rate: 1000.0,
            integration_time: 1.0,
            accidental_rate: 0.0,
            seed: 0,
            sampling: Sampling::Poisson,
        }
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<(), Error> {
        let nonneg = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be finite and >= 0, got {x}"
                )))
            }
        };
        nonneg("pair_rate", self.pair_rate)?;
        nonneg("accidental_rate", self.accidental_rate)?;
        if !(self.integration_time.is_finite() && self.integration_time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "integration_time must be finite and > 0, got {}",
                self.integration_time
            )));
        }
        Ok(())
    }

    /// The same model with the seed for point `index` of a scan.
    pub fn for_point(&self, index: usize) -> Self {
        Self {
            seed: point_seed(self.seed, index),
            ..*self
        }
    }
}

/// `seed ⊕ splitmix64(index)`: each scan point gets an independent stream
/// that does not depend on how many points came before it.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ SplitMix64::new(index as u64).next_u64()
}

/// Coincidence counts for the four outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CountRecord {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl CountRecord {
    pub fn as_array(&self) -> [u64; 4] {
        [self.n_pp, self.n_pm, self.n_mp, self.n_mm]
    }

    pub fn total(&self) -> u64 {
        self.as_array().iter().sum()
    }
}

/// Mean counts `pair_rate·t·p + accidental_rate·t/4` per outcome.
pub fn expected_counts(p: &OutcomeProbs<f64>, m: &SourceModel) -> Result<[f64; 4], Error> {
    m.validate()?;
    let pairs = m.pair_rate * m.integration_time;
    let background = m.accidental_rate * m.integration_time / 4.0;
    let means = p.as_array().map(|q| pairs * q + background);
    if let Some(big) = means.iter().find(|x| !(**x <= MAX_MEAN)) {
        return Err(Error::Range(format!("expected count {big} exceeds 2^53")));
    }
    Ok(means)
}

/// Draws the four counts, in the order ++, +−, −+, −−, from one stream seeded by `m.seed`.
pub fn simulate_counts(p: &OutcomeProbs<f64>, m: &SourceModel) -> Result<CountRecord, Error> {
    let means = expected_counts(p, m)?;
    let n = match m.sampling {
        Sampling::Expected => means.map(|x| x.round() as u64),
        Sampling::Poisson => {
            let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
            let mut n = [0u64; 4];
            for (slot, mean) in n.iter_mut().zip(means) {
                *slot = sample_poisson(&mut rng, mean)?;
            }
            n
        }
    };
    Ok(CountRecord {
        n_pp: n[0],
        n_pm: n[1],
        n_mp: n[2],
        n_mm: n[3],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringePoint {
    pub scan_value: f64,
    /// Abscissa of the fringe model at this point (see [`crate::ScanConfig::model_x`]).
    pub model_x: f64,
    pub counts: CountRecord,
    pub expected: [f64; 4],
    pub p_model: OutcomeProbs<f64>,
    pub settings: DeviceSettings<f64>,
}

/// A simulated compensator scan in the diagonal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeData {
    pub family: Family,
    pub scheme: SchemeKind,
    pub phi_true: f64,
    pub model: SourceModel,
    pub points: Vec<FringePoint>,
}

impl FringeData {
    pub fn noiseless(&self) -> bool {
        self.model.sampling == Sampling::Expected
    }

    /// Coincidence series `(model_x, y)` used for fitting: sampled `n₊₊`, or
    /// the exact expectation for noiseless data.
    pub fn coincidence_series(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| {
                let y = if self.noiseless() {
                    p.expected[0]
                } else {
                    p.counts.n_pp as f64
                };
                (p.model_x, y)
            })
            .collect()
    }
}

/// Scans the layout's compensator over `grid` (strictly increasing) with
/// both analysis angles at π/4 and simulates the counts at each point.
pub fn scan_fringe(
    family: Family,
    phi_true: f64,
    scheme: SchemeKind,
    grid: &[f64],
    m: &SourceModel,
) -> Result<FringeData, Error> {
    m.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("scan grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("scan grid must be finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("scan grid must be strictly increasing".into()));
    }
    let state = make_state(family, phi_true)?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cfg = diagonal_scan_config(scheme, x)?;
            let p = outcome_probs(&state, &cfg.t_a, &cfg.t_b)?;
            let pm = m.for_point(i);
            Ok(FringePoint {
                scan_value: x,
                model_x: cfg.model_x,
                counts: simulate_counts(&p, &pm)?,
                expected: expected_counts(&p, &pm)?,
                p_model: p,
                settings: cfg.settings,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(FringeData {
        family,
        scheme,
        phi_true,
        model: *m,
        points,
    })
}

/// `n` evenly spaced points `start + k·(stop − start)/n`, stop excluded.
pub fn uniform_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let step = (stop - start) / n as f64;
    (0..n).map(|k| start + step * k as f64).collect()
}

/// `n` evenly spaced points with both ends included.
pub fn closed_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k + 1 == n { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}
