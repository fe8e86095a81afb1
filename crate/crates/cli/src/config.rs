//! Run configuration: a TOML file overlaid with command-line flags.
//!
//! Times and frequencies are in units of the reference Rabi frequency
//! (`|omega1|`, or `|omega2|` when the first drive is off); a configured time
//! `tau` is simulated as `t = tau / Omega`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use blockade_core::dynamics::{uniform_grid, InitialSpec};
use blockade_core::hamiltonian::{DriveParams, Observable};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    /// Drive phases in radians.
    pub phase1: Option<f64>,
    pub phase2: Option<f64>,
    /// Draw all drive parameters from the seeded generator instead.
    pub random: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub n0: Option<usize>,
    pub n1: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub family: Option<String>,
    pub n_list: Option<Vec<usize>>,
    pub t_max_per_sqrt_n: Option<f64>,
    pub jump_factor: Option<f64>,
    pub exclusion_time: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepareConfig {
    /// `ghz`, `w`, or a path to a JSON amplitude list.
    pub target: Option<String>,
    pub shorten: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub drive: DriveConfig,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    pub observable: Option<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub revival: Option<bool>,
    pub variant: Option<String>,
    pub mode: Option<String>,
    pub scan: ScanConfig,
    pub prepare: PrepareConfig,
}

macro_rules! overlay_fields {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &RunConfig) -> Self {
        overlay_fields!(self, flags, n, observable, output, seed, revival, variant, mode);
        overlay_fields!(self.drive, flags.drive, omega1, omega2, delta1, delta2, phase1, phase2, random);
        overlay_fields!(self.initial, flags.initial, n0, n1);
        overlay_fields!(self.time, flags.time, t_max, dt, samples);
        overlay_fields!(self.scan, flags.scan, family, n_list, t_max_per_sqrt_n, jump_factor, exclusion_time);
        overlay_fields!(self.prepare, flags.prepare, target, shorten);
        self
    }

    pub fn n(&self) -> Result<usize, CliError> {
        match self.n {
            Some(0) => Err(CliError::Config("n must be at least 1".into())),
            Some(n) => Ok(n),
            None => Err(CliError::Config("missing atom number n".into())),
        }
    }

    pub fn output(&self) -> Result<&Path, CliError> {
        self.output.as_deref().ok_or_else(|| CliError::Config("missing output path".into()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Explicit drive, defaulting to `omega1 = omega2 = delta1 = 1, delta2 = 0`,
    /// or a seeded random drive.
    pub fn drive(&self) -> Result<DriveParams, CliError> {
        let d = &self.drive;
        let drive = if d.random.unwrap_or(false) {
            random_drive(self.seed())
        } else {
            DriveParams::new(
                C64::from_polar(d.omega1.unwrap_or(1.0), d.phase1.unwrap_or(0.0)),
                C64::from_polar(d.omega2.unwrap_or(1.0), d.phase2.unwrap_or(0.0)),
                d.delta1.unwrap_or(1.0),
                d.delta2.unwrap_or(0.0),
            )
        };
        drive.validate()?;
        Ok(drive)
    }

    pub fn initial(&self, n: usize) -> Result<InitialSpec, CliError> {
        let (n0, n1) = match (self.initial.n0, self.initial.n1) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, n.checked_sub(a).ok_or_else(|| CliError::Config(format!("n0 = {a} exceeds n = {n}")))?),
            (None, Some(b)) => (n.checked_sub(b).ok_or_else(|| CliError::Config(format!("n1 = {b} exceeds n = {n}")))?, b),
            (None, None) => (0, n),
        };
        if n0 + n1 != n {
            return Err(CliError::Config(format!("n0 + n1 = {} does not match n = {n}", n0 + n1)));
        }
        Ok(InitialSpec::new(n0, n1)?)
    }

    pub fn observable(&self) -> Result<Observable, CliError> {
        Ok(self.observable.as_deref().unwrap_or("nr").parse()?)
    }

    /// Sample times in units of `1/Omega`.
    pub fn grid(&self, n: usize, default_t_max: f64) -> Result<Vec<f64>, CliError> {
        let t_max = self.time.t_max.unwrap_or(default_t_max);
        match (self.time.dt, self.time.samples) {
            (Some(_), Some(_)) => Err(CliError::Config("give either dt or samples, not both".into())),
            (_, Some(0)) => Err(CliError::Config("samples must be positive".into())),
            (_, Some(1)) => Ok(vec![0.0]),
            (None, Some(m)) => {
                if !(t_max >= 0.0) || !t_max.is_finite() {
                    return Err(CliError::Config(format!("t_max must be finite and non-negative, got {t_max}")));
                }
                Ok((0..m).map(|i| t_max * i as f64 / (m - 1) as f64).collect())
            }
            (dt, None) => Ok(uniform_grid(t_max, dt.unwrap_or(0.1 / (n as f64).sqrt()))?),
        }
    }
}

/// Rabi magnitudes in `[0.5, 1.5)`, uniform phases, detunings in `[-1, 1)`.
pub fn random_drive(seed: u64) -> DriveParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega1 = C64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..2.0 * PI));
    let omega2 = C64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..2.0 * PI));
    DriveParams::new(omega1, omega2, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Frequency unit of a drive; falls back to 1 when both Rabi frequencies vanish.
pub fn frequency_unit(drive: &DriveParams) -> f64 {
    let omega = drive.reference_frequency();
    if omega > 0.0 {
        omega
    } else {
        1.0
    }
}
