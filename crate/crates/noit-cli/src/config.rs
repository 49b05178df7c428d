//! JSON run configuration: device geometry, drive, and probe sweep.
//!
//! A configuration file describes the three ring modes, how strongly the
//! drive couples the probe pair (either a bare coupling rate or a measured
//! cooperativity-per-power slope), the drive tone, and the probe sweep.
//! [`RunConfig::scenario`] turns it into validated simulator inputs.
//!
//! The name `device` (instead of a path) loads a bundled configuration for
//! the demonstration device used throughout the documentation.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use noit::model::{
    calibrate_g, Branch, Direction, DriveField, ModeLabel, ModeParams, ModelError, SystemConfig,
};
use noit::spectra::{default_span, FrequencyGrid, SpectraError, DEFAULT_POINTS};
use noit::units::{ghz_to_rad_per_s, wavelength_nm_to_rad_per_s};

/// Bundled configuration for the demonstration device.
pub const DEVICE_CONFIG: &str = include_str!("../../../configs/device.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config read `{path}`: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub modes: ModesConfig,
    /// Offset of the visible resonance from the exact sum of the pump and
    /// telecom resonances, in GHz (models imperfect triple resonance).
    #[serde(default)]
    pub triple_resonance_offset_ghz: f64,
    pub coupling: CouplingConfig,
    pub drive: DriveConfig,
    pub probe: ProbeConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub a: ModeConfig,
    pub b: ModeConfig,
    pub c: ModeConfig,
}

/// One ring mode. The total linewidth comes from exactly one of
/// `q_loaded` (loaded quality factor) or `kappa_over_2pi_ghz` (amplitude
/// half-linewidth over 2π); `external_fraction` splits it into bus-coupling
/// and intrinsic parts.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub wavelength_nm: f64,
    #[serde(default)]
    pub q_loaded: Option<f64>,
    #[serde(default)]
    pub kappa_over_2pi_ghz: Option<f64>,
    pub external_fraction: f64,
    pub mode_number: i64,
}

/// Coupling strength: exactly one of a bare rate or a measured
/// cooperativity-per-power slope (the latter is inverted through the pump
/// photon number to recover the rate).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default)]
    pub g_over_2pi_khz: Option<f64>,
    #[serde(default)]
    pub unit_power_cooperativity_per_mw: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub power_mw: f64,
    /// Drive frequency minus the pump resonance, in GHz.
    #[serde(default)]
    pub detuning_ghz: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub branch: Branch,
    pub direction: Direction,
    #[serde(default)]
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Sweep center relative to the probed resonance, in GHz.
    #[serde(default)]
    pub center_offset_ghz: f64,
    /// Full sweep span in GHz; when absent, ten full linewidths of the
    /// probed mode.
    #[serde(default)]
    pub span_ghz: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
}

/// Validated simulator inputs assembled from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: SystemConfig,
    pub drive: DriveField,
    pub branch: Branch,
    pub probe_direction: Direction,
    pub grid: FrequencyGrid,
    pub seed: u64,
}

impl RunConfig {
    /// Load from a file path, or the bundled demonstration device when
    /// `spec` is the word `device`.
    pub fn load(spec: &str) -> Result<Self, ConfigError> {
        let text = if spec == "device" {
            DEVICE_CONFIG.to_string()
        } else {
            fs::read_to_string(Path::new(spec)).map_err(|source| ConfigError::Read {
                path: spec.to_string(),
                source,
            })?
        };
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        if config.schema_version != 1 {
            return Err(ConfigError::Invalid(format!(
                "unsupported schema_version {}",
                config.schema_version
            )));
        }
        Ok(config)
    }

    /// Assemble simulator inputs with the probe branch from the config.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        self.scenario_for(self.probe.branch)
    }

    /// Assemble simulator inputs, probing the given branch regardless of
    /// what the config's probe section says.
    pub fn scenario_for(&self, branch: Branch) -> Result<Scenario, ConfigError> {
        let mode_a = self.modes.a.build(ModeLabel::A, 0.0)?;
        let mode_b = self
            .modes
            .b
            .build(ModeLabel::B, ghz_to_rad_per_s(self.triple_resonance_offset_ghz))?;
        let mode_c = self.modes.c.build(ModeLabel::C, 0.0)?;

        let g = self.coupling.bare_rate(&mode_a, &mode_b, &mode_c)?;
        let system = SystemConfig::new(mode_a, mode_b, mode_c, g)?;

        let drive = DriveField::new(
            self.drive.power_mw * 1e-3,
            system.mode_a.omega0 + ghz_to_rad_per_s(self.drive.detuning_ghz),
            self.drive.direction,
        )?;

        let probed = match branch {
            Branch::Noit => &system.mode_b,
            Branch::Conversion => &system.mode_c,
        };
        let center = probed.omega0 + ghz_to_rad_per_s(self.probe.grid.center_offset_ghz);
        let span = match self.probe.grid.span_ghz {
            Some(ghz) => ghz_to_rad_per_s(ghz),
            None => default_span(probed.kappa()),
        };
        let grid = FrequencyGrid::new(center, span, self.probe.grid.points.unwrap_or(DEFAULT_POINTS))?;

        Ok(Scenario {
            system,
            drive,
            branch,
            probe_direction: self.probe.direction,
            grid,
            seed: self.seed,
        })
    }
}

impl ModeConfig {
    fn build(&self, label: ModeLabel, frequency_offset: f64) -> Result<ModeParams, ConfigError> {
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "mode {label}: wavelength_nm must be positive"
            )));
        }
        let omega0 = wavelength_nm_to_rad_per_s(self.wavelength_nm) + frequency_offset;
        let kappa = match (self.q_loaded, self.kappa_over_2pi_ghz) {
            (Some(q), None) => {
                if !(q.is_finite() && q > 0.0) {
                    return Err(ConfigError::Invalid(format!(
                        "mode {label}: q_loaded must be positive"
                    )));
                }
                omega0 / (2.0 * q)
            }
            (None, Some(ghz)) => {
                if !(ghz.is_finite() && ghz > 0.0) {
                    return Err(ConfigError::Invalid(format!(
                        "mode {label}: kappa_over_2pi_ghz must be positive"
                    )));
                }
                ghz_to_rad_per_s(ghz)
            }
            _ => {
                return Err(ConfigError::Invalid(format!(
                    "mode {label}: give exactly one of q_loaded or kappa_over_2pi_ghz"
                )))
            }
        };
        if !(self.external_fraction > 0.0 && self.external_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "mode {label}: external_fraction must lie strictly between 0 and 1"
            )));
        }
        Ok(ModeParams::new(
            label,
            omega0,
            (1.0 - self.external_fraction) * kappa,
            self.external_fraction * kappa,
            self.mode_number,
        )?)
    }
}

impl CouplingConfig {
    fn bare_rate(
        &self,
        mode_a: &ModeParams,
        mode_b: &ModeParams,
        mode_c: &ModeParams,
    ) -> Result<f64, ConfigError> {
        match (self.g_over_2pi_khz, self.unit_power_cooperativity_per_mw) {
            (Some(khz), None) => {
                if !(khz.is_finite() && khz > 0.0) {
                    return Err(ConfigError::Invalid(
                        "coupling: g_over_2pi_khz must be positive".into(),
                    ));
                }
                Ok(ghz_to_rad_per_s(khz * 1e-6))
            }
            (None, Some(per_mw)) => {
                if !(per_mw.is_finite() && per_mw > 0.0) {
                    return Err(ConfigError::Invalid(
                        "coupling: unit_power_cooperativity_per_mw must be positive".into(),
                    ));
                }
                // The slope is power-independent, so any reference drive
                // works; calibrate against 1 mW on the pump resonance.
                let system = SystemConfig::new(*mode_a, *mode_b, *mode_c, 1.0)?;
                let reference = DriveField::on_resonance(&system, 1e-3, Direction::Ccw)?;
                Ok(calibrate_g(&system, per_mw * 1e3, &reference)?)
            }
            _ => Err(ConfigError::Invalid(
                "coupling: give exactly one of g_over_2pi_khz or \
                 unit_power_cooperativity_per_mw"
                    .into(),
            )),
        }
    }
}
