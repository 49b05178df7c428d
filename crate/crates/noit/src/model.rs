//! Domain types for a triply resonant three-wave-mixing microring.
//!
//! The ring hosts three travelling-wave modes: two telecom modes `a` (drive)
//! and `c` (signal) and one near-visible mode `b` with ω_b0 ≈ ω_a0 + ω_c0.
//! Sum-frequency generation couples them with single-photon rate `g`; a
//! strong drive in mode `a` linearizes the interaction into a beamsplitter
//! between `b` and `c` with effective rate G = g·√n_a.
//!
//! Conventions used throughout the crate:
//!
//! * every decay rate κ is an amplitude half-linewidth in rad/s, so the
//!   loaded quality factor is Q = ω/(2κ) and the intensity FWHM is 2κ;
//! * κ = κ₀ + κ₁ splits into intrinsic loss κ₀ and waveguide coupling κ₁;
//! * detunings are (mode resonance − rotating-frame carrier), also rad/s;
//! * travelling-wave modes carry an azimuthal mode number m and a
//!   propagation direction, and the χ⁽²⁾ overlap vanishes unless the probe
//!   co-propagates with the drive (m_a + m_c = m_b phase matching), which is
//!   what makes the transparency window non-reciprocal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::HBAR;

/// Errors produced while building or interrogating the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("mode {0}: {1}")]
    InvalidMode(ModeLabel, &'static str),
    #[error("coupling rate g must be finite and non-negative, got {0}")]
    InvalidCoupling(f64),
    #[error("drive field: {0}")]
    InvalidDrive(&'static str),
    #[error("calibration target cooperativity-per-watt must be positive, got {0}")]
    NonPositiveCalibrationTarget(f64),
    #[error("calibration reference drive must carry positive power")]
    ZeroReferencePower,
}

/// Which of the three ring modes a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    /// Telecom drive mode.
    A,
    /// Near-visible sum-frequency mode.
    B,
    /// Telecom signal mode.
    C,
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModeLabel::A => "a",
            ModeLabel::B => "b",
            ModeLabel::C => "c",
        };
        f.write_str(s)
    }
}

/// Propagation direction around the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Cw,
    Ccw,
}

impl Direction {
    /// The opposite propagation direction.
    pub fn reversed(self) -> Self {
        match self {
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Cw => "cw",
            Direction::Ccw => "ccw",
        })
    }
}

impl FromStr for Direction {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cw" => Ok(Direction::Cw),
            "ccw" => Ok(Direction::Ccw),
            _ => Err(ModelError::InvalidDrive("direction must be `cw` or `ccw`")),
        }
    }
}

/// Which spectroscopy geometry a sweep or fit refers to.
///
/// * [`Branch::Noit`]: probe the visible mode `b` and record transmission —
///   the transparency-window measurement.
/// * [`Branch::Conversion`]: probe the telecom mode `c` and record the
///   converted power emerging from the `b` port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Noit,
    Conversion,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Noit => "noit",
            Branch::Conversion => "conversion",
        })
    }
}

impl FromStr for Branch {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "noit" => Ok(Branch::Noit),
            "conversion" => Ok(Branch::Conversion),
            _ => Err(ModelError::InvalidDrive(
                "branch must be `noit` or `conversion`",
            )),
        }
    }
}

/// One ring mode: resonance, loss/coupling split, and azimuthal order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub label: ModeLabel,
    /// Resonance angular frequency ω₀ [rad/s].
    pub omega0: f64,
    /// Intrinsic amplitude decay rate κ₀ [rad/s].
    pub kappa0: f64,
    /// Waveguide coupling rate κ₁ [rad/s].
    pub kappa1: f64,
    /// Azimuthal mode number.
    pub mode_number: i64,
}

impl ModeParams {
    pub fn new(
        label: ModeLabel,
        omega0: f64,
        kappa0: f64,
        kappa1: f64,
        mode_number: i64,
    ) -> Result<Self, ModelError> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(ModelError::InvalidMode(label, "resonance must be positive"));
        }
        if !(kappa0.is_finite() && kappa0 >= 0.0) || !(kappa1.is_finite() && kappa1 >= 0.0) {
            return Err(ModelError::InvalidMode(
                label,
                "decay rates must be finite and non-negative",
            ));
        }
        if kappa0 + kappa1 <= 0.0 {
            return Err(ModelError::InvalidMode(
                label,
                "total decay rate must be positive",
            ));
        }
        Ok(Self {
            label,
            omega0,
            kappa0,
            kappa1,
            mode_number,
        })
    }

    /// Total amplitude decay rate κ = κ₀ + κ₁ [rad/s].
    pub fn kappa(&self) -> f64 {
        self.kappa0 + self.kappa1
    }

    /// Loaded quality factor Q = ω₀ / (2κ).
    pub fn loaded_q(&self) -> f64 {
        self.omega0 / (2.0 * self.kappa())
    }

    /// Fraction of the total decay that goes out the coupling waveguide.
    pub fn extraction_fraction(&self) -> f64 {
        self.kappa1 / self.kappa()
    }
}

/// The full three-mode system: mode parameters plus single-photon coupling g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub mode_a: ModeParams,
    pub mode_b: ModeParams,
    pub mode_c: ModeParams,
    /// Single-photon three-wave-mixing rate g [rad/s].
    pub g: f64,
}

impl SystemConfig {
    pub fn new(
        mode_a: ModeParams,
        mode_b: ModeParams,
        mode_c: ModeParams,
        g: f64,
    ) -> Result<Self, ModelError> {
        if mode_a.label != ModeLabel::A {
            return Err(ModelError::InvalidMode(mode_a.label, "expected label a"));
        }
        if mode_b.label != ModeLabel::B {
            return Err(ModelError::InvalidMode(mode_b.label, "expected label b"));
        }
        if mode_c.label != ModeLabel::C {
            return Err(ModelError::InvalidMode(mode_c.label, "expected label c"));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(ModelError::InvalidCoupling(g));
        }
        Ok(Self {
            mode_a,
            mode_b,
            mode_c,
            g,
        })
    }

    pub fn mode(&self, label: ModeLabel) -> &ModeParams {
        match label {
            ModeLabel::A => &self.mode_a,
            ModeLabel::B => &self.mode_b,
            ModeLabel::C => &self.mode_c,
        }
    }

    /// Triple-resonance mismatch ω_a0 + ω_c0 − ω_b0 [rad/s]; zero when the
    /// sum-frequency process is exactly resonant.
    pub fn frequency_mismatch(&self) -> f64 {
        self.mode_a.omega0 + self.mode_c.omega0 - self.mode_b.omega0
    }

    /// Whether azimuthal phase matching m_a + m_c = m_b holds.
    pub fn momentum_matched(&self) -> bool {
        self.mode_a.mode_number + self.mode_c.mode_number == self.mode_b.mode_number
    }

    /// Steady-state drive photon number in mode `a`.
    ///
    /// A waveguide power P at carrier ω_d delivers a photon flux P/(ħω_d);
    /// the Lorentzian response of mode `a` stores
    /// n_a = 2κ_{a,1} · (P/ħω_d) / (δ_a² + κ_a²) with δ_a = ω_a0 − ω_d.
    pub fn pump_photon_number(&self, drive: &DriveField) -> f64 {
        let kappa_a = self.mode_a.kappa();
        let delta_a = self.mode_a.omega0 - drive.omega;
        let flux = drive.power / (HBAR * drive.omega);
        2.0 * self.mode_a.kappa1 * flux / (delta_a * delta_a + kappa_a * kappa_a)
    }

    /// Linearized beamsplitter coupling produced by a drive, as seen by a
    /// probe travelling in `probe_direction`.
    ///
    /// The drive populates mode `a` in its own direction only; phase matching
    /// (m_a + m_c = m_b) then couples `b` and `c` only in that same
    /// direction, so a counter-propagating probe sees G = 0 — this is the
    /// sole source of non-reciprocity in the model.
    pub fn effective_coupling(
        &self,
        drive: &DriveField,
        probe_direction: Direction,
    ) -> CouplingState {
        let co_propagating = probe_direction == drive.direction;
        if !co_propagating || !self.momentum_matched() {
            return CouplingState {
                pump_photons: self.pump_photon_number(drive),
                g_eff: 0.0,
                cooperativity: 0.0,
            };
        }
        let n_a = self.pump_photon_number(drive);
        let g_eff = self.g * n_a.sqrt();
        CouplingState {
            pump_photons: n_a,
            g_eff,
            cooperativity: cooperativity(g_eff, self.mode_b.kappa(), self.mode_c.kappa()),
        }
    }
}

/// Cooperativity C = G² / (κ_b κ_c) for an effective coupling G.
pub fn cooperativity(g_eff: f64, kappa_b: f64, kappa_c: f64) -> f64 {
    g_eff * g_eff / (kappa_b * kappa_c)
}

/// The classical drive tone: waveguide power, carrier, direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    /// Waveguide power [W].
    pub power: f64,
    /// Carrier angular frequency [rad/s].
    pub omega: f64,
    pub direction: Direction,
}

impl DriveField {
    pub fn new(power: f64, omega: f64, direction: Direction) -> Result<Self, ModelError> {
        if !(power.is_finite() && power >= 0.0) {
            return Err(ModelError::InvalidDrive("power must be non-negative"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ModelError::InvalidDrive("carrier must be positive"));
        }
        Ok(Self {
            power,
            omega,
            direction,
        })
    }

    /// A drive sitting exactly on the mode-`a` resonance.
    pub fn on_resonance(
        system: &SystemConfig,
        power: f64,
        direction: Direction,
    ) -> Result<Self, ModelError> {
        Self::new(power, system.mode_a.omega0, direction)
    }

    /// The same drive at a different power.
    pub fn with_power(&self, power: f64) -> Result<Self, ModelError> {
        Self::new(power, self.omega, self.direction)
    }
}

/// Drive-conditioned coupling between modes `b` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingState {
    /// Drive photon number n_a stored in mode `a`.
    pub pump_photons: f64,
    /// Effective beamsplitter rate G = g·√n_a [rad/s] (zero for a
    /// counter-propagating probe).
    pub g_eff: f64,
    /// Cooperativity C = G²/(κ_b κ_c).
    pub cooperativity: f64,
}

/// A probe tone and which measurement geometry it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeContext {
    pub branch: Branch,
    /// Probe carrier angular frequency [rad/s].
    pub omega: f64,
    pub direction: Direction,
}

impl ProbeContext {
    /// Rotating-frame detunings (δ_b, δ_c) for this probe.
    ///
    /// The drive fixes the frame: on the transparency branch the probe is the
    /// `b` carrier and difference-frequency generation seeds `c` at
    /// ω_probe − ω_d; on the conversion branch the probe is the `c` carrier
    /// and sum-frequency generation seeds `b` at ω_d + ω_probe. In both cases
    /// δ_x = ω_x0 − (carrier in mode x).
    pub fn detunings(&self, system: &SystemConfig, drive: &DriveField) -> (f64, f64) {
        match self.branch {
            Branch::Noit => {
                let delta_b = system.mode_b.omega0 - self.omega;
                let delta_c = system.mode_c.omega0 - (self.omega - drive.omega);
                (delta_b, delta_c)
            }
            Branch::Conversion => {
                let delta_b = system.mode_b.omega0 - (drive.omega + self.omega);
                let delta_c = system.mode_c.omega0 - self.omega;
                (delta_b, delta_c)
            }
        }
    }
}

/// Infer the single-photon coupling g from a measured cooperativity-per-power
/// slope.
///
/// With the drive on resonance, n_a is linear in power, so C = (g²·n_a/P) /
/// (κ_b κ_c) · P ≡ slope · P. Given a target slope [1/W] and a reference
/// drive (which sets carrier, detuning, and direction of the calibration),
/// this inverts that relation: g = √(slope · κ_b κ_c · P / n_a(P)).
pub fn calibrate_g(
    system: &SystemConfig,
    slope_per_watt: f64,
    reference: &DriveField,
) -> Result<f64, ModelError> {
    if !(slope_per_watt.is_finite() && slope_per_watt > 0.0) {
        return Err(ModelError::NonPositiveCalibrationTarget(slope_per_watt));
    }
    if reference.power <= 0.0 {
        return Err(ModelError::ZeroReferencePower);
    }
    let photons_per_watt = system.pump_photon_number(reference) / reference.power;
    let kb = system.mode_b.kappa();
    let kc = system.mode_c.kappa();
    Ok((slope_per_watt * kb * kc / photons_per_watt).sqrt())
}
