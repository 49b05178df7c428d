//! Frequency sweeps and lineshape feature extraction.
//!
//! A sweep walks a probe carrier across a uniform [`FrequencyGrid`] and
//! evaluates the steady-state response at every point. Detunings are
//! evaluated as (resonance − grid center) − offset so that the offset part —
//! which is exactly antisymmetric about the grid center in floating point —
//! carries the sweep; a symmetric lineshape therefore comes out symmetric to
//! machine precision rather than to carrier-frequency roundoff.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Branch, Direction, DriveField, ModelError, ProbeContext, SystemConfig};
use crate::steady_state::TwoModeSystem;

/// Default number of sweep points.
pub const DEFAULT_POINTS: usize = 4001;

/// Default sweep span for a resonance of half-linewidth κ: ten full
/// linewidths (FWHM = 2κ).
pub fn default_span(kappa_max: f64) -> f64 {
    10.0 * 2.0 * kappa_max
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("peak truncated by grid on the {0} side")]
    PeakTruncated(&'static str),
    #[error("spectrum is flat: nothing to measure")]
    FlatSpectrum,
    #[error("spectrum has {0} points, need at least {1}")]
    TooFewPoints(usize, usize),
    #[error("frequency grid: {0}")]
    InvalidGrid(&'static str),
}

/// Uniform probe-frequency grid: center, full span, point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    center: f64,
    span: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(center: f64, span: f64, points: usize) -> Result<Self, SpectraError> {
        if points < 2 {
            return Err(SpectraError::InvalidGrid("need at least two points"));
        }
        if !(span.is_finite() && span > 0.0) {
            return Err(SpectraError::InvalidGrid("span must be positive"));
        }
        if !center.is_finite() {
            return Err(SpectraError::InvalidGrid("center must be finite"));
        }
        Ok(Self {
            center,
            span,
            points,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.span / (self.points - 1) as f64
    }

    /// Signed offset of point `i` from the grid center. Exactly antisymmetric:
    /// offset(n−1−i) = −offset(i) in floating point.
    pub fn offset(&self, i: usize) -> f64 {
        let half = (self.points - 1) as f64 / 2.0;
        (i as f64 - half) * self.spacing()
    }

    /// Absolute frequency of point `i`.
    pub fn value(&self, i: usize) -> f64 {
        self.center + self.offset(i)
    }

    /// All absolute frequencies, strictly increasing.
    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    /// Reconstruct a grid from a list of frequencies, verifying uniform
    /// spacing to within a relative tolerance of 1e-6.
    pub fn from_values(values: &[f64]) -> Result<Self, SpectraError> {
        if values.len() < 2 {
            return Err(SpectraError::InvalidGrid("need at least two points"));
        }
        let first = values[0];
        let last = *values.last().expect("len >= 2");
        let span = last - first;
        if !(span.is_finite() && span > 0.0) {
            return Err(SpectraError::InvalidGrid("frequencies must increase"));
        }
        let spacing = span / (values.len() - 1) as f64;
        for (i, pair) in values.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if (step - spacing).abs() > 1e-6 * spacing {
                let _ = i;
                return Err(SpectraError::InvalidGrid("spacing is not uniform"));
            }
        }
        Self::new(0.5 * (first + last), span, values.len())
    }
}

/// Whether a spectrum was computed by this library or loaded from disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Simulated,
    Loaded,
}

/// A swept response: |amplitude|² per grid point, with the complex amplitudes
/// retained for simulated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: FrequencyGrid,
    /// Complex response at each point; `None` for loaded or noise-corrupted
    /// data where only magnitudes are meaningful.
    pub amplitudes: Option<Vec<Complex64>>,
    /// |amplitude|²: power transmission (transparency branch) or external
    /// conversion efficiency (conversion branch).
    pub magnitudes: Vec<f64>,
    pub branch: Branch,
    pub probe_direction: Direction,
    /// Drive used for a simulated sweep; `None` for loaded data.
    pub drive: Option<DriveField>,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.grid.values()
    }

    /// Verify magnitudes = |amplitudes|² and grid/point-count agreement.
    pub fn is_consistent(&self) -> bool {
        if self.grid.points() != self.magnitudes.len() {
            return false;
        }
        match &self.amplitudes {
            None => true,
            Some(amps) => {
                amps.len() == self.magnitudes.len()
                    && amps
                        .iter()
                        .zip(&self.magnitudes)
                        .all(|(a, &m)| (a.norm_sqr() - m).abs() <= 1e-12 * m.abs().max(1e-300))
            }
        }
    }
}

/// Sweep a probe across mode `b` and record the transmission spectrum.
///
/// The effective coupling is direction-gated: a probe counter-propagating
/// with respect to the drive sees G = 0 and this function returns exactly the
/// bare-resonator dip, bit-for-bit identical to a zero-power sweep.
pub fn sweep_noit(
    system: &SystemConfig,
    drive: &DriveField,
    grid: &FrequencyGrid,
    probe_direction: Direction,
) -> Spectrum {
    let coupling = system.effective_coupling(drive, probe_direction);
    let pair = TwoModeSystem::from_system(system, &coupling);
    // δ_b = (ω_b0 − center) − offset; δ_c picks up the drive carrier through
    // difference-frequency generation.
    let base_b = system.mode_b.omega0 - grid.center();
    let base_c = system.mode_c.omega0 + drive.omega - grid.center();
    let amplitudes: Vec<Complex64> = (0..grid.points())
        .map(|i| {
            let offset = grid.offset(i);
            pair.noit_amplitude(base_b - offset, base_c - offset)
        })
        .collect();
    let magnitudes = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Spectrum {
        grid: *grid,
        amplitudes: Some(amplitudes),
        magnitudes,
        branch: Branch::Noit,
        probe_direction,
        drive: Some(*drive),
        provenance: Provenance::Simulated,
    }
}

/// Sweep a telecom probe across mode `c` and record the external conversion
/// efficiency emerging from the `b` port. The probe co-propagates with the
/// drive (the phase-matched geometry).
pub fn sweep_conversion(
    system: &SystemConfig,
    drive: &DriveField,
    grid: &FrequencyGrid,
) -> Spectrum {
    let probe_direction = drive.direction;
    let coupling = system.effective_coupling(drive, probe_direction);
    let pair = TwoModeSystem::from_system(system, &coupling);
    let base_c = system.mode_c.omega0 - grid.center();
    let base_b = system.mode_b.omega0 - drive.omega - grid.center();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let amplitudes: Vec<Complex64> = (0..grid.points())
        .map(|i| {
            let offset = grid.offset(i);
            let (b_out, _) =
                pair.output_amplitudes(zero, one, base_b - offset, base_c - offset);
            b_out
        })
        .collect();
    let magnitudes = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Spectrum {
        grid: *grid,
        amplitudes: Some(amplitudes),
        magnitudes,
        branch: Branch::Conversion,
        probe_direction,
        drive: Some(*drive),
        provenance: Provenance::Simulated,
    }
}

/// Repeat a sweep at several drive powers [W], reusing the drive carrier and
/// direction of `template`.
pub fn power_series(
    system: &SystemConfig,
    template: &DriveField,
    powers: &[f64],
    grid: &FrequencyGrid,
    branch: Branch,
    probe_direction: Direction,
) -> Result<Vec<Spectrum>, ModelError> {
    powers
        .iter()
        .map(|&p| {
            let drive = template.with_power(p)?;
            Ok(match branch {
                Branch::Noit => sweep_noit(system, &drive, grid, probe_direction),
                Branch::Conversion => sweep_conversion(system, &drive, grid),
            })
        })
        .collect()
}

/// Full width at half maximum of the tallest peak in a spectrum.
///
/// The baseline is the average of the two edge values; the half level sits
/// midway between baseline and peak. Crossings are located by linear
/// interpolation between bracketing grid points. If either half-crossing
/// lies outside the grid, the peak is truncated and an error is returned.
pub fn extract_fwhm(spectrum: &Spectrum) -> Result<f64, SpectraError> {
    let y = &spectrum.magnitudes;
    if y.len() < 5 {
        return Err(SpectraError::TooFewPoints(y.len(), 5));
    }
    let baseline = 0.5 * (y[0] + y[y.len() - 1]);
    let (peak_idx, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if peak - baseline <= 1e-300 || (peak - baseline) <= 1e-12 * peak.abs() {
        return Err(SpectraError::FlatSpectrum);
    }
    let half = baseline + 0.5 * (peak - baseline);

    let x = |i: usize| spectrum.grid.value(i);
    // March outward from the peak to the first crossing on each side.
    let left = (0..peak_idx)
        .rev()
        .find(|&i| y[i] <= half)
        .map(|i| {
            let frac = (half - y[i]) / (y[i + 1] - y[i]);
            x(i) + frac * (x(i + 1) - x(i))
        })
        .ok_or(SpectraError::PeakTruncated("low-frequency"))?;
    let right = (peak_idx + 1..y.len())
        .find(|&i| y[i] <= half)
        .map(|i| {
            let frac = (y[i - 1] - half) / (y[i - 1] - y[i]);
            x(i - 1) + frac * (x(i) - x(i - 1))
        })
        .ok_or(SpectraError::PeakTruncated("high-frequency"))?;
    Ok(right - left)
}

/// The transparency window riding on top of a transmission dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPeak {
    /// Frequency of the local transmission maximum between the two dip
    /// minima [rad/s].
    pub frequency: f64,
    /// Transmission at that maximum.
    pub transmission: f64,
}

/// Summary features of a transparency-branch transmission spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoitFeatures {
    /// Average of the two edge transmissions.
    pub baseline: f64,
    /// Deepest transmission in the sweep.
    pub min_transmission: f64,
    /// Frequency of the deepest point [rad/s].
    pub min_frequency: f64,
    /// Local maximum between two dip minima, when the coupling splits the
    /// dip; `None` for a bare single-dip resonance.
    pub window: Option<WindowPeak>,
    /// Set when no dip is detectable against the baseline.
    pub flat: bool,
}

/// Extract dip and transparency-window features from a transmission spectrum.
pub fn extract_noit_features(spectrum: &Spectrum) -> Result<NoitFeatures, SpectraError> {
    let y = &spectrum.magnitudes;
    if y.len() < 5 {
        return Err(SpectraError::TooFewPoints(y.len(), 5));
    }
    let baseline = 0.5 * (y[0] + y[y.len() - 1]);
    let (min_idx, &min_t) = y
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let flat = baseline - min_t <= 1e-6 * baseline.abs().max(1e-300);
    if flat {
        return Ok(NoitFeatures {
            baseline,
            min_transmission: min_t,
            min_frequency: spectrum.grid.value(min_idx),
            window: None,
            flat: true,
        });
    }

    // Interior local minima, deepest first.
    let mut minima: Vec<usize> = (1..y.len() - 1)
        .filter(|&i| y[i] <= y[i - 1] && y[i] <= y[i + 1] && (y[i] < y[i - 1] || y[i] < y[i + 1]))
        .collect();
    minima.sort_by(|&a, &b| y[a].total_cmp(&y[b]));

    // A transparency window needs two minima with a genuine rise between
    // them — taller than a sliver of the dip depth, to reject roundoff
    // wiggles on a single dip.
    let window = match (minima.first(), minima.get(1)) {
        (Some(&i1), Some(&i2)) => {
            let (lo, hi) = (i1.min(i2), i1.max(i2));
            let (peak_idx, &peak_t) = y[lo..=hi]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, v)| (lo + k, v))
                .expect("non-empty slice");
            let depth = baseline - min_t;
            let rise = peak_t - y[lo].max(y[hi]);
            (rise > 1e-6 * depth).then_some(WindowPeak {
                frequency: spectrum.grid.value(peak_idx),
                transmission: peak_t,
            })
        }
        _ => None,
    };

    Ok(NoitFeatures {
        baseline,
        min_transmission: min_t,
        min_frequency: spectrum.grid.value(min_idx),
        window,
        flat: false,
    })
}

/// Build a probe context for grid point `i` of a sweep (useful for
/// cross-checking a sweep against pointwise evaluation).
pub fn probe_at(
    branch: Branch,
    grid: &FrequencyGrid,
    i: usize,
    direction: Direction,
) -> ProbeContext {
    ProbeContext {
        branch,
        omega: grid.value(i),
        direction,
    }
}
