//! Simulation and parameter estimation for a pump-controlled photonic
//! molecule: two optical resonances coupled by a three-wave-mixing
//! interaction whose strength is set by a strong drive tone.
//!
//! The library models a microring that carries a telecom mode, a visible
//! mode, and a second-harmonic pump mode. Driving the pump mode turns on a
//! coherent coupling between the other two, producing two measurable
//! effects that this crate simulates and fits:
//!
//! * a transparency window carved into the absorption dip of the visible
//!   mode — only for probes co-propagating with the pump, because the
//!   interaction must conserve angular momentum around the ring;
//! * frequency conversion from the telecom band to the visible band, with
//!   efficiency controlled by a single dimensionless cooperativity.
//!
//! # Layout
//!
//! * [`model`] — mode parameters, drive fields, coupling strength, and the
//!   directional selection rule.
//! * [`steady_state`] — closed-form steady-state response: transmission,
//!   conversion efficiency, port scattering matrix, photon-flux budget.
//! * [`spectra`] — frequency sweeps over uniform grids and feature
//!   extraction (linewidths, transparency windows).
//! * [`dynamics`] — explicit Runge–Kutta time integration, ring-up to
//!   steady state, and conserved-quantity checks.
//! * [`fit`] — Levenberg–Marquardt estimation of linewidths, cooperativity,
//!   and conversion parameters from spectra, with honest degeneracy
//!   reporting.
//! * [`io`] — CSV and JSON readers/writers for spectra, trajectories, and
//!   fit results.
//! * [`units`] — the few physical constants used plus GHz/nm boundary
//!   conversions; everything internal is rad/s.
//!
//! # Example
//!
//! Simulate the transparency spectrum of a driven ring and measure the
//! depth of the absorption dip:
//!
//! ```
//! use noit::model::{Direction, DriveField, ModeLabel, ModeParams, SystemConfig};
//! use noit::spectra::{default_span, extract_noit_features, sweep_noit, FrequencyGrid};
//! use noit::units::{ghz_to_rad_per_s, wavelength_nm_to_rad_per_s};
//!
//! let omega_a = wavelength_nm_to_rad_per_s(1550.0);
//! let kappa_b = ghz_to_rad_per_s(1.84);
//! let kappa_c = ghz_to_rad_per_s(0.46);
//! let kappa_a = omega_a / (2.0 * 1.8e5);
//!
//! let system = SystemConfig::new(
//!     ModeParams::new(ModeLabel::A, omega_a, 0.5 * kappa_a, 0.5 * kappa_a, 243)?,
//!     ModeParams::new(ModeLabel::B, 2.0 * omega_a, 0.65 * kappa_b, 0.35 * kappa_b, 486)?,
//!     ModeParams::new(ModeLabel::C, omega_a, 0.6 * kappa_c, 0.4 * kappa_c, 243)?,
//!     7.1e5,
//! )?;
//! let drive = DriveField::on_resonance(&system, 17.5e-3, Direction::Ccw)?;
//! let grid = FrequencyGrid::new(
//!     system.mode_b.omega0,
//!     default_span(system.mode_b.kappa()),
//!     2001,
//! )?;
//!
//! let spectrum = sweep_noit(&system, &drive, &grid, Direction::Ccw);
//! let features = extract_noit_features(&spectrum)?;
//! assert!(features.window.is_some(), "co-propagating probe sees a window");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod dynamics;
pub mod fit;
pub mod io;
pub mod model;
pub mod spectra;
pub mod steady_state;
pub mod units;

pub use fit::{FitOptions, FitResult, FitStatus, NoiseSpec};
pub use model::{
    Branch, CouplingState, Direction, DriveField, ModeLabel, ModeParams, ModelError, ProbeContext,
    SystemConfig,
};
pub use spectra::{FrequencyGrid, Provenance, Spectrum};
pub use steady_state::TwoModeSystem;

// Compile and run every Rust snippet in the guide as a doc-test, so the
// book's examples cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/transparency.md")]
    mod transparency {}
    #[doc = include_str!("../../../book/src/conversion.md")]
    mod conversion {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
