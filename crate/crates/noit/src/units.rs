//! Physical constants and unit conversions.
//!
//! Everything inside the library works in angular frequency (rad/s). Ordinary
//! frequency in GHz and wavelengths in nm appear only at the boundaries (CLI
//! flags, config files, CSV columns); these helpers apply the factor of 2π.

use std::f64::consts::PI;

/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054571817e-34;

/// Speed of light in vacuum [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * PI;

/// Ordinary frequency in GHz → angular frequency in rad/s.
pub fn ghz_to_rad_per_s(f_ghz: f64) -> f64 {
    TWO_PI * 1e9 * f_ghz
}

/// Angular frequency in rad/s → ordinary frequency in GHz.
pub fn rad_per_s_to_ghz(omega: f64) -> f64 {
    omega / (TWO_PI * 1e9)
}

/// Vacuum wavelength in nm → angular frequency in rad/s.
pub fn wavelength_nm_to_rad_per_s(lambda_nm: f64) -> f64 {
    TWO_PI * C_LIGHT / (lambda_nm * 1e-9)
}
