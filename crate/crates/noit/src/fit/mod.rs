//! Spectrum fitting and parameter estimation.
//!
//! Three lineshape models are fitted by damped least squares (see `lm`):
//!
//! * **lorentzian** — a bare resonator transmission dip; determines the
//!   loss/coupling split only up to the mirror exchange κ₀ ↔ κ₁, which is
//!   flagged rather than silently resolved.
//! * **noit** — a transmission dip with a coupling-induced transparency
//!   window; the window breaks the mirror degeneracy and determines the
//!   cooperativity.
//! * **conversion** — the frequency-conversion efficiency peak; a single
//!   spectrum cannot separate the extraction product from the cooperativity
//!   unless one of them (or both linewidths) is pinned, and the result says
//!   so explicitly while always reporting the identifiable peak efficiency.
//!
//! Positive-definite parameters (rates, cooperativity, amplitude scale) are
//! fitted in log space; line centers are fitted as offsets from the grid
//! center scaled by the span. Uncertainties are 1σ values from the residual
//! variance and the local curvature.

mod lm;

use lm::{minimize, EngineParam, EngineResult, Transform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Branch, Direction, DriveField, SystemConfig};
use crate::spectra::{
    extract_fwhm, extract_noit_features, sweep_conversion, sweep_noit, FrequencyGrid, Spectrum,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("spectrum has {0} points; at least {1} are needed")]
    TooFewPoints(usize, usize),
    #[error("unknown parameter `{0}` for this model")]
    UnknownParameter(String),
    #[error("this fit needs a {expected} spectrum, got {got}")]
    WrongBranch { expected: Branch, got: Branch },
    #[error("power series has {0} distinct power(s); at least 2 are needed")]
    DegeneratePowerSeries(usize),
    #[error("noise level must be non-negative and finite")]
    BadNoise,
    #[error("initial value for positive parameter `{0}` must be > 0")]
    BadInitial(String),
}

/// How a fit terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Converged,
    MaxIterations,
    Singular,
}

/// Which lineshape model produced a [`FitResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModelKind {
    Lorentzian,
    Noit,
    Conversion,
}

/// One fitted (or frozen) parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    /// 1σ uncertainty; `None` for frozen parameters, derived quantities, or
    /// when the covariance could not be formed.
    pub stderr: Option<f64>,
    pub frozen: bool,
}

/// Outcome of a lineshape fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModelKind,
    pub parameters: Vec<FitParameter>,
    /// Quantities computed from the fitted parameters (total linewidths,
    /// peak efficiency, …).
    pub derived: Vec<FitParameter>,
    /// Residual sum of squares at the solution.
    pub rss: f64,
    pub iterations: usize,
    pub status: FitStatus,
    /// Set when the data cannot distinguish parameter combinations (mirror
    /// coupling branches, extraction/cooperativity trade-off); the `notes`
    /// explain which.
    pub degenerate: bool,
    pub notes: Vec<String>,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<&FitParameter> {
        self.parameters
            .iter()
            .chain(&self.derived)
            .find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameter(name).map(|p| p.value)
    }

    pub fn stderr(&self, name: &str) -> Option<f64> {
        self.parameter(name).and_then(|p| p.stderr)
    }
}

/// Adjustments to a fit: overridden starting points, frozen parameters,
/// re-freed parameters, iteration budget.
#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    /// Override the automatic initial guess, by parameter name.
    pub initial: Vec<(String, f64)>,
    /// Freeze a parameter at the given value.
    pub fixed: Vec<(String, f64)>,
    /// Un-freeze a parameter that is frozen by default.
    pub free: Vec<String>,
    pub max_iterations: Option<usize>,
}

impl FitOptions {
    pub fn fix(mut self, name: &str, value: f64) -> Self {
        self.fixed.push((name.to_string(), value));
        self
    }

    pub fn start(mut self, name: &str, value: f64) -> Self {
        self.initial.push((name.to_string(), value));
        self
    }

    pub fn unfreeze(mut self, name: &str) -> Self {
        self.free.push(name.to_string());
        self
    }
}

const DEFAULT_MAX_ITERATIONS: usize = 300;

/// Multiplicative Gaussian noise: y → y·(1 + level·z), z ~ N(0, 1), drawn
/// from a deterministic stream seeded by `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub level: f64,
    pub seed: u64,
}

/// Corrupt a spectrum's magnitudes with multiplicative Gaussian noise.
///
/// The complex amplitudes are dropped: after noising they would no longer
/// square to the magnitudes, and real detectors record power anyway.
pub fn apply_noise(spectrum: &Spectrum, noise: &NoiseSpec) -> Result<Spectrum, FitError> {
    if !(noise.level.is_finite() && noise.level >= 0.0) {
        return Err(FitError::BadNoise);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let magnitudes = spectrum
        .magnitudes
        .iter()
        .map(|&y| {
            let z: f64 = StandardNormal.sample(&mut rng);
            y * (1.0 + noise.level * z)
        })
        .collect();
    Ok(Spectrum {
        grid: spectrum.grid,
        amplitudes: None,
        magnitudes,
        branch: spectrum.branch,
        probe_direction: spectrum.probe_direction,
        drive: spectrum.drive,
        provenance: spectrum.provenance,
    })
}

/// Simulate a transmission spectrum and optionally add measurement noise.
pub fn synthesize_noit(
    system: &SystemConfig,
    drive: &DriveField,
    grid: &FrequencyGrid,
    probe_direction: Direction,
    noise: Option<&NoiseSpec>,
) -> Result<Spectrum, FitError> {
    let clean = sweep_noit(system, drive, grid, probe_direction);
    match noise {
        Some(n) => apply_noise(&clean, n),
        None => Ok(clean),
    }
}

/// Simulate a conversion spectrum and optionally add measurement noise.
pub fn synthesize_conversion(
    system: &SystemConfig,
    drive: &DriveField,
    grid: &FrequencyGrid,
    noise: Option<&NoiseSpec>,
) -> Result<Spectrum, FitError> {
    let clean = sweep_conversion(system, drive, grid);
    match noise {
        Some(n) => apply_noise(&clean, n),
        None => Ok(clean),
    }
}

fn apply_options(params: &mut [EngineParam], options: &FitOptions) -> Result<(), FitError> {
    for (name, value) in &options.initial {
        let p = params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| FitError::UnknownParameter(name.clone()))?;
        p.value = *value;
    }
    for name in &options.free {
        let p = params
            .iter_mut()
            .find(|p| p.name == name.as_str())
            .ok_or_else(|| FitError::UnknownParameter(name.clone()))?;
        p.frozen = false;
    }
    for (name, value) in &options.fixed {
        let p = params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| FitError::UnknownParameter(name.clone()))?;
        p.value = *value;
        p.frozen = true;
    }
    for p in params.iter() {
        if !p.frozen && p.transform == Transform::Log && p.value <= 0.0 {
            return Err(FitError::BadInitial(p.name.to_string()));
        }
    }
    Ok(())
}

fn assemble(
    params: &[EngineParam],
    out: &EngineResult,
    center_names: &[&str],
    grid_center: f64,
) -> Vec<FitParameter> {
    params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut value = out.values[i];
            if center_names.contains(&p.name) {
                // Centers are fitted as offsets from the grid center.
                value += grid_center;
            }
            FitParameter {
                name: p.name.to_string(),
                value,
                stderr: out.stderr[i],
                frozen: p.frozen,
            }
        })
        .collect()
}

fn derived_param(name: &str, value: f64) -> FitParameter {
    FitParameter {
        name: name.to_string(),
        value,
        stderr: None,
        frozen: false,
    }
}

/// Full width of a dip at half depth against `baseline`, by outward march
/// from the deepest point with linear interpolation; `None` when either
/// crossing is outside the grid.
fn dip_width(x: &[f64], y: &[f64], baseline: f64) -> Option<f64> {
    let (min_idx, &min_val) = y.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let half = 0.5 * (baseline + min_val);
    let left = (0..min_idx).rev().find(|&i| y[i] >= half).map(|i| {
        let frac = (half - y[i + 1]) / (y[i] - y[i + 1]);
        x[i + 1] + frac * (x[i] - x[i + 1])
    })?;
    let right = (min_idx + 1..y.len()).find(|&i| y[i] >= half).map(|i| {
        let frac = (half - y[i - 1]) / (y[i] - y[i - 1]);
        x[i - 1] + frac * (x[i] - x[i - 1])
    })?;
    Some(right - left)
}

/// Fit a bare resonator transmission dip
/// T(ω) = baseline + scale·(δ² + (κ₀−κ₁)²)/(δ² + κ²), δ = center − ω.
///
/// Parameters: `kappa0`, `kappa1`, `center`, `scale`, `baseline` (frozen at 0
/// by default). The lineshape is exactly invariant under κ₀ ↔ κ₁; when both
/// are free the result is flagged degenerate and reported on the
/// undercoupled branch (κ₁ ≤ κ₀) unless the starting point was overridden.
pub fn fit_lorentzian(spectrum: &Spectrum, options: &FitOptions) -> Result<FitResult, FitError> {
    const MIN_POINTS: usize = 8;
    if spectrum.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints(spectrum.len(), MIN_POINTS));
    }
    let grid_center = spectrum.grid.center();
    let x: Vec<f64> = (0..spectrum.len()).map(|i| spectrum.grid.offset(i)).collect();
    let y = &spectrum.magnitudes;
    let features = extract_noit_features(spectrum).map_err(|_| {
        FitError::TooFewPoints(spectrum.len(), MIN_POINTS)
    })?;

    let scale0 = features.baseline.max(1e-6);
    let center0 = features.min_frequency - grid_center;
    let depth_ratio = (features.min_transmission / scale0).clamp(0.0, 1.0 - 1e-12);
    let contrast = 1.0 - depth_ratio.sqrt(); // 2κ₁/κ on the undercoupled branch
    let width = dip_width(&x, y, features.baseline).unwrap_or(spectrum.grid.span() / 10.0);
    let kappa = (0.5 * width).max(spectrum.grid.spacing());
    let kappa1_0 = (0.5 * contrast * kappa).max(1e-3 * kappa);
    let kappa0_0 = (kappa - kappa1_0).max(1e-3 * kappa);

    let mut params = vec![
        EngineParam {
            name: "kappa0",
            value: kappa0_0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "kappa1",
            value: kappa1_0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "center",
            value: center0,
            frozen: false,
            transform: Transform::Linear,
            scale: spectrum.grid.span(),
        },
        EngineParam {
            name: "scale",
            value: scale0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "baseline",
            value: 0.0,
            frozen: true,
            transform: Transform::Linear,
            scale: scale0,
        },
    ];
    apply_options(&mut params, options)?;

    if features.flat {
        let out = EngineResult {
            values: params.iter().map(|p| p.value).collect(),
            stderr: vec![None; params.len()],
            rss: y.iter().map(|&v| (v - features.baseline).powi(2)).sum(),
            iterations: 0,
            status: FitStatus::Singular,
        };
        let parameters = assemble(&params, &out, &["center"], grid_center);
        return Ok(FitResult {
            model: FitModelKind::Lorentzian,
            parameters,
            derived: Vec::new(),
            rss: out.rss,
            iterations: 0,
            status: FitStatus::Singular,
            degenerate: false,
            notes: vec!["flat spectrum: dip depth is indistinguishable from zero".into()],
        });
    }

    let mut out = minimize(
        &x,
        y,
        &params,
        options.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        |v, xi| {
            let d = v[2] - xi;
            let k = v[0] + v[1];
            let dk = v[0] - v[1];
            v[4] + v[3] * (d * d + dk * dk) / (d * d + k * k)
        },
    );

    let both_free = !params[0].frozen && !params[1].frozen;
    let user_branch = options
        .initial
        .iter()
        .any(|(n, _)| n == "kappa0" || n == "kappa1");
    let mut notes = Vec::new();
    if both_free {
        notes.push(
            "exchanging kappa0 and kappa1 leaves this lineshape unchanged; \
             reported on the undercoupled branch (kappa1 <= kappa0)"
                .into(),
        );
        if !user_branch && out.values[1] > out.values[0] {
            out.values.swap(0, 1);
            out.stderr.swap(0, 1);
        }
    }

    let parameters = assemble(&params, &out, &["center"], grid_center);
    let derived = vec![derived_param("kappa", out.values[0] + out.values[1])];
    Ok(FitResult {
        model: FitModelKind::Lorentzian,
        parameters,
        derived,
        rss: out.rss,
        iterations: out.iterations,
        status: out.status,
        degenerate: both_free,
        notes,
    })
}

/// Fit a transparency-window transmission spectrum.
///
/// Parameters: `kappa_b0`, `kappa_b1`, `kappa_c`, `cooperativity`,
/// `center_b`, `center_offset_c` (frozen at 0 by default — aligned drive),
/// `scale`, `baseline` (frozen at 0). Only the total κ_c enters the
/// lineshape, so its loss/coupling split is not a parameter here. The
/// transparency window depends on κ_{b,1} and κ_b separately, which breaks
/// the mirror degeneracy of the bare dip.
pub fn fit_noit(spectrum: &Spectrum, options: &FitOptions) -> Result<FitResult, FitError> {
    const MIN_POINTS: usize = 16;
    if spectrum.branch != Branch::Noit {
        return Err(FitError::WrongBranch {
            expected: Branch::Noit,
            got: spectrum.branch,
        });
    }
    if spectrum.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints(spectrum.len(), MIN_POINTS));
    }
    let grid_center = spectrum.grid.center();
    let x: Vec<f64> = (0..spectrum.len()).map(|i| spectrum.grid.offset(i)).collect();
    let y = &spectrum.magnitudes;
    let features = extract_noit_features(spectrum)
        .map_err(|_| FitError::TooFewPoints(spectrum.len(), MIN_POINTS))?;

    let scale0 = features.baseline.max(1e-6);
    let depth_ratio = (features.min_transmission / scale0).clamp(0.0, 1.0 - 1e-12);
    let contrast = (1.0 - depth_ratio.sqrt()).clamp(1e-3, 1.0 - 1e-6);
    let width = dip_width(&x, y, features.baseline).unwrap_or(spectrum.grid.span() / 10.0);
    let kappa_b_0 = (0.5 * width).max(spectrum.grid.spacing());

    // Window height ratio → cooperativity: √(T_w/scale) = |1 − e/(1+C)|.
    let (center0, c0) = match features.window {
        Some(window) => {
            let s = (window.transmission / scale0).clamp(0.0, 1.0).sqrt();
            let lower = contrast / (1.0 + s) - 1.0;
            let upper = contrast / (1.0 - s).max(1e-9) - 1.0;
            // Prefer the smaller admissible root (weaker-coupling branch).
            let c = if lower > 1e-3 { lower } else { upper };
            (
                window.frequency - grid_center,
                c.clamp(1e-3, 1e3),
            )
        }
        None => (features.min_frequency - grid_center, 0.05),
    };

    let mut params = vec![
        EngineParam {
            name: "kappa_b0",
            value: (kappa_b_0 * (1.0 - 0.5 * contrast)).max(1e-3 * kappa_b_0),
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "kappa_b1",
            value: (kappa_b_0 * 0.5 * contrast).max(1e-3 * kappa_b_0),
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "kappa_c",
            value: kappa_b_0 / 4.0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "cooperativity",
            value: c0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "center_b",
            value: center0,
            frozen: false,
            transform: Transform::Linear,
            scale: spectrum.grid.span(),
        },
        EngineParam {
            name: "center_offset_c",
            value: 0.0,
            frozen: true,
            transform: Transform::Linear,
            scale: spectrum.grid.span(),
        },
        EngineParam {
            name: "scale",
            value: scale0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "baseline",
            value: 0.0,
            frozen: true,
            transform: Transform::Linear,
            scale: scale0,
        },
    ];
    apply_options(&mut params, options)?;

    if features.flat {
        let out = EngineResult {
            values: params.iter().map(|p| p.value).collect(),
            stderr: vec![None; params.len()],
            rss: y.iter().map(|&v| (v - features.baseline).powi(2)).sum(),
            iterations: 0,
            status: FitStatus::Singular,
        };
        let parameters = assemble(&params, &out, &["center_b"], grid_center);
        return Ok(FitResult {
            model: FitModelKind::Noit,
            parameters,
            derived: Vec::new(),
            rss: out.rss,
            iterations: 0,
            status: FitStatus::Singular,
            degenerate: false,
            notes: vec!["flat spectrum: dip depth is indistinguishable from zero".into()],
        });
    }

    let out = minimize(
        &x,
        y,
        &params,
        options.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        |v, xi| {
            let kappa_b = v[0] + v[1];
            let kappa_c = v[2];
            let g2 = v[3] * kappa_b * kappa_c;
            let db = v[4] - xi;
            let dc = v[4] + v[5] - xi;
            let chi_c_inv = num_complex::Complex64::new(-kappa_c, -dc);
            let denom = num_complex::Complex64::new(-kappa_b, -db) + g2 / chi_c_inv;
            let t = num_complex::Complex64::new(1.0, 0.0) + 2.0 * v[1] / denom;
            v[7] + v[6] * t.norm_sqr()
        },
    );

    let parameters = assemble(&params, &out, &["center_b"], grid_center);
    let kappa_b = out.values[0] + out.values[1];
    let derived = vec![
        derived_param("kappa_b", kappa_b),
        derived_param("g_eff", (out.values[3] * kappa_b * out.values[2]).sqrt()),
    ];
    Ok(FitResult {
        model: FitModelKind::Noit,
        parameters,
        derived,
        rss: out.rss,
        iterations: out.iterations,
        status: out.status,
        degenerate: false,
        notes: Vec::new(),
    })
}

/// Fit a conversion-efficiency peak
/// η(ω) = baseline + K·4C / |(1 + iδ_b/κ_b)(1 + iδ_c/κ_c) + C|².
///
/// Parameters: `extraction_product` (K), `cooperativity`, `kappa_b`,
/// `kappa_c`, `center`, `center_offset_b` (frozen at 0 by default),
/// `baseline` (frozen at 0). A single spectrum determines only three shape
/// numbers beyond the center, so when K and both linewidths are all free the
/// parameter set is unidentifiable: the result is flagged degenerate. The
/// peak efficiency K·4C/(1+C)² is identifiable regardless and is always
/// reported as a derived value.
pub fn fit_conversion(spectrum: &Spectrum, options: &FitOptions) -> Result<FitResult, FitError> {
    const MIN_POINTS: usize = 8;
    if spectrum.branch != Branch::Conversion {
        return Err(FitError::WrongBranch {
            expected: Branch::Conversion,
            got: spectrum.branch,
        });
    }
    if spectrum.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints(spectrum.len(), MIN_POINTS));
    }
    let grid_center = spectrum.grid.center();
    let x: Vec<f64> = (0..spectrum.len()).map(|i| spectrum.grid.offset(i)).collect();
    let y = &spectrum.magnitudes;

    let (peak_idx, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");

    let mut params = vec![
        EngineParam {
            name: "extraction_product",
            value: 0.1,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "cooperativity",
            value: 0.5,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "kappa_b",
            value: spectrum.grid.span() / 10.0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "kappa_c",
            value: spectrum.grid.span() / 40.0,
            frozen: false,
            transform: Transform::Log,
            scale: 1.0,
        },
        EngineParam {
            name: "center",
            value: x[peak_idx],
            frozen: false,
            transform: Transform::Linear,
            scale: spectrum.grid.span(),
        },
        EngineParam {
            name: "center_offset_b",
            value: 0.0,
            frozen: true,
            transform: Transform::Linear,
            scale: spectrum.grid.span(),
        },
        EngineParam {
            name: "baseline",
            value: 0.0,
            frozen: true,
            transform: Transform::Linear,
            scale: peak.max(1e-6),
        },
    ];

    // Data-driven starting points before user overrides.
    if let Ok(width) = extract_fwhm(spectrum) {
        params[2].value = width; // κ_b of the same order as the peak width
        params[3].value = width / 4.0;
    }
    params[0].value = (peak * (1.0 + 0.5f64).powi(2) / (4.0 * 0.5)).clamp(1e-6, 1.0);
    apply_options(&mut params, options)?;

    // A user-pinned extraction product turns the peak height into a direct
    // cooperativity estimate: peak/K = 4C/(1+C)².
    let k_fixed = params[0].frozen;
    if k_fixed && !params[1].frozen && params[0].value > 0.0 {
        let rho = (peak / params[0].value).clamp(1e-9, 1.0);
        let c_est = ((2.0 - rho) - 2.0 * (1.0 - rho).sqrt()) / rho;
        if !options.initial.iter().any(|(n, _)| n == "cooperativity") {
            params[1].value = c_est.clamp(1e-6, 1e3);
        }
    }

    if peak <= 1e-15 {
        let mut out_values: Vec<f64> = params.iter().map(|p| p.value).collect();
        out_values[1] = 0.0; // cooperativity
        let rss = y.iter().map(|&v| v * v).sum();
        let parameters: Vec<FitParameter> = params
            .iter()
            .zip(&out_values)
            .map(|(p, &value)| FitParameter {
                name: p.name.to_string(),
                value: if p.name == "center" {
                    value + grid_center
                } else {
                    value
                },
                stderr: None,
                frozen: p.frozen,
            })
            .collect();
        return Ok(FitResult {
            model: FitModelKind::Conversion,
            parameters,
            derived: vec![derived_param("peak_efficiency", 0.0)],
            rss,
            iterations: 0,
            status: FitStatus::Converged,
            degenerate: true,
            notes: vec![
                "no conversion signal: cooperativity is zero and the \
                 extraction product is unidentifiable"
                    .into(),
            ],
        });
    }

    let degenerate = !params[0].frozen && !params[2].frozen && !params[3].frozen;
    let mut notes = Vec::new();
    if degenerate {
        notes.push(
            "extraction product, cooperativity, and linewidths are jointly \
             unidentifiable from a single spectrum; fix `extraction_product` \
             or the linewidths to resolve them — the derived peak_efficiency \
             is identifiable regardless"
                .into(),
        );
    }

    let out = minimize(
        &x,
        y,
        &params,
        options.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        |v, xi| {
            let dc = v[4] - xi;
            let db = dc + v[5];
            let zb = num_complex::Complex64::new(1.0, db / v[2]);
            let zc = num_complex::Complex64::new(1.0, dc / v[3]);
            let c = v[1];
            v[6] + v[0] * 4.0 * c / (zb * zc + c).norm_sqr()
        },
    );

    let parameters = assemble(&params, &out, &["center"], grid_center);
    let c = out.values[1];
    let derived = vec![
        derived_param(
            "peak_efficiency",
            out.values[0] * 4.0 * c / ((1.0 + c) * (1.0 + c)),
        ),
        derived_param("internal_efficiency", 4.0 * c / ((1.0 + c) * (1.0 + c))),
    ];
    Ok(FitResult {
        model: FitModelKind::Conversion,
        parameters,
        derived,
        rss: out.rss,
        iterations: out.iterations,
        status: out.status,
        degenerate,
        notes,
    })
}

/// Straight-line summaries of cooperativity versus drive power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Through-origin slope of C = slope·P [1/W].
    pub slope: f64,
    /// 1σ uncertainty of `slope`.
    pub slope_stderr: Option<f64>,
    /// Slope of the free-intercept line.
    pub slope_free: f64,
    pub slope_free_stderr: Option<f64>,
    /// Intercept of the free-intercept line (should be ≈ 0 for a linear
    /// power law).
    pub intercept: f64,
    pub intercept_stderr: Option<f64>,
    pub points: usize,
}

/// Regress cooperativity against drive power [(P [W], C)], reporting both
/// the physically motivated through-origin slope and a free-intercept line
/// as a linearity check. Needs at least two distinct powers.
pub fn fit_cooperativity_slope(points: &[(f64, f64)]) -> Result<SlopeFit, FitError> {
    let mut powers: Vec<f64> = points.iter().map(|&(p, _)| p).collect();
    powers.sort_by(f64::total_cmp);
    let distinct = powers
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > 1e-12 * w[1].abs().max(1e-300))
        .count()
        + usize::from(!powers.is_empty());
    if distinct < 2 {
        return Err(FitError::DegeneratePowerSeries(distinct));
    }

    let n = points.len() as f64;
    let sxx0: f64 = points.iter().map(|&(p, _)| p * p).sum();
    let sxy0: f64 = points.iter().map(|&(p, c)| p * c).sum();
    let slope = sxy0 / sxx0;
    let rss0: f64 = points.iter().map(|&(p, c)| (c - slope * p).powi(2)).sum();
    let slope_stderr = (points.len() >= 2)
        .then(|| (rss0 / (n - 1.0) / sxx0).sqrt())
        .filter(|v| v.is_finite());

    let xbar = points.iter().map(|&(p, _)| p).sum::<f64>() / n;
    let ybar = points.iter().map(|&(_, c)| c).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|&(p, _)| (p - xbar).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|&(p, c)| (p - xbar) * (c - ybar))
        .sum();
    let slope_free = sxy / sxx;
    let intercept = ybar - slope_free * xbar;
    let rss: f64 = points
        .iter()
        .map(|&(p, c)| (c - slope_free * p - intercept).powi(2))
        .sum();
    let (slope_free_stderr, intercept_stderr) = if points.len() >= 3 {
        let s2 = rss / (n - 2.0);
        (
            Some((s2 / sxx).sqrt()).filter(|v| v.is_finite()),
            Some((s2 * (1.0 / n + xbar * xbar / sxx)).sqrt()).filter(|v| v.is_finite()),
        )
    } else {
        (None, None)
    };

    Ok(SlopeFit {
        slope,
        slope_stderr,
        slope_free,
        slope_free_stderr,
        intercept,
        intercept_stderr,
        points: points.len(),
    })
}
