//! Time-domain integration of the coupled-mode equations.
//!
//! Two levels of description are integrated with a fixed-step fourth-order
//! Runge–Kutta scheme:
//!
//! * the linearized `b`–`c` pair (drive adiabatically eliminated), whose
//!   steady state must agree with the closed-form spectra — for a constant
//!   input the exact steady state is a fixed point of the RK4 map, so a
//!   rung-up trajectory converges onto the algebraic answer;
//! * the full three-mode χ⁽²⁾ system, nonlinear in the amplitudes, whose
//!   lossless undriven dynamics conserve the pairwise photon sums
//!   (Manley–Rowe relations) used here as integrator diagnostics.
//!
//! All equations live in rotating frames at the input carriers; each mode's
//! [`ConstantInput`] carries both the drive amplitude and the frame detuning
//! δ = ω₀ − carrier.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{ModeLabel, SystemConfig};
use crate::steady_state::TwoModeSystem;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("step {dt:.3e} s exceeds the stability budget {limit:.3e} s for the fastest rate")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("duration must be positive and finite")]
    BadDuration,
    #[error("amplitude diverged to {magnitude:.3e} (bound {bound:.3e}) at t = {time:.3e} s")]
    Unstable {
        time: f64,
        magnitude: f64,
        bound: f64,
    },
    #[error("no steady state within {lifetimes} lifetimes")]
    NoSteadyState { lifetimes: usize },
    #[error("trajectory does not contain mode {0}")]
    MissingMode(ModeLabel),
}

/// A constant waveguide input for one mode: amplitude in √(photon flux)
/// units and the rotating-frame detuning δ = ω₀ − carrier [rad/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantInput {
    pub amplitude: Complex64,
    pub detuning: f64,
}

impl ConstantInput {
    pub fn off(detuning: f64) -> Self {
        Self {
            amplitude: Complex64::new(0.0, 0.0),
            detuning,
        }
    }
}

/// Result of integrating a system forward in time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times [s], starting at 0.
    pub times: Vec<f64>,
    /// Which mode each row of `series` describes.
    pub labels: Vec<ModeLabel>,
    /// `series[k][i]`: amplitude of mode `labels[k]` at `times[i]`.
    pub series: Vec<Vec<Complex64>>,
    /// Fixed integrator step [s].
    pub dt: f64,
    /// Integration scheme tag.
    pub method: &'static str,
}

impl Trajectory {
    pub fn mode(&self, label: ModeLabel) -> Result<&[Complex64], DynamicsError> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|k| self.series[k].as_slice())
            .ok_or(DynamicsError::MissingMode(label))
    }

    /// Amplitudes of every mode at the final sample.
    pub fn final_state(&self) -> Vec<Complex64> {
        self.series
            .iter()
            .map(|s| *s.last().expect("non-empty trajectory"))
            .collect()
    }
}

/// Pairwise photon-number combinations conserved by the lossless undriven
/// three-mode dynamics (each `b` photon is created from one `a` and one `c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// |a|² + |b|²
    PhotonSumAb,
    /// |c|² + |b|²
    PhotonSumCb,
    /// |a|² − |c|²
    PhotonDiffAc,
}

/// Intrinsic/external decay rates of all three modes, without the resonance
/// frequencies (detunings travel with the inputs). Zero rates are allowed so
/// that lossless conservation checks can be expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeModeRates {
    pub kappa_a0: f64,
    pub kappa_a1: f64,
    pub kappa_b0: f64,
    pub kappa_b1: f64,
    pub kappa_c0: f64,
    pub kappa_c1: f64,
}

impl ThreeModeRates {
    pub fn from_system(system: &SystemConfig) -> Self {
        Self {
            kappa_a0: system.mode_a.kappa0,
            kappa_a1: system.mode_a.kappa1,
            kappa_b0: system.mode_b.kappa0,
            kappa_b1: system.mode_b.kappa1,
            kappa_c0: system.mode_c.kappa0,
            kappa_c1: system.mode_c.kappa1,
        }
    }

    /// All decay turned off — the closed-system limit.
    pub fn lossless() -> Self {
        Self {
            kappa_a0: 0.0,
            kappa_a1: 0.0,
            kappa_b0: 0.0,
            kappa_b1: 0.0,
            kappa_c0: 0.0,
            kappa_c1: 0.0,
        }
    }

    fn kappa_a(&self) -> f64 {
        self.kappa_a0 + self.kappa_a1
    }

    fn kappa_b(&self) -> f64 {
        self.kappa_b0 + self.kappa_b1
    }

    fn kappa_c(&self) -> f64 {
        self.kappa_c0 + self.kappa_c1
    }
}

/// One classical fourth-order Runge–Kutta step for a complex state vector.
fn rk4_step<const N: usize>(
    y: &[Complex64; N],
    dt: f64,
    f: &impl Fn(&[Complex64; N]) -> [Complex64; N],
) -> [Complex64; N] {
    let add = |a: &[Complex64; N], b: &[Complex64; N], s: f64| -> [Complex64; N] {
        std::array::from_fn(|i| a[i] + s * b[i])
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * dt));
    let k3 = f(&add(y, &k2, 0.5 * dt));
    let k4 = f(&add(y, &k3, dt));
    std::array::from_fn(|i| {
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    })
}

fn check_step(dt: f64, max_rate: f64) -> Result<(), DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::BadDuration);
    }
    if max_rate > 0.0 {
        let limit = 0.1 / max_rate;
        if dt > limit {
            return Err(DynamicsError::StepTooLarge { dt, limit });
        }
    }
    Ok(())
}

fn steps_for(duration: f64, dt: f64) -> Result<usize, DynamicsError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(DynamicsError::BadDuration);
    }
    Ok(((duration / dt).round() as usize).max(1))
}

/// Divergence guard: amplitudes of a driven passive system stay within a few
/// steady-state scales; anything 1e6 beyond that is a numerical blow-up.
fn runaway_bound(input_scale: f64, initial_scale: f64) -> f64 {
    1e6 * (input_scale + initial_scale + 1.0)
}

/// Integrate the linearized `b`–`c` pair with constant inputs.
///
/// ```text
/// ḃ = −(iδ_b + κ_b) b − iG c + √(2κ_{b,1}) b_in
/// ċ = −(iδ_c + κ_c) c − iG b + √(2κ_{c,1}) c_in
/// ```
pub fn evolve_linearized(
    pair: &TwoModeSystem,
    input_b: ConstantInput,
    input_c: ConstantInput,
    initial: [Complex64; 2],
    duration: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let max_rate = pair
        .kappa_b()
        .max(pair.kappa_c())
        .max(pair.g_eff.abs())
        .max(input_b.detuning.abs())
        .max(input_c.detuning.abs());
    check_step(dt, max_rate)?;
    let steps = steps_for(duration, dt)?;

    let kb = pair.kappa_b();
    let kc = pair.kappa_c();
    let fb = (2.0 * pair.kappa_b1).sqrt() * input_b.amplitude;
    let fc = (2.0 * pair.kappa_c1).sqrt() * input_c.amplitude;
    let lb = Complex64::new(kb, input_b.detuning);
    let lc = Complex64::new(kc, input_c.detuning);
    let ig = Complex64::new(0.0, pair.g_eff);
    let rhs = move |y: &[Complex64; 2]| -> [Complex64; 2] {
        [-lb * y[0] - ig * y[1] + fb, -lc * y[1] - ig * y[0] + fc]
    };

    let decay_min = kb.min(kc);
    let input_scale = if decay_min > 0.0 {
        (fb.norm() + fc.norm()) / decay_min
    } else {
        fb.norm() + fc.norm()
    };
    let bound = runaway_bound(input_scale, initial[0].norm() + initial[1].norm());

    let mut y = initial;
    let mut times = Vec::with_capacity(steps + 1);
    let mut series_b = Vec::with_capacity(steps + 1);
    let mut series_c = Vec::with_capacity(steps + 1);
    times.push(0.0);
    series_b.push(y[0]);
    series_c.push(y[1]);
    for step in 1..=steps {
        y = rk4_step(&y, dt, &rhs);
        let magnitude = y[0].norm().max(y[1].norm());
        if magnitude > bound {
            return Err(DynamicsError::Unstable {
                time: step as f64 * dt,
                magnitude,
                bound,
            });
        }
        times.push(step as f64 * dt);
        series_b.push(y[0]);
        series_c.push(y[1]);
    }
    Ok(Trajectory {
        times,
        labels: vec![ModeLabel::B, ModeLabel::C],
        series: vec![series_b, series_c],
        dt,
        method: "rk4",
    })
}

/// Integrate the full three-mode χ⁽²⁾ system with constant inputs.
///
/// ```text
/// ȧ = −(iδ_a + κ_a) a − i g b c* + √(2κ_{a,1}) a_in
/// ḃ = −(iδ_b + κ_b) b − i g a c + √(2κ_{b,1}) b_in
/// ċ = −(iδ_c + κ_c) c − i g a* b + √(2κ_{c,1}) c_in
/// ```
///
/// The frames must satisfy carrier_b = carrier_a + carrier_c for the
/// interaction terms to be time-independent; the detunings passed with the
/// inputs are assumed to respect that.
pub fn evolve_three_mode(
    rates: &ThreeModeRates,
    g: f64,
    inputs: [ConstantInput; 3],
    initial: [Complex64; 3],
    duration: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let initial_scale: f64 = initial.iter().map(|z| z.norm()).sum();
    let drive_terms: [Complex64; 3] = [
        (2.0 * rates.kappa_a1).sqrt() * inputs[0].amplitude,
        (2.0 * rates.kappa_b1).sqrt() * inputs[1].amplitude,
        (2.0 * rates.kappa_c1).sqrt() * inputs[2].amplitude,
    ];
    let decay_min = rates
        .kappa_a()
        .min(rates.kappa_b())
        .min(rates.kappa_c());
    let input_scale = {
        let total: f64 = drive_terms.iter().map(|z| z.norm()).sum();
        if decay_min > 0.0 {
            total / decay_min
        } else {
            total
        }
    };
    // The nonlinear rate is g times the amplitude scale actually reachable.
    let amp_scale = (initial_scale + input_scale).max(1e-300);
    let max_rate = rates
        .kappa_a()
        .max(rates.kappa_b())
        .max(rates.kappa_c())
        .max(g.abs() * amp_scale)
        .max(inputs.iter().map(|i| i.detuning.abs()).fold(0.0, f64::max));
    check_step(dt, max_rate)?;
    let steps = steps_for(duration, dt)?;

    let l: [Complex64; 3] = [
        Complex64::new(rates.kappa_a(), inputs[0].detuning),
        Complex64::new(rates.kappa_b(), inputs[1].detuning),
        Complex64::new(rates.kappa_c(), inputs[2].detuning),
    ];
    let ig = Complex64::new(0.0, g);
    let rhs = move |y: &[Complex64; 3]| -> [Complex64; 3] {
        let (a, b, c) = (y[0], y[1], y[2]);
        [
            -l[0] * a - ig * b * c.conj() + drive_terms[0],
            -l[1] * b - ig * a * c + drive_terms[1],
            -l[2] * c - ig * a.conj() * b + drive_terms[2],
        ]
    };

    let bound = runaway_bound(input_scale, initial_scale);
    let mut y = initial;
    let mut times = Vec::with_capacity(steps + 1);
    let mut series: [Vec<Complex64>; 3] = std::array::from_fn(|_| Vec::with_capacity(steps + 1));
    times.push(0.0);
    for (k, s) in series.iter_mut().enumerate() {
        s.push(y[k]);
    }
    for step in 1..=steps {
        y = rk4_step(&y, dt, &rhs);
        let magnitude = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if magnitude > bound {
            return Err(DynamicsError::Unstable {
                time: step as f64 * dt,
                magnitude,
                bound,
            });
        }
        times.push(step as f64 * dt);
        for (k, s) in series.iter_mut().enumerate() {
            s.push(y[k]);
        }
    }
    let [sa, sb, sc] = series;
    Ok(Trajectory {
        times,
        labels: vec![ModeLabel::A, ModeLabel::B, ModeLabel::C],
        series: vec![sa, sb, sc],
        dt,
        method: "rk4",
    })
}

/// Outcome of ringing a system up to its steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingUp {
    /// Final (b, c) amplitudes.
    pub state: [Complex64; 2],
    /// Total integrated time [s].
    pub elapsed: f64,
    /// Total RK4 steps taken.
    pub steps: usize,
}

/// Integrate the linearized pair from a given state until the amplitudes stop
/// changing: successive end-of-lifetime samples must differ by less than
/// `tolerance` relative to the amplitude scale. Fails after 200 lifetimes.
pub fn ring_to_steady_state(
    pair: &TwoModeSystem,
    input_b: ConstantInput,
    input_c: ConstantInput,
    initial: [Complex64; 2],
    tolerance: f64,
) -> Result<RingUp, DynamicsError> {
    const MAX_LIFETIMES: usize = 200;
    let kb = pair.kappa_b();
    let kc = pair.kappa_c();
    let max_rate = kb
        .max(kc)
        .max(pair.g_eff.abs())
        .max(input_b.detuning.abs())
        .max(input_c.detuning.abs());
    let dt = 0.05 / max_rate;
    let lifetime = 1.0 / kb.min(kc);
    let steps_per_lifetime = (lifetime / dt).ceil() as usize;

    let fb = (2.0 * pair.kappa_b1).sqrt() * input_b.amplitude;
    let fc = (2.0 * pair.kappa_c1).sqrt() * input_c.amplitude;
    let lb = Complex64::new(kb, input_b.detuning);
    let lc = Complex64::new(kc, input_c.detuning);
    let ig = Complex64::new(0.0, pair.g_eff);
    let rhs = move |y: &[Complex64; 2]| -> [Complex64; 2] {
        [-lb * y[0] - ig * y[1] + fb, -lc * y[1] - ig * y[0] + fc]
    };

    let scale_floor = ((fb.norm() + fc.norm()) / kb.min(kc))
        .max(initial[0].norm() + initial[1].norm())
        .max(1e-300);
    let bound = runaway_bound(scale_floor, 0.0);

    let mut y = initial;
    let mut steps = 0usize;
    let mut previous = y;
    for _lifetime in 0..MAX_LIFETIMES {
        for _ in 0..steps_per_lifetime {
            y = rk4_step(&y, dt, &rhs);
            steps += 1;
            let magnitude = y[0].norm().max(y[1].norm());
            if magnitude > bound {
                return Err(DynamicsError::Unstable {
                    time: steps as f64 * dt,
                    magnitude,
                    bound,
                });
            }
        }
        let change = (y[0] - previous[0]).norm().max((y[1] - previous[1]).norm());
        let scale = y[0].norm().max(y[1].norm()).max(scale_floor);
        if change <= tolerance * scale {
            return Ok(RingUp {
                state: y,
                elapsed: steps as f64 * dt,
                steps,
            });
        }
        previous = y;
    }
    Err(DynamicsError::NoSteadyState {
        lifetimes: MAX_LIFETIMES,
    })
}

/// Maximum relative drift of a conserved photon-number combination along a
/// trajectory, normalized by max(|Q(0)|, total photon number at t = 0).
pub fn conservation_residual(
    trajectory: &Trajectory,
    invariant: Invariant,
) -> Result<f64, DynamicsError> {
    let a = trajectory.mode(ModeLabel::A)?;
    let b = trajectory.mode(ModeLabel::B)?;
    let c = trajectory.mode(ModeLabel::C)?;
    let q = |i: usize| -> f64 {
        match invariant {
            Invariant::PhotonSumAb => a[i].norm_sqr() + b[i].norm_sqr(),
            Invariant::PhotonSumCb => c[i].norm_sqr() + b[i].norm_sqr(),
            Invariant::PhotonDiffAc => a[i].norm_sqr() - c[i].norm_sqr(),
        }
    };
    let q0 = q(0);
    let total0 = a[0].norm_sqr() + b[0].norm_sqr() + c[0].norm_sqr();
    let denom = q0.abs().max(total0).max(1e-300);
    let drift = (0..trajectory.times.len())
        .map(|i| (q(i) - q0).abs())
        .fold(0.0, f64::max);
    Ok(drift / denom)
}
