//! `noit` — simulate and fit pump-controlled transparency and telecom→visible
//! conversion in a three-mode microring.
//!
//! Exit codes: 0 success; 1 usage or configuration problem; 2 numerical
//! problem (invalid physics, non-convergent fit, unstable integration);
//! 3 file I/O or malformed data file.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

use noit::dynamics::{
    evolve_linearized, ring_to_steady_state, ConstantInput, DynamicsError,
};
use noit::fit::{
    apply_noise, fit_conversion, fit_lorentzian, fit_noit, FitError, FitOptions, FitResult,
    FitStatus, NoiseSpec,
};
use noit::io::{
    fit_result_json_string, read_spectrum_csv, spectrum_csv_string, spectrum_from_json,
    spectrum_json_string, write_trajectory_csv, IoError,
};
use noit::model::{Branch, Direction, ModelError, ProbeContext};
use noit::spectra::{power_series, FrequencyGrid, SpectraError, Spectrum};
use noit::steady_state::TwoModeSystem;
use noit::units::{ghz_to_rad_per_s, rad_per_s_to_ghz};

use config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Format(#[from] IoError),
    #[error("write `{path}`: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("fit stopped without converging: {status:?}")]
    NotConverged { status: FitStatus },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Model(_)
            | CliError::Spectra(_)
            | CliError::Fit(_)
            | CliError::Dynamics(_)
            | CliError::NotConverged { .. } => 2,
            CliError::Format(_) | CliError::File { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "noit",
    version,
    about = "Simulate and fit pump-controlled transparency and telecom→visible \
             conversion in a three-mode microring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a probe-transmission spectrum of the visible mode
    SimulateNoit(SimulateArgs),
    /// Simulate a telecom→visible conversion-efficiency spectrum
    SimulateConversion(SimulateArgs),
    /// Simulate spectra across a list of drive powers
    PowerSeries(PowerSeriesArgs),
    /// Fit a model to a spectrum file and report the recovered parameters
    Fit(FitArgs),
    /// Integrate ring-up dynamics and compare against the closed-form steady state
    Dynamics(DynamicsArgs),
    /// Convert a cooperativity-per-power slope into the bare coupling rate
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file path, or `device` for the bundled demonstration device
    #[arg(long, default_value = "device")]
    config: String,
    /// Override drive power [mW]
    #[arg(long)]
    power_mw: Option<f64>,
    /// Override drive direction (cw|ccw)
    #[arg(long)]
    drive_direction: Option<Direction>,
    /// Override probe direction (cw|ccw)
    #[arg(long)]
    probe_direction: Option<Direction>,
    /// Override grid point count
    #[arg(long)]
    points: Option<usize>,
    /// Override sweep span [GHz]
    #[arg(long)]
    span_ghz: Option<f64>,
    /// Multiplicative Gaussian noise level (e.g. 0.01 for 1%)
    #[arg(long)]
    noise: Option<f64>,
    /// Override the noise seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a JSON document instead of CSV
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PowerSeriesArgs {
    /// Config file path, or `device` for the bundled demonstration device
    #[arg(long, default_value = "device")]
    config: String,
    /// Comma-separated drive powers [mW]
    #[arg(long, value_delimiter = ',', required = true)]
    powers_mw: Vec<f64>,
    /// Which spectrum to sweep at each power (noit|conversion)
    #[arg(long, default_value = "noit")]
    branch: Branch,
    /// Directory receiving one spectrum CSV per power
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Multiplicative Gaussian noise level applied to every spectrum
    #[arg(long)]
    noise: Option<f64>,
    /// Override grid point count
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Lorentzian,
    Noit,
    Conversion,
}

#[derive(Args)]
struct FitArgs {
    /// Spectrum file: CSV (`probe_frequency_GHz,value[,real,imag]`), or a
    /// JSON spectrum document when the path ends in `.json`
    #[arg(long)]
    input: PathBuf,
    /// Model to fit
    #[arg(long, value_enum)]
    model: ModelChoice,
    /// Branch tag for CSV inputs, which carry no metadata (noit|conversion);
    /// defaults to the branch matching the model
    #[arg(long)]
    branch: Option<Branch>,
    /// Probe-direction tag for CSV inputs (cw|ccw)
    #[arg(long, default_value = "ccw")]
    direction: Direction,
    /// Pin a parameter: NAME=VALUE. Rates and centers in GHz (angular
    /// frequency over 2π, matching the CSV frequency column); other
    /// parameters dimensionless. Repeatable.
    #[arg(long = "fix", value_name = "NAME=VALUE")]
    fix: Vec<String>,
    /// Initial guess for a parameter: NAME=VALUE, same units as --fix.
    /// Repeatable.
    #[arg(long = "start", value_name = "NAME=VALUE")]
    start: Vec<String>,
    /// Free a parameter that the model pins by default. Repeatable.
    #[arg(long = "free", value_name = "NAME")]
    free: Vec<String>,
    /// Iteration budget for the optimizer
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Emit the full JSON document instead of a table
    #[arg(long)]
    json: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DynamicsArgs {
    /// Config file path, or `device` for the bundled demonstration device
    #[arg(long, default_value = "device")]
    config: String,
    /// Number of detunings compared across the sweep span
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Steady-state convergence tolerance
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Also write the zero-offset ring-up trajectory as CSV to this path
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// Output path for the comparison table (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Config file path, or `device` for the bundled demonstration device
    #[arg(long, default_value = "device")]
    config: String,
    /// Cooperativity-per-power slope to invert [1/mW]; defaults to the
    /// config's coupling slope
    #[arg(long)]
    slope_per_mw: Option<f64>,
    /// Emit JSON instead of a human-readable summary
    #[arg(long)]
    json: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::SimulateNoit(args) => simulate(Branch::Noit, args),
        Command::SimulateConversion(args) => simulate(Branch::Conversion, args),
        Command::PowerSeries(args) => run_power_series(args),
        Command::Fit(args) => run_fit(args),
        Command::Dynamics(args) => run_dynamics(args),
        Command::Calibrate(args) => run_calibrate(args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|source| CliError::File {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn simulate(branch: Branch, args: SimulateArgs) -> Result<(), CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(p) = args.power_mw {
        config.drive.power_mw = p;
    }
    if let Some(d) = args.drive_direction {
        config.drive.direction = d;
    }
    if let Some(d) = args.probe_direction {
        config.probe.direction = d;
    }
    if let Some(n) = args.points {
        config.probe.grid.points = Some(n);
    }
    if let Some(s) = args.span_ghz {
        config.probe.grid.span_ghz = Some(s);
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let scenario = config.scenario_for(branch)?;
    let noise = args.noise.map(|level| NoiseSpec {
        level,
        seed: scenario.seed,
    });
    let spectrum = match branch {
        Branch::Noit => noit::fit::synthesize_noit(
            &scenario.system,
            &scenario.drive,
            &scenario.grid,
            scenario.probe_direction,
            noise.as_ref(),
        )?,
        Branch::Conversion => noit::fit::synthesize_conversion(
            &scenario.system,
            &scenario.drive,
            &scenario.grid,
            noise.as_ref(),
        )?,
    };
    let text = if args.json {
        let mut t = spectrum_json_string(&spectrum)?;
        t.push('\n');
        t
    } else {
        spectrum_csv_string(&spectrum)?
    };
    emit(args.out.as_deref(), &text)
}

fn run_power_series(args: PowerSeriesArgs) -> Result<(), CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(n) = args.points {
        config.probe.grid.points = Some(n);
    }
    let scenario = config.scenario_for(args.branch)?;
    if args.powers_mw.is_empty() {
        return Err(CliError::Usage("--powers-mw needs at least one power".into()));
    }
    let powers_w: Vec<f64> = args.powers_mw.iter().map(|p| p * 1e-3).collect();
    let spectra = power_series(
        &scenario.system,
        &scenario.drive,
        &powers_w,
        &scenario.grid,
        args.branch,
        scenario.probe_direction,
    )?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::File {
            path: dir.display().to_string(),
            source,
        })?;
    }

    let mut manifest = String::from("index,power_mw,pump_photons,cooperativity,file\n");
    for (i, spectrum) in spectra.iter().enumerate() {
        let noisy;
        let spectrum = match args.noise {
            Some(level) => {
                noisy = apply_noise(
                    spectrum,
                    &NoiseSpec {
                        level,
                        seed: scenario.seed.wrapping_add(i as u64),
                    },
                )?;
                &noisy
            }
            None => spectrum,
        };
        let drive = scenario.drive.with_power(powers_w[i])?;
        let coupling = scenario
            .system
            .effective_coupling(&drive, scenario.probe_direction);
        let file = match &args.out_dir {
            Some(dir) => {
                let name = format!("{}_{i:02}.csv", args.branch);
                let path = dir.join(&name);
                fs::write(&path, spectrum_csv_string(spectrum)?).map_err(|source| {
                    CliError::File {
                        path: path.display().to_string(),
                        source,
                    }
                })?;
                name
            }
            None => String::new(),
        };
        writeln!(
            manifest,
            "{i},{},{},{},{file}",
            args.powers_mw[i], coupling.pump_photons, coupling.cooperativity
        )
        .expect("writing to a String cannot fail");
    }
    emit(None, &manifest)
}

/// Parameters measured in angular frequency, exposed on the command line in
/// GHz over 2π (the unit of the CSV frequency column).
const ANGULAR_PARAMETERS: &[&str] = &[
    "kappa0",
    "kappa1",
    "kappa",
    "kappa_b0",
    "kappa_b1",
    "kappa_b",
    "kappa_c",
    "center",
    "center_b",
    "center_offset_b",
    "center_offset_c",
    "g_eff",
];
const DIMENSIONLESS_PARAMETERS: &[&str] =
    &["cooperativity", "scale", "baseline", "extraction_product"];

fn assignment_to_internal(raw: &str) -> Result<(String, f64), CliError> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected NAME=VALUE, got `{raw}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("`{raw}`: {e}")))?;
    let name = name.trim();
    if ANGULAR_PARAMETERS.contains(&name) {
        Ok((name.to_string(), ghz_to_rad_per_s(value)))
    } else if DIMENSIONLESS_PARAMETERS.contains(&name) {
        Ok((name.to_string(), value))
    } else {
        Err(CliError::Usage(format!(
            "unknown parameter `{name}`; rates/centers: {ANGULAR_PARAMETERS:?}, \
             dimensionless: {DIMENSIONLESS_PARAMETERS:?}"
        )))
    }
}

fn load_spectrum(path: &Path, branch: Branch, direction: Direction) -> Result<Spectrum, CliError> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let text = fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        Ok(spectrum_from_json(&text)?)
    } else {
        let file = fs::File::open(path).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        Ok(read_spectrum_csv(file, branch, direction)?)
    }
}

fn append_parameter_rows(out: &mut String, params: &[noit::fit::FitParameter]) {
    for p in params {
        let ghz = if ANGULAR_PARAMETERS.contains(&p.name.as_str()) {
            format!("{:.6}", rad_per_s_to_ghz(p.value))
        } else {
            "—".into()
        };
        let err = match (p.frozen, p.stderr) {
            (true, _) => "fixed".to_string(),
            (false, Some(e)) => format!("{e:.3e}"),
            (false, None) => "—".to_string(),
        };
        writeln!(out, "{:<18} {:>14.6e} {:>14} {:>12}", p.name, p.value, ghz, err).unwrap();
    }
}

fn render_fit_table(result: &FitResult) -> String {
    let mut out = String::new();
    let status = match result.status {
        FitStatus::Converged => "converged",
        FitStatus::MaxIterations => "hit iteration budget",
        FitStatus::Singular => "singular (degenerate or flat data)",
    };
    writeln!(
        out,
        "model: {:<12} status: {status}\niterations: {:<6} rss: {:.6e}",
        format!("{:?}", result.model).to_lowercase(),
        result.iterations,
        result.rss
    )
    .unwrap();
    if result.degenerate {
        writeln!(out, "degenerate: yes (see notes)").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(
        out,
        "{:<18} {:>14} {:>14} {:>12}",
        "parameter", "value", "(GHz)", "stderr"
    )
    .unwrap();
    append_parameter_rows(&mut out, &result.parameters);
    if !result.derived.is_empty() {
        writeln!(out, "derived:").unwrap();
        append_parameter_rows(&mut out, &result.derived);
    }
    if !result.notes.is_empty() {
        writeln!(out, "\nnotes:").unwrap();
        for note in &result.notes {
            writeln!(out, "  - {note}").unwrap();
        }
    }
    out
}

fn run_fit(args: FitArgs) -> Result<(), CliError> {
    let branch = args.branch.unwrap_or(match args.model {
        ModelChoice::Conversion => Branch::Conversion,
        ModelChoice::Lorentzian | ModelChoice::Noit => Branch::Noit,
    });

    // Validate the requested options before touching the input file, so
    // usage mistakes surface as usage errors.
    let mut options = FitOptions::default();
    for raw in &args.fix {
        let (name, value) = assignment_to_internal(raw)?;
        options = options.fix(&name, value);
    }
    for raw in &args.start {
        let (name, value) = assignment_to_internal(raw)?;
        options = options.start(&name, value);
    }
    for name in &args.free {
        options = options.unfreeze(name);
    }
    options.max_iterations = args.max_iterations;

    let spectrum = load_spectrum(&args.input, branch, args.direction)?;

    let result = match args.model {
        ModelChoice::Lorentzian => fit_lorentzian(&spectrum, &options)?,
        ModelChoice::Noit => fit_noit(&spectrum, &options)?,
        ModelChoice::Conversion => fit_conversion(&spectrum, &options)?,
    };

    let text = if args.json {
        let mut t = fit_result_json_string(&result)?;
        t.push('\n');
        t
    } else {
        render_fit_table(&result)
    };
    emit(args.out.as_deref(), &text)?;

    if result.status == FitStatus::Converged {
        Ok(())
    } else {
        Err(CliError::NotConverged {
            status: result.status,
        })
    }
}

fn run_dynamics(args: DynamicsArgs) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let scenario = config.scenario()?;
    let system = &scenario.system;
    let coupling = system.effective_coupling(&scenario.drive, scenario.probe_direction);
    let pair = TwoModeSystem::from_system(system, &coupling);
    let grid = FrequencyGrid::new(scenario.grid.center(), scenario.grid.span(), args.points)?;

    let (b_amp, c_amp) = match scenario.branch {
        Branch::Noit => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        Branch::Conversion => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    };

    let mut table = String::from(
        "offset_GHz,b_out_flux_dynamic,b_out_flux_closed,c_out_flux_dynamic,c_out_flux_closed\n",
    );
    let mut max_dev: f64 = 0.0;
    let mut total_steps = 0usize;
    for i in 0..grid.points() {
        let probe = ProbeContext {
            branch: scenario.branch,
            omega: grid.value(i),
            direction: scenario.probe_direction,
        };
        let (delta_b, delta_c) = probe.detunings(system, &scenario.drive);
        let ring = ring_to_steady_state(
            &pair,
            ConstantInput {
                amplitude: b_amp,
                detuning: delta_b,
            },
            ConstantInput {
                amplitude: c_amp,
                detuning: delta_c,
            },
            [Complex64::new(0.0, 0.0); 2],
            args.tolerance,
        )?;
        total_steps += ring.steps;
        let b_out_dyn = b_amp - (2.0 * pair.kappa_b1).sqrt() * ring.state[0];
        let c_out_dyn = c_amp - (2.0 * pair.kappa_c1).sqrt() * ring.state[1];
        let (b_out, c_out) = pair.output_amplitudes(b_amp, c_amp, delta_b, delta_c);
        let fluxes = [
            (b_out_dyn.norm_sqr(), b_out.norm_sqr()),
            (c_out_dyn.norm_sqr(), c_out.norm_sqr()),
        ];
        for (dyn_flux, closed) in fluxes {
            max_dev = max_dev.max((dyn_flux - closed).abs() / closed.max(1e-12));
        }
        writeln!(
            table,
            "{},{},{},{},{}",
            rad_per_s_to_ghz(grid.offset(i)),
            fluxes[0].0,
            fluxes[0].1,
            fluxes[1].0,
            fluxes[1].1
        )
        .expect("writing to a String cannot fail");
    }
    emit(args.out.as_deref(), &table)?;
    eprintln!(
        "compared {} detunings; max relative deviation from closed form: {max_dev:.3e}; \
         {total_steps} RK4 steps total",
        grid.points()
    );

    if let Some(path) = &args.trajectory_out {
        let probe = ProbeContext {
            branch: scenario.branch,
            omega: grid.center(),
            direction: scenario.probe_direction,
        };
        let (delta_b, delta_c) = probe.detunings(system, &scenario.drive);
        let max_rate = pair
            .kappa_b()
            .max(pair.kappa_c())
            .max(delta_b.abs())
            .max(delta_c.abs())
            .max(pair.g_eff);
        let lifetime = 1.0 / pair.kappa_b().min(pair.kappa_c());
        let trajectory = evolve_linearized(
            &pair,
            ConstantInput {
                amplitude: b_amp,
                detuning: delta_b,
            },
            ConstantInput {
                amplitude: c_amp,
                detuning: delta_c,
            },
            [Complex64::new(0.0, 0.0); 2],
            20.0 * lifetime,
            0.05 / max_rate,
        )?;
        let file = fs::File::create(path).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        write_trajectory_csv(&trajectory, file)?;
    }
    Ok(())
}

fn run_calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let mut config = RunConfig::load(&args.config)?;
    let slope_per_mw = args
        .slope_per_mw
        .or(config.coupling.unit_power_cooperativity_per_mw)
        .ok_or_else(|| {
            CliError::Usage(
                "no slope: pass --slope-per-mw or configure \
                 coupling.unit_power_cooperativity_per_mw"
                    .into(),
            )
        })?;
    config.coupling.g_over_2pi_khz = None;
    config.coupling.unit_power_cooperativity_per_mw = Some(slope_per_mw);
    let scenario = config.scenario()?;
    let coupling = scenario
        .system
        .effective_coupling(&scenario.drive, scenario.drive.direction);

    let g = scenario.system.g;
    let text = if args.json {
        let doc = serde_json::json!({
            "schema_version": 1,
            "kind": "calibration",
            "slope_per_mw": slope_per_mw,
            "g_rad_per_s": g,
            "g_over_2pi_khz": rad_per_s_to_ghz(g) * 1e6,
            "drive_power_mw": config.drive.power_mw,
            "pump_photons": coupling.pump_photons,
            "g_eff_over_2pi_ghz": rad_per_s_to_ghz(coupling.g_eff),
            "cooperativity": coupling.cooperativity,
        });
        let mut t = serde_json::to_string_pretty(&doc).map_err(IoError::from)?;
        t.push('\n');
        t
    } else {
        format!(
            "cooperativity slope:      {slope_per_mw} /mW\n\
             bare coupling g:          {g:.6e} rad/s  ({:.3} kHz × 2π)\n\
             at drive power {} mW:\n\
             pump photons:             {:.6e}\n\
             effective coupling G/2π:  {:.6} GHz\n\
             cooperativity:            {:.6}\n",
            rad_per_s_to_ghz(g) * 1e6,
            config.drive.power_mw,
            coupling.pump_photons,
            rad_per_s_to_ghz(coupling.g_eff),
            coupling.cooperativity
        )
    };
    emit(args.out.as_deref(), &text)
}
