//! Argument definitions and command implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use snv_core::defect::{manifold_eigensystem, FieldConfig, Manifold, DIR_001};
use snv_core::dynamics::{
    build_pumping_model, calibrate_gamma0, g2_curve, pumping_trace, t1_phonon_model, t1_recovery_curve, G2Params,
    PumpingConfig, DEFAULT_IRF_SIGMA_NS, DEFAULT_PUMP_FIELD_T,
};
use snv_core::fitting::{
    auto_initialize_peaks, fit_exponential_decay_after, fit_field_dependence, fit_lorentzian_multi,
    fit_t1_vs_temperature, lorentzian_param_names, ActivationEnergy, FieldFitOptions, FieldObservation, FreeMask,
    DECAY_PARAM_NAMES, FIELD_PARAM_NAMES, IRF_WINDOW_NS,
};
use snv_core::spectra::{field_sweep, synthesize_spectrum, transition_table, SweepGeometry};

use crate::config::{parse_miller, validate_sweep, OutputFormat, RunConfig, SweepSpec};
use crate::error::CliError;
use crate::io::{self, Cell};

/// Ground spin lifetime used to calibrate the phonon prefactor when none is given.
const CALIBRATION_POINT: (f64, f64) = (3.25, 10.4);
const DEFAULT_DELTA_GHZ: f64 = 850.0;

#[derive(Debug, Parser)]
#[command(name = "snv", version, about = "Tin-vacancy spectra, spin dynamics and fits")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when neither this nor the config names one.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for randomized fit restarts.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Suppress summaries on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lorentzian-broadened emission spectrum at one field (freq_ghz,intensity).
    SimulateSpectrum(SpectrumArgs),
    /// Transition table along a field-magnitude sweep.
    SweepField(SweepArgs),
    /// Optical spin pumping trace of the readout line (time_ns,value).
    SimulatePumping(PumpingArgs),
    /// Intensity autocorrelation under resonant drive (tau_ns,g2).
    SimulateG2(G2Args),
    /// Phonon-limited T1 against temperature, or a recovery curve.
    T1Model(T1Args),
    /// Multi-Lorentzian fit of an ODMR or emission trace.
    FitPeaks(FitPeaksArgs),
    /// Single-exponential fit of a lifetime or recovery trace.
    FitDecay(FitDecayArgs),
    /// Phonon-process fit of T1 against temperature.
    FitT1(FitT1Args),
    /// Spin-orbit and strain parameters from line positions versus field.
    FitField(FitFieldArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub b_tesla: Option<f64>,
    #[arg(long)]
    pub temperature_k: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub fwhm_ghz: f64,
    /// Grid edges; default spans every line with a margin of 20 widths.
    #[arg(long, allow_negative_numbers = true)]
    pub freq_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub freq_max: Option<f64>,
    #[arg(long, default_value_t = 8001)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Miller index such as `[001]`.
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long)]
    pub temperature_k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PumpingArgs {
    #[arg(long, default_value = "A1")]
    pub pump_line: String,
    /// Defaults to the pumped line.
    #[arg(long)]
    pub readout_line: Option<String>,
    #[arg(long)]
    pub b_tesla: Option<f64>,
    #[arg(long)]
    pub temperature_k: Option<f64>,
    #[arg(long, default_value_t = 10_000.0)]
    pub duration_ns: f64,
    /// 1/ns.
    #[arg(long)]
    pub pump_rate: Option<f64>,
    /// 1/ns.
    #[arg(long)]
    pub radiative_rate: Option<f64>,
    /// 1/ns.
    #[arg(long)]
    pub spin_flip_rate: Option<f64>,
    /// Populations of levels 1, 2, A, B.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.5,0,0")]
    pub initial: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct G2Args {
    /// Rabi frequency, GHz (cycles per ns).
    #[arg(long, default_value_t = 0.3)]
    pub rabi_ghz: f64,
    #[arg(long, default_value_t = 4.5)]
    pub lifetime_ns: f64,
    /// Pure dephasing rate, 1/ns.
    #[arg(long, default_value_t = 0.0)]
    pub dephasing: f64,
    /// Gaussian instrument response sigma, ns; 0 disables it.
    #[arg(long, default_value_t = DEFAULT_IRF_SIGMA_NS)]
    pub irf_ns: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tau_max_ns: f64,
    #[arg(long, default_value_t = 801)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct T1Args {
    #[arg(long, default_value_t = DEFAULT_DELTA_GHZ)]
    pub delta_ghz: f64,
    /// Phonon prefactor, 1/ms; calibrated to 10.4 ms at 3.25 K when omitted.
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub temps: Vec<f64>,
    /// Recovery mode: dark times in ms.
    #[arg(long, value_delimiter = ',', conflicts_with = "temps")]
    pub dark_times: Vec<f64>,
    #[arg(long, requires = "dark_times")]
    pub t1_ms: Option<f64>,
    #[arg(long, default_value_t = 0.0, requires = "dark_times")]
    pub floor: f64,
}

#[derive(Debug, Args)]
pub struct FitPeaksArgs {
    /// CSV with `freq_mhz,contrast` or `freq_ghz,intensity`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub peaks: usize,
}

#[derive(Debug, Args)]
pub struct FitDecayArgs {
    /// CSV with `time_ns,value` or `dark_time_ms,ratio`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Fit a constant floor.
    #[arg(long)]
    pub floor: bool,
}

#[derive(Debug, Args)]
pub struct FitT1Args {
    /// CSV with `temperature_k,t1_ms` and optional `t1_ms_err`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DELTA_GHZ)]
    pub delta_ghz: f64,
    /// Fit the phonon energy, starting from `--delta-ghz`.
    #[arg(long)]
    pub free_delta: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeSet {
    /// Spin-orbit and Jahn-Teller magnitudes.
    Splittings,
    /// Also both orbital quenching factors.
    All,
}

#[derive(Debug, Args)]
pub struct FitFieldArgs {
    /// CSV with one observed line per row: `b_tesla,freq_offset_ghz`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FreeSet::Splittings)]
    pub free: FreeSet,
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context { cli, config };
    match &cli.command {
        Command::SimulateSpectrum(a) => simulate_spectrum(&ctx, a),
        Command::SweepField(a) => sweep_field(&ctx, a),
        Command::SimulatePumping(a) => simulate_pumping(&ctx, a),
        Command::SimulateG2(a) => simulate_g2(&ctx, a),
        Command::T1Model(a) => t1_model(&ctx, a),
        Command::FitPeaks(a) => fit_peaks(&ctx, a),
        Command::FitDecay(a) => fit_decay(&ctx, a),
        Command::FitT1(a) => fit_t1(&ctx, a),
        Command::FitField(a) => fit_field(&ctx, a),
    }
}

struct Context<'a> {
    cli: &'a Cli,
    config: RunConfig,
}

impl Context<'_> {
    fn temperature(&self, flag: Option<f64>) -> Result<f64, CliError> {
        let t = flag.unwrap_or(self.config.temperature_k);
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("temperature must be positive, got {t}")));
        }
        Ok(t)
    }

    /// Single field magnitude: flag, then config, then `default`.
    fn magnitude(&self, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        let b = match (flag, &self.config.field) {
            (Some(b), _) => b,
            (None, Some(f)) => match (f.magnitude_tesla, f.sweep) {
                (Some(b), _) => b,
                (None, Some(_)) => {
                    return Err(CliError::Config("this command takes field.magnitude_tesla, not a sweep".into()));
                }
                (None, None) => default,
            },
            (None, None) => default,
        };
        if !(b >= 0.0) || !b.is_finite() {
            return Err(CliError::Usage(format!("field magnitude must be non-negative, got {b}")));
        }
        Ok(b)
    }

    fn geometry(&self) -> Result<SweepGeometry, CliError> {
        Ok(SweepGeometry { direction: self.config.direction_or(DIR_001)?, axis: self.config.axis()? })
    }

    fn output_path(&self, format: OutputFormat) -> Result<Option<PathBuf>, CliError> {
        if let Some(path) = &self.cli.out {
            return Ok(Some(path.clone()));
        }
        match &self.config.output {
            Some(out) => {
                if out.format.is_some_and(|f| f != format) {
                    return Err(CliError::Config(format!(
                        "output format {:?} does not match this command's {format:?} output",
                        out.format.expect("checked")
                    )));
                }
                Ok(Some(out.path.clone()))
            }
            None => Ok(None),
        }
    }

    fn emit(&self, format: OutputFormat, bytes: &[u8]) -> Result<(), CliError> {
        match self.output_path(format)? {
            Some(path) => io::write_atomic(&path, bytes),
            None => std::io::stdout().write_all(bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }

    fn emit_csv(&self, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        self.emit(OutputFormat::Csv, &io::csv_bytes(header, rows)?)
    }

    fn emit_xy(&self, header: [&str; 2], x: &[f64], y: &[f64]) -> Result<(), CliError> {
        let rows: Vec<Vec<Cell>> = x.iter().zip(y).map(|(a, b)| vec![Cell::Num(*a), Cell::Num(*b)]).collect();
        self.emit_csv(&header, &rows)
    }

    fn emit_json(&self, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.emit(OutputFormat::Json, text.as_bytes())
    }

    fn note(&self, message: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("{}", message.as_ref());
        }
    }
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points).map(|k| start + (stop - start) * k as f64 / (points - 1) as f64).collect()
}

fn simulate_spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<(), CliError> {
    let temperature = ctx.temperature(a.temperature_k)?;
    let b = ctx.magnitude(a.b_tesla, 0.0)?;
    let geometry = ctx.geometry()?;
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let field = FieldConfig::along(geometry.direction, b, geometry.axis);
    let p = &ctx.config.defect;
    let gs = manifold_eigensystem(p, Manifold::Ground, &field)?;
    let es = manifold_eigensystem(p, Manifold::Excited, &field)?;
    let lines = transition_table(&gs, &es, temperature)?;

    let margin = 20.0 * a.fwhm_ghz;
    let lo = a.freq_min.unwrap_or_else(|| lines.iter().map(|l| l.freq_offset).fold(f64::INFINITY, f64::min) - margin);
    let hi =
        a.freq_max.unwrap_or_else(|| lines.iter().map(|l| l.freq_offset).fold(f64::NEG_INFINITY, f64::max) + margin);
    if !(lo < hi) {
        return Err(CliError::Usage(format!("frequency range [{lo}, {hi}] is empty")));
    }
    let spectrum = synthesize_spectrum(&lines, a.fwhm_ghz, &linspace(lo, hi, a.points))?;
    ctx.note(format!("{} lines at {b} T, {temperature} K", lines.len()));
    ctx.emit_xy(["freq_ghz", "intensity"], &spectrum.x, &spectrum.y)
}

fn sweep_field(ctx: &Context, a: &SweepArgs) -> Result<(), CliError> {
    let temperature = ctx.temperature(a.temperature_k)?;
    let configured = ctx.config.field.as_ref().and_then(|f| f.sweep);
    if configured.is_none() && a.stop.is_none() {
        return Err(CliError::Usage("sweep-field needs a sweep in the config or --stop".into()));
    }
    let base = configured.unwrap_or(SweepSpec { start: 0.0, stop: 0.0, steps: 19 });
    let sweep = SweepSpec {
        start: a.start.unwrap_or(base.start),
        stop: a.stop.unwrap_or(base.stop),
        steps: a.steps.unwrap_or(base.steps),
    };
    validate_sweep(&sweep).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut geometry = ctx.geometry()?;
    if let Some(d) = &a.direction {
        geometry.direction = parse_miller(d).map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let points = field_sweep(&ctx.config.defect, &sweep.magnitudes(), geometry, temperature)?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .flat_map(|pt| {
            pt.lines.iter().map(move |l| {
                vec![
                    Cell::Num(pt.b_tesla),
                    Cell::Text(l.label()),
                    Cell::Num(l.freq_offset),
                    Cell::Num(l.intensity),
                    Cell::Num(l.thermal_weight),
                ]
            })
        })
        .collect();
    ctx.note(format!("{} field points, {} rows", points.len(), rows.len()));
    ctx.emit_csv(&["b_tesla", "line_label", "freq_offset_ghz", "intensity", "thermal_weight"], &rows)
}

fn simulate_pumping(ctx: &Context, a: &PumpingArgs) -> Result<(), CliError> {
    let temperature = ctx.temperature(a.temperature_k)?;
    let b = ctx.magnitude(a.b_tesla, DEFAULT_PUMP_FIELD_T)?;
    let geometry = ctx.geometry()?;
    let defaults = PumpingConfig::default();
    let config = PumpingConfig {
        pump_rate: a.pump_rate.unwrap_or(defaults.pump_rate),
        radiative_rate: a.radiative_rate.unwrap_or(defaults.radiative_rate),
        spin_flip_rate: a.spin_flip_rate.unwrap_or(defaults.spin_flip_rate),
        temperature_k: temperature,
    };
    let field = FieldConfig::along(geometry.direction, b, geometry.axis);
    let p = &ctx.config.defect;
    let gs = manifold_eigensystem(p, Manifold::Ground, &field)?;
    let es = manifold_eigensystem(p, Manifold::Excited, &field)?;
    let lines = transition_table(&gs, &es, temperature)?;
    let model = build_pumping_model(&lines, &a.pump_line, &config)?;
    let readout = a.readout_line.as_deref().unwrap_or(&a.pump_line);
    let result = pumping_trace(&model, &a.initial, a.duration_ns, readout)?;
    ctx.note(format!(
        "steady_polarization {} pump_time_constant_ns {}",
        io::format_number(result.steady_polarization),
        io::format_number(result.pump_time_constant)
    ));
    ctx.emit_xy(["time_ns", "value"], &result.trace.x, &result.trace.y)
}

fn simulate_g2(ctx: &Context, a: &G2Args) -> Result<(), CliError> {
    if !(a.lifetime_ns > 0.0) || !(a.tau_max_ns > 0.0) || a.points < 2 {
        return Err(CliError::Usage("lifetime and delay range must be positive with at least 2 points".into()));
    }
    let params = G2Params {
        rabi: 2.0 * std::f64::consts::PI * a.rabi_ghz,
        gamma: 1.0 / a.lifetime_ns,
        extra_dephasing: a.dephasing,
        irf_sigma: a.irf_ns,
    };
    let grid = linspace(-a.tau_max_ns, a.tau_max_ns, a.points);
    let curve = g2_curve(&params, &grid)?;
    let min = curve.y.iter().copied().fold(f64::INFINITY, f64::min);
    ctx.note(format!("minimum g2 {}", io::format_number(min)));
    ctx.emit_xy(["tau_ns", "g2"], &curve.x, &curve.y)
}

fn t1_model(ctx: &Context, a: &T1Args) -> Result<(), CliError> {
    if !a.dark_times.is_empty() {
        let t1 = a.t1_ms.ok_or_else(|| CliError::Usage("--dark-times needs --t1-ms".into()))?;
        let ratio = t1_recovery_curve(t1, a.floor, &a.dark_times)?;
        return ctx.emit_xy(["dark_time_ms", "ratio"], &a.dark_times, &ratio);
    }
    if a.temps.is_empty() {
        return Err(CliError::Usage("t1-model needs --temps or --dark-times".into()));
    }
    if !(a.delta_ghz > 0.0) || a.temps.iter().any(|t| !(*t > 0.0)) {
        return Err(CliError::Usage("--delta-ghz and every temperature must be positive".into()));
    }
    let gamma0 = a.gamma0.unwrap_or_else(|| calibrate_gamma0(CALIBRATION_POINT.0, CALIBRATION_POINT.1, a.delta_ghz));
    let t1: Vec<f64> = a.temps.iter().map(|&t| t1_phonon_model(t, a.delta_ghz, gamma0)).collect();
    ctx.note(format!("gamma0_per_ms {}", io::format_number(gamma0)));
    ctx.emit_xy(["temperature_k", "t1_ms"], &a.temps, &t1)
}

/// Picks the first schema whose columns all appear in the file header.
fn detect_schema<'a>(path: &Path, schemas: &[[&'a str; 2]]) -> Result<[&'a str; 2], CliError> {
    let header = io::read_header(path)?;
    schemas.iter().find(|s| s.iter().all(|c| header.iter().any(|h| h == c))).copied().ok_or_else(|| {
        let first = schemas[0].iter().find(|c| !header.iter().any(|h| h == *c)).expect("some column missing");
        CliError::MissingColumn((*first).to_string())
    })
}

fn fit_peaks(ctx: &Context, a: &FitPeaksArgs) -> Result<(), CliError> {
    if a.peaks == 0 {
        return Err(CliError::Usage("--peaks must be at least 1".into()));
    }
    let [x, y] = detect_schema(&a.input, &[["freq_mhz", "contrast"], ["freq_ghz", "intensity"]])?;
    let data = io::load_series_csv(&a.input, x, y)?;
    let (init, _) = auto_initialize_peaks(&data, a.peaks)?;
    let fit = fit_lorentzian_multi(&data, a.peaks, Some(&init))?;
    let unit = x.trim_start_matches("freq_");
    let names: Vec<String> = lorentzian_param_names(a.peaks)
        .into_iter()
        .map(|n| if n.starts_with("center") || n.starts_with("fwhm") { format!("{n}_{unit}") } else { n })
        .collect();
    ctx.note(format!("residual_norm {} converged {}", io::format_number(fit.residual_norm), fit.converged));
    ctx.emit_json(&io::fit_json(&names, &fit, &[]))
}

fn fit_decay(ctx: &Context, a: &FitDecayArgs) -> Result<(), CliError> {
    let [x, y] = detect_schema(&a.input, &[["time_ns", "value"], ["dark_time_ms", "ratio"]])?;
    let data = io::load_series_csv(&a.input, x, y)?;
    // lifetime traces: skip the instrument response around the excitation peak
    let x_min = if x == "time_ns" {
        let peak = (0..data.len()).max_by(|&i, &j| data.y[i].total_cmp(&data.y[j])).expect("non-empty");
        data.x[peak] + IRF_WINDOW_NS
    } else {
        f64::NEG_INFINITY
    };
    let fit = fit_exponential_decay_after(&data, a.floor, x_min)?;
    let unit = if x == "time_ns" { "ns" } else { "ms" };
    let names: Vec<String> = DECAY_PARAM_NAMES
        .iter()
        .map(|n| if *n == "time_constant" { format!("{n}_{unit}") } else { (*n).to_string() })
        .collect();
    ctx.note(format!("time_constant_{unit} {}", io::format_number(fit.params[1])));
    ctx.emit_json(&io::fit_json(&names, &fit, &[]))
}

fn fit_t1(ctx: &Context, a: &FitT1Args) -> Result<(), CliError> {
    let data = io::load_series_csv(&a.input, "temperature_k", "t1_ms")?;
    let delta = if a.free_delta { ActivationEnergy::Free(a.delta_ghz) } else { ActivationEnergy::Fixed(a.delta_ghz) };
    let t1 = fit_t1_vs_temperature(&data, delta)?;
    let names = ["gamma0_per_ms".to_string(), "delta_ghz".to_string()];
    ctx.note(format!("activation_slope_k {}", io::format_number(t1.activation_slope_k)));
    ctx.emit_json(&io::fit_json(&names, &t1.fit, &[("activation_slope_k", t1.activation_slope_k)]))
}

/// Groups one-line-per-row observations by field, in order of first appearance.
fn group_by_field(b: &[f64], freq: &[f64]) -> Vec<FieldObservation> {
    let mut out: Vec<FieldObservation> = Vec::new();
    for (&bt, &f) in b.iter().zip(freq) {
        match out.iter_mut().find(|o| o.b_tesla == bt) {
            Some(o) => o.lines.push(f),
            None => out.push(FieldObservation { b_tesla: bt, lines: vec![f] }),
        }
    }
    out
}

fn fit_field(ctx: &Context, a: &FitFieldArgs) -> Result<(), CliError> {
    let (cols, _) = io::read_columns(&a.input, &["b_tesla", "freq_offset_ghz"], &[])?;
    let observed = group_by_field(&cols[0], &cols[1]);
    let free = match a.free {
        FreeSet::Splittings => FreeMask::SPLITTINGS,
        FreeSet::All => FreeMask::ALL,
    };
    let options =
        FieldFitOptions { restarts: a.restarts, seed: ctx.cli.seed.unwrap_or(0), ..FieldFitOptions::default() };
    let fit = fit_field_dependence(&observed, ctx.geometry()?, &ctx.config.defect, free, &options)?;
    let names: Vec<String> = FIELD_PARAM_NAMES.iter().map(|s| s.to_string()).collect();
    let p = &fit.parameters;
    let extras = [
        ("ground_splitting_ghz", p.zero_field_splitting(Manifold::Ground)),
        ("excited_splitting_ghz", p.zero_field_splitting(Manifold::Excited)),
        ("ground_spin_orbit_fraction", p.spin_orbit_fraction(Manifold::Ground)),
        ("excited_spin_orbit_fraction", p.spin_orbit_fraction(Manifold::Excited)),
    ];
    let mut value = io::fit_json(&names, &fit.fit, &extras);
    value["restart"] = json!(fit.restart);
    ctx.note(format!("spin-orbit fractions {} / {}", io::format_number(extras[2].1), io::format_number(extras[3].1)));
    ctx.emit_json(&value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_keeps_first_appearance_order() {
        let groups = group_by_field(&[1.0, 0.5, 1.0, 0.5], &[10.0, 20.0, 30.0, 40.0]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].b_tesla, 1.0);
        assert_eq!(groups[0].lines, vec![10.0, 30.0]);
        assert_eq!(groups[1].lines, vec![20.0, 40.0]);
    }

    #[test]
    fn linspace_includes_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
