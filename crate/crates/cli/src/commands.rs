use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};

use imposter::feedback::{
    run_open_loop, run_tracking, tracking_residual, FeedbackConfig, TimeGrid, TrackingResult,
};
use imposter::grid::AtomSystem;
use imposter::lattice::HubbardSystem;
use imposter::pulse::{ati_matched_field, hhg_cutoff, hhg_matched_field, ponderomotive_energy};
use imposter::spectrum::{
    compare_spectra, detect_cutoff, power_spectrum, CutoffOptions, Spectrum, Window,
};
use imposter::{PulseSpec, TimeSeries};

use crate::config::{ExperimentConfig, Platform};
use crate::error::{CliError, CliResult};
use crate::output::{self, Table};

/// Environment variable capping the worker threads of a gain sweep.
pub const THREADS_ENV: &str = "IMPOSTER_THREADS";

fn pulse_of(config: &ExperimentConfig) -> CliResult<PulseSpec> {
    match config {
        ExperimentConfig::Atom(c) => c.pulse(),
        ExperimentConfig::Hubbard(c) => c.pulse(),
    }
}

fn dt_of(config: &ExperimentConfig) -> f64 {
    match config {
        ExperimentConfig::Atom(c) => c.numerics.dt,
        ExperimentConfig::Hubbard(c) => c.numerics.dt,
    }
}

/// Calibrate softenings and fill half-filling defaults so the config is explicit.
pub fn resolve(config: &mut ExperimentConfig) -> CliResult<()> {
    match config {
        ExperimentConfig::Atom(c) => {
            c.resolve_atoms()?;
        }
        ExperimentConfig::Hubbard(c) => c.resolve(),
    }
    Ok(())
}

fn pulse_json(config: &ExperimentConfig, pulse: &PulseSpec, grid: &TimeGrid) -> Value {
    let units = match config {
        ExperimentConfig::Atom(_) => "atomic units".to_string(),
        ExperimentConfig::Hubbard(c) => format!(
            "lattice units: energy t0 = {} eV, time hbar/t0 = {} fs, field in t0/(e a)",
            c.lattice.hopping_ev,
            c.experiment().time_unit_fs()
        ),
    };
    json!({
        "units": units,
        "amplitude": pulse.amplitude(),
        "omega": pulse.omega(),
        "cycles": pulse.cycles(),
        "duration": pulse.duration(),
        "dt": grid.dt,
        "steps": grid.steps,
        "samples": grid.samples(),
    })
}

/// Open-loop run of the reference system.
pub fn reference_run(config: &ExperimentConfig) -> CliResult<(TrackingResult, f64)> {
    let pulse = pulse_of(config)?;
    let grid = TimeGrid::for_pulse(&pulse, dt_of(config))?;
    match config {
        ExperimentConfig::Atom(c) => {
            let (atom, _) = c.clone().resolve_atoms()?;
            let mut system = AtomSystem::prepare(&atom, &c.numerics()?)?;
            let ground = system.ground_energy();
            Ok((run_open_loop(&mut system, &pulse, grid)?, ground))
        }
        ExperimentConfig::Hubbard(c) => {
            let (model, _) = c.models()?;
            let e = c.experiment();
            let mut system = HubbardSystem::prepare(model, e.n_up, e.n_down, &c.numerics()?)?;
            let ground = system.ground_energy();
            Ok((run_open_loop(&mut system, &pulse, grid)?, ground))
        }
    }
}

/// Closed-loop run of the driven system against `reference`.
pub fn tracking_run(
    config: &ExperimentConfig,
    reference: &TimeSeries,
    gain: f64,
) -> CliResult<(TrackingResult, f64)> {
    let pulse = pulse_of(config)?;
    let grid = TimeGrid::for_pulse(&pulse, dt_of(config))?;
    let feedback = FeedbackConfig {
        gain,
        ..config.feedback().to_config()?
    };
    feedback.validate()?;
    match config {
        ExperimentConfig::Atom(c) => {
            let (_, atom) = c.clone().resolve_atoms()?;
            let mut system = AtomSystem::prepare(&atom, &c.numerics()?)?;
            let ground = system.ground_energy();
            Ok((run_tracking(&mut system, reference, &pulse, grid, &feedback)?, ground))
        }
        ExperimentConfig::Hubbard(c) => {
            let (_, model) = c.models()?;
            let e = c.experiment();
            let mut system = HubbardSystem::prepare(model, e.n_up, e.n_down, &c.numerics()?)?;
            let ground = system.ground_energy();
            Ok((run_tracking(&mut system, reference, &pulse, grid, &feedback)?, ground))
        }
    }
}

fn platform_name(platform: Platform) -> &'static str {
    match platform {
        Platform::Atom => "atom",
        Platform::Hubbard => "hubbard",
    }
}

/// Writes `reference.csv`, its sidecar and the materialized config into `out`.
pub fn cmd_run_reference(config: &ExperimentConfig, out: &Path) -> CliResult<TrackingResult> {
    output::create_dir(out)?;
    output::write_text(&out.join("config.toml"), &config.to_toml())?;
    let (result, ground) = reference_run(config)?;
    let stride = config.feedback().output_stride;
    let table = output::reference_table(&result).strided(stride);
    let csv = out.join("reference.csv");
    table.write_csv(&csv)?;
    let pulse = pulse_of(config)?;
    output::write_json(
        &output::sidecar(&csv),
        &json!({
            "command": "run-reference",
            "version": env!("CARGO_PKG_VERSION"),
            "platform": platform_name(config.platform()),
            "seed": config.seed(),
            "columns": table.headers,
            "rows": table.rows(),
            "output_stride": stride,
            "pulse": pulse_json(config, &pulse, &result.grid),
            "ground_energy": ground,
            "response_rms": TimeSeries::new(0.0, result.grid.dt, result.response.clone(), "Y")?.rms(),
            "config": config.to_json(),
        }),
    )?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingSummary {
    pub gain: f64,
    pub residual: f64,
    pub relative: bool,
    pub guard_trips: usize,
    pub gate_passed: bool,
    pub dir: PathBuf,
}

fn write_tracking(
    config: &ExperimentConfig,
    out: &Path,
    result: &TrackingResult,
    ground: f64,
    reference_source: &str,
) -> CliResult<TrackingSummary> {
    output::create_dir(out)?;
    output::write_text(&out.join("config.toml"), &config.to_toml())?;
    let stride = config.feedback().output_stride;
    let table = output::tracking_table(result).strided(stride);
    let csv = out.join("tracking.csv");
    table.write_csv(&csv)?;
    let residual = tracking_residual(result);
    let gate = config.feedback().gate;
    let gate_passed = gate.is_none_or(|g| residual.value <= g);
    let trips = result.guard_trips();
    let max_abs = result.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_control = result.control.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let pulse = pulse_of(config)?;
    output::write_json(
        &output::sidecar(&csv),
        &json!({
            "command": "run-tracking",
            "version": env!("CARGO_PKG_VERSION"),
            "platform": platform_name(config.platform()),
            "seed": config.seed(),
            "reference": reference_source,
            "columns": table.headers,
            "rows": table.rows(),
            "output_stride": stride,
            "pulse": pulse_json(config, &pulse, &result.grid),
            "ground_energy": ground,
            "gain": result.gain,
            "residual": {
                "relative_rms": residual.value,
                "relative": residual.relative,
                "max_abs": max_abs,
            },
            "max_abs_control": max_control,
            "guard_trips": trips,
            "gate": gate,
            "gate_passed": gate_passed,
            "config": config.to_json(),
        }),
    )?;
    Ok(TrackingSummary {
        gain: result.gain,
        residual: residual.value,
        relative: residual.relative,
        guard_trips: trips.len(),
        gate_passed,
        dir: out.to_path_buf(),
    })
}

/// Reference response either read from `path` or computed and written to `out`.
pub fn obtain_reference(
    config: &ExperimentConfig,
    path: Option<&Path>,
    out: &Path,
) -> CliResult<(TimeSeries, String)> {
    match path {
        Some(p) => {
            let table = Table::read_csv(p)?;
            Ok((table.series("Y", p)?, p.display().to_string()))
        }
        None => {
            let result = cmd_run_reference(config, out)?;
            let series = TimeSeries::new(0.0, result.grid.dt, result.response, "Y")?;
            Ok((series, out.join("reference.csv").display().to_string()))
        }
    }
}

pub fn cmd_run_tracking(
    config: &ExperimentConfig,
    reference: &TimeSeries,
    reference_source: &str,
    out: &Path,
) -> CliResult<TrackingSummary> {
    let (result, ground) = tracking_run(config, reference, config.feedback().gain)?;
    write_tracking(config, out, &result, ground, reference_source)
}

/// Worker count for sweeps: the environment cap, else the available parallelism.
pub fn thread_cap() -> CliResult<usize> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(available),
    }
}

/// One tracking run per gain, each in `out/gain_<k>`, on at most `threads` workers.
pub fn cmd_sweep(
    config: &ExperimentConfig,
    reference: &TimeSeries,
    reference_source: &str,
    gains: &[f64],
    out: &Path,
    threads: usize,
) -> CliResult<Vec<TrackingSummary>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CliResult<TrackingSummary>>>> =
        Mutex::new((0..gains.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, gains.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= gains.len() {
                    break;
                }
                let mut own = config.clone();
                own.feedback_mut().gain = gains[i];
                let dir = out.join(format!("gain_{}", gains[i]));
                let outcome = cmd_run_tracking(&own, reference, reference_source, &dir);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .expect("workers have finished")
        .into_iter()
        .map(|r| r.expect("every gain is claimed by a worker"))
        .collect()
}

pub struct SpectrumRequest<'a> {
    pub input: &'a Path,
    pub column: Option<&'a str>,
    pub omega0: f64,
    pub window: Window,
    pub cutoff: CutoffOptions,
    pub out: &'a Path,
}

fn default_column(table: &Table) -> &'static str {
    if table.column("response").is_some() {
        "response"
    } else {
        "Y"
    }
}

fn load_series(path: &Path, column: Option<&str>) -> CliResult<TimeSeries> {
    let table = Table::read_csv(path)?;
    let column = column.unwrap_or_else(|| default_column(&table));
    table.series(column, path)
}

pub fn spectrum_table(spectrum: &Spectrum, omega0: f64) -> Table {
    let mut table = Table::new();
    table.push("omega", spectrum.frequencies.clone());
    table.push("harmonic_order", spectrum.harmonic_orders(omega0));
    table.push("power", spectrum.power.clone());
    table
}

/// Writes `spectrum.csv` and its sidecar; returns the detected cutoff order.
pub fn cmd_spectrum(request: &SpectrumRequest) -> CliResult<usize> {
    let series = load_series(request.input, request.column)?;
    let spectrum = power_spectrum(&series, request.window)?;
    output::create_dir(request.out)?;
    let csv = request.out.join("spectrum.csv");
    spectrum_table(&spectrum, request.omega0).write_csv(&csv)?;
    let cutoff = detect_cutoff(&spectrum, request.omega0, &request.cutoff);
    let cutoff_json = match &cutoff {
        Ok(c) => json!({
            "order": c.order,
            "frequency": c.frequency,
            "plateau_db": c.plateau_db,
            "floor_db": c.floor_db,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    output::write_json(
        &output::sidecar(&csv),
        &json!({
            "command": "spectrum",
            "version": env!("CARGO_PKG_VERSION"),
            "input": request.input.display().to_string(),
            "column": series.label(),
            "omega0": request.omega0,
            "window": request.window.name(),
            "samples": spectrum.samples,
            "resolution": spectrum.resolution(),
            "total_power": spectrum.total_power(),
            "detector": {
                "drop_db": request.cutoff.drop_db,
                "start_order": request.cutoff.start_order,
                "patience": request.cutoff.patience,
                "dynamic_range_db": request.cutoff.dynamic_range_db,
            },
            "cutoff": cutoff_json,
        }),
    )?;
    Ok(cutoff?.order)
}

pub struct CompareRequest<'a> {
    pub a: &'a Path,
    pub b: &'a Path,
    pub column: Option<&'a str>,
    pub omega0: Option<f64>,
    pub window: Window,
    pub cutoff: CutoffOptions,
}

/// Residual statistics of `b` against `a`, plus a spectral comparison when
/// `omega0` is known. The error, if any, is the spectral one.
pub fn cmd_compare(request: &CompareRequest) -> (CliResult<Value>, Option<CliError>) {
    let a = match load_series(request.a, request.column) {
        Ok(s) => s,
        Err(e) => return (Err(e), None),
    };
    let b = match load_series(request.b, request.column) {
        Ok(s) => s,
        Err(e) => return (Err(e), None),
    };
    if !a.same_grid(&b) {
        let e = imposter::Error::GridMismatch(format!(
            "{} has {} samples every {}, {} has {} every {}",
            request.a.display(),
            a.len(),
            a.step(),
            request.b.display(),
            b.len(),
            b.step()
        ));
        return (Err(e.into()), None);
    }
    let residual = imposter::feedback::relative_rms(b.values(), a.values());
    let max_abs = a
        .values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let mut report = json!({
        "a": request.a.display().to_string(),
        "b": request.b.display().to_string(),
        "column_a": a.label(),
        "column_b": b.label(),
        "samples": a.len(),
        "rms_a": a.rms(),
        "rms_b": b.rms(),
        "relative_rms": residual.value,
        "relative": residual.relative,
        "max_abs_difference": max_abs,
    });
    let mut spectral_error = None;
    if let Some(omega0) = request.omega0 {
        let comparison = power_spectrum(&a, request.window)
            .and_then(|sa| Ok((sa, power_spectrum(&b, request.window)?)))
            .and_then(|(sa, sb)| compare_spectra(&sa, &sb, omega0, &request.cutoff));
        report["spectral"] = match comparison {
            Ok(c) => json!({
                "omega0": omega0,
                "window": request.window.name(),
                "cutoff_a": c.cutoff_a.order,
                "cutoff_b": c.cutoff_b.order,
                "order_difference": c.order_difference(),
                "max_abs_ratio_db": c.max_abs_ratio_db(),
                "ratios_db": c.ratios.iter().map(|r| json!([r.order, r.ratio_db])).collect::<Vec<_>>(),
            }),
            Err(e) => {
                let value = json!({ "error": e.to_string() });
                spectral_error = Some(e.into());
                value
            }
        };
    }
    (Ok(report), spectral_error)
}

pub fn render_compare(report: &Value) -> String {
    let num = |v: &Value| v.as_f64().map_or_else(|| v.to_string(), |x| format!("{x:.6e}"));
    let kind = if report["relative"] == true { "relative" } else { "absolute" };
    let mut lines = vec![
        format!("samples              {}", report["samples"]),
        format!("rms a / b            {} / {}", num(&report["rms_a"]), num(&report["rms_b"])),
        format!("{kind} rms diff    {}", num(&report["relative_rms"])),
        format!("max |a - b|          {}", num(&report["max_abs_difference"])),
    ];
    if let Some(s) = report.get("spectral") {
        if let Some(e) = s.get("error") {
            lines.push(format!("spectral comparison failed: {}", e.as_str().unwrap_or("")));
        } else {
            lines.push(format!("cutoff order a / b   {} / {}", s["cutoff_a"], s["cutoff_b"]));
            lines.push(format!("max |ratio| (dB)     {:.3}", s["max_abs_ratio_db"].as_f64().unwrap_or(f64::NAN)));
            for pair in s["ratios_db"].as_array().into_iter().flatten() {
                lines.push(format!("  order {:>3}  {:+.2} dB", pair[0], pair[1].as_f64().unwrap_or(f64::NAN)));
            }
        }
    }
    lines.join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatchMode {
    Hhg,
    Ati,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchRequest {
    pub mode: MatchMode,
    pub omega: f64,
    pub field: Option<f64>,
    pub cutoff: Option<f64>,
    pub ip: Option<f64>,
    pub ip_new: f64,
}

/// Matched field for the new ionization potential, as `key = value` lines.
pub fn cmd_match_intensity(request: &MatchRequest) -> CliResult<Vec<(&'static str, f64)>> {
    let omega = request.omega;
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| CliError::Usage(format!("{flag} is required for this mode")))
    };
    let mut lines = vec![("omega", omega), ("ip_new", request.ip_new)];
    match request.mode {
        MatchMode::Hhg => {
            let cutoff = match request.cutoff {
                Some(c) => c,
                None => {
                    let (field, ip) = (need(request.field, "--field")?, need(request.ip, "--ip")?);
                    lines.push(("field", field));
                    lines.push(("ip", ip));
                    hhg_cutoff(field, omega, ip)?
                }
            };
            let matched = hhg_matched_field(omega, cutoff, request.ip_new)?;
            lines.push(("cutoff", cutoff));
            lines.push(("cutoff_order", cutoff / omega));
            lines.push(("matched_field", matched));
            lines.push(("matched_cutoff", hhg_cutoff(matched, omega, request.ip_new)?));
        }
        MatchMode::Ati => {
            let (field, ip) = (need(request.field, "--field")?, need(request.ip, "--ip")?);
            let matched = ati_matched_field(omega, field, ip, request.ip_new)?;
            lines.push(("field", field));
            lines.push(("ip", ip));
            lines.push(("up_plus_ip", ponderomotive_energy(field, omega)? + ip));
            lines.push(("matched_field", matched));
            lines.push(("matched_up_plus_ip", ponderomotive_energy(matched, omega)? + request.ip_new));
        }
    }
    Ok(lines)
}
