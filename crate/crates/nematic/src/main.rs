//! Command-line driver: configuration parsing, experiment orchestration and
//! artifact output for simulations, correlation analysis, the (A, V)
//! decomposition, regime fitting and front tracking.

use clap::{Parser, Subcommand};
use nematic::config::Config;
use nematic::correlation::{
    ballistic_regime_error, correlate_single, correlate_single_scalar, gaussian_regime_error,
    rate_fit, CorrelationProfile, EnsembleAccumulator, EnsembleSpec, MemberSource,
};
use nematic::dynamics::{
    evolve_scalar, evolve_tensor, evolve_transformed, front_radius, front_speed, SimConfig,
};
use nematic::error::{Error, Result};
use nematic::fixedpoint::{
    geometric_time_grid, picard_solve, save_decomposition, v_decay_check, DecayReport,
};
use nematic::generators::parse_generator;
use nematic::manifest::RunManifest;
use nematic::qio::{
    read_qsf1, read_qtf1, write_diagnostics_csv, write_json, write_qsf1, write_qtf1, write_xy_csv,
};
use nematic::{GridSpec, ModelParams, ScalarField, TensorField};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "nematic",
    version,
    about = "Spectral laboratory for the Landau-de Gennes Q-tensor gradient flow"
)]
struct Cli {
    /// Configuration file (flat key = value sections; see docs/config.md)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Upper bound on worker threads. The current implementation is
    /// single-threaded; higher values are accepted and recorded.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Deterministic mode: zeroed timings so reruns are bit-identical
    #[arg(long, global = true)]
    test_mode: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve initial data and write snapshots plus diagnostics
    Simulate,
    /// Two-point correlation profile of a stored snapshot
    Correlate,
    /// Ensemble (Dirac-mixture) correlation profiles
    Ensemble,
    /// Picard iteration to the (A, V) decomposition
    Decompose,
    /// Fit a decay exponent of an error series and give a verdict
    Regime,
    /// Front radii and front speed from scalar snapshots
    Fronts,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let out_dir = cli
        .out
        .as_deref()
        .ok_or_else(|| Error::Config("--out is required".into()))?;
    let cfg = Config::from_file(config_path)?;
    std::fs::create_dir_all(out_dir)?;
    if cli.threads == 0 {
        return Err(Error::Config("--threads must be at least 1".into()));
    }

    let started = Instant::now();
    let (name, mut manifest) = match cli.command {
        Cmd::Simulate => ("simulate", cmd_simulate(&cfg, out_dir)?),
        Cmd::Correlate => ("correlate", cmd_correlate(&cfg, out_dir)?),
        Cmd::Ensemble => ("ensemble", cmd_ensemble(&cfg, out_dir)?),
        Cmd::Decompose => ("decompose", cmd_decompose(&cfg, out_dir)?),
        Cmd::Regime => ("regime", cmd_regime(&cfg, out_dir)?),
        Cmd::Fronts => ("fronts", cmd_fronts(&cfg, out_dir)?),
    };
    manifest.command = name.to_string();
    manifest.config_digest = cfg.digest();
    manifest.wall_clock_seconds =
        if cli.test_mode { 0.0 } else { started.elapsed().as_secs_f64() };
    manifest.write(out_dir)?;
    Ok(())
}

// ---------------------------------------------------------------- helpers

fn parse_model(cfg: &Config) -> Result<ModelParams> {
    ModelParams::new(
        cfg.require_f64("model", "a")?,
        cfg.require_f64("model", "b")?,
        cfg.require_f64("model", "c")?,
        cfg.get_f64("model", "delta", 1.0)?,
        cfg.get_f64("model", "eta", 0.25)?,
    )
}

fn parse_grid(cfg: &Config) -> Result<GridSpec> {
    GridSpec::new(cfg.require_usize("grid", "n")?, cfg.require_f64("grid", "box_len")?)
}

fn parse_sim(cfg: &Config, grid: GridSpec) -> Result<SimConfig> {
    let dt = cfg.require_f64("sim", "dt")?;
    let mut sim = SimConfig::new(
        grid,
        cfg.get("sim", "scheme").unwrap_or("etd2"),
        dt,
        cfg.require_f64("sim", "t_final")?,
    );
    sim.dt_growth = cfg.get_f64("sim", "dt_growth", 1.0)?;
    sim.dt_max = cfg.get_f64("sim", "dt_max", dt)?;
    sim.snapshot_times = cfg.get_f64_list("sim", "snapshots")?;
    sim.reaction = cfg.get_bool("sim", "reaction", true)?;
    sim.validate()?;
    Ok(sim)
}

/// The `[initial]` section: exactly one of `generator = SPEC` / `file = PATH`.
fn initial_tensor(cfg: &Config, grid: GridSpec) -> Result<TensorField> {
    match (cfg.get("initial", "generator"), cfg.get("initial", "file")) {
        (Some(spec), None) => Ok(parse_generator(spec)?.tensor(grid)),
        (None, Some(path)) => {
            let f = read_qtf1(Path::new(path))?;
            if f.grid != grid {
                return Err(Error::Invalid(format!(
                    "snapshot '{path}' grid does not match [grid] section"
                )));
            }
            Ok(f)
        }
        _ => Err(Error::Config(
            "[initial] must set exactly one of 'generator' or 'file'".into(),
        )),
    }
}

fn initial_scalar(cfg: &Config, grid: GridSpec) -> Result<ScalarField> {
    match (cfg.get("initial", "generator"), cfg.get("initial", "file")) {
        (Some(spec), None) => Ok(parse_generator(spec)?.scalar(grid)),
        (None, Some(path)) => {
            let f = read_qsf1(Path::new(path))?;
            if f.grid != grid {
                return Err(Error::Invalid(format!(
                    "snapshot '{path}' grid does not match [grid] section"
                )));
            }
            Ok(f)
        }
        _ => Err(Error::Config(
            "[initial] must set exactly one of 'generator' or 'file'".into(),
        )),
    }
}

fn time_name(t: f64) -> String {
    format!("{t:.4}")
}

#[derive(Serialize)]
struct ProfileSidecar {
    t: f64,
    n: usize,
    box_len: f64,
    norm_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ballistic_c_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ballistic_error: Option<f64>,
}

/// Write `<stem>.csv` (`r,c`) and the `<stem>.json` sidecar; the regime
/// errors are included when requested in `[correlate]`.
fn write_profile(
    cfg: &Config,
    out_dir: &Path,
    stem: &str,
    prof: &CorrelationProfile,
    manifest: &mut RunManifest,
) -> Result<()> {
    let rows: Vec<(f64, f64)> =
        prof.r_bins.iter().copied().zip(prof.c_values.iter().copied()).collect();
    let csv = format!("{stem}.csv");
    write_xy_csv(&out_dir.join(&csv), ("r", "c"), &rows)?;
    manifest.record_output(&csv);

    let gaussian_error = if cfg.get_bool("correlate", "gaussian", false)? {
        Some(gaussian_regime_error(prof)?)
    } else {
        None
    };
    let (ballistic_c_bar, ballistic_error) = match cfg.get("correlate", "c_bar") {
        Some(_) => {
            let c_bar = cfg.require_f64("correlate", "c_bar")?;
            (Some(c_bar), Some(ballistic_regime_error(prof, c_bar)?))
        }
        None => (None, None),
    };
    let sidecar = ProfileSidecar {
        t: prof.t,
        n: prof.grid.n(),
        box_len: prof.grid.box_len(),
        norm_sq: prof.norm_sq,
        gaussian_error,
        ballistic_c_bar,
        ballistic_error,
    };
    let json = format!("{stem}.json");
    write_json(&out_dir.join(&json), &sidecar)?;
    manifest.record_output(&json);
    Ok(())
}

// ------------------------------------------------------------- subcommands

fn cmd_simulate(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let params = parse_model(cfg)?;
    let grid = parse_grid(cfg)?;
    let sim = parse_sim(cfg, grid)?;
    let kind = cfg.get("sim", "kind").unwrap_or("tensor");

    let mut manifest = RunManifest::new("simulate", "");
    manifest.params = Some(params);
    manifest.grid = Some(grid);

    match kind {
        "tensor" | "transformed" => {
            let q0 = initial_tensor(cfg, grid)?;
            let traj = if kind == "tensor" {
                evolve_tensor(&sim, &params, &q0)?
            } else {
                evolve_transformed(&sim, &params, &q0)?
            };
            for snap in &traj.snapshots {
                let name = format!("q_t{}.qtf1", time_name(snap.time_tag));
                write_qtf1(&out_dir.join(&name), snap)?;
                manifest.record_output(&name);
            }
            write_diagnostics_csv(&out_dir.join("diagnostics.csv"), &traj.diagnostics)?;
        }
        "scalar" => {
            let l0 = initial_scalar(cfg, grid)?;
            let traj = evolve_scalar(&sim, &params, &l0)?;
            for snap in &traj.snapshots {
                let name = format!("l_t{}.qsf1", time_name(snap.time_tag));
                write_qsf1(&out_dir.join(&name), snap)?;
                manifest.record_output(&name);
            }
            write_diagnostics_csv(&out_dir.join("diagnostics.csv"), &traj.diagnostics)?;
        }
        other => {
            return Err(Error::Config(format!(
                "[sim] kind must be tensor, scalar or transformed, got '{other}'"
            )))
        }
    }
    manifest.record_output("diagnostics.csv");
    Ok(manifest)
}

/// Resolve `[correlate] input` to one snapshot: a file path, or a directory
/// plus `time = T`, with an explicit listing of available times on a miss.
fn resolve_snapshot(cfg: &Config) -> Result<(Option<TensorField>, Option<ScalarField>)> {
    let input = cfg.require("correlate", "input")?;
    let path = Path::new(input);
    if path.is_dir() {
        let t_want = cfg.require_f64("correlate", "time")?;
        let mut available = Vec::new();
        let mut entries: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for p in &entries {
            let ext = p.extension().and_then(|e| e.to_str());
            let tag = match ext {
                Some("qtf1") => read_qtf1(p)?.time_tag,
                Some("qsf1") => read_qsf1(p)?.time_tag,
                _ => continue,
            };
            if (tag - t_want).abs() <= 1e-9 * t_want.abs().max(1.0) {
                return Ok(match ext {
                    Some("qtf1") => (Some(read_qtf1(p)?), None),
                    _ => (None, Some(read_qsf1(p)?)),
                });
            }
            available.push(tag);
        }
        return Err(Error::MissingInput(format!(
            "no snapshot at t = {t_want} in '{input}'; available times: {available:?}"
        )));
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("qtf1") => Ok((Some(read_qtf1(path)?), None)),
        Some("qsf1") => Ok((None, Some(read_qsf1(path)?))),
        _ => Err(Error::Invalid(format!(
            "correlate input '{input}' must end in .qtf1 or .qsf1"
        ))),
    }
}

fn cmd_correlate(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let mut manifest = RunManifest::new("correlate", "");
    let prof = match resolve_snapshot(cfg)? {
        (Some(q), _) => correlate_single(&q)?,
        (_, Some(l)) => correlate_single_scalar(&l)?,
        _ => unreachable!(),
    };
    write_profile(cfg, out_dir, "profile", &prof, &mut manifest)?;
    Ok(manifest)
}

fn cmd_ensemble(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let params = parse_model(cfg)?;
    let grid = parse_grid(cfg)?;
    let member_lines = cfg.get_all("ensemble", "member");
    let members = member_lines
        .iter()
        .map(|l| EnsembleSpec::parse_member(l))
        .collect::<Result<Vec<_>>>()?;
    let spec = EnsembleSpec::new(members)?;
    let mut times = cfg.get_f64_list("ensemble", "times")?;
    if times.is_empty() {
        return Err(Error::Config("[ensemble] times must list at least one time".into()));
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut manifest = RunManifest::new("ensemble", "");
    manifest.params = Some(params);
    manifest.grid = Some(grid);

    let mut accs: Vec<EnsembleAccumulator> =
        times.iter().map(|&t| EnsembleAccumulator::new(grid, t)).collect();
    for (weight, source) in &spec.members {
        match source {
            MemberSource::Generator(spec_str) => {
                let q0 = parse_generator(spec_str)?.tensor(grid);
                let mut sim = parse_sim(cfg, grid)?;
                sim.snapshot_times = times.clone();
                if sim.t_final + 1e-12 < *times.last().unwrap() {
                    return Err(Error::Config(
                        "[sim] t_final must cover the last ensemble time".into(),
                    ));
                }
                let traj = evolve_tensor(&sim, &params, &q0)?;
                if traj.snapshots.len() != times.len() {
                    return Err(Error::Numeric(format!(
                        "member '{spec_str}': got {} snapshots for {} requested times",
                        traj.snapshots.len(),
                        times.len()
                    )));
                }
                for (acc, snap) in accs.iter_mut().zip(traj.snapshots.iter()) {
                    acc.add_tensor(snap, *weight)?;
                }
            }
            MemberSource::Path(p) => {
                let f = read_qtf1(p)?;
                let hit = times.iter().position(|&t| {
                    (f.time_tag - t).abs() <= 1e-9 * t.abs().max(1.0)
                });
                match hit {
                    Some(k) => accs[k].add_tensor(&f, *weight)?,
                    None => {
                        return Err(Error::MissingInput(format!(
                            "stored member '{}' is at t = {}, requested times: {times:?}",
                            p.display(),
                            f.time_tag
                        )))
                    }
                }
            }
        }
    }

    let mut gaussian_series = Vec::new();
    for (t, acc) in times.iter().zip(accs.iter()) {
        let prof = acc.finish()?;
        let stem = format!("profile_t{}", time_name(*t));
        write_profile(cfg, out_dir, &stem, &prof, &mut manifest)?;
        if cfg.get_bool("correlate", "gaussian", false)? {
            gaussian_series.push((*t, gaussian_regime_error(&prof)?));
        }
    }
    if gaussian_series.len() >= 5 {
        #[derive(Serialize)]
        struct FitOut {
            slope: f64,
            r_squared: f64,
            series: Vec<(f64, f64)>,
        }
        let (slope, r_squared) = rate_fit(&gaussian_series)?;
        write_json(
            &out_dir.join("gaussian_rate.json"),
            &FitOut { slope, r_squared, series: gaussian_series },
        )?;
        manifest.record_output("gaussian_rate.json");
    }
    Ok(manifest)
}

fn cmd_decompose(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let params = parse_model(cfg)?;
    let grid = parse_grid(cfg)?;
    let q0 = initial_tensor(cfg, grid)?;
    let times = geometric_time_grid(
        cfg.get_f64("decompose", "t0", 0.05)?,
        cfg.get_f64("decompose", "rho", 1.3)?,
        cfg.require_f64("decompose", "t_max")?,
    )?;
    let state = picard_solve(
        &q0,
        &params,
        &times,
        cfg.get_bool("decompose", "reaction", true)?,
        cfg.get_usize("decompose", "max_iter", 40)?,
        cfg.get_f64("decompose", "tol", 1e-9)?,
    )?;
    save_decomposition(&out_dir.join("decomposition"), &state)?;

    #[derive(Serialize)]
    struct DecomposeReport {
        a: nematic::TracelessSym3,
        ratios: Vec<f64>,
        x0_norm_estimate: f64,
        ball_radius: f64,
        warnings: Vec<String>,
        decay: Option<DecayReport>,
    }
    let report = DecomposeReport {
        a: state.a,
        ratios: state.ratios.clone(),
        x0_norm_estimate: state.x0_norm_estimate,
        ball_radius: state.ball_radius,
        warnings: state.warnings.clone(),
        decay: v_decay_check(&state).ok(),
    };
    write_json(&out_dir.join("decompose.json"), &report)?;

    let mut manifest = RunManifest::new("decompose", "");
    manifest.params = Some(params);
    manifest.grid = Some(grid);
    manifest.record_output("decompose.json");
    manifest.record_output("decomposition/A.json");
    manifest.record_output("decomposition/meta.json");
    Ok(manifest)
}

fn cmd_regime(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let input = cfg.require("regime", "input")?;
    let threshold = cfg.require_f64("regime", "threshold")?;
    let path = Path::new(input);
    if !path.exists() {
        return Err(Error::MissingInput(input.to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    let mut series = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header row (t,e)
        }
        let mut cols = line.split(',');
        let (t, e) = (cols.next(), cols.next());
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.trim().parse().ok()).ok_or_else(|| {
                Error::Format {
                    path: input.to_string(),
                    reason: format!("line {}: expected 't,e' numbers, got '{line}'", i + 1),
                }
            })
        };
        series.push((parse(t)?, parse(e)?));
    }
    let (slope, r_squared) = rate_fit(&series)?;
    let pass = slope <= threshold;

    #[derive(Serialize)]
    struct RegimeOut {
        slope: f64,
        r_squared: f64,
        threshold: f64,
        pass: bool,
    }
    write_json(&out_dir.join("regime.json"), &RegimeOut { slope, r_squared, threshold, pass })?;
    println!(
        "slope = {slope:.4} (r^2 = {r_squared:.4}), threshold {threshold}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut manifest = RunManifest::new("regime", "");
    manifest.record_output("regime.json");
    Ok(manifest)
}

fn cmd_fronts(cfg: &Config, out_dir: &Path) -> Result<RunManifest> {
    let dir = cfg.require("fronts", "input_dir")?;
    let level = cfg.require_f64("fronts", "level")?;
    let dir_path = Path::new(dir);
    if !dir_path.is_dir() {
        return Err(Error::MissingInput(format!("'{dir}' is not a directory")));
    }
    let mut snaps = Vec::new();
    let mut entries: Vec<PathBuf> =
        std::fs::read_dir(dir_path)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    for p in entries {
        if p.extension().and_then(|e| e.to_str()) == Some("qsf1") {
            snaps.push(read_qsf1(&p)?);
        }
    }
    if snaps.is_empty() {
        return Err(Error::MissingInput(format!("no .qsf1 snapshots in '{dir}'")));
    }
    snaps.sort_by(|a, b| a.time_tag.partial_cmp(&b.time_tag).unwrap());

    let radii: Vec<(f64, f64)> = snaps
        .iter()
        .filter_map(|s| front_radius(s, level).map(|r| (s.time_tag, r)))
        .collect();
    write_xy_csv(&out_dir.join("fronts.csv"), ("t", "radius"), &radii)?;

    let window = cfg.get_f64_list("fronts", "window")?;
    let window = match window.len() {
        0 => (snaps.first().unwrap().time_tag, snaps.last().unwrap().time_tag),
        2 => (window[0], window[1]),
        _ => {
            return Err(Error::Config(
                "[fronts] window must be 'tmin tmax' (two numbers)".into(),
            ))
        }
    };
    let (c_bar, fit_residual) = front_speed(&snaps, level, window)?;

    #[derive(Serialize)]
    struct FrontsOut {
        level: f64,
        window: (f64, f64),
        c_bar: f64,
        fit_residual: f64,
    }
    write_json(
        &out_dir.join("fronts.json"),
        &FrontsOut { level, window, c_bar, fit_residual },
    )?;
    println!("front speed c_bar = {c_bar:.5} (fit residual {fit_residual:.3e})");

    let mut manifest = RunManifest::new("fronts", "");
    manifest.record_output("fronts.csv");
    manifest.record_output("fronts.json");
    Ok(manifest)
}
