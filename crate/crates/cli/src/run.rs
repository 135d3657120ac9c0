use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use hjc::disorder::{ensemble_p0, ratio_point, DisorderSpec};
use hjc::etrate::{sweep_ratio, RateAxis, RateRow};
use hjc::polaron::{compare_spectrum, compute_p0};
use hjc::solver::SolverOptions;
use hjc::{Error, ModelParams};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::{sci, write_file, OutputFile, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Spectrum,
    P0Sweep,
    DisorderEnsemble,
    EtRate,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Spectrum => "spectrum",
            Subcommand::P0Sweep => "p0-sweep",
            Subcommand::DisorderEnsemble => "disorder-ensemble",
            Subcommand::EtRate => "et-rate",
        }
    }
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    NotConverged(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::NotConverged(m) => write!(f, "solver did not converge: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

fn classify(e: &Error) -> CliError {
    match e {
        Error::NotConverged { .. } | Error::EnsembleFailures { .. } => CliError::NotConverged(e.to_string()),
        Error::Io(m) => CliError::Io(m.clone()),
        _ => CliError::Config(e.to_string()),
    }
}

/// Flag and environment overrides, already merged by the argument parser.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub dense_threshold: Option<usize>,
    pub dump_realizations: bool,
}

/// What a subcommand produced before anything is written.
struct Outcome {
    mode: Option<String>,
    tables: Vec<(String, Vec<u8>)>,
    diagnostics: Value,
    flags: Value,
    /// Points that failed to converge; the run exits with status 3.
    failures: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    mode: Option<String>,
    config_path: PathBuf,
    config: &'a Config,
    seed: u64,
    threads: usize,
    started_unix_seconds: u64,
    duration_seconds: f64,
    status: &'static str,
    failures: Vec<String>,
    flags: Value,
    outputs: Vec<OutputFile>,
    diagnostics: Value,
}

pub fn run(sub: Subcommand, config_path: &Path, out_dir: &Path, ov: &Overrides) -> Result<(), CliError> {
    let mut config = Config::load(config_path).map_err(CliError::Config)?;
    if let Some(s) = ov.seed {
        config.run.seed = s;
    }
    if let Some(t) = ov.threads {
        config.run.threads = Some(t);
    }
    if let Some(d) = ov.dense_threshold {
        config.run.dense_threshold = d;
    }
    if let Some(m) = &ov.mode {
        config.run.mode = Some(m.clone());
    }
    config.run.dump_realizations |= ov.dump_realizations;
    let threads = match config.run.threads {
        Some(0) => return Err(CliError::Config("threads must be >= 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let outcome = pool.install(|| match sub {
        Subcommand::Spectrum => spectrum(&config),
        Subcommand::P0Sweep => p0_sweep(&config),
        Subcommand::DisorderEnsemble => disorder_ensemble(&config),
        Subcommand::EtRate => et_rate(&config),
    })?;
    let duration = clock.elapsed().as_secs_f64();

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut outputs = Vec::new();
    for (name, data) in &outcome.tables {
        outputs.push(write_file(out_dir, name, data).map_err(|e| CliError::Io(format!("{name}: {e}")))?);
    }
    let stem = outcome.tables[0].0.trim_end_matches(".csv").to_string();
    let manifest = Manifest {
        tool: "hjc",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: sub.name(),
        mode: outcome.mode,
        config_path: config_path.to_path_buf(),
        config: &config,
        seed: config.run.seed,
        threads,
        started_unix_seconds: started,
        duration_seconds: duration,
        status: if outcome.failures.is_empty() { "ok" } else { "not_converged" },
        failures: outcome.failures.clone(),
        flags: outcome.flags,
        outputs,
        diagnostics: outcome.diagnostics,
    };
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write_file(out_dir, &format!("{stem}.manifest.json"), &json).map_err(|e| CliError::Io(e.to_string()))?;

    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(outcome.failures.join("; ")))
    }
}

fn solver_options(config: &Config, n_pairs: usize) -> SolverOptions {
    SolverOptions {
        n_pairs,
        tol: config.run.tol,
        max_iter: config.run.max_iter,
        seed: config.run.seed,
        dense_threshold: config.run.dense_threshold,
        krylov_dim: None,
    }
}

fn validated(p: &ModelParams) -> Result<(), CliError> {
    p.validate().map_err(|e| CliError::Config(e.to_string()))
}

fn spectrum(config: &Config) -> Result<Outcome, CliError> {
    let p = config.model().map_err(CliError::Config)?.clone();
    validated(&p)?;
    let opts = solver_options(config, config.run.n_levels);
    let rows = compare_spectrum(&p, &opts).map_err(|e| classify(&e))?;
    let mut t = Table::new(&[
        "index",
        "eigenvalue",
        "residual",
        "branch",
        "m_sym",
        "nonsym_total",
        "dressed_energy",
        "deviation",
    ]);
    for r in &rows {
        t.row([
            r.index.to_string(),
            sci(r.eigenvalue),
            sci(r.residual),
            format!("{:?}", r.nearest.branch).to_lowercase(),
            r.nearest.m_sym.to_string(),
            r.nearest.nonsym_total.to_string(),
            sci(r.nearest.energy),
            sci(r.deviation),
        ]);
    }
    Ok(Outcome {
        mode: None,
        tables: vec![("spectrum.csv".into(), t.into_bytes())],
        diagnostics: json!({ "levels": rows.len(), "dim": hjc::Basis::new(&p).map(|b| b.dim()).ok() }),
        flags: json!({ "dressed_energy": "±√NΩ_e/2 + ω_v(m_sym + Σ m_ν'), O(1/N) Stokes shift dropped" }),
        failures: Vec::new(),
    })
}

fn p0_sweep(config: &Config) -> Result<Outcome, CliError> {
    let template = config.model().map_err(CliError::Config)?;
    let ns = if config.run.n_values.is_empty() {
        vec![template.n_molecules]
    } else {
        config.run.n_values.clone()
    };
    let omegas = if config.run.omega_rabi_values.is_empty() {
        vec![template.omega_rabi]
    } else {
        config.run.omega_rabi_values.clone()
    };
    let mut points = Vec::new();
    for &omega in &omegas {
        for &n in &ns {
            let mut p = template.clone();
            p.n_molecules = n;
            p.omega_rabi = omega;
            validated(&p)?;
            points.push(p);
        }
    }
    let opts = solver_options(config, config.run.n_pairs);
    let results: Vec<_> = points.par_iter().map(|p| compute_p0(p, None, &opts)).collect();

    let mut t = Table::new(&[
        "N",
        "omega_rabi",
        "lambda_e",
        "delta_e",
        "p0",
        "bound",
        "ground_energy",
        "residual",
        "dim",
        "iterations",
        "degeneracy",
        "status",
    ]);
    let mut failures = Vec::new();
    let mut diagnostics = Vec::new();
    for (p, r) in points.iter().zip(&results) {
        let lead = [
            p.n_molecules.to_string(),
            sci(p.omega_rabi),
            sci(p.lambda_e),
            sci(p.delta_e),
        ];
        match r {
            Ok(r) => {
                t.row(lead.into_iter().chain([
                    sci(r.p0),
                    sci(r.bound),
                    sci(r.ground_energy),
                    sci(r.residual),
                    r.dim.to_string(),
                    r.iterations.to_string(),
                    r.degeneracy.to_string(),
                    "ok".to_string(),
                ]));
                diagnostics.push(json!({
                    "N": p.n_molecules, "omega_rabi": p.omega_rabi,
                    "residual": r.residual, "iterations": r.iterations, "dim": r.dim,
                }));
            }
            Err(e) => {
                let c = classify(e);
                if !matches!(c, CliError::NotConverged(_)) {
                    return Err(c);
                }
                failures.push(format!("N={} omega_rabi={}: {e}", p.n_molecules, p.omega_rabi));
                let nan = sci(f64::NAN);
                t.row(lead.into_iter().chain([
                    nan.clone(),
                    sci(hjc::polaron::p0_bound(p.lambda_e, p.n_molecules)),
                    nan.clone(),
                    nan,
                    String::new(),
                    String::new(),
                    String::new(),
                    "not_converged".to_string(),
                ]));
                diagnostics.push(json!({ "N": p.n_molecules, "omega_rabi": p.omega_rabi, "error": e.to_string() }));
            }
        }
    }
    Ok(Outcome {
        mode: config.run.mode.clone(),
        tables: vec![("p0_sweep.csv".into(), t.into_bytes())],
        diagnostics: json!({ "points": diagnostics, "solver": opts }),
        flags: json!({ "target": "undisplaced lower dressed state, phase from the 2x2 cavity block" }),
        failures,
    })
}

fn disorder_ensemble(config: &Config) -> Result<Outcome, CliError> {
    let template = config.model().map_err(CliError::Config)?;
    validated(template)?;
    let section = config.disorder().map_err(CliError::Config)?;
    // Every Ω_e/σ point reuses the same seed, so the draws differ only by scale.
    let spec = DisorderSpec {
        sigma: section.sigma,
        n_realizations: section.n_realizations,
        seed: config.run.seed,
    };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let ratios = if config.run.ratios.is_empty() {
        return Err(CliError::Config("[run] ratios must list at least one Ω_e/σ value".into()));
    } else {
        config.run.ratios.clone()
    };
    let opts = solver_options(config, config.run.n_pairs);

    let mut t = Table::new(&[
        "ratio", "omega_rabi", "sigma", "n_ok", "n_failed", "mean", "std", "std_error", "min", "p5", "p25", "p50",
        "p75", "p95", "max", "spread_90", "bound", "max_residual", "status",
    ]);
    let mut dump = Table::new(&["ratio", "realization", "p0"]);
    let mut failures = Vec::new();
    let mut diagnostics = Vec::new();
    for &ratio in &ratios {
        let (p, s) = ratio_point(template, &spec, section.axis, ratio).map_err(|e| CliError::Config(e.to_string()))?;
        match ensemble_p0(&p, &s, &opts, config.run.dump_realizations) {
            Ok(st) => {
                let mut row = vec![
                    sci(ratio),
                    sci(st.omega_rabi),
                    sci(st.sigma),
                    st.n_ok.to_string(),
                    st.n_failed.to_string(),
                    sci(st.mean),
                    sci(st.std),
                    sci(st.std_error()),
                    sci(st.min),
                ];
                row.extend(st.percentiles.iter().map(|&x| sci(x)));
                row.extend([sci(st.max), sci(st.spread_90()), sci(st.bound), sci(st.max_residual), "ok".into()]);
                t.row(row);
                if let Some(samples) = &st.samples {
                    for (i, x) in samples.iter().enumerate() {
                        dump.row([sci(ratio), i.to_string(), sci(*x)]);
                    }
                }
                diagnostics.push(json!({
                    "ratio": ratio, "n_failed": st.n_failed, "max_residual": st.max_residual,
                }));
            }
            Err(e) => {
                let c = classify(&e);
                if !matches!(c, CliError::NotConverged(_)) {
                    return Err(c);
                }
                failures.push(format!("ratio={ratio}: {e}"));
                let mut row = vec![sci(ratio), sci(p.omega_rabi), sci(s.sigma)];
                row.extend((0..15).map(|_| String::new()));
                row.push("not_converged".into());
                t.row(row);
                diagnostics.push(json!({ "ratio": ratio, "error": e.to_string() }));
            }
        }
    }
    let mut tables = vec![("disorder_ensemble.csv".to_string(), t.into_bytes())];
    if config.run.dump_realizations {
        tables.push(("disorder_realizations.csv".into(), dump.into_bytes()));
    }
    Ok(Outcome {
        mode: config.run.mode.clone(),
        tables,
        diagnostics: json!({ "points": diagnostics, "solver": opts }),
        flags: json!({
            "seeding": "ChaCha8 seeded with the run seed, stream = realization index; N normal draws then one u64 solver seed",
            "percentiles": "linear interpolation between order statistics",
            "ratio_axis": section.axis,
        }),
        failures,
    })
}

fn et_rate(config: &Config) -> Result<Outcome, CliError> {
    let template = config.etrate().map_err(CliError::Config)?;
    template.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let mode = config
        .run
        .mode
        .clone()
        .ok_or_else(|| CliError::Config("et-rate needs --mode fig3a or fig3b".into()))?;
    let (axis, values, drives, axis_name) = match mode.as_str() {
        "fig3a" => {
            let drives = if config.run.delta_e_values.is_empty() {
                vec![template.delta_e_drive]
            } else {
                config.run.delta_e_values.clone()
            };
            (RateAxis::N, config.run.molecule_counts.clone(), drives, "N")
        }
        "fig3b" => (
            RateAxis::LambdaRatio,
            config.run.lambda_ratios.clone(),
            vec![template.delta_e_drive],
            "lambda_ratio",
        ),
        other => return Err(CliError::Config(format!("unknown et-rate mode {other:?} (fig3a, fig3b)"))),
    };
    if values.is_empty() {
        let key = if axis == RateAxis::N { "molecule_counts" } else { "lambda_ratios" };
        return Err(CliError::Config(format!("[run] {key} must not be empty for {mode}")));
    }
    let rows = sweep_ratio(template, axis, &values, &drives).map_err(|e| classify(&e))?;
    let mut t = Table::new(&[
        axis_name,
        "delta_e",
        "n_molecules",
        "lambda_d",
        "lambda_a",
        "k_et",
        "k0",
        "ratio",
        "eq7_ratio",
        "k_et_no_stokes",
        "ratio_no_stokes",
        "lineshape",
        "gamma_v",
        "kbt",
    ]);
    let lineshape = format!("{:?}", template.lineshape).to_lowercase();
    for r in &rows {
        let RateRow {
            axis_value,
            delta_e,
            n_molecules,
            lambda_d,
            lambda_a,
            k_et,
            k0,
            ratio,
            eq7_ratio,
            k_et_no_stokes,
            ratio_no_stokes,
        } = *r;
        t.row([
            sci(axis_value),
            sci(delta_e),
            sci(n_molecules),
            sci(lambda_d),
            sci(lambda_a),
            sci(k_et),
            sci(k0),
            sci(ratio),
            sci(eq7_ratio),
            sci(k_et_no_stokes),
            sci(ratio_no_stokes),
            lineshape.clone(),
            sci(template.gamma_v),
            sci(template.kbt),
        ]);
    }
    let worst = rows
        .iter()
        .map(|r| (r.ratio / r.eq7_ratio - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        mode: Some(mode.clone()),
        tables: vec![(format!("et_rate_{mode}.csv"), t.into_bytes())],
        diagnostics: json!({ "rows": rows.len(), "max_relative_deviation_from_eq7": worst }),
        flags: json!({
            "lineshape": template.lineshape,
            "include_stokes_shift": template.include_stokes_shift,
            "cavity_donor": "model: polariton weight 1/2, per-site displacement lambda_d/(2N), Stokes shift omega_v lambda_d^2/(4N)",
            "rate_units": "2 pi V^2 applied; ratios are V-independent",
        }),
        failures: Vec::new(),
    })
}
