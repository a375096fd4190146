use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hcgm::bounds::{self, BoundKind};
use hcgm::config::{ProblemSpec, RunConfig, SCHEMA_VERSION};
use hcgm::linalg::DenseMatrix;
use hcgm::problems::{self, DistanceScaling, ProblemInstance, RpcaLoss};
use hcgm::solver::{SolveResult, SolverConfig, Termination};
use hcgm::trace;

/// Homotopy-smoothed conditional gradient solver.
///
/// Set HCGM_LOG (error, warn, info, debug) to control log output.
#[derive(Debug, Parser)]
#[command(name = "hcgm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one or more JSON run configs and write trace CSVs.
    Solve {
        /// Run config; repeat for a batch.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Trace path, one per config; defaults to the config's output.trace.
        #[arg(long)]
        out: Vec<PathBuf>,
        /// Configs solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run a canonical demo and write its traces into a directory.
    Demo {
        name: DemoName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration count; each demo has its own default.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a trace against the convergence guarantees for its config.
    BoundsCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoName {
    Counterexample,
    Clustering,
    Rpca,
    Game,
}

/// Failure carrying its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    fn numeric(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 3,
            error: error.into(),
        }
    }
}

const VIOLATION: u8 = 1;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HCGM_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { config, out, jobs } => cmd_solve(&config, &out, jobs),
        Command::Demo {
            name,
            seed,
            iters,
            out,
        } => cmd_demo(name, seed, iters, &out),
        Command::BoundsCheck { config, trace } => cmd_bounds_check(&config, &trace),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(Failure::config)?;
    RunConfig::from_json(&text)
        .with_context(|| format!("config {}", path.display()))
        .map_err(Failure::config)
}

/// Parent directory must exist and the file name must be present.
fn check_out_path(path: &Path) -> Result<PathBuf, Failure> {
    let name = path.file_name().ok_or_else(|| {
        Failure::config(anyhow::anyhow!(
            "output path {} has no file name",
            path.display()
        ))
    })?;
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let dir = parent
        .canonicalize()
        .with_context(|| format!("output directory {} does not exist", parent.display()))
        .map_err(Failure::config)?;
    Ok(dir.join(name))
}

fn run_config(cfg: &RunConfig) -> Result<(ProblemInstance, SolveResult), Failure> {
    let inst = cfg.build().map_err(Failure::config)?;
    let result = hcgm::solver::solve(&inst.problem, &cfg.solver_config()).map_err(|e| match e {
        hcgm::solver::SolveError::Config(_) | hcgm::solver::SolveError::Problem(_) => {
            Failure::config(e)
        }
        _ => Failure::numeric(e),
    })?;
    Ok((inst, result))
}

fn write_csv(path: &Path, result: &SolveResult, n_terms: usize) -> Result<(), Failure> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::config)?;
    let mut w = BufWriter::new(file);
    trace::write_trace(&mut w, &result.trace, n_terms)
        .and_then(|_| w.flush().map_err(|e| trace::TraceError::Csv(e.into())))
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::config)
}

/// Solves, writes the trace, and reports a non-finite abort after writing.
fn solve_to(cfg: &RunConfig, out: &Path) -> Result<(ProblemInstance, SolveResult), Failure> {
    let (inst, result) = run_config(cfg)?;
    write_csv(out, &result, inst.problem.terms.len())?;
    if let Termination::NonFinite { k } = result.termination {
        return Err(Failure::numeric(anyhow::anyhow!(
            "{}: non-finite iterate at k={k}; partial trace in {}",
            inst.name,
            out.display()
        )));
    }
    if result.oracle_violations > 0 {
        log::warn!(
            "{}: {} inexact oracle contract breaches",
            inst.name,
            result.oracle_violations
        );
    }
    Ok((inst, result))
}

fn summary_line(inst: &ProblemInstance, result: &SolveResult, out: &Path) -> String {
    let last = result.trace.last();
    format!(
        "{}: {} iterations, F_beta {:.6e}, feasibility gap {:.3e} -> {}",
        inst.name,
        result.iterations,
        last.map_or(f64::NAN, |r| r.f_beta),
        last.map_or(f64::NAN, |r| r.total_feas_gap()),
        out.display()
    )
}

fn cmd_solve(configs: &[PathBuf], outs: &[PathBuf], jobs: usize) -> Result<u8, Failure> {
    let loaded = configs
        .iter()
        .map(|p| load_config(p))
        .collect::<Result<Vec<_>, _>>()?;
    if !outs.is_empty() && outs.len() != configs.len() {
        return Err(Failure::config(anyhow::anyhow!(
            "{} configs but {} --out paths",
            configs.len(),
            outs.len()
        )));
    }
    let mut targets = Vec::with_capacity(loaded.len());
    let mut seen = HashSet::new();
    for (i, cfg) in loaded.iter().enumerate() {
        let raw = match (outs.get(i), &cfg.output.trace) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => PathBuf::from(p),
            (None, None) => {
                return Err(Failure::config(anyhow::anyhow!(
                    "no output path for {}: pass --out or set output.trace",
                    configs[i].display()
                )))
            }
        };
        let path = check_out_path(&raw)?;
        if !seen.insert(path.clone()) {
            return Err(Failure::config(anyhow::anyhow!(
                "output path {} used twice",
                path.display()
            )));
        }
        targets.push(path);
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<String, Failure>)>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, loaded.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= loaded.len() {
                    break;
                }
                let r = solve_to(&loaded[i], &targets[i])
                    .map(|(inst, res)| summary_line(&inst, &res, &targets[i]));
                results.lock().expect("no panics while locked").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("no panics while locked");
    results.sort_by_key(|r| r.0);
    let mut first_failure = None;
    for (i, r) in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(f) => {
                eprintln!("error: {}: {:#}", configs[i].display(), f.error);
                first_failure.get_or_insert(f.code);
            }
        }
    }
    Ok(first_failure.unwrap_or(0))
}

fn base_config(problem: ProblemSpec, beta0: f64, iters: usize, seed: u64) -> RunConfig {
    RunConfig {
        schema_version: SCHEMA_VERSION,
        problem,
        solver: SolverConfig::new(beta0, iters).with_seed(seed),
        bounds: Default::default(),
        output: Default::default(),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::config)?;
    fs::write(path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::config)
}

fn slope_or_null(
    result: &SolveResult,
    k_min: usize,
    f: impl Fn(&hcgm::solver::IterationRecord) -> f64,
) -> serde_json::Value {
    bounds::trace_slope(&result.trace, k_min, usize::MAX, f)
        .ok()
        .filter(|s| s.is_finite())
        .map_or(serde_json::Value::Null, |s| json!(s))
}

fn cmd_demo(name: DemoName, seed: u64, iters: Option<usize>, out: &Path) -> Result<u8, Failure> {
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(Failure::config)?;
    match name {
        DemoName::Counterexample => demo_counterexample(seed, iters.unwrap_or(10_000), out),
        DemoName::Clustering => demo_clustering(seed, iters.unwrap_or(3000), out),
        DemoName::Rpca => demo_rpca(seed, iters.unwrap_or(2000), out),
        DemoName::Game => demo_game(seed, iters.unwrap_or(10_000), out),
    }
    .map(|_| 0)
}

fn demo_counterexample(seed: u64, iters: usize, out: &Path) -> Result<(), Failure> {
    let cfg = base_config(ProblemSpec::Counterexample {}, 4.0, iters, seed);
    write_json(&out.join("counterexample.json"), &cfg)?;
    let path = out.join("counterexample_hcgm.csv");
    let (inst, result) = solve_to(&cfg, &path)?;
    println!("{}", summary_line(&inst, &result, &path));

    let opt = inst
        .inputs
        .optimum
        .expect("counterexample optimum is known");
    let classical = problems::classical_cgm_counterexample(iters);
    let cpath = out.join("counterexample_classical.csv");
    let mut w = csv_writer(&cpath)?;
    let mut write = || -> anyhow::Result<()> {
        w.write_record(["k", "x1", "x2", "g_value", "gap"])?;
        for (k, x) in classical.iter().enumerate() {
            let g = x[0].max(x[1]);
            w.write_record([
                (k + 1).to_string(),
                format!("{:.16e}", x[0]),
                format!("{:.16e}", x[1]),
                format!("{g:.16e}"),
                format!("{:.16e}", g - opt),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(Failure::config)?;
    let best = classical
        .iter()
        .map(|x| x[0].max(x[1]) - opt)
        .fold(f64::INFINITY, f64::min);
    let hcgm_gap = result.trace.last().map_or(f64::NAN, |r| r.f_or_nan - opt);
    println!(
        "classical CGM best gap {best:.4}, HCGM final gap {hcgm_gap:.3e} -> {}",
        cpath.display()
    );
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, Failure> {
    csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::config)
}

fn demo_clustering(seed: u64, iters: usize, out: &Path) -> Result<(), Failure> {
    let spec = ProblemSpec::Clustering {
        n_points: 40,
        n_clusters: 3,
        separation: 6.0,
        seed,
        scaling: DistanceScaling::Frobenius,
    };
    let mut cfg = base_config(spec, 1.0, iters, seed);
    cfg.bounds.estimate_dual_norm_iters = Some(iters);
    write_json(&out.join("clustering.json"), &cfg)?;
    let path = out.join("clustering.csv");
    let (inst, result) = solve_to(&cfg, &path)?;
    println!("{}", summary_line(&inst, &result, &path));

    let n = 40;
    let x = DenseMatrix::from_vec(n, n, result.x.clone()).map_err(Failure::numeric)?;
    let rounding = problems::round_clustering(&x, 3, seed);
    let truth = inst.labels.as_deref().unwrap_or_default();
    let accuracy = problems::clustering_accuracy(&rounding.labels, truth, 3);
    let summary = json!({
        "seed": seed,
        "iterations": result.iterations,
        "accuracy": accuracy,
        "coordinate_fallback": rounding.coordinate_fallback,
        "final_feasibility_gap": result.trace.last().map(|r| r.total_feas_gap()),
        "feasibility_gap_slope": slope_or_null(&result, 100, |r| r.total_feas_gap()),
        "final_dual_norm": result.final_dual_norm,
        "labels": rounding.labels,
    });
    write_json(&out.join("clustering_summary.json"), &summary)?;
    println!("rounding accuracy {accuracy:.3}");
    Ok(())
}

fn demo_rpca(seed: u64, iters: usize, out: &Path) -> Result<(), Failure> {
    let spec = |loss| ProblemSpec::Rpca {
        rows: 50,
        cols: 50,
        rank: 3,
        density: 0.1,
        observe_probability: 0.8,
        seed,
        loss,
    };
    let runs = [
        ("ls", RpcaLoss::LeastSquares),
        ("lad", RpcaLoss::LeastAbsolute),
    ];
    let configs: Vec<_> = runs
        .iter()
        .map(|&(tag, loss)| (tag, base_config(spec(loss), 1.0, iters, seed)))
        .collect();
    for (tag, cfg) in &configs {
        write_json(&out.join(format!("rpca_{tag}.json")), cfg)?;
    }
    let outcomes: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(tag, cfg)| {
                let path = out.join(format!("rpca_{tag}.csv"));
                s.spawn(move || solve_to(cfg, &path).map(|r| (path, r)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let mut errors = serde_json::Map::new();
    for ((tag, _), outcome) in configs.iter().zip(outcomes) {
        let (path, (inst, result)) = outcome?;
        println!("{}", summary_line(&inst, &result, &path));
        let truth = inst.low_rank.as_ref().expect("planted matrix is stored");
        errors.insert(
            tag.to_string(),
            json!(problems::relative_error(&result.x, truth)),
        );
    }
    let summary = json!({
        "seed": seed,
        "iterations": iters,
        "relative_error": errors,
    });
    write_json(&out.join("rpca_summary.json"), &summary)?;
    println!(
        "relative recovery error: {}",
        serde_json::Value::Object(errors)
    );
    Ok(())
}

fn demo_game(seed: u64, iters: usize, out: &Path) -> Result<(), Failure> {
    let m = problems::gen_mixed_game(3, 3, seed);
    let rows: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let inst0 = problems::build_matrix_game(m);
    let spec = ProblemSpec::Game {
        matrix: Some(rows),
        size: None,
        seed,
    };
    let cfg = base_config(spec, inst0.beta0, iters, seed);
    write_json(&out.join("game.json"), &cfg)?;
    let path = out.join("game.csv");
    let (inst, result) = solve_to(&cfg, &path)?;
    println!("{}", summary_line(&inst, &result, &path));
    let value = inst.inputs.optimum.expect("game value is computed");
    let summary = json!({
        "seed": seed,
        "iterations": result.iterations,
        "game_value": value,
        "final_value_gap": result.trace.last().map(|r| r.f_or_nan - value),
        "value_gap_slope": slope_or_null(&result, 100, |r| r.f_or_nan - value),
        "strategy": result.x,
    });
    write_json(&out.join("game_summary.json"), &summary)?;
    Ok(())
}

fn cmd_bounds_check(config: &Path, trace_path: &Path) -> Result<u8, Failure> {
    let cfg = load_config(config)?;
    let mut inst = cfg.build().map_err(Failure::config)?;
    let file = File::open(trace_path)
        .with_context(|| format!("cannot open trace {}", trace_path.display()))
        .map_err(Failure::config)?;
    let records = trace::read_trace(file)
        .with_context(|| format!("trace {}", trace_path.display()))
        .map_err(Failure::config)?;
    let n_terms = inst.problem.terms.len();
    if let Some(r) = records.iter().find(|r| r.feas_gaps.len() != n_terms) {
        return Err(Failure::config(anyhow::anyhow!(
            "trace has {} feasibility columns, problem has {n_terms} terms (row k={})",
            r.feas_gaps.len(),
            r.k
        )));
    }
    let solver = cfg.solver_config();
    for r in &records {
        let (_, beta) = solver.schedule(r.k);
        if (r.beta - beta).abs() > 1e-12 * beta.abs().max(1.0) {
            return Err(Failure::config(anyhow::anyhow!(
                "trace row k={} has beta {:e}, config schedule gives {:e}",
                r.k,
                r.beta,
                beta
            )));
        }
    }
    cfg.resolve_dual_norm(&mut inst).map_err(Failure::numeric)?;

    let report = bounds::check_trace(&records, &inst.inputs, cfg.bound_mode());
    println!(
        "{}: {} rows, oracle {:?}",
        inst.name,
        records.len(),
        cfg.bound_mode()
    );
    for (kind, n) in &report.checked {
        println!("  checked {:<26} {n}", kind.label());
    }
    for (kind, why) in &report.skipped {
        println!("  skipped {:<26} {why}", kind.label());
    }
    if report.checked.is_empty() {
        return Err(Failure::config(anyhow::anyhow!(
            "no bound applies: supply bounds.optimum or bounds.dual_norm"
        )));
    }
    match report.violations.first() {
        None => {
            println!("ALL BOUNDS HOLD");
            Ok(0)
        }
        Some(v) => {
            let kinds: HashSet<BoundKind> = report.violations.iter().map(|v| v.kind).collect();
            println!("BOUND VIOLATED: {v}");
            println!(
                "{} violations across {} bound(s)",
                report.violations.len(),
                kinds.len()
            );
            Ok(VIOLATION)
        }
    }
}
