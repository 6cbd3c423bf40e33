use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use covertool::coverage::{eval_constraints, uncovered, ConstraintReport, UncoveredConfig};
use covertool::estimator::{estimate_objective, EstimatorConfig, ObjectiveEstimate};
use covertool::export::{check_schema, pair_file, read_json, region_files, worst_single_fault, write_bundle, PairFile, RegionFile};
use covertool::optimizer::{
    default_local_searches, optimize, OptimizerConfig, ScenarioBlackBox, SearchConfig, Solver,
};
use covertool::scenario::{load_deployment, load_scenario, save_deployment, save_scenario, write_json, Scenario, SCHEMA};
use covertool::{fixtures, Error, Result};

/// Exit code of `evaluate` for an infeasible deployment.
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "covertool", version, about = "Coverage analysis and placement optimization for triangulating sensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a scenario.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the objective of a deployment and check its constraints.
    /// Exits with 2 when the deployment is infeasible.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deployment: PathBuf,
        #[command(flatten)]
        est: Estimation,
    },
    /// Search for a low-cost deployment.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        est: Estimation,
        /// Random initial deployments (restarts).
        #[arg(long, default_value_t = 100)]
        initial: usize,
        /// Concurrent solver slots [default: one per 8 cores, at most 5].
        #[arg(long)]
        solvers: Option<usize>,
        /// Black-box evaluations per solver slot.
        #[arg(long, default_value_t = 500)]
        budget: usize,
        /// Initial mesh size, as a fraction of each coordinate's range.
        #[arg(long, default_value_t = 0.1)]
        mesh_init: f64,
        /// Smallest mesh size, as a fraction of each coordinate's range.
        #[arg(long, default_value_t = 1e-3)]
        mesh_min: f64,
        /// Wall-clock limit; the incumbent is returned when it expires.
        #[arg(long)]
        budget_secs: Option<f64>,
        /// External solver program speaking the line protocol.
        #[arg(long)]
        solver_cmd: Option<String>,
        /// Argument passed to the external solver (repeatable).
        #[arg(long = "solver-arg", allow_hyphen_values = true)]
        solver_args: Vec<String>,
    },
    /// Compute the uncovered regions of a deployment.
    Uncovered {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deployment: PathBuf,
        #[command(flatten)]
        geo: Geometry,
        /// Fault counts [default: 0..=k].
        #[arg(long, value_delimiter = ',')]
        j: Vec<usize>,
        /// Quality level ids [default: all].
        #[arg(long, value_delimiter = ',')]
        q: Vec<String>,
    },
    /// Assemble a viewer bundle from the output of `uncovered`.
    ExportViewer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deployment: PathBuf,
        /// Directory written by `uncovered`.
        #[arg(long)]
        regions: PathBuf,
        #[command(flatten)]
        geo: Geometry,
        /// Leave per-pair regions out of the bundle.
        #[arg(long)]
        no_pairs: bool,
    },
    /// Serve the black box over stdin/stdout: read `EVAL x1 ... xn`, answer
    /// `f c1 ... cm`, stop at `DONE`.
    Blackbox {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        est: Estimation,
    },
    /// Write one of the built-in fixture scenarios.
    Fixture {
        name: FixtureName,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Desk,
    Fco,
    Vic,
}

#[derive(Args, Serialize)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Serialize, Clone, Copy)]
struct Estimation {
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Estimation {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            eps: self.eps,
            delta: self.delta,
            seed: self.seed,
            ..EstimatorConfig::default()
        }
    }
}

#[derive(Args, Serialize, Clone, Copy)]
struct Geometry {
    /// Approximation tolerance in length units.
    #[arg(long, default_value_t = 10.0)]
    rho: f64,
    /// Number of cells the RoI box is split into [default: about 20 along the longest side].
    #[arg(long)]
    cells: Option<usize>,
}

#[derive(Serialize)]
struct RunManifest {
    schema: &'static str,
    command: String,
    scenario: Option<PathBuf>,
    config: serde_json::Value,
    seed: Option<u64>,
    version: &'static str,
    outputs: Vec<PathBuf>,
    exit_code: u8,
    wall_ms: f64,
}

/// Outcome of a command: its outputs, exit code and manifest details.
struct Run {
    outputs: Vec<PathBuf>,
    exit: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("covertool: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let t0 = Instant::now();
    let (name, common, seed, config) = describe(&cli.command);
    if let Some(c) = common {
        if c.workers > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(c.workers)
                .build_global()
                .map_err(|e| Error::validation("workers", e.to_string()))?;
        }
    }
    let r = match &cli.command {
        Command::Validate { common } => cmd_validate(common)?,
        Command::Evaluate { common, deployment, est } => cmd_evaluate(common, deployment, est)?,
        Command::Optimize {
            common,
            est,
            initial,
            solvers,
            budget,
            mesh_init,
            mesh_min,
            budget_secs,
            solver_cmd,
            solver_args,
        } => {
            let cfg = OptimizerConfig {
                initial_samples: *initial,
                local_searches: solvers.unwrap_or_else(default_local_searches).min(*initial),
                search: SearchConfig {
                    budget: *budget,
                    mesh_init: *mesh_init,
                    mesh_min: *mesh_min,
                    eps: est.eps,
                },
                estimator: est.config(),
                budget: match budget_secs {
                    Some(s) if !(*s > 0.0 && s.is_finite()) => {
                        return Err(Error::validation("budget-secs", "must be a positive number"))
                    }
                    Some(s) => Some(Duration::from_secs_f64(*s)),
                    None => None,
                },
            };
            let solver = match solver_cmd {
                Some(p) => Solver::External {
                    program: p.clone(),
                    args: solver_args.clone(),
                },
                None => Solver::Builtin,
            };
            cmd_optimize(common, &cfg, &solver, est.seed)?
        }
        Command::Uncovered { common, deployment, geo, j, q } => cmd_uncovered(common, deployment, geo, j, q)?,
        Command::ExportViewer {
            common,
            deployment,
            regions,
            geo,
            no_pairs,
        } => cmd_export(common, deployment, regions, geo, *no_pairs)?,
        Command::Blackbox { scenario, est } => {
            cmd_blackbox(scenario, est)?;
            return Ok(0);
        }
        Command::Fixture { name, out } => {
            let sc = match name {
                FixtureName::Desk => fixtures::desk(),
                FixtureName::Fco => fixtures::fco(13, 3),
                FixtureName::Vic => fixtures::vic(4, 3),
            }?;
            save_scenario(out, &sc)?;
            return Ok(0);
        }
    };
    let common = common.expect("command writes outputs");
    let manifest = RunManifest {
        schema: SCHEMA,
        command: name.to_string(),
        scenario: Some(common.scenario.clone()),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        outputs: r.outputs,
        exit_code: r.exit,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    };
    write_json(common.out.join("manifest.json"), &manifest)?;
    Ok(r.exit)
}

/// Name, shared flags, seed and configuration snapshot of a command.
fn describe(c: &Command) -> (&'static str, Option<&Common>, Option<u64>, serde_json::Value) {
    match c {
        Command::Validate { common } => ("validate", Some(common), None, json!({ "common": common })),
        Command::Evaluate { common, deployment, est } => (
            "evaluate",
            Some(common),
            Some(est.seed),
            json!({ "common": common, "deployment": deployment, "estimator": est }),
        ),
        Command::Optimize {
            common,
            est,
            initial,
            solvers,
            budget,
            mesh_init,
            mesh_min,
            budget_secs,
            solver_cmd,
            solver_args,
        } => (
            "optimize",
            Some(common),
            Some(est.seed),
            json!({
                "common": common, "estimator": est, "initial": initial,
                "solvers": solvers.unwrap_or_else(default_local_searches), "budget": budget,
                "mesh_init": mesh_init, "mesh_min": mesh_min, "budget_secs": budget_secs,
                "solver_cmd": solver_cmd, "solver_args": solver_args,
            }),
        ),
        Command::Uncovered { common, deployment, geo, j, q } => (
            "uncovered",
            Some(common),
            None,
            json!({ "common": common, "deployment": deployment, "geometry": geo, "j": j, "q": q }),
        ),
        Command::ExportViewer {
            common,
            deployment,
            regions,
            geo,
            no_pairs,
        } => (
            "export-viewer",
            Some(common),
            None,
            json!({ "common": common, "deployment": deployment, "regions": regions, "geometry": geo, "no_pairs": no_pairs }),
        ),
        Command::Blackbox { .. } => ("blackbox", None, None, serde_json::Value::Null),
        Command::Fixture { .. } => ("fixture", None, None, serde_json::Value::Null),
    }
}

fn out_dir(common: &Common) -> Result<&Path> {
    std::fs::create_dir_all(&common.out).map_err(|e| Error::io(&common.out, e))?;
    Ok(&common.out)
}

fn cmd_validate(common: &Common) -> Result<Run> {
    let sc = load_scenario(&common.scenario)?;
    let path = out_dir(common)?.join("validation.json");
    write_json(
        &path,
        &json!({
            "schema": SCHEMA,
            "roi_volume": sc.roi_volume(),
            "roi_pieces": sc.roi.len(),
            "obstacles": sc.obstacles.len(),
            "priorities": sc.priorities.iter().map(|p| &p.name).collect::<Vec<_>>(),
            "qualities": sc.qualities.iter().map(|q| &q.id).collect::<Vec<_>>(),
            "sensors": sc.sensors.len(),
            "k": sc.k,
        }),
    )?;
    Ok(Run {
        outputs: vec![path],
        exit: 0,
    })
}

#[derive(Serialize)]
struct EvaluationReport {
    schema: &'static str,
    feasible: bool,
    /// Missing when a sensor lies outside all its cost zones.
    estimate: Option<ObjectiveEstimate>,
    constraints: ConstraintReport,
}

fn cmd_evaluate(common: &Common, deployment: &Path, est: &Estimation) -> Result<Run> {
    let sc = load_scenario(&common.scenario)?;
    let d = load_deployment(deployment)?;
    sc.placed(&d)?;
    let constraints = eval_constraints(&d, &sc)?;
    let estimate = match sc.placement_cost(&d) {
        Ok(_) => Some(estimate_objective(&d, &sc, &est.config())?),
        Err(_) => None,
    };
    let feasible = constraints.feasible() && estimate.is_some();
    let path = out_dir(common)?.join("evaluation.json");
    write_json(
        &path,
        &EvaluationReport {
            schema: SCHEMA,
            feasible,
            estimate,
            constraints,
        },
    )?;
    Ok(Run {
        outputs: vec![path],
        exit: if feasible { 0 } else { EXIT_INFEASIBLE },
    })
}

fn cmd_optimize(common: &Common, cfg: &OptimizerConfig, solver: &Solver, seed: u64) -> Result<Run> {
    let sc = load_scenario(&common.scenario)?;
    let dir = out_dir(common)?.to_path_buf();
    let rep = optimize(&sc, cfg, solver, seed, &|p, _| {
        let from = p.restart.map_or("initial sampling".to_string(), |r| format!("restart {r}"));
        eprintln!("[{:>9.0} ms] incumbent {:.6} ({from})", p.elapsed_ms, p.objective);
    })?;
    let report = dir.join("optimization.json");
    write_json(&report, &json!({ "schema": SCHEMA, "report": rep }))?;
    let mut outputs = vec![report];
    if let Some(best) = &rep.best {
        let p = dir.join("best-deployment.json");
        save_deployment(&p, best)?;
        outputs.push(p);
    } else {
        eprintln!("covertool: no feasible deployment found");
    }
    Ok(Run { outputs, exit: 0 })
}

fn quality_indices(sc: &Scenario, q: &[String]) -> Result<Vec<usize>> {
    if q.is_empty() {
        return Ok((0..sc.qualities.len()).collect());
    }
    q.iter()
        .map(|id| {
            sc.quality_index(id)
                .ok_or_else(|| Error::validation("q", format!("unknown quality level {id:?}")))
        })
        .collect()
}

fn uncovered_config(common: &Common, geo: &Geometry) -> UncoveredConfig {
    UncoveredConfig {
        rho: geo.rho,
        cells: geo.cells,
        workers: common.workers,
    }
}

fn cmd_uncovered(common: &Common, deployment: &Path, geo: &Geometry, j: &[usize], q: &[String]) -> Result<Run> {
    let sc = load_scenario(&common.scenario)?;
    let d = load_deployment(deployment)?;
    let js: Vec<usize> = if j.is_empty() { (0..=sc.k).collect() } else { j.to_vec() };
    if let Some(bad) = js.iter().find(|&&j| j > sc.k) {
        return Err(Error::validation("j", format!("{bad} exceeds the fault budget k = {}", sc.k)));
    }
    let qs = quality_indices(&sc, q)?;
    let res = uncovered(&d, &js, &qs, &sc, &uncovered_config(common, geo))?;
    let dir = out_dir(common)?;
    let mut outputs = Vec::new();
    for f in region_files(&res, &sc, geo.rho) {
        let p = dir.join(f.file_name());
        write_json(&p, &f)?;
        outputs.push(p);
    }
    let p = dir.join("pairs.json");
    write_json(&p, &pair_file(&res.pairs, &sc, geo.rho))?;
    outputs.push(p);
    Ok(Run { outputs, exit: 0 })
}

fn cmd_export(common: &Common, deployment: &Path, regions: &Path, geo: &Geometry, no_pairs: bool) -> Result<Run> {
    let sc = load_scenario(&common.scenario)?;
    let d = load_deployment(deployment)?;
    let entries = std::fs::read_dir(regions).map_err(|e| Error::io(regions, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("uncovered-j") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::validation(
            "regions",
            format!("no uncovered-j*.json files in {}", regions.display()),
        ));
    }
    let mut files = Vec::with_capacity(paths.len());
    for p in &paths {
        let f: RegionFile = read_json(p)?;
        check_schema(&f.schema, p)?;
        files.push(f);
    }
    let pairs = if no_pairs {
        None
    } else {
        let p = regions.join("pairs.json");
        if !p.exists() {
            return Err(Error::validation("regions", format!("missing {}", p.display())));
        }
        let f: PairFile = read_json(&p)?;
        check_schema(&f.schema, &p)?;
        Some(f)
    };
    let worst = worst_single_fault(&d, &sc, &uncovered_config(common, geo))?;
    let outputs = write_bundle(out_dir(common)?, &sc, &d, files, pairs.as_ref(), worst)?;
    Ok(Run { outputs, exit: 0 })
}

fn cmd_blackbox(scenario: &Path, est: &Estimation) -> Result<()> {
    use covertool::optimizer::external::{format_reply, parse_request};
    use covertool::optimizer::BlackBox;
    use std::io::{BufRead, Write};

    let sc = load_scenario(scenario)?;
    let bb = ScenarioBlackBox::new(&sc, est.config());
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    let io_err = |e: std::io::Error| Error::io("<stdio>", e);
    for (i, line) in stdin.lock().lines().enumerate() {
        let line = line.map_err(io_err)?;
        let Some(x) = parse_request(&line, bb.dim())? else {
            break;
        };
        let r = bb.evaluate(&x, i as u64, 1.0)?;
        writeln!(stdout, "{}", format_reply(r.objective, &r.constraints)).map_err(io_err)?;
        stdout.flush().map_err(io_err)?;
    }
    Ok(())
}
