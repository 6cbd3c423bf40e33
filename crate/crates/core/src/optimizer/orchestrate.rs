use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::search::{local_search, Evaluated, SearchConfig, SearchOutcome};
use super::{random_admissible, run_external, BlackBox, BlackBoxResult, ScenarioBlackBox};
use crate::estimator::EstimatorConfig;
use crate::scenario::{deployment_to_json, Deployment, Scenario};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Random admissible deployments, evaluated, sorted and used as
    /// restarts.
    pub initial_samples: usize,
    /// Solver slots running local searches concurrently.
    pub local_searches: usize,
    /// `search.budget` is the evaluation budget of each slot, shared by
    /// the restarts it runs.
    pub search: SearchConfig,
    pub estimator: EstimatorConfig,
    /// Wall-clock limit for the whole run.
    pub budget: Option<Duration>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            initial_samples: 100,
            local_searches: default_local_searches(),
            search: SearchConfig::default(),
            estimator: EstimatorConfig::default(),
            budget: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_samples == 0 {
            return Err(Error::validation("initial_samples", "must be >= 1"));
        }
        if self.local_searches == 0 || self.local_searches > self.initial_samples {
            return Err(Error::validation(
                "local_searches",
                format!("must lie in [1, {}], got {}", self.initial_samples, self.local_searches),
            ));
        }
        if self.search.budget == 0 {
            return Err(Error::validation("budget", "must be >= 1"));
        }
        if !(self.search.mesh_init > 0.0 && self.search.mesh_min > 0.0 && self.search.mesh_min <= self.search.mesh_init) {
            return Err(Error::validation("mesh", "need 0 < mesh_min <= mesh_init"));
        }
        self.estimator.validate()
    }
}

/// The local solver run from each restart.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Builtin,
    /// A process speaking the line protocol of [`super::external`].
    External { program: String, args: Vec<String> },
}

/// One local search per eight cores, between one and five.
pub fn default_local_searches() -> usize {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    (cores / 8).clamp(1, 5)
}

/// A new best feasible objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub elapsed_ms: f64,
    pub objective: f64,
    /// Rank of the restart among the sorted initial samples; `None`
    /// during initial sampling.
    pub restart: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    /// Rank among the sorted initial samples.
    pub restart: usize,
    pub slot: usize,
    pub start_objective: f64,
    pub start_feasible: bool,
    pub best_objective: Option<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Best feasible initial sample.
    pub baseline: Option<Evaluated>,
    pub best: Option<Evaluated>,
    pub restarts: Vec<RestartSummary>,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub baseline_objective: Option<f64>,
    #[serde(serialize_with = "positions")]
    pub baseline: Option<Deployment>,
    pub best_objective: Option<f64>,
    #[serde(serialize_with = "positions")]
    pub best: Option<Deployment>,
    pub restarts: Vec<RestartSummary>,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    pub elapsed_ms: f64,
}

fn positions<S: serde::Serializer>(d: &Option<Deployment>, s: S) -> std::result::Result<S::Ok, S::Error> {
    d.as_ref().map(|d| deployment_to_json(d).positions).serialize(s)
}

/// Evaluation index of the `counter`-th call in phase `tag`
/// (0 for initial sampling, `r + 1` for restart `r`).
pub fn eval_index(tag: u64, counter: u64) -> u64 {
    (tag << 32) | counter
}

/// Feasible points first, by objective; infeasible ones by violation.
fn rank(a: &BlackBoxResult, b: &BlackBoxResult) -> std::cmp::Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (true, true) => a.objective.total_cmp(&b.objective),
        (false, false) => a.violation().total_cmp(&b.violation()),
    }
}

struct Shared {
    best: Option<f64>,
    trace: Vec<TracePoint>,
}

/// Multi-start optimization of `bb` over the box `[lower, upper]`.
///
/// Draws `initial_samples` starting points from `sample`, evaluates and
/// sorts them, then hands them in order to `local_searches` solver slots
/// as each slot becomes idle. A slot stops when its evaluation budget,
/// the restart queue or the wall-clock budget runs out. `observer` sees
/// every new best feasible point as it is found.
pub fn orchestrate(
    bb: &dyn BlackBox,
    sample: &mut dyn FnMut() -> Result<Vec<f64>>,
    lower: &[f64],
    upper: &[f64],
    cfg: &OptimizerConfig,
    solver: &Solver,
    observer: &(dyn Fn(&TracePoint, &Evaluated) + Sync),
) -> Result<SearchReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let deadline = cfg.budget.map(|b| t0 + b);
    let shared = Mutex::new(Shared {
        best: None,
        trace: Vec::new(),
    });
    let record = |e: &Evaluated, restart: Option<usize>| {
        let mut s = shared.lock().expect("trace lock poisoned");
        if s.best.is_none_or(|b| e.result.objective < b) {
            s.best = Some(e.result.objective);
            let p = TracePoint {
                elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
                objective: e.result.objective,
                restart,
            };
            s.trace.push(p);
            observer(&p, e);
        }
    };

    let mut initial = Vec::with_capacity(cfg.initial_samples);
    for i in 0..cfg.initial_samples {
        if i > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let x = sample()?;
        let result = bb.evaluate(&x, eval_index(0, i as u64), 1.0)?;
        let e = Evaluated { x, result };
        if e.result.feasible {
            record(&e, None);
        }
        initial.push(e);
    }
    let mut evaluations = initial.len();
    // stable, so ties keep sampling order
    initial.sort_by(|a, b| rank(&a.result, &b.result));
    let baseline = initial.first().filter(|e| e.result.feasible).cloned();

    let next = AtomicUsize::new(0);
    let slots = cfg.local_searches.min(initial.len());
    let per_slot = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..slots)
            .map(|slot| {
                let (record, next, initial) = (&record, &next, &initial);
                scope.spawn(move || -> Result<Vec<(usize, usize, SearchOutcome)>> {
                    let mut left = cfg.search.budget;
                    let mut done = Vec::new();
                    while left > 0 && !deadline.is_some_and(|d| Instant::now() >= d) {
                        let r = next.fetch_add(1, Ordering::SeqCst);
                        let Some(start) = initial.get(r) else { break };
                        let base = eval_index(r as u64 + 1, 0);
                        let mut improve = |e: &Evaluated| record(e, Some(r));
                        let out = match solver {
                            Solver::Builtin => {
                                let search = SearchConfig { budget: left, ..cfg.search };
                                local_search(bb, &start.x, lower, upper, &search, base, deadline, &mut improve)?
                            }
                            Solver::External { program, args } => {
                                let ext = run_external(
                                    bb, program, args, &start.x, lower, upper, left, base, deadline, &mut improve,
                                )?;
                                SearchOutcome {
                                    start: start.clone(),
                                    best: ext.best,
                                    evaluations: ext.evaluations,
                                }
                            }
                        };
                        if out.evaluations == 0 {
                            // the solver gave up without spending budget
                            done.push((r, slot, out));
                            break;
                        }
                        left -= out.evaluations.min(left);
                        done.push((r, slot, out));
                    }
                    Ok(done)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("local search panicked"))
            .collect::<Vec<_>>()
    });
    let mut runs = Vec::new();
    for done in per_slot {
        runs.extend(done?);
    }
    runs.sort_by_key(|(r, _, _)| *r);

    let mut best = baseline.clone();
    let mut restarts = Vec::with_capacity(runs.len());
    for (r, slot, out) in runs {
        evaluations += out.evaluations;
        restarts.push(RestartSummary {
            restart: r,
            slot,
            start_objective: out.start.result.objective,
            start_feasible: out.start.result.feasible,
            best_objective: out.best.as_ref().map(|e| e.result.objective),
            evaluations: out.evaluations,
        });
        if let Some(e) = out.best {
            if best.as_ref().is_none_or(|b| e.result.objective < b.result.objective) {
                best = Some(e);
            }
        }
    }
    let trace = shared.into_inner().expect("trace lock poisoned").trace;
    Ok(SearchReport {
        baseline,
        best,
        restarts,
        trace,
        evaluations,
        elapsed: t0.elapsed(),
    })
}

/// Optimizes the positions of all scenario sensors.
pub fn optimize(
    sc: &Scenario,
    cfg: &OptimizerConfig,
    solver: &Solver,
    seed: u64,
    observer: &(dyn Fn(&TracePoint, &Evaluated) + Sync),
) -> Result<OptimizationReport> {
    let bb = ScenarioBlackBox::new(
        sc,
        EstimatorConfig {
            seed,
            ..cfg.estimator
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = bb.map.clone();
    let mut sample = || map.flatten(&random_admissible(sc, &mut rng)?);
    let rep = orchestrate(&bb, &mut sample, &map.lower, &map.upper, cfg, solver, observer)?;
    let deploy = |e: &Option<Evaluated>| e.as_ref().map(|e| map.unflatten(&e.x)).transpose();
    Ok(OptimizationReport {
        baseline_objective: rep.baseline.as_ref().map(|e| e.result.objective),
        baseline: deploy(&rep.baseline)?,
        best_objective: rep.best.as_ref().map(|e| e.result.objective),
        best: deploy(&rep.best)?,
        restarts: rep.restarts,
        trace: rep.trace,
        evaluations: rep.evaluations,
        elapsed_ms: rep.elapsed.as_secs_f64() * 1e3,
    })
}
