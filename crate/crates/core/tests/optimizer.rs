mod common;

use std::sync::Mutex;
use std::time::Duration;

use covertool::estimator::EstimatorConfig;
use covertool::optimizer::{
    black_box, local_search, optimize, orchestrate, random_admissible, run_external, BlackBox, BlackBoxResult,
    Evaluated, OptimizerConfig, ScenarioBlackBox, SearchConfig, SearchVariableMap, Solver,
};
use covertool::scenario::{Deployment, Scenario, SceneBuilder};
use covertool::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::v;

/// `f(x) = Σ x_i` plus a constant, no constraints.
struct Linear;

impl BlackBox for Linear {
    fn dim(&self) -> usize {
        3
    }
    fn evaluate(&self, x: &[f64], _: u64, _: f64) -> Result<BlackBoxResult> {
        Ok(BlackBoxResult::new(1.0 + x.iter().sum::<f64>(), vec![]))
    }
}

/// One-dimensional objective `|x - 7|` plus a record of every call.
struct Logged(Mutex<Vec<u64>>);

impl BlackBox for Logged {
    fn dim(&self) -> usize {
        1
    }
    fn evaluate(&self, x: &[f64], index: u64, _: f64) -> Result<BlackBoxResult> {
        self.0.lock().unwrap().push(index);
        Ok(BlackBoxResult::new((x[0] - 7.0).abs(), vec![]))
    }
}

/// Two sensors facing a small RoI that both see entirely at 90°.
fn covered_scene() -> Scenario {
    SceneBuilder::new()
        .roi_box([-1.0, 9.0, -1.0], [1.0, 11.0, 1.0])
        .quality("q0", 30.0, 150.0)
        .sensor("a", &[([-12.0, -2.0, -2.0], [-8.0, 2.0, 2.0])], 3.0, &[(50.0, 0.5)])
        .sensor("b", &[([8.0, -2.0, -2.0], [12.0, 2.0, 2.0])], 4.0, &[(50.0, 0.5)])
        .faults(0)
        .weight(0, 0, "all", 1.0)
        .build()
        .unwrap()
}

fn quick_estimator() -> EstimatorConfig {
    EstimatorConfig {
        eps: 0.1,
        delta: 0.1,
        ..EstimatorConfig::default()
    }
}

#[test]
fn random_admissible_box_is_centred() {
    let sc = SceneBuilder::new()
        .roi_box([0.0; 3], [10.0; 3])
        .quality("q0", 20.0, 160.0)
        .sensor("s", &[([2.0, 4.0, 0.0], [6.0, 5.0, 3.0])], 1.0, &[(10.0, 0.0)])
        .build()
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 10_000;
    let mut sum = [0.0; 3];
    for _ in 0..n {
        let p = random_admissible(&sc, &mut rng).unwrap().get("s").unwrap();
        for (s, c) in sum.iter_mut().zip(p.to_array()) {
            *s += c;
        }
    }
    let (center, width) = ([4.0, 4.5, 1.5], [4.0, 1.0, 3.0]);
    for i in 0..3 {
        let sigma = width[i] / (12.0 * n as f64).sqrt();
        let mean = sum[i] / n as f64;
        assert!((mean - center[i]).abs() < 3.0 * sigma, "axis {i}: {mean}");
    }
}

#[test]
fn random_admissible_splits_by_volume() {
    // zone volumes 8 and 24
    let sc = SceneBuilder::new()
        .roi_box([0.0; 3], [10.0; 3])
        .quality("q0", 20.0, 160.0)
        .sensor(
            "s",
            &[([0.0, 0.0, 0.0], [2.0, 2.0, 2.0]), ([6.0, 0.0, 0.0], [10.0, 3.0, 2.0])],
            1.0,
            &[(10.0, 0.0)],
        )
        .build()
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10_000;
    let first = (0..n)
        .filter(|_| random_admissible(&sc, &mut rng).unwrap().get("s").unwrap().x < 4.0)
        .count();
    let p = 8.0 / 32.0;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((first as f64 / n as f64 - p).abs() < 3.0 * sigma, "{first}");
}

#[test]
fn random_admissible_tiny_box_is_constant() {
    let sc = SceneBuilder::new()
        .roi_box([0.0; 3], [10.0; 3])
        .quality("q0", 20.0, 160.0)
        .sensor("s", &[([3.0, 3.0, 3.0], [3.0 + 1e-5, 3.0 + 1e-5, 3.0 + 1e-5])], 1.0, &[(10.0, 0.0)])
        .build()
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let p = random_admissible(&sc, &mut rng).unwrap().get("s").unwrap();
        assert!(p.dist(v(3.0, 3.0, 3.0)) < 2e-5);
    }
}

#[test]
fn variable_map_round_trips_and_bounds_admissible_draws() {
    let sc = covered_scene();
    let map = SearchVariableMap::new(&sc);
    assert_eq!(map.dim(), 6);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let d = random_admissible(&sc, &mut rng).unwrap();
        let x = map.flatten(&d).unwrap();
        assert_eq!(map.unflatten(&x).unwrap(), d);
        for i in 0..x.len() {
            assert!(map.lower[i] <= x[i] && x[i] <= map.upper[i]);
        }
    }
    assert!(map.flatten(&Deployment::new().with("a", v(-10.0, 0.0, 0.0))).is_err());
    assert!(map.unflatten(&[0.0; 5]).is_err());
}

#[test]
fn black_box_flags_sensor_inside_obstacle() {
    let sc = SceneBuilder::new()
        .roi_box([-12.0, -2.0, -2.0], [12.0, 11.0, 2.0])
        .obstacle([-11.0, -1.0, -1.0], [-9.0, 1.0, 1.0])
        .quality("q0", 30.0, 150.0)
        .sensor("a", &[([-12.0, -2.0, -2.0], [-8.0, 2.0, 2.0])], 3.0, &[(50.0, 0.5)])
        .sensor("b", &[([8.0, -2.0, -2.0], [12.0, 2.0, 2.0])], 4.0, &[(50.0, 0.5)])
        .faults(0)
        .weight(0, 0, "all", 1.0)
        .build()
        .unwrap();
    let d = Deployment::new().with("a", v(-10.0, 0.0, 0.0)).with("b", v(10.0, 0.0, 0.0));
    let r = black_box(&d, &sc, &quick_estimator(), 0).unwrap();
    assert!(!r.feasible);
    // obstacle constraint of the first sensor: ffz plus depth 1
    assert!((r.constraints[0] - 1.5).abs() < 1e-9, "{:?}", r.constraints);
}

#[test]
fn black_box_of_fully_covered_scene_is_placement_cost() {
    let sc = covered_scene();
    let d = Deployment::new().with("a", v(-10.0, 0.0, 0.0)).with("b", v(10.0, 0.0, 0.0));
    let r = black_box(&d, &sc, &quick_estimator(), 3).unwrap();
    assert!(r.feasible, "{:?}", r.constraints);
    assert_eq!(r.objective, 7.0);
}

#[test]
fn black_box_is_reproducible_per_index() {
    // sensors far apart leave part of the RoI uncovered
    let sc = covered_scene();
    let d = Deployment::new().with("a", v(-12.0, -2.0, 0.0)).with("b", v(8.0, 2.0, 0.0));
    let cfg = quick_estimator();
    let a = black_box(&d, &sc, &cfg, 42).unwrap();
    let b = black_box(&d, &sc, &cfg, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

#[test]
fn black_box_outside_cost_zones_is_infinite() {
    let sc = covered_scene();
    let d = Deployment::new().with("a", v(-20.0, 0.0, 0.0)).with("b", v(10.0, 0.0, 0.0));
    let r = black_box(&d, &sc, &quick_estimator(), 0).unwrap();
    assert!(r.objective.is_infinite() && !r.feasible);
    assert!(r.constraints[1] > 0.0);
}

#[test]
fn local_search_reaches_corner_of_linear_objective() {
    let cfg = SearchConfig {
        budget: 5000,
        ..SearchConfig::default()
    };
    let (lo, hi) = ([0.0; 3], [10.0; 3]);
    let out = local_search(&Linear, &[7.3, 2.1, 9.9], &lo, &hi, &cfg, 0, None, &mut |_| {}).unwrap();
    let best = out.best.unwrap();
    let tol = 2.0 * cfg.mesh_min * 10.0;
    for c in &best.x {
        assert!(*c <= tol, "{:?}", best.x);
    }
    assert!(best.result.objective <= out.start.result.objective);
}

#[test]
fn local_search_leaves_infeasible_start() {
    let sc = covered_scene();
    let bb = ScenarioBlackBox::new(&sc, quick_estimator());
    // sensor a starts outside its admissible box
    let start = [-14.0, 0.0, 0.0, 10.0, 0.0, 0.0];
    let mut lower = bb.map.lower.clone();
    let mut upper = bb.map.upper.clone();
    // widen the search box so the start lies inside it
    lower[0] = -16.0;
    upper[0] = -8.0;
    let cfg = SearchConfig {
        budget: 60,
        ..SearchConfig::default()
    };
    let out = local_search(&bb, &start, &lower, &upper, &cfg, 0, None, &mut |_| {}).unwrap();
    assert!(!out.start.result.feasible);
    let best = out.best.expect("no feasible point found");
    assert!(best.result.feasible);
    assert!(best.result.constraints.iter().all(|&c| c <= 0.0));
}

#[test]
fn local_search_budget_one_returns_start() {
    let cfg = SearchConfig {
        budget: 1,
        ..SearchConfig::default()
    };
    let out = local_search(&Linear, &[1.0, 2.0, 3.0], &[0.0; 3], &[10.0; 3], &cfg, 0, None, &mut |_| {}).unwrap();
    assert_eq!(out.evaluations, 1);
    let best = out.best.unwrap();
    assert_eq!(best, out.start);
    assert_eq!(best.result.objective, 7.0);
}

fn stub_config(slots: usize, budget: usize) -> OptimizerConfig {
    OptimizerConfig {
        initial_samples: 4,
        local_searches: slots,
        search: SearchConfig {
            budget,
            ..SearchConfig::default()
        },
        ..OptimizerConfig::default()
    }
}

#[test]
fn restarts_are_dispatched_best_first() {
    // starting objectives 3, 1, 4, 2
    let mut starts = vec![vec![10.0], vec![8.0], vec![11.0], vec![9.0]].into_iter();
    let bb = Logged(Mutex::new(Vec::new()));
    let rep = orchestrate(
        &bb,
        &mut || Ok(starts.next().unwrap()),
        &[0.0],
        &[20.0],
        &stub_config(1, 1000),
        &Solver::Builtin,
        &|_, _| {},
    )
    .unwrap();
    let order: Vec<f64> = rep.restarts.iter().map(|r| r.start_objective).collect();
    assert_eq!(order, vec![1.0, 2.0, 3.0, 4.0]);
    assert_eq!(rep.baseline.unwrap().result.objective, 1.0);
    // restarts ran one after another in sorted order
    let calls = bb.0.lock().unwrap();
    let tags: Vec<u64> = calls.iter().map(|i| i >> 32).collect();
    assert!(tags.windows(2).all(|w| w[0] <= w[1]), "{tags:?}");
    assert_eq!(*tags.last().unwrap(), 4);
    assert_eq!(rep.evaluations, calls.len());
}

#[test]
fn single_slot_equals_sequential_restarts() {
    let starts = vec![vec![15.0], vec![2.0], vec![19.0], vec![6.5]];
    let budget = 25;
    let mut it = starts.clone().into_iter();
    let rep = orchestrate(
        &Logged(Mutex::new(Vec::new())),
        &mut || Ok(it.next().unwrap()),
        &[0.0],
        &[20.0],
        &stub_config(1, budget),
        &Solver::Builtin,
        &|_, _| {},
    )
    .unwrap();

    // the same run by hand
    let bb = Logged(Mutex::new(Vec::new()));
    let mut initial: Vec<Evaluated> = starts
        .iter()
        .enumerate()
        .map(|(i, x)| Evaluated {
            x: x.clone(),
            result: bb.evaluate(x, i as u64, 1.0).unwrap(),
        })
        .collect();
    let mut trace: Vec<(f64, Option<usize>)> = Vec::new();
    let mut best = f64::INFINITY;
    for e in &initial {
        if e.result.objective < best {
            best = e.result.objective;
            trace.push((best, None));
        }
    }
    initial.sort_by(|a, b| a.result.objective.total_cmp(&b.result.objective));
    let mut left = budget;
    for (r, s) in initial.iter().enumerate() {
        if left == 0 {
            break;
        }
        let cfg = SearchConfig {
            budget: left,
            ..SearchConfig::default()
        };
        let out = local_search(&bb, &s.x, &[0.0], &[20.0], &cfg, ((r as u64) + 1) << 32, None, &mut |e| {
            if e.result.objective < best {
                best = e.result.objective;
                trace.push((best, Some(r)));
            }
        })
        .unwrap();
        left -= out.evaluations;
    }
    let got: Vec<(f64, Option<usize>)> = rep.trace.iter().map(|p| (p.objective, p.restart)).collect();
    assert_eq!(got, trace);
    assert_eq!(rep.best.unwrap().result.objective, best);
}

#[test]
fn parallel_slots_keep_trace_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sample = || {
        use rand::Rng;
        Ok(vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
    };
    let cfg = OptimizerConfig {
        initial_samples: 12,
        local_searches: 3,
        search: SearchConfig {
            budget: 40,
            ..SearchConfig::default()
        },
        ..OptimizerConfig::default()
    };
    let seen = Mutex::new(0usize);
    let rep = orchestrate(&Linear, &mut sample, &[0.0; 3], &[10.0; 3], &cfg, &Solver::Builtin, &|_, _| {
        *seen.lock().unwrap() += 1;
    })
    .unwrap();
    assert!(rep.trace.windows(2).all(|w| w[1].objective < w[0].objective));
    assert!(rep.trace.windows(2).all(|w| w[1].elapsed_ms >= w[0].elapsed_ms));
    assert_eq!(*seen.lock().unwrap(), rep.trace.len());
    assert_eq!(rep.trace.last().unwrap().objective, rep.best.as_ref().unwrap().result.objective);
    let per_slot: usize = rep.restarts.iter().map(|r| r.evaluations).sum();
    assert_eq!(rep.evaluations, 12 + per_slot);
    assert!(per_slot <= 3 * 40);
}

#[test]
fn bad_optimizer_configs_are_rejected() {
    let mut x = || Ok(vec![0.0; 3]);
    for cfg in [stub_config(0, 10), stub_config(5, 10), stub_config(1, 0)] {
        assert!(orchestrate(&Linear, &mut x, &[0.0; 3], &[1.0; 3], &cfg, &Solver::Builtin, &|_, _| {}).is_err());
    }
}

#[test]
fn optimize_respects_wall_clock_budget() {
    let sc = covered_scene();
    let cfg = OptimizerConfig {
        initial_samples: 1000,
        local_searches: 1,
        estimator: quick_estimator(),
        budget: Some(Duration::from_millis(300)),
        ..OptimizerConfig::default()
    };
    let t = std::time::Instant::now();
    let rep = optimize(&sc, &cfg, &Solver::Builtin, 4, &|_, _| {}).unwrap();
    assert!(t.elapsed() < Duration::from_secs(10));
    let best = rep.best.expect("incumbent");
    let c = covertool::coverage::eval_constraints(&best, &sc).unwrap();
    assert!(c.feasible());
    assert!(rep.evaluations < 1000 + 500);
}

/// Writes a solver that evaluates the start, walks x0 down in unit steps
/// and asks once past the budget.
fn descent_script(dir: &std::path::Path) -> std::path::PathBuf {
    let script = dir.join("solver.py");
    std::fs::write(
        &script,
        r#"import sys
lines = [sys.stdin.readline().split() for _ in range(5)]
assert lines[0][0] == "DIM" and int(lines[0][1]) == 3
x = [float(v) for v in lines[1][1:]]
lb = [float(v) for v in lines[2][1:]]
budget = int(lines[4][1])
for i in range(budget + 1):
    print("EVAL " + " ".join(repr(v) for v in x), flush=True)
    reply = sys.stdin.readline().split()
    if reply[0] == "STOP":
        break
    x[0] = max(lb[0], x[0] - 1.0)
print("DONE", flush=True)
"#,
    )
    .unwrap();
    script
}

#[test]
fn external_solver_drives_the_black_box() {
    let dir = tempfile::tempdir().unwrap();
    let script = descent_script(dir.path());
    let out = run_external(
        &Linear,
        "python3",
        &[script.to_string_lossy().into_owned()],
        &[5.0, 1.0, 1.0],
        &[0.0; 3],
        &[10.0; 3],
        4,
        0,
        None,
        &mut |_| {},
    )
    .unwrap();
    assert_eq!(out.evaluations, 4);
    let best = out.best.unwrap();
    assert_eq!(best.x, vec![2.0, 1.0, 1.0]);
    assert_eq!(best.result.objective, 5.0);
}

#[test]
fn failing_external_solver_is_an_error() {
    let err = run_external(&Linear, "python3", &["-c".into(), "import sys; sys.exit(3)".into()], &[0.0; 3], &[0.0; 3], &[1.0; 3], 5, 0, None, &mut |_| {});
    assert!(err.is_err());
    assert!(run_external(&Linear, "/nonexistent/solver", &[], &[0.0; 3], &[0.0; 3], &[1.0; 3], 5, 0, None, &mut |_| {}).is_err());
}

#[test]
fn orchestrator_dispatches_restarts_to_external_solver() {
    let dir = tempfile::tempdir().unwrap();
    let script = descent_script(dir.path());
    let solver = Solver::External {
        program: "python3".into(),
        args: vec![script.to_string_lossy().into_owned()],
    };
    let mut starts = vec![vec![6.0, 0.0, 0.0], vec![3.0, 0.0, 0.0]].into_iter();
    let cfg = OptimizerConfig {
        initial_samples: 2,
        local_searches: 1,
        search: SearchConfig {
            budget: 5,
            ..SearchConfig::default()
        },
        ..OptimizerConfig::default()
    };
    let rep = orchestrate(&Linear, &mut || Ok(starts.next().unwrap()), &[0.0; 3], &[10.0; 3], &cfg, &solver, &|_, _| {})
        .unwrap();
    // the better start walks from 3 to 0 and spends the whole slot budget
    assert_eq!(rep.restarts.len(), 1);
    assert_eq!(rep.restarts[0].start_objective, 4.0);
    assert_eq!(rep.restarts[0].evaluations, 5);
    assert_eq!(rep.best.unwrap().result.objective, 1.0);
    assert_eq!(rep.evaluations, 2 + 5);
}
