mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use covertool::coverage::cover_jq;
use covertool::scenario::{load_scenario, save_scenario, Scenario, SceneBuilder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::sample_box;

fn covertool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covertool")).args(args).output().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Three sensors around a 40 × 40 × 10 RoI with a block in the middle.
fn trio() -> Scenario {
    SceneBuilder::new()
        .roi_box([0.0, 0.0, 0.0], [40.0, 40.0, 10.0])
        .obstacle([18.0, 18.0, 0.0], [22.0, 22.0, 6.0])
        .quality("q0", 20.0, 160.0)
        .quality("q1", 30.0, 150.0)
        .sensor("a", &[([0.0, 0.0, 0.0], [40.0, 40.0, 2.0])], 1.0, &[(45.0, 0.3), (40.0, 0.4)])
        .sensor("b", &[([0.0, 0.0, 0.0], [40.0, 40.0, 2.0])], 1.0, &[(45.0, 0.3), (40.0, 0.4)])
        .sensor("c", &[([0.0, 0.0, 0.0], [40.0, 40.0, 2.0])], 1.5, &[(55.0, 0.3), (50.0, 0.4)])
        .faults(1)
        .weight(0, 0, "all", 0.01)
        .weight(0, 1, "all", 0.005)
        .weight(1, 0, "all", 0.002)
        .weight(1, 1, "all", 0.001)
        .build()
        .unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    scenario: PathBuf,
    deployment: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let scenario = root.join("trio.json");
    save_scenario(&scenario, &trio()).unwrap();
    let deployment = root.join("deployment.json");
    std::fs::write(
        &deployment,
        r#"{"schema": "covertool/1", "positions": {"a": [2, 2, 1], "b": [38, 4, 1], "c": [20, 38, 1]}}"#,
    )
    .unwrap();
    Fixture {
        _dir: dir,
        root,
        scenario,
        deployment,
    }
}

fn manifest_outputs_exist(dir: &Path) {
    let m = read(&dir.join("manifest.json"));
    assert_eq!(m["schema"], "covertool/1");
    for o in m["outputs"].as_array().unwrap() {
        assert!(Path::new(o.as_str().unwrap()).exists(), "{o}");
    }
}

#[test]
fn validate_accepts_fixture_and_names_bad_field() {
    let f = fixture();
    let out = f.root.join("v");
    let r = covertool(&["validate", "--scenario", s(&f.scenario), "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(&out.join("validation.json"))["sensors"], 3);
    manifest_outputs_exist(&out);

    let mut raw = read(&f.scenario);
    raw["qualities"][0]["theta_max"] = Value::from(190.0);
    let bad = f.root.join("bad.json");
    std::fs::write(&bad, raw.to_string()).unwrap();
    let r = covertool(&["validate", "--scenario", s(&bad), "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("qualities[0]"));
}

#[test]
fn evaluate_feasible_deployment() {
    let f = fixture();
    let out = f.root.join("e");
    let r = covertool(&[
        "evaluate", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment),
        "--eps", "0.1", "--delta", "0.1", "--seed", "3", "--out", s(&out),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep = read(&out.join("evaluation.json"));
    assert_eq!(rep["feasible"], true);
    let e = &rep["estimate"];
    let (p, u, t) = (e["placement"].as_f64().unwrap(), e["uncov_estimate"].as_f64().unwrap(), e["total"].as_f64().unwrap());
    assert_eq!(p, 3.5);
    assert_eq!(t, p + u);
    manifest_outputs_exist(&out);
}

#[test]
fn evaluate_sensor_in_obstacle_exits_2() {
    let f = fixture();
    let dep = f.root.join("inside.json");
    std::fs::write(&dep, r#"{"a": [20, 20, 1], "b": [38, 4, 1], "c": [20, 38, 1]}"#).unwrap();
    let out = f.root.join("e");
    let r = covertool(&[
        "evaluate", "--scenario", s(&f.scenario), "--deployment", s(&dep), "--eps", "0.1", "--delta", "0.1",
        "--out", s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let rep = read(&out.join("evaluation.json"));
    assert_eq!(rep["feasible"], false);
    assert!(rep["constraints"]["sensors"][0]["obstacle"].as_f64().unwrap() > 0.0);
    assert_eq!(read(&out.join("manifest.json"))["exit_code"], 2);
}

#[test]
fn evaluate_missing_file_exits_1() {
    let f = fixture();
    let r = covertool(&[
        "evaluate", "--scenario", s(&f.scenario), "--deployment", "/nonexistent.json", "--out", s(&f.root),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("/nonexistent.json"));
}

fn optimize(f: &Fixture, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "optimize", "--scenario", s(&f.scenario), "--eps", "0.1", "--delta", "0.1", "--seed", "17",
        "--solvers", "1", "--out", s(out),
    ];
    args.extend_from_slice(extra);
    covertool(&args)
}

#[test]
fn optimize_is_reproducible() {
    let f = fixture();
    let (o1, o2) = (f.root.join("o1"), f.root.join("o2"));
    for o in [&o1, &o2] {
        let r = optimize(&f, o, &["--initial", "4", "--budget", "30"]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        assert!(String::from_utf8_lossy(&r.stderr).contains("incumbent"));
        manifest_outputs_exist(o);
    }
    let (b1, b2) = (read(&o1.join("best-deployment.json")), read(&o2.join("best-deployment.json")));
    assert_eq!(b1, b2);
    let rep = read(&o1.join("optimization.json"))["report"].clone();
    let trace = rep["trace"].as_array().unwrap();
    assert!(trace.windows(2).all(|w| w[1]["objective"].as_f64() < w[0]["objective"].as_f64()));
    assert_eq!(rep["evaluations"], 4 + rep["restarts"].as_array().unwrap().iter().map(|r| r["evaluations"].as_u64().unwrap()).sum::<u64>());
}

#[test]
fn optimize_wall_clock_budget_returns_feasible_incumbent() {
    let f = fixture();
    let out = f.root.join("o");
    let t = std::time::Instant::now();
    let r = optimize(&f, &out, &["--budget-secs", "1"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(t.elapsed().as_secs_f64() < 10.0);
    let best = covertool::scenario::load_deployment(out.join("best-deployment.json")).unwrap();
    let c = covertool::coverage::eval_constraints(&best, &trio()).unwrap();
    assert!(c.feasible());
}

#[test]
fn uncovered_of_empty_deployment_is_free_space() {
    let f = fixture();
    let empty = f.root.join("empty.json");
    std::fs::write(&empty, r#"{"schema": "covertool/1", "positions": {}}"#).unwrap();
    let out = f.root.join("u");
    let r = covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&empty), "--j", "0", "--q", "q1",
        "--rho", "1", "--out", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let reg = read(&out.join("uncovered-j0-q1.json"));
    let free = 40.0 * 40.0 * 10.0 - 4.0 * 4.0 * 6.0;
    for key in ["under_volume", "over_volume"] {
        assert!((reg[key].as_f64().unwrap() - free).abs() < 1e-3, "{key}: {}", reg[key]);
    }
}

#[test]
fn uncovered_writes_every_fault_count_and_rejects_j_above_k() {
    let f = fixture();
    let out = f.root.join("u");
    let r = covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--rho", "2", "--out", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["uncovered-j0-q0.json", "uncovered-j0-q1.json", "uncovered-j1-q0.json", "uncovered-j1-q1.json", "pairs.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    manifest_outputs_exist(&out);
    let r = covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--j", "2", "--out", s(&out),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("invalid j"));
}

#[test]
fn emitted_regions_pass_point_audit() {
    let f = fixture();
    let out = f.root.join("u");
    let r = covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--rho", "1", "--out", s(&out),
    ]);
    assert!(r.status.success());
    let sc = load_scenario(&f.scenario).unwrap();
    let d = covertool::scenario::load_deployment(&f.deployment).unwrap();
    let placed = sc.placed(&d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (j, q) in [(0, 0), (1, 1)] {
        let file: covertool::export::RegionFile =
            covertool::export::read_json(&out.join(format!("uncovered-j{j}-{}.json", sc.qualities[q].id))).unwrap();
        let under = covertool::scenario::union_from_json(&file.under, "under").unwrap();
        let over = covertool::scenario::union_from_json(&file.over, "over").unwrap();
        for _ in 0..2000 {
            let x = sample_box(&mut rng, &sc);
            if sc.in_obstacle(x) {
                continue;
            }
            let margin = common::curved_margin(x, &placed, q, &sc);
            if margin <= file.rho {
                continue;
            }
            let unc = !cover_jq(x, j, q, &placed, &sc);
            assert!(!(under.contains(x, 0.0) && !unc), "covered point {x:?} in the under-approximation");
            assert!(!(unc && !over.contains(x, 0.0)), "uncovered point {x:?} outside the over-approximation");
        }
    }
}

fn export(f: &Fixture, regions: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "export-viewer", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--regions", s(regions),
        "--rho", "2", "--out", s(out),
    ];
    args.extend_from_slice(extra);
    covertool(&args)
}

#[test]
fn viewer_bundle_round_trips() {
    let f = fixture();
    let u = f.root.join("u");
    assert!(covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--rho", "2", "--out", s(&u),
    ])
    .status
    .success());
    let b = f.root.join("b");
    let r = export(&f, &u, &b, &[]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["scenario.json", "deployment.json", "uncovered.json", "pairs.json"] {
        assert_eq!(read(&b.join(name))["schema"], "covertool/1", "{name}");
    }
    manifest_outputs_exist(&b);
    let unc = read(&b.join("uncovered.json"));
    assert_eq!(unc["pairs_available"], true);
    assert_eq!(unc["regions"].as_array().unwrap().len(), 4);

    // scenario and deployment survive a second pass unchanged
    let sc = load_scenario(b.join("scenario.json")).unwrap();
    let again = f.root.join("again.json");
    save_scenario(&again, &sc).unwrap();
    assert_eq!(read(&again), read(&b.join("scenario.json")));
    assert_eq!(
        covertool::scenario::load_deployment(b.join("deployment.json")).unwrap(),
        covertool::scenario::load_deployment(&f.deployment).unwrap()
    );

    let b2 = f.root.join("b2");
    assert!(export(&f, &u, &b2, &["--no-pairs"]).status.success());
    assert!(!b2.join("pairs.json").exists());
    assert_eq!(read(&b2.join("uncovered.json"))["pairs_available"], false);

    let r = export(&f, &f.root.join("missing"), &b2, &[]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing"));
}

#[test]
fn worst_fault_matches_sampled_enumeration() {
    let f = fixture();
    let u = f.root.join("u");
    assert!(covertool(&[
        "uncovered", "--scenario", s(&f.scenario), "--deployment", s(&f.deployment), "--j", "0", "--rho", "2",
        "--out", s(&u),
    ])
    .status
    .success());
    let b = f.root.join("b");
    assert!(export(&f, &u, &b, &["--no-pairs"]).status.success());
    let worst = read(&b.join("uncovered.json"))["worst_fault"].clone();

    // point-sampled weighted uncovered volume of the survivors of each fault
    let sc = trio();
    let d = covertool::scenario::load_deployment(&f.deployment).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts: Vec<_> = (0..20_000).map(|_| sample_box(&mut rng, &sc)).collect();
    let cell = sc.roi_volume() / pts.len() as f64;
    let mut costs = Vec::new();
    for id in ["a", "b", "c"] {
        let mut rest = d.clone();
        rest.positions.remove(id);
        let placed = sc.placed(&rest).unwrap();
        let mut cost = 0.0;
        for &x in &pts {
            if sc.in_obstacle(x) {
                continue;
            }
            for q in 0..2 {
                if !cover_jq(x, 0, q, &placed, &sc) {
                    cost += sc.weights.get(0, q, 0) * cell;
                }
            }
        }
        costs.push((id, cost));
    }
    let best = costs.iter().cloned().fold(("", f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let second = costs.iter().filter(|c| c.0 != best.0).map(|c| c.1).fold(f64::MIN, f64::max);
    // the sampled winner must be clear of sampling noise
    assert!(best.1 > 1.05 * second, "{costs:?}");
    assert_eq!(worst["sensor"], best.0, "{costs:?}");
    let exported = worst["cost"].as_f64().unwrap();
    assert!(exported >= 0.95 * best.1, "{exported} vs {}", best.1);
}

#[test]
fn blackbox_serves_evaluations() {
    let f = fixture();
    let mut child = Command::new(env!("CARGO_BIN_EXE_covertool"))
        .args(["blackbox", "--scenario", s(&f.scenario), "--eps", "0.1", "--delta", "0.1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        writeln!(stdin, "EVAL 2 2 1 38 4 1 20 38 1").unwrap();
        writeln!(stdin, "EVAL 20 20 1 38 4 1 20 38 1").unwrap();
        writeln!(stdin, "DONE").unwrap();
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|w| w.parse().unwrap()).collect())
        .collect();
    assert_eq!(lines.len(), 2);
    // objective plus three constraints per sensor
    assert!(lines.iter().all(|l| l.len() == 10));
    assert!(lines[0][1..].iter().all(|&c| c <= 0.0));
    assert!(lines[1][1] > 0.0);
}

#[test]
fn fixture_command_writes_loadable_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["desk", "vic"] {
        let p = dir.path().join(format!("{name}.json"));
        assert!(covertool(&["fixture", name, "--out", s(&p)]).status.success());
        load_scenario(&p).unwrap();
    }
}
