use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use covariant::output::parse_csv;
use covariant::scenario::{parse_scenario, resolve};
use covariant::sidecar_path;
use covariant_core::entropy::{delta_h, PhiOptions};
use covariant_core::hermitian::DensityMatrix;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_covariant"));
    c.env_remove("COVARIANT_THREADS");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], scenario: &Path) -> Output {
    bin().args(args).arg("--scenario").arg(scenario).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const U1: &str = r#""group": { "type": "u1", "weights": [1, -1] }"#;

#[test]
fn hmin_of_maximally_mixed_pair() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "h.json",
        &format!(r#"{{ {U1}, "task": {{ "type": "hmin", "eta": {{ "maximally_mixed": 2 }}, "tau": {{ "maximally_mixed": 2 }} }} }}"#),
    );
    let v = stdout_json(&run(&["hmin"], &s));
    assert_eq!(v["result"]["phi"].as_f64().unwrap(), 0.5);
    assert_eq!(v["result"]["h_min"].as_f64().unwrap(), 1.0);
    assert_eq!(v["provenance"]["task"], "hmin");
    assert_eq!(v["provenance"]["tolerances"]["phi_sdp_tol"].as_f64().unwrap(), 1e-10);
    assert_eq!(v["provenance"]["scenario_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn hmin_by_sdp_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "h.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "bloch": [0.5, 0.0, 0.5] }}, "task": {{ "type": "hmin", "eta": {{ "bloch": [0.3, 0.1, 0.6] }} }} }}"#
        ),
    );
    let sdp = stdout_json(&run(&["hmin"], &s));
    assert_eq!(sdp["result"]["method"], "sdp");
    let text = fs::read_to_string(&s).unwrap().replace(r#""task""#, r#""tolerances": { "closed_form": true }, "task""#);
    let c = write(dir.path(), "c.json", &text);
    let closed = stdout_json(&run(&["hmin"], &c));
    assert_eq!(closed["result"]["method"], "qubit_closed_form");
    let (a, b) = (sdp["result"]["phi"].as_f64().unwrap(), closed["result"]["phi"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn trace_violation_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "bad.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.4, 0]]] }},
                "task": {{ "type": "modes" }} }}"#
        ),
    );
    let out = run(&["modes"], &s);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trace invariant violated"), "{err}");
    assert!(err.contains("input_state"), "{err}");
    assert!(err.contains("bad.json"), "{err}");
}

#[test]
fn negative_state_names_the_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "neg.json",
        &format!(r#"{{ {U1}, "input_state": {{ "matrix": [[[1.2, 0], [0, 0]], [[0, 0], [-0.2, 0]]] }}, "task": {{ "type": "modes" }} }}"#),
    );
    let err = String::from_utf8_lossy(&run(&["modes"], &s).stderr).to_string();
    assert!(err.contains("not positive semidefinite: eigenvalue -2"), "{err}");
}

#[test]
fn schema_errors_carry_a_path() {
    let cases = [
        (format!(r#"{{ {U1}, "task": {{ "type": "hmin", "eta": {{ "maximally_mixed": 2 }}, "bogus": 1 }} }}"#), "task"),
        (
            format!(r#"{{ {U1}, "task": {{ "type": "region-scan", "quantity": {{ "kind": "phi" }}, "grid": {{ "resolution": "x" }} }} }}"#),
            "task",
        ),
        (r#"{ "group": { "type": "u2" }, "task": { "type": "modes" } }"#.to_string(), "group"),
        (format!(r#"{{ {U1}, "input_state": {{ "pure": [[1, 0], [1]] }}, "task": {{ "type": "modes" }} }}"#), "input_state.pure[1]"),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (k, (body, path)) in cases.iter().enumerate() {
        let s = write(dir.path(), &format!("s{k}.json"), body);
        let out = run(&["modes"], &s);
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("schema violation at {path}")), "{err}");
    }
}

#[test]
fn semantic_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            format!(
                r#"{{ {U1}, "input_state": {{ "bloch": [0.5, 0, 0] }}, "task": {{ "type": "region-scan", "quantity": {{ "kind": "phi" }}, "grid": {{ "resolution": 1 }} }} }}"#
            ),
            "resolution",
        ),
        (r#"{ "group": { "type": "u1", "weights": [1, 0, -1] }, "task": { "type": "net", "epsilon": 0.5 } }"#.to_string(), "requires seed"),
        (format!(r#"{{ {U1}, "input_state": {{ "maximally_mixed": 3 }}, "task": {{ "type": "modes" }} }}"#), "dimension 3"),
        (format!(r#"{{ {U1}, "input_state": {{ "bloch": [0.8, 0, 0.8] }}, "task": {{ "type": "modes" }} }}"#), "outside the state body"),
        (format!(r#"{{ {U1}, "task": {{ "type": "feasible" }} }}"#), "requires input_state and target_state"),
    ];
    for (k, (body, needle)) in cases.iter().enumerate() {
        let s = write(dir.path(), &format!("s{k}.json"), body);
        let out = bin()
            .arg(if body.contains("net") {
                "net"
            } else if body.contains("region") {
                "region-scan"
            } else if body.contains("feasible") {
                "feasible"
            } else {
                "modes"
            })
            .arg("--scenario")
            .arg(&s)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{needle}: {err}");
    }
}

#[test]
fn subcommand_must_match_task() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "m.json", &format!(r#"{{ {U1}, "input_state": {{ "bloch": [1, 0, 0] }}, "task": {{ "type": "modes" }} }}"#));
    let out = run(&["hmin"], &s);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not match"));
}

#[test]
fn modes_of_plus_state() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "m.json",
        &format!(r#"{{ {U1}, "input_state": {{ "pure": [[1, 0], [1, 0]] }}, "task": {{ "type": "modes" }} }}"#),
    );
    let v = stdout_json(&run(&["modes"], &s));
    let r = &v["result"];
    let trivial = r["modes"].as_array().unwrap().iter().find(|m| m["lambda"] == 0).unwrap();
    let op = &trivial["operator"];
    for (i, j, want) in [(0, 0, 0.5), (1, 1, 0.5), (0, 1, 0.0), (1, 0, 0.0)] {
        assert!((op[i][j][0].as_f64().unwrap() - want).abs() < 1e-12);
        assert!(op[i][j][1].as_f64().unwrap().abs() < 1e-12);
    }
    for lambda in [2, -2] {
        let c = r["coefficients"].as_array().unwrap().iter().find(|c| c["lambda"] == lambda).unwrap();
        assert!((c["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(c["value"][1].as_f64().unwrap().abs() < 1e-12);
    }
    assert_eq!(r["support"], serde_json::json!([-2, 0, 2]));
}

fn pair_scenario(dir: &Path, sigma: [f64; 3]) -> PathBuf {
    write(
        dir,
        "f.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "bloch": [0.5, 0.0, 0.5] }}, "target_state": {{ "bloch": [{}, {}, {}] }},
                "task": {{ "type": "feasible", "surface": {{ "kind": "infinity_shell", "radius": 0.05, "sampler": {{ "uniform_random": {{ "count": 16, "seed": 1 }} }} }} }} }}"#,
            sigma[0], sigma[1], sigma[2]
        ),
    )
}

#[test]
fn exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = pair_scenario(dir.path(), [0.9, 0.0, 0.0]);
    let out = run(&["feasible", "--fail-on-infeasible"], &infeasible);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["choi"]["verdict"], "infeasible");
    assert_eq!(run(&["feasible"], &infeasible).status.code(), Some(0));
    let feasible = pair_scenario(dir.path(), [0.2, 0.0, 0.1]);
    let out = run(&["feasible", "--fail-on-infeasible"], &feasible);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["choi"]["verdict"], "feasible");
    assert_eq!(v["result"]["surface"]["verdict"], "borderline");
}

fn scan_scenario(dir: &Path) -> PathBuf {
    write(
        dir,
        "scan.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "bloch": [0.5, 0.0, 0.5] }},
                "task": {{ "type": "region-scan", "quantity": {{ "kind": "t-eta", "eta": {{ "bloch": [0.3, 0.0, 0.9] }} }},
                          "grid": {{ "plane": "xz", "resolution": 7 }} }} }}"#
        ),
    )
}

#[test]
fn region_scan_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let s = scan_scenario(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("out{threads}.csv"));
        let out = bin().args(["region-scan", "--threads", threads, "--out"]).arg(&path).arg("--scenario").arg(&s).output().unwrap();
        assert!(out.status.success());
        outputs.push(fs::read(&path).unwrap());
        outputs.push(fs::read(sidecar_path(&path)).unwrap());
    }
    let env = bin().env("COVARIANT_THREADS", "2").args(["region-scan", "--format", "csv", "--scenario"]).arg(&s).output().unwrap();
    assert!(env.status.success());
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
    assert_eq!(outputs[0], env.stdout);
    let bad = bin().env("COVARIANT_THREADS", "many").args(["region-scan", "--scenario"]).arg(&s).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn region_rows_are_reproducible_directly() {
    let dir = tempfile::tempdir().unwrap();
    let s = scan_scenario(dir.path());
    let out = bin().args(["region-scan", "--format", "csv", "--scenario"]).arg(&s).output().unwrap();
    let (header, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(header, ["x", "y", "z", "inside", "delta_h", "member", "exact"]);
    assert_eq!(rows.len(), 49);
    let text = fs::read(&s).unwrap();
    let r = resolve(parse_scenario(&text).unwrap(), &text).unwrap();
    let eta = DensityMatrix::qubit(0.3, 0.0, 0.9).unwrap();
    let rho = r.input.clone().unwrap();
    let mut inside = 0;
    for row in rows {
        let p: Vec<f64> = row[..3].iter().map(|c| c.parse().unwrap()).collect();
        if row[3] == "false" {
            assert!(row[4..].iter().all(String::is_empty));
            continue;
        }
        inside += 1;
        let sigma = DensityMatrix::qubit(p[0], p[1], p[2]).unwrap();
        let dh = delta_h(&eta, &rho, &sigma, &r.setting, &PhiOptions::default()).unwrap();
        let emitted: f64 = row[4].parse().unwrap();
        assert!((emitted - dh).abs() < 1e-8, "{emitted} vs {dh}");
        assert_eq!(row[5], (dh >= -1e-9).to_string());
    }
    assert!(inside > 20);
}

#[test]
fn outputs_are_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let s = scan_scenario(dir.path());
    let target = dir.path().join("nested").join("deeper").join("scan.json");
    fs::create_dir_all(target.parent().unwrap()).unwrap();
    fs::write(&target, "stale").unwrap();
    let out = bin().args(["region-scan", "--out"]).arg(&target).arg("--scenario").arg(&s).output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&fs::read(&target).unwrap()).unwrap();
    assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 49);
    let names: Vec<_> = fs::read_dir(target.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, [std::ffi::OsString::from("scan.json")]);
}

#[test]
fn scenario_output_path_is_relative_to_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let body = fs::read_to_string(scan_scenario(dir.path())).unwrap();
    let body = body.trim_end().trim_end_matches('}').to_string() + r#", "output": { "path": "grid.csv" } }"#;
    let sub = dir.path().join("sc");
    fs::create_dir(&sub).unwrap();
    let s = write(&sub, "scan.json", &body);
    let out = run(&["region-scan"], &s);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(sub.join("grid.csv")).unwrap();
    assert!(csv.starts_with("x,y,z,inside,"));
    assert!(!csv.contains('\r'));
    let prov: Value = serde_json::from_slice(&fs::read(sub.join("grid.csv.provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["task"], "region-scan");
}

#[test]
fn seed_flag_overrides_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "n.json",
        r#"{ "group": { "type": "u1", "weights": [1, 0, -1] }, "task": { "type": "net", "epsilon": 0.6 }, "seed": 4 }"#,
    );
    let a = stdout_json(&run(&["net", "--format", "json"], &s));
    let b = stdout_json(&run(&["net", "--seed", "4"], &s));
    let c = stdout_json(&run(&["net", "--seed", "5"], &s));
    assert_eq!(a["result"], b["result"]);
    assert_ne!(a["result"]["states"], c["result"]["states"]);
    assert_eq!(c["provenance"]["seed"], 5);
    assert_eq!(a["result"]["certified"], false);
    let q = write(dir.path(), "q.json", &format!(r#"{{ {U1}, "task": {{ "type": "net", "epsilon": 0.25 }} }}"#));
    let v = stdout_json(&run(&["net"], &q));
    assert_eq!(v["result"]["certified"], true);
    assert_eq!(v["table"]["columns"], serde_json::json!(["index", "x1", "x2", "x3"]));
}

#[test]
fn depol_threshold_reports_modes() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "d.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "bloch": [0.6, 0.0, 0.3] }}, "target_state": {{ "bloch": [0.0, 0.5, -0.2] }},
                "task": {{ "type": "depol-threshold" }} }}"#
        ),
    );
    let v = stdout_json(&run(&["depol-threshold"], &s));
    let r = &v["result"];
    let p = r["minimal_p"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(r["p"].as_f64().unwrap(), p);
    assert_eq!(r["thm6"]["verdict"], true);
    assert!(!r["thm6"]["modes"].as_array().unwrap().is_empty() || r["thm6"]["shortcut"].is_string());
    let cols = &v["table"]["columns"];
    assert_eq!(cols, &serde_json::json!(["test", "lambda", "j", "f", "g", "lhs", "rhs", "holds"]));
}

#[test]
fn smoothed_reports_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &format!(
            r#"{{ {U1}, "input_state": {{ "bloch": [0.5, 0.0, 0.5] }}, "target_state": {{ "bloch": [0.9, 0.0, 0.0] }},
                "task": {{ "type": "smoothed", "epsilon": 0.05 }} }}"#
        ),
    );
    let out = run(&["smoothed", "--fail-on-infeasible", "--format", "csv"], &s);
    assert_eq!(out.status.code(), Some(2));
    let (header, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(header[1], "verdict");
    assert_eq!(rows[0][1], "infeasible");
}

#[test]
fn documented_scenarios_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenarios");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            covariant::scenario::load(&path, None).unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 6);
}

#[test]
fn documented_small_scenarios_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenarios");
    let h = stdout_json(&run(&["hmin"], &dir.join("hmin-mixed.json")));
    assert!((h["result"]["phi"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
    let m = stdout_json(&run(&["modes"], &dir.join("modes-plus.json")));
    assert_eq!(m["result"]["dim"], 2);
}
