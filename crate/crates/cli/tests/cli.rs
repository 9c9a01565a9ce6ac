use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dissctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dissctl")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_OPTIMIZE: &str = r#"
version = 1
name = "small"
description = "two-qubit cooling, short run"
task = "optimize"

[model]
kind = "ising"
n = 2
noise = "amplitude_damping"
gamma_max = 5.0

[problem]
initial = "max_mixed"
target = "ground"
tau = 3.0
slices = 8

[optimizer]
restarts = 2
max_iterations = 40
"#;

#[test]
fn list_has_every_bundled_experiment() {
    let o = dissctl(&["list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert!(names.len() >= 13, "{names:?}");
    for want in [
        "example1_cooling",
        "example1b_dephasing",
        "example2_erasure",
        "example3_random_pairs",
        "example4_bitflip_pairs",
        "example5_ghz_iontrap",
        "gmon_init",
        "gmon_ghz",
        "gmon_ppt",
        "gmon_erase",
        "hlp_vs_greedy",
        "algcool_test1",
        "algcool_test2",
    ] {
        assert!(names.contains(&want), "missing {want}");
    }
    for line in text.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 3, "{line}");
        assert!(!cols[1].is_empty() && cols[2].len() > 20, "entry without task or description: {line}");
    }
}

#[test]
fn every_bundled_config_validates() {
    let o = dissctl(&["validate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().all(|l| l.starts_with("ok ")));
    assert!(stdout(&o).contains("ok gmon_ppt (needs its target file"));
}

#[test]
fn bit_flip_purification_is_infeasible_with_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "purify.cfg",
        r#"
version = 1
name = "purify"
task = "protocol"

[model]
kind = "ising"
n = 2
noise = "bit_flip"
gamma_max = 2.5

[problem]
initial = "max_mixed"
target = "ground"

[protocol]
kind = "hlp"
"#,
    );
    let out = dir.path().join("out");
    let o = dissctl(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["reachable"], "no");
    assert!(v["error_floor"].as_f64().unwrap() > 0.0);
    assert!(out.join("manifest.json").exists());

    let o = dissctl(&["reach", "--config", &cfg]);
    assert_eq!(code(&o), 3);
}

#[test]
fn same_seed_gives_identical_result_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL_OPTIMIZE);
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = dissctl(&["--workers", "1", "run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "17"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["result.json", "sequence.csv", "sequence.json", "trajectory.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 17);
    let files = m["files"].as_object().unwrap();
    for f in ["result.json", "sequence.csv", "sequence.json", "trajectory.csv"] {
        assert!(files.contains_key(f), "manifest misses {f}");
    }
    let csv = fs::read_to_string(a.join("sequence.csv")).unwrap();
    assert!(csv.starts_with("slice,dt,") && !csv.contains('\r'));
}

#[test]
fn omitted_seed_is_derived_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL_OPTIMIZE);
    let seeds: Vec<serde_json::Value> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out = dir.path().join(sub);
            let o = dissctl(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--restarts", "1"]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            let m: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
            m["seed"].clone()
        })
        .collect();
    assert_eq!(seeds[0], seeds[1]);
}

#[test]
fn bad_configs_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.cfg", "version = 1\nname = \"x\"\ntask = "),
        ("version.cfg", "version = 9\nname = \"x\"\ntask = \"optimize\"\n"),
        ("unknown_key.cfg", &SMALL_OPTIMIZE.replace("slices = 8", "slices = 8\nbogus = 1")),
        ("no_tau.cfg", &SMALL_OPTIMIZE.replace("tau = 3.0\n", "")),
        ("bad_target.cfg", &SMALL_OPTIMIZE.replace("\"ground\"", "\"nowhere\"")),
        ("missing_file.cfg", &SMALL_OPTIMIZE.replace("\"ground\"", "\"file:absent.json\"")),
        ("bad_model.cfg", &SMALL_OPTIMIZE.replace("gamma_max = 5.0", "gamma_max = -1.0")),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), name, body);
        let o = dissctl(&["validate", "--config", &cfg]);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&dissctl(&["run", "--config", "no_such_experiment"])), 2);
}

#[test]
fn hlp_protocol_writes_plans() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "hlp.cfg",
        r#"
version = 1
name = "hlp2"
task = "protocol"

[model]
kind = "ising"
n = 2
noise = "bit_flip"
gamma_max = 2.5

[problem]
initial = "diag:1,2,3,4"
target = "max_mixed"

[protocol]
kind = "hlp_vs_greedy"
budget = 7.5
"#,
    );
    let out = dir.path().join("out");
    let o = dissctl(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    let plans = r["plans"].as_array().unwrap();
    assert_eq!(plans.len(), 2);
    for p in plans {
        assert!(out.join(p["file"].as_str().unwrap()).exists());
        assert!(p["executed_error"].as_f64().unwrap() < 1e-2);
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["reachable"], "yes_asymptotic");
}

#[test]
fn bath_subcommand_prints_table() {
    let o = dissctl(&["bath", "--beta", "1", "--cutoff", "10", "--omega", "1", "--omega", "-1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(text.lines().next().unwrap(), "omega,gamma,lamb_shift,occupation");
    // detailed balance between the two directions
    assert!((rows[1][1] / rows[0][1] - (-1f64).exp()).abs() < 1e-12);
    assert_eq!(code(&dissctl(&["bath", "--beta", "1", "--cutoff", "-1", "--omega", "1"])), 2);
}

#[test]
fn bundled_timescale_check_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ts");
    let o = dissctl(&["run", "--config", "gmon_timescales", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("timescales.json")).unwrap()).unwrap();
    assert_eq!(t["report"]["checks"].as_array().unwrap().len(), 3);
}
