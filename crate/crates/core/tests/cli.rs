use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(args)
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_modes_agree_on_bundled_instances() {
    for (file, value) in [("toy2.json", "2/3"), ("three_states.json", "7/3"), ("k4.json", "19/10")] {
        let inst = data(file);
        for mode in ["full", "reduced"] {
            let out = persuade(&["solve", "--mode", mode, path_str(&inst)]);
            assert_eq!(out.status.code(), Some(0));
            assert_eq!(report(&out)["result"]["value"], value, "{file} {mode}");
        }
    }
}

#[test]
fn path_instance_signals_and_cce_is_lower() {
    let inst = data("path.json");
    let full = report(&persuade(&["solve", path_str(&inst)]));
    assert_eq!(full["result"]["value"], "1/4");
    for engine in ["cutting-plane", "brute-force"] {
        let cce = report(&persuade(&[
            "solve",
            "--mode",
            "cce",
            "--engine",
            engine,
            path_str(&inst),
        ]));
        assert_eq!(cce["result"]["value"], "0", "{engine}");
    }
}

#[test]
fn cce_engines_agree() {
    let inst = data("three_states.json");
    let values: Vec<Value> = ["cutting-plane", "ellipsoid", "brute-force"]
        .iter()
        .map(|e| {
            report(&persuade(&["solve", "--mode", "cce", "--engine", e, path_str(&inst)]))["result"]["value"].clone()
        })
        .collect();
    assert!(values.iter().all(|v| *v == values[0]), "{values:?}");
}

#[test]
fn scheme_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let inst = data("three_states.json");
    let solved = persuade(&["--out", path_str(&scheme), "solve", path_str(&inst)]);
    assert_eq!(solved.status.code(), Some(0));
    assert_eq!(report(&solved)["scheme_path"], path_str(&scheme));
    let out = persuade(&["validate", path_str(&inst), path_str(&scheme), "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["valid"], true);
    assert_eq!(r["result"]["check"]["persuasive"], true);
    assert_eq!(r["result"]["monte_carlo"]["disagrees"], false);
}

#[test]
fn uninformative_scheme_lands_in_interval() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let inst = data("toy2.json");
    let digest = report(&persuade(&["check-nondegeneracy", path_str(&inst)]))["instance_digest"].clone();
    // At the prior the receiver takes element c, which the sender values at zero.
    let file = serde_json::json!({
        "instance_digest": digest,
        "method": "manual",
        "phi": {"0": {"[2]": "1"}, "1": {"[2]": "1"}},
        "value": "0",
    });
    std::fs::write(&scheme, file.to_string()).unwrap();
    let r = report(&persuade(&["validate", path_str(&inst), path_str(&scheme)]));
    assert_eq!(r["result"]["valid"], true);
    assert_eq!(r["result"]["monte_carlo"]["mean"], "0.000000");
    assert_eq!(r["result"]["monte_carlo"]["std_error"], "0.000000");
}

#[test]
fn tampered_scheme_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let inst = data("toy2.json");
    persuade(&["--out", path_str(&scheme), "solve", path_str(&inst)]);
    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&scheme).unwrap()).unwrap();
    // Recommend b in every state; the posterior is then the prior, where c wins.
    file["phi"] = serde_json::json!({"0": {"[1]": "1"}, "1": {"[1]": "1"}});
    file["value"] = Value::String("1".into());
    std::fs::write(&scheme, file.to_string()).unwrap();
    let out = persuade(&["validate", path_str(&inst), path_str(&scheme)]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["result"]["check"]["persuasive"], false);
    assert_eq!(r["result"]["check"]["violation"]["deviation"], serde_json::json!([2]));
}

#[test]
fn scheme_for_other_instance_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    persuade(&["--out", path_str(&scheme), "solve", path_str(&data("toy2.json"))]);
    let out = persuade(&["validate", path_str(&data("three_states.json")), path_str(&scheme)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enumerate_reports_catalog_and_degeneracy() {
    let r = report(&persuade(&["enumerate", path_str(&data("three_states.json"))]));
    assert_eq!(r["result"]["actions"], 3);
    assert_eq!(r["result"]["degeneracy"]["status"], "clean");
    let r = report(&persuade(&["enumerate", path_str(&data("k4.json"))]));
    assert_eq!(r["result"]["degeneracy"]["status"], "perturbed");
    assert!(!r["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn check_nondegeneracy_flags_ties() {
    let clean = report(&persuade(&[
        "check-nondegeneracy",
        path_str(&data("three_states.json")),
    ]));
    assert_eq!(clean["result"]["clean"], true);
    let dirty = report(&persuade(&["check-nondegeneracy", path_str(&data("k4.json"))]));
    assert_eq!(dirty["result"]["clean"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(persuade(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(persuade(&["solve", "/nonexistent.json"]).status.code(), Some(1));
    let too_large = persuade(&["--max-actions", "2", "solve", path_str(&data("three_states.json"))]);
    assert_eq!(too_large.status.code(), Some(2));
    assert_eq!(report(&too_large)["error"]["kind"], "TooLarge");
    let unsupported = persuade(&["solve", "--mode", "reduced", path_str(&data("path.json"))]);
    assert_eq!(unsupported.status.code(), Some(2));
    assert_eq!(report(&unsupported)["error"]["kind"], "UnsupportedCombination");
    let bad_eps = persuade(&[
        "solve",
        "--mode",
        "cce",
        "--epsilon",
        "2",
        path_str(&data("three_states.json")),
    ]);
    assert_eq!(bad_eps.status.code(), Some(1));
    assert_eq!(persuade(&["--help"]).status.code(), Some(0));
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("scheme.json");
    let inst = data("k4.json");
    persuade(&["--out", path_str(&scheme), "solve", path_str(&inst)]);
    let run = |seed: &str| persuade(&["--seed", seed, "validate", path_str(&inst), path_str(&scheme)]).stdout;
    assert_eq!(run("7"), run("7"));
    let gen = |seed: &str| persuade(&["--seed", seed, "gen", "--from", "public", "--target", "partition"]).stdout;
    assert_eq!(gen("3"), gen("3"));
    assert_ne!(gen("3"), gen("4"));
}

#[test]
fn generated_gadget_with_planted_scheme_validates() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let scheme = dir.path().join("planted.json");
    for target in ["uniform", "graphic", "path"] {
        let out = persuade(&[
            "--seed",
            "11",
            "--out",
            path_str(&inst),
            "gen",
            "--from",
            "lineq",
            "--target",
            target,
            "--n-eq",
            "2",
            "--n-var",
            "10",
            "--scheme-out",
            path_str(&scheme),
        ]);
        assert_eq!(out.status.code(), Some(0), "{target}");
        let check = persuade(&["validate", path_str(&inst), path_str(&scheme), "--samples", "2000"]);
        assert_eq!(
            check.status.code(),
            Some(0),
            "{target}: {}",
            String::from_utf8_lossy(&check.stdout)
        );
    }
}

#[test]
fn warns_unless_the_system_is_large_enough_for_its_slack() {
    let r = report(&persuade(&[
        "gen", "--from", "lineq", "--target", "uniform", "--n-var", "3", "--n-eq", "1",
    ]));
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("system.json");
    let warnings = |n_var: usize| {
        let file = serde_json::json!({
            "a": [vec![1; n_var]],
            "c": [1],
            "zeta": "1/10",
            "delta": "1/2",
        });
        std::fs::write(&spec, file.to_string()).unwrap();
        let r = report(&persuade(&[
            "gen",
            "--from",
            "lineq",
            "--target",
            "uniform",
            "--spec",
            path_str(&spec),
        ]));
        r["warnings"].as_array().unwrap().len()
    };
    assert_eq!(warnings(9), 1);
    assert_eq!(warnings(10), 0);
}

#[test]
fn wrong_target_for_source_is_a_usage_error() {
    let out = persuade(&["gen", "--from", "public", "--target", "graphic"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_logs_are_json_lines() {
    let out = persuade(&["--json-logs", "solve", path_str(&data("three_states.json"))]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!stderr.is_empty());
    for line in stderr.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["level"].is_string() && v["message"].is_string());
    }
}
