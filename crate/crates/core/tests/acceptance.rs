mod common;

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use common::{brute_force_best_responses, clean_corpus, random_instance, submodular_instance, Kind};
use persuasion::arrangement::{enumerate_cells, region_bound, Hyperplane, Sign};
use persuasion::best_response::{enumerate_best_responses, receiver_hyperplanes};
use persuasion::cce::{solve_cce_approx, solve_cce_brute_force, solve_cce_exact, ApproxOracle, CceView};
use persuasion::field::{int, ratio};
use persuasion::json::{parse_instance, write_instance};
use persuasion::matroid::{greedy_basis, MatroidOracle};
use persuasion::persuasion::{check_persuasive, enumerate_actions, solve_full, solve_reduced, uninformative};
use persuasion::reductions::{completeness_scheme, LineqMaSpec, Target};
use persuasion::{cli, ActionSet, Instance, Rational, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 20_240_601;

fn report(id: u32, name: &str, failures: &[String], started: Instant) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "acceptance {id}: {verdict} {name} ({:.1} s)",
        started.elapsed().as_secs_f64()
    )
    .unwrap();
    for f in failures.iter().take(5) {
        writeln!(out, "    {f}").unwrap();
    }
    out.flush().unwrap();
    assert!(failures.is_empty(), "criterion {id} failed: {failures:?}");
}

fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    clean_corpus(&mut rng, 50, 4..=8)
}

#[test]
fn c1_reduced_equals_full() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in corpus().iter().enumerate() {
        let full = solve_full(inst).unwrap();
        let reduced = solve_reduced(inst).unwrap();
        if full.sender_value != reduced.sender_value {
            failures.push(format!(
                "instance {i} ({}): full {} reduced {}",
                inst.constraint.kind_name(),
                full.sender_value,
                reduced.sender_value
            ));
        }
    }
    report(
        1,
        "reduced LP value equals full LP value on 50 clean instances",
        &failures,
        started,
    );
}

#[test]
fn c2_catalog_contains_every_best_response() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in corpus().iter().enumerate() {
        let catalog = enumerate_best_responses(inst).unwrap();
        let listed: HashSet<&ActionSet> = catalog.actions.iter().collect();
        for a in brute_force_best_responses(inst) {
            if !listed.contains(&a) {
                failures.push(format!("instance {i}: best response {a:?} missing from catalog"));
            }
        }
        let n = inst.n();
        let bound = region_bound(n * (n - 1) / 2, inst.num_states());
        if catalog.actions.len() as u128 > bound {
            failures.push(format!(
                "instance {i}: {} actions exceed bound {bound}",
                catalog.actions.len()
            ));
        }
    }
    report(
        2,
        "catalog contains brute-force best responses and respects the size bound",
        &failures,
        started,
    );
}

#[test]
fn c3_solver_schemes_are_persuasive() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (i, inst) in corpus().iter().enumerate() {
        for res in [solve_full(inst).unwrap(), solve_reduced(inst).unwrap()] {
            let verdict = check_persuasive(inst, &res.scheme).unwrap();
            if !verdict.is_persuasive() {
                failures.push(format!("instance {i} ({}): {verdict:?}", res.method.name()));
            }
        }
    }
    report(
        3,
        "full and reduced schemes pass the exact persuasiveness check",
        &failures,
        started,
    );
}

#[test]
fn c4_cce_exact_matches_brute_force_and_sandwich() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 4);
    let kinds = [Kind::Uniform, Kind::Partition, Kind::Graphic, Kind::Oracle, Kind::Path];
    let mut failures = Vec::new();
    for i in 0..50 {
        let kind = kinds[i % kinds.len()];
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(2..=3);
        let inst = random_instance(&mut rng, kind, n, k);
        let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
        let brute = solve_cce_brute_force(&inst, &actions).unwrap().sender_value;
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), ratio(1, 10)).unwrap();
        let exact = solve_cce_exact(&view).unwrap().sender_value;
        if exact != brute {
            failures.push(format!(
                "instance {i} ({kind:?}): cutting plane {exact}, brute force {brute}"
            ));
        }
        let persuasive = solve_full(&inst).unwrap().sender_value;
        let plain = uninformative(&inst).unwrap().sender_value;
        let ordered = match inst.sense {
            Sense::Maximize => exact >= persuasive && persuasive >= plain,
            Sense::Minimize => exact <= persuasive && persuasive <= plain,
        };
        if !ordered {
            failures.push(format!(
                "instance {i} ({kind:?}): cce {exact}, persuasive {persuasive}, uninformative {plain}"
            ));
        }
    }
    report(
        4,
        "exact CCE equals brute-force LP and brackets the persuasive optimum",
        &failures,
        started,
    );
}

#[test]
fn c5_approximate_cce_guarantee() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 5);
    let eps = ratio(1, 10);
    let mut failures = Vec::new();
    for i in 0..20 {
        let kind = common::MATROID_KINDS[i % 4];
        let n = rng.gen_range(3..=5);
        let k = rng.gen_range(2..=3);
        let inst = random_instance(&mut rng, kind, n, k);
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), eps.clone()).unwrap();
        let opt = solve_cce_exact(&view).unwrap().sender_value;
        let got = solve_cce_approx(&view).unwrap().sender_value;
        let low = (int(1) - &eps) * &opt;
        if got < low || got > opt {
            failures.push(format!("exact oracle, instance {i}: {got} outside [{low}, {opt}]"));
        }
    }
    for i in 0..10 {
        let n = rng.gen_range(3..=6);
        let inst = submodular_instance(&mut rng, n, 2);
        let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
        let opt = solve_cce_brute_force(&inst, &actions).unwrap().sender_value;
        let view = CceView::new(&inst, ApproxOracle::half_greedy(&inst).unwrap(), eps.clone()).unwrap();
        let got = solve_cce_approx(&view).unwrap().sender_value;
        let low = (ratio(1, 2) - &eps) * &opt;
        if got < low {
            failures.push(format!("greedy oracle, instance {i}: {got} below {low}"));
        }
    }
    report(
        5,
        "ellipsoid CCE meets the (alpha - eps) guarantee for alpha 1 and 1/2",
        &failures,
        started,
    );
}

#[test]
fn c6_hardness_completeness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 6);
    let mut failures = Vec::new();
    for i in 0..10 {
        let n_var = 10 + i % 3;
        let spec = LineqMaSpec::random_satisfiable(2 + i % 2, n_var, &mut rng);
        let nv = Rational::from_integer((n_var as i64).into());
        let floor = (&nv - int(1)) / &nv;
        let ceiling = (int(1) / &nv) * (int(1) + int(1) / &nv);
        for target in [Target::Uniform, Target::Graphic, Target::Path] {
            let (inst, scheme) = completeness_scheme(&spec, target).unwrap();
            if !check_persuasive(&inst, &scheme).unwrap().is_persuasive() {
                failures.push(format!("system {i} {target:?}: planted scheme not persuasive"));
            }
            let value = inst.sender_value(&scheme).unwrap();
            let ok = match target {
                Target::Path => value <= ceiling,
                _ => value >= floor,
            };
            if !ok {
                failures.push(format!("system {i} {target:?}: value {value}"));
            }
        }
    }
    report(
        6,
        "planted schemes on generated gadgets are persuasive and meet the value bounds",
        &failures,
        started,
    );
}

#[test]
fn c7_arrangement_cells_cover_samples() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 7);
    let mut failures = Vec::new();
    for a in 0..100 {
        let d = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=8);
        let normals: Vec<Vec<i64>> = (0..m)
            .map(|_| loop {
                let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-5..=5)).collect();
                if v.iter().any(|x| *x != 0) {
                    break v;
                }
            })
            .collect();
        let planes: Vec<Hyperplane<Rational>> = normals
            .iter()
            .enumerate()
            .map(|(j, v)| Hyperplane {
                normal: v.iter().map(|x| int(*x)).collect(),
                label: (j, j),
            })
            .collect();
        let cells = enumerate_cells(d, &planes, true).unwrap();
        for (c, cell) in cells.iter().enumerate() {
            let x = &cell.interior;
            let inside = x.iter().all(|v| *v > int(0)) && x.iter().sum::<Rational>() == int(1);
            let strict = planes.iter().zip(&cell.signs).all(|(h, s)| {
                let dot: Rational = h.normal.iter().zip(x).map(|(p, q)| p * q).sum();
                Sign::of(&dot) == Some(*s)
            });
            if !inside || !strict {
                failures.push(format!("arrangement {a}, cell {c}: interior point does not certify"));
            }
        }
        let known: HashSet<Vec<Sign>> = cells.iter().map(|c| c.signs.clone()).collect();
        let mut misses = 0;
        for _ in 0..100_000 {
            let w: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=1_000_000)).collect();
            let signs: Option<Vec<Sign>> = normals
                .iter()
                .map(|v| {
                    let dot: i64 = v.iter().zip(&w).map(|(p, q)| p * q).sum();
                    match dot.signum() {
                        1 => Some(Sign::Plus),
                        -1 => Some(Sign::Minus),
                        _ => None,
                    }
                })
                .collect();
            if let Some(s) = signs {
                if !known.contains(&s) {
                    misses += 1;
                }
            }
        }
        if misses > 0 {
            failures.push(format!(
                "arrangement {a}: {misses} sampled points in no enumerated cell"
            ));
        }
    }
    report(
        7,
        "enumerated cells cover 1e5 sampled points per arrangement",
        &failures,
        started,
    );
}

#[test]
fn c8_monte_carlo_agrees_with_lp() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_persuade");
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 8);
    let kinds = [Kind::Uniform, Kind::Partition, Kind::Graphic, Kind::Oracle, Kind::Path];
    let mut agree = 0;
    let mut failures = Vec::new();
    for run in 0..40 {
        let kind = kinds[run % kinds.len()];
        let (n, k) = (rng.gen_range(3..=6), rng.gen_range(2..=3));
        let inst = random_instance(&mut rng, kind, n, k);
        let inst_path = dir.path().join(format!("inst{run}.json"));
        let scheme_path = dir.path().join(format!("scheme{run}.json"));
        std::fs::write(&inst_path, write_instance(&inst).unwrap()).unwrap();
        let solved = std::process::Command::new(bin)
            .args(["--out", scheme_path.to_str().unwrap(), "solve", "--mode", "full"])
            .arg(&inst_path)
            .output()
            .unwrap();
        assert_eq!(
            solved.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&solved.stdout)
        );
        let out = cli::run([
            "persuade",
            "--seed",
            &run.to_string(),
            "validate",
            inst_path.to_str().unwrap(),
            scheme_path.to_str().unwrap(),
            "--samples",
            "10000",
        ]);
        let rep: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let mc = &rep["result"]["monte_carlo"];
        if mc["disagrees"] == serde_json::Value::Bool(false) {
            agree += 1;
        } else {
            failures.push(format!(
                "run {run}: mean {} vs exact {}",
                mc["mean"], rep["result"]["exact_value"]
            ));
        }
    }
    let verdict = if agree * 100 >= 95 * 40 { Vec::new() } else { failures };
    report(
        8,
        &format!("simulation agrees with LP value on {agree}/40 runs"),
        &verdict,
        started,
    );
}

#[test]
fn c9_three_state_cells() {
    let started = Instant::now();
    let inst = parse_instance(include_str!("../data/three_states.json")).unwrap();
    let mut failures = Vec::new();
    let catalog = enumerate_best_responses(&inst).unwrap();
    let expected = vec![ActionSet::new([0, 1]), ActionSet::new([0, 2]), ActionSet::new([1, 2])];
    if catalog.actions != expected {
        failures.push(format!("catalog {:?}", catalog.actions));
    }
    let planes = receiver_hyperplanes(&inst).unwrap();
    let cells = enumerate_cells(inst.num_states(), &planes, true).unwrap();
    if cells.len() != 6 {
        failures.push(format!("{} simplex cells", cells.len()));
    }
    let oracle = MatroidOracle::new(&inst.constraint).unwrap();
    let mut hit = HashSet::new();
    for cell in &cells {
        let w = inst
            .expected_receiver_weights(&persuasion::Posterior::new(cell.interior.clone()).unwrap())
            .unwrap();
        let action = greedy_basis(&oracle, &w);
        if !expected.contains(&action) {
            failures.push(format!("cell maps to {action:?}"));
        }
        hit.insert(action);
    }
    if hit.len() != 3 {
        failures.push(format!("cells reach {} actions", hit.len()));
    }
    report(
        9,
        "three-state example has 6 cells and catalog {0,1},{0,2},{1,2}",
        &failures,
        started,
    );
}
