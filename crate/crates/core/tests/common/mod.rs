#![allow(dead_code)]

use std::collections::BTreeMap;

use persuasion::best_response::check_nondegeneracy;
use persuasion::field::int;
use persuasion::model::OracleMatroid;
use persuasion::persuasion::enumerate_actions;
use persuasion::{ActionSet, ConstraintSpec, Instance, Rational, Sense, UtilitySpec};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Uniform,
    Partition,
    Graphic,
    Oracle,
    Path,
}

pub const MATROID_KINDS: [Kind; 4] = [Kind::Uniform, Kind::Partition, Kind::Graphic, Kind::Oracle];

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_prior(rng: &mut impl Rng, k: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| Rational::new(x.into(), total.into())).collect()
}

pub fn random_table(rng: &mut impl Rng, k: usize, n: usize, lo: i64, hi: i64) -> Vec<Vec<Rational>> {
    (0..k)
        .map(|_| (0..n).map(|_| int(rng.gen_range(lo..=hi))).collect())
        .collect()
}

fn random_partition(rng: &mut impl Rng, n: usize) -> ConstraintSpec {
    let blocks_count = rng.gen_range(1..=n.min(3));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks = vec![Vec::new(); blocks_count];
    for (pos, e) in order.into_iter().enumerate() {
        let b = if pos < blocks_count {
            pos
        } else {
            rng.gen_range(0..blocks_count)
        };
        blocks[b].push(e);
    }
    let caps = blocks.iter().map(|b| rng.gen_range(1..=b.len())).collect();
    ConstraintSpec::Partition { blocks, caps }
}

fn random_graph(rng: &mut impl Rng, n: usize) -> ConstraintSpec {
    let nv = if n <= 6 { 4 } else { 5 };
    let mut all: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u + 1..nv).map(move |v| (u, v))).collect();
    all.shuffle(rng);
    ConstraintSpec::Graphic {
        vertices: names("v", nv),
        edges: all.into_iter().take(n).collect(),
    }
}

fn random_dag(rng: &mut impl Rng, n: usize) -> ConstraintSpec {
    let nv = 5;
    loop {
        let mut all: Vec<(usize, usize)> = (0..nv).flat_map(|u| (u + 1..nv).map(move |v| (u, v))).collect();
        all.shuffle(rng);
        let arcs: Vec<(usize, usize)> = all.into_iter().take(n).collect();
        let spec = ConstraintSpec::Path {
            vertices: names("v", nv),
            arcs,
            source: 0,
            sink: nv - 1,
        };
        if let Ok(paths) = enumerate_actions(&spec, n) {
            if paths.len() >= 2 {
                return spec;
            }
        }
    }
}

pub fn random_constraint(rng: &mut impl Rng, kind: Kind, n: usize) -> ConstraintSpec {
    match kind {
        Kind::Uniform => ConstraintSpec::Uniform { k: rng.gen_range(1..n) },
        Kind::Partition => random_partition(rng, n),
        Kind::Graphic => random_graph(rng, n),
        Kind::Oracle => {
            let inner = if rng.gen_bool(0.5) {
                ConstraintSpec::Uniform { k: rng.gen_range(1..n) }
            } else {
                random_partition(rng, n)
            };
            ConstraintSpec::Oracle(OracleMatroid::wrapping("hidden", inner).unwrap())
        }
        Kind::Path => random_dag(rng, n),
    }
}

/// Linear instance with strictly positive receiver utilities.
pub fn random_instance(rng: &mut impl Rng, kind: Kind, n: usize, k: usize) -> Instance {
    let sense = if kind == Kind::Path {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let constraint = random_constraint(rng, kind, n);
    Instance::new(
        names("t", k),
        random_prior(rng, k),
        names("e", n),
        UtilitySpec::Linear(random_table(rng, k, n, 0, 6)),
        UtilitySpec::Linear(random_table(rng, k, n, 1, 40)),
        constraint,
        sense,
    )
    .unwrap()
}

/// Matroid instances passing the non-degeneracy audit, cycling through the
/// matroid kinds.
pub fn clean_corpus(rng: &mut impl Rng, count: usize, n_range: std::ops::RangeInclusive<usize>) -> Vec<Instance> {
    let mut out = Vec::new();
    while out.len() < count {
        let kind = MATROID_KINDS[out.len() % MATROID_KINDS.len()];
        let n = rng.gen_range(n_range.clone());
        let k = rng.gen_range(2..=3);
        let inst = random_instance(rng, kind, n, k);
        if check_nondegeneracy(&inst).unwrap().is_clean() {
            out.push(inst);
        }
    }
    out
}

/// Weighted coverage: element `i` covers a random subset of `items`
/// ground points; the value of a set is the weight it covers. Monotone and
/// submodular in every state.
pub fn coverage_sender(rng: &mut impl Rng, k: usize, n: usize, items: usize) -> UtilitySpec {
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..items).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    let tables = (0..k)
        .map(|_| {
            let weight: Vec<i64> = (0..items).map(|_| rng.gen_range(1..=5)).collect();
            (0u64..1 << n)
                .map(|mask| {
                    let action = ActionSet::from_mask(mask, n);
                    let mut hit = vec![false; items];
                    for &e in action.elements() {
                        for &j in &covers[e] {
                            hit[j] = true;
                        }
                    }
                    let v: i64 = (0..items).filter(|&j| hit[j]).map(|j| weight[j]).sum();
                    (action, int(v))
                })
                .collect::<BTreeMap<_, _>>()
        })
        .collect();
    UtilitySpec::Tabular(tables)
}

pub fn submodular_instance(rng: &mut impl Rng, n: usize, k: usize) -> Instance {
    let kind = if rng.gen_bool(0.5) {
        Kind::Uniform
    } else {
        Kind::Partition
    };
    Instance::new(
        names("t", k),
        random_prior(rng, k),
        names("e", n),
        coverage_sender(rng, k, n, 6),
        UtilitySpec::Linear(random_table(rng, k, n, 1, 20)),
        random_constraint(rng, kind, n),
        Sense::Maximize,
    )
    .unwrap()
}

/// Actions that are a receiver best response at some belief in the closed
/// simplex, found by one feasibility LP per feasible action.
pub fn brute_force_best_responses(inst: &Instance) -> Vec<ActionSet> {
    use persuasion::lp::{feasibility, LpModel, Objective, Relation};
    let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
    let k = inst.num_states();
    let value = |t: usize, a: &ActionSet| inst.receiver.value(t, a).unwrap();
    let table: Vec<Vec<Rational>> = actions.iter().map(|a| (0..k).map(|t| value(t, a)).collect()).collect();
    let mut out = Vec::new();
    for (i, a) in actions.iter().enumerate() {
        let mut lp: LpModel<Rational> = LpModel::new(Objective::Maximize);
        let xi: Vec<usize> = (0..k).map(|t| lp.add_var(format!("xi{t}"), int(0))).collect();
        lp.add_row(xi.iter().map(|&v| (v, int(1))).collect(), Relation::Eq, int(1));
        for (j, _) in actions.iter().enumerate() {
            if i != j {
                let row = (0..k).map(|t| (xi[t], &table[i][t] - &table[j][t])).collect();
                lp.add_row(row, Relation::Ge, int(0));
            }
        }
        if feasibility(&lp).unwrap().is_some() {
            out.push(a.clone());
        }
    }
    out
}
