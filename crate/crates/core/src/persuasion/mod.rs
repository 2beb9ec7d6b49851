//! Optimal persuasive schemes: the LP over all feasible actions, the LP over
//! a best-response catalog, and an exact persuasiveness check.

pub mod paths;

use std::collections::BTreeSet;

use crate::best_response::{self, BestResponseCatalog};
use crate::error::{Error, Result};
use crate::field::{int, Field, LexPair, Rational};
use crate::lp::{self, LpModel, Objective, Relation};
use crate::matroid::{self, MatroidOracle};
use crate::model::{expected_weights, ActionSet, ConstraintSpec, Instance, Sense, SignalingScheme, UtilitySpec};

pub use paths::shortest_path;

/// Largest ground set whose independent sets are enumerated by subset filtering.
pub const MAX_ENUMERATED_ELEMENTS: usize = 20;
/// Default cap on the number of enumerated actions (and source-sink paths).
pub const DEFAULT_MAX_ACTIONS: usize = 100_000;

/// Every feasible action of `constraint` over `n` elements, in ascending order
/// (paths in depth-first order).
pub fn enumerate_actions(constraint: &ConstraintSpec, n: usize) -> Result<Vec<ActionSet>> {
    enumerate_actions_limited(constraint, n, DEFAULT_MAX_ACTIONS)
}

pub fn enumerate_actions_limited(constraint: &ConstraintSpec, n: usize, limit: usize) -> Result<Vec<ActionSet>> {
    match constraint {
        ConstraintSpec::Path {
            vertices,
            arcs,
            source,
            sink,
        } => paths::enumerate_paths(vertices.len(), arcs, *source, *sink, limit),
        c => {
            if n > MAX_ENUMERATED_ELEMENTS {
                return Err(Error::TooLarge {
                    what: "ground set for subset enumeration".into(),
                    limit: MAX_ENUMERATED_ELEMENTS,
                });
            }
            let oracle = MatroidOracle::new(c)?;
            let mut out = Vec::new();
            for mask in 0..1u64 << n {
                let s = ActionSet::from_mask(mask, n);
                if oracle.is_independent(&s) {
                    if out.len() == limit {
                        return Err(Error::TooLarge {
                            what: "independent sets".into(),
                            limit,
                        });
                    }
                    out.push(s);
                }
            }
            out.sort();
            Ok(out)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    FullLp,
    ReducedLp,
    CceExact,
    CceEllipsoid,
    CceBruteForce,
    Uninformative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FullLp => "full",
            Method::ReducedLp => "reduced",
            Method::CceExact => "cce-cutting-plane",
            Method::CceEllipsoid => "cce-ellipsoid",
            Method::CceBruteForce => "cce-brute-force",
            Method::Uninformative => "uninformative",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpStats {
    /// LP solves performed.
    pub solves: usize,
    pub pivots: usize,
    /// Columns and rows of the last LP.
    pub columns: usize,
    pub rows: usize,
    /// Free-form counters, e.g. cuts or binary-search verdicts.
    pub notes: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub scheme: SignalingScheme,
    pub sender_value: Rational,
    pub method: Method,
    /// Number of actions the LP ranged over.
    pub catalog_size: usize,
    pub stats: LpStats,
}

/// How persuasiveness rows `(S, S')` enter the LP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairRows {
    /// Every ordered pair up front.
    All,
    /// Start with none and add violated pairs until none remain. The final LP
    /// is a relaxation whose optimum satisfies every pair, so it is optimal.
    Lazy,
    /// `All` for at most this many actions, `Lazy` otherwise.
    Auto(usize),
}

/// Values of `utility` for every action and state, `table[a][θ]`.
pub fn value_table(utility: &UtilitySpec, actions: &[ActionSet], num_states: usize) -> Result<Vec<Vec<Rational>>> {
    actions
        .iter()
        .map(|a| (0..num_states).map(|t| utility.value(t, a)).collect())
        .collect()
}

/// Solves the persuasion LP with variables `φ_θ(S)` for `S ∈ actions` and
/// persuasiveness rows for pairs within `actions`.
pub fn solve_over(instance: &Instance, actions: &[ActionSet], method: Method, rows: PairRows) -> Result<SolveResult> {
    let k = instance.num_states();
    let m = actions.len();
    if m == 0 {
        return Err(Error::InvalidInstance("no feasible actions".into()));
    }
    let r = value_table(&instance.receiver, actions, k)?;
    let s = value_table(&instance.sender, actions, k)?;
    let mu = &instance.prior;
    let sense = instance.sense;
    let lazy = match rows {
        PairRows::All => false,
        PairRows::Lazy => true,
        PairRows::Auto(limit) => m > limit,
    };
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    if !lazy {
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    pairs.insert((a, b));
                }
            }
        }
    }
    let var = |t: usize, a: usize| t * m + a;
    let mut stats = LpStats::default();
    loop {
        let mut model = LpModel::new(match sense {
            Sense::Maximize => Objective::Maximize,
            Sense::Minimize => Objective::Minimize,
        });
        for t in 0..k {
            for a in 0..m {
                model.add_var(format!("phi[{t}][{a}]"), &mu[t] * &s[a][t]);
            }
        }
        for t in 0..k {
            model.add_row((0..m).map(|a| (var(t, a), int(1))).collect(), Relation::Eq, int(1));
        }
        let rel = match sense {
            Sense::Maximize => Relation::Ge,
            Sense::Minimize => Relation::Le,
        };
        for &(a, b) in &pairs {
            let coeffs = (0..k).map(|t| (var(t, a), &mu[t] * (&r[a][t] - &r[b][t]))).collect();
            model.add_row(coeffs, rel, int(0));
        }
        let sol = lp::solve(&model)?.optimal()?;
        stats.solves += 1;
        stats.pivots += sol.pivots;
        stats.columns = model.num_vars();
        stats.rows = model.rows.len();

        let mut added = false;
        if lazy {
            for a in 0..m {
                let w: Vec<Rational> = (0..k).map(|t| &mu[t] * &sol.x[var(t, a)]).collect();
                if w.iter().all(Field::is_zero) {
                    continue;
                }
                let value = |b: usize| (0..k).fold(int(0), |acc, t| acc + &w[t] * &r[b][t]);
                let mine = value(a);
                let mut best: Option<(usize, Rational)> = None;
                for b in 0..m {
                    let v = value(b);
                    if sense.prefers(&v, &mine) && best.as_ref().is_none_or(|(_, bv)| sense.prefers(&v, bv)) {
                        best = Some((b, v));
                    }
                }
                if let Some((b, _)) = best {
                    added |= pairs.insert((a, b));
                }
            }
        }
        if !added {
            let mut scheme = SignalingScheme::new();
            for t in 0..k {
                for (a, action) in actions.iter().enumerate() {
                    let p = &sol.x[var(t, a)];
                    if !p.is_zero() {
                        scheme.add(t, action.clone(), p.clone(), k);
                    }
                }
            }
            let scheme = scheme.strip_zeros();
            let recomputed = instance.sender_value(&scheme)?;
            assert_eq!(recomputed, sol.value, "LP value differs from recomputed scheme value");
            stats.notes.push(("pair_rows".into(), pairs.len().to_string()));
            return Ok(SolveResult {
                scheme,
                sender_value: sol.value,
                method,
                catalog_size: m,
                stats,
            });
        }
    }
}

/// Optimal persuasive scheme by brute force over every feasible action.
pub fn solve_full(instance: &Instance) -> Result<SolveResult> {
    solve_full_limited(instance, DEFAULT_MAX_ACTIONS)
}

pub fn solve_full_limited(instance: &Instance, max_actions: usize) -> Result<SolveResult> {
    let actions = enumerate_actions_limited(&instance.constraint, instance.n(), max_actions)?;
    solve_over(instance, &actions, Method::FullLp, PairRows::Auto(8))
}

/// Optimal persuasive scheme over the best-response catalog only.
pub fn solve_reduced(instance: &Instance) -> Result<SolveResult> {
    let catalog = best_response::enumerate_best_responses(instance)?;
    solve_with_catalog(instance, &catalog)
}

pub fn solve_with_catalog(instance: &Instance, catalog: &BestResponseCatalog) -> Result<SolveResult> {
    let mut res = solve_over(instance, &catalog.actions, Method::ReducedLp, PairRows::Auto(8))?;
    res.stats.notes.push(("cells".into(), catalog.cells.to_string()));
    Ok(res)
}

/// The receiver's choice at belief `xi`: best receiver value, ties broken in
/// favor of the sender. Searches `candidates` when given, otherwise uses the
/// combinatorial optimizer (linear utilities) or full enumeration.
pub fn receiver_choice(instance: &Instance, xi: &[Rational], candidates: Option<&[ActionSet]>) -> Result<ActionSet> {
    let sense = instance.sense;
    if candidates.is_none() {
        if let (Some(r), Some(s)) = (instance.receiver.linear(), instance.sender.linear()) {
            let wr = expected_weights(r, xi);
            let ws = expected_weights(s, xi);
            let weights: Vec<LexPair<Rational>> = wr.into_iter().zip(ws).map(|(a, b)| LexPair::new(a, b)).collect();
            return matroid::max_weight_action(&instance.constraint, sense, &weights);
        }
    }
    let owned;
    let list = match candidates {
        Some(c) => c,
        None => {
            owned = enumerate_actions(&instance.constraint, instance.n())?;
            &owned
        }
    };
    let mut best: Option<(ActionSet, Rational, Rational)> = None;
    for a in list {
        let rv = expectation(&instance.receiver, xi, a)?;
        let sv = expectation(&instance.sender, xi, a)?;
        let better = match &best {
            None => true,
            Some((_, br, bs)) => sense.prefers(&rv, br) || (rv == *br && sense.prefers(&sv, bs)),
        };
        if better {
            best = Some((a.clone(), rv, sv));
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| Error::InvalidInstance("no feasible actions".into()))
}

/// `Σ_θ xi(θ)·u_θ(S)` for an unnormalized or normalized belief.
pub fn expectation(utility: &UtilitySpec, xi: &[Rational], action: &ActionSet) -> Result<Rational> {
    let mut total = int(0);
    for (t, x) in xi.iter().enumerate() {
        if !x.is_zero() {
            total += x * utility.value(t, action)?;
        }
    }
    Ok(total)
}

/// The scheme that reveals nothing: the receiver's prior choice in every state.
pub fn uninformative(instance: &Instance) -> Result<SolveResult> {
    let action = receiver_choice(instance, &instance.prior, None)?;
    let scheme = SignalingScheme::constant(action, instance.num_states());
    let value = instance.sender_value(&scheme)?;
    Ok(SolveResult {
        scheme,
        sender_value: value,
        method: Method::Uninformative,
        catalog_size: 1,
        stats: LpStats::default(),
    })
}

/// How deviations were searched in [`check_persuasive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMethod {
    Enumeration,
    Optimizer,
    Catalog,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Persuasiveness {
    Persuasive(CheckMethod),
    /// `deviation` beats `action` under the posterior of `action` by `slack > 0`.
    Violation {
        action: ActionSet,
        deviation: ActionSet,
        slack: Rational,
        method: CheckMethod,
    },
}

impl Persuasiveness {
    pub fn is_persuasive(&self) -> bool {
        matches!(self, Persuasiveness::Persuasive(_))
    }
}

pub fn check_persuasive(instance: &Instance, scheme: &SignalingScheme) -> Result<Persuasiveness> {
    check_persuasive_limited(instance, scheme, DEFAULT_MAX_ACTIONS)
}

/// Exact check that every recommended action is a receiver best response to
/// its own posterior. Deviations come from full enumeration when it fits in
/// `max_actions`, else from the exact optimizer for linear receivers.
pub fn check_persuasive_limited(
    instance: &Instance,
    scheme: &SignalingScheme,
    max_actions: usize,
) -> Result<Persuasiveness> {
    scheme.validate(instance)?;
    let sense = instance.sense;
    let enumerated = match enumerate_actions_limited(&instance.constraint, instance.n(), max_actions) {
        Ok(a) => Some(a),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let optimizer_ok = instance.receiver.is_linear()
        && matches!(
            (&instance.constraint, sense),
            (ConstraintSpec::Path { .. }, Sense::Minimize) | (_, Sense::Maximize)
        );
    let catalog = if enumerated.is_none() && !optimizer_ok {
        match best_response::enumerate_best_responses(instance) {
            Ok(c) => Some(c.actions),
            Err(_) => None,
        }
    } else {
        None
    };
    let method = if enumerated.is_some() {
        CheckMethod::Enumeration
    } else if optimizer_ok {
        CheckMethod::Optimizer
    } else if catalog.is_some() {
        CheckMethod::Catalog
    } else {
        return Err(Error::TooLarge {
            what: "deviation search".into(),
            limit: max_actions,
        });
    };
    for (action, probs) in scheme.entries() {
        let mass = probs
            .iter()
            .zip(&instance.prior)
            .fold(int(0), |acc, (p, m)| acc + p * m);
        if mass.is_zero() {
            continue;
        }
        let xi: Vec<Rational> = probs.iter().zip(&instance.prior).map(|(p, m)| p * m / &mass).collect();
        let mine = expectation(&instance.receiver, &xi, action)?;
        let best = match (&enumerated, &catalog) {
            (Some(list), _) | (None, Some(list)) => best_in(instance, &xi, list)?,
            (None, None) => {
                let w = expected_weights(instance.receiver.linear().expect("checked linear"), &xi);
                matroid::max_weight_action(&instance.constraint, sense, &w)?
            }
        };
        let theirs = expectation(&instance.receiver, &xi, &best)?;
        if sense.prefers(&theirs, &mine) {
            let slack = match sense {
                Sense::Maximize => &theirs - &mine,
                Sense::Minimize => &mine - &theirs,
            };
            return Ok(Persuasiveness::Violation {
                action: action.clone(),
                deviation: best,
                slack,
                method,
            });
        }
    }
    Ok(Persuasiveness::Persuasive(method))
}

fn best_in(instance: &Instance, xi: &[Rational], list: &[ActionSet]) -> Result<ActionSet> {
    let mut best: Option<(ActionSet, Rational)> = None;
    for a in list {
        let v = expectation(&instance.receiver, xi, a)?;
        if best.as_ref().is_none_or(|(_, bv)| instance.sense.prefers(&v, bv)) {
            best = Some((a.clone(), v));
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| Error::InvalidInstance("no feasible actions".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, ratio};
    use crate::matroid::k4;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn instance(prior: Vec<Rational>, s: &[&[i64]], r: &[&[i64]], c: ConstraintSpec) -> Instance {
        let k = prior.len();
        let n = s[0].len();
        Instance::new(
            (0..k).map(|t| format!("t{t}")).collect(),
            prior,
            (0..n).map(|i| format!("e{i}")).collect(),
            UtilitySpec::Linear(ints(s)),
            UtilitySpec::Linear(ints(r)),
            c,
            Sense::Maximize,
        )
        .unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let u = enumerate_actions(&ConstraintSpec::Uniform { k: 1 }, 3).unwrap();
        assert_eq!(u.len(), 4);
        let forests = enumerate_actions(&k4(), 6).unwrap();
        assert_eq!(forests.iter().filter(|s| s.len() == 3).count(), 16);
        assert!(matches!(
            enumerate_actions_limited(&ConstraintSpec::Uniform { k: 2 }, 4, 5),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            enumerate_actions(&ConstraintSpec::Uniform { k: 2 }, 21),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn single_state_is_deterministic() {
        let inst = instance(
            vec![int(1)],
            &[&[5, 1, 0]],
            &[&[2, 2, 1]],
            ConstraintSpec::Uniform { k: 1 },
        );
        let res = solve_full(&inst).unwrap();
        assert_eq!(res.sender_value, int(5));
        assert_eq!(res.scheme.support().count(), 1);
    }

    #[test]
    fn aligned_utilities_reveal_everything() {
        let u: &[&[i64]] = &[&[3, 1, 2], &[0, 4, 1]];
        let inst = instance(vec![ratio(1, 3), ratio(2, 3)], u, u, ConstraintSpec::Uniform { k: 2 });
        let res = solve_full(&inst).unwrap();
        assert_eq!(res.sender_value, ratio(1, 3) * int(5) + ratio(2, 3) * int(5));
        assert!(check_persuasive(&inst, &res.scheme).unwrap().is_persuasive());
    }

    #[test]
    fn lazy_and_explicit_rows_agree() {
        let inst = instance(
            vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
            &[&[1, 0, 2, 0], &[0, 3, 0, 1], &[2, 2, 0, 0]],
            &[&[4, 1, 2, 3], &[1, 5, 2, 2], &[3, 3, 1, 6]],
            ConstraintSpec::Uniform { k: 2 },
        );
        let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
        let a = solve_over(&inst, &actions, Method::FullLp, PairRows::All).unwrap();
        let b = solve_over(&inst, &actions, Method::FullLp, PairRows::Lazy).unwrap();
        assert_eq!(a.sender_value, b.sender_value);
        assert!(check_persuasive(&inst, &b.scheme).unwrap().is_persuasive());
        assert!(a.sender_value >= uninformative(&inst).unwrap().sender_value);
    }

    #[test]
    fn two_state_value_matches_grid_search() {
        // Sender likes element 0 in both states; receiver prefers 0 only in state 0.
        let inst = instance(
            vec![ratio(1, 3), ratio(2, 3)],
            &[&[1, 0], &[1, 0]],
            &[&[2, 1], &[1, 3]],
            ConstraintSpec::Uniform { k: 1 },
        );
        let res = solve_full(&inst).unwrap();
        // Grid search over "recommend 0 in state 1 with probability p".
        let mut best = 0.0f64;
        for i in 0..=10_000 {
            let p = i as f64 / 10_000.0;
            // Posterior after recommending 0: (1/3, 2p/3); receiver wants 2·(1/3) + 1·(2p/3) >= 1/3 + 3·(2p/3).
            let lhs = 2.0 / 3.0 + 2.0 * p / 3.0;
            let rhs = 1.0 / 3.0 + 2.0 * p;
            if lhs >= rhs - 1e-12 {
                best = best.max(1.0 / 3.0 + 2.0 * p / 3.0);
            }
        }
        let exact: f64 = num_traits::ToPrimitive::to_f64(&res.sender_value).unwrap();
        assert!((exact - best).abs() < 1e-6, "{exact} vs {best}");
        assert_eq!(res.sender_value, ratio(1, 2));
    }

    #[test]
    fn worst_action_recommendation_is_caught() {
        let inst = instance(vec![int(1)], &[&[0, 1]], &[&[3, 1]], ConstraintSpec::Uniform { k: 1 });
        let scheme = SignalingScheme::constant(ActionSet::new([1]), 1);
        match check_persuasive(&inst, &scheme).unwrap() {
            Persuasiveness::Violation { deviation, slack, .. } => {
                assert_eq!(slack, int(2));
                assert!(deviation.contains(0));
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn path_minimization() {
        // Two parallel routes 0->1->3 and 0->2->3.
        let c = ConstraintSpec::Path {
            vertices: (0..4).map(|v| v.to_string()).collect(),
            arcs: vec![(0, 1), (1, 3), (0, 2), (2, 3)],
            source: 0,
            sink: 3,
        };
        let inst = Instance::new(
            vec!["a".into(), "b".into()],
            vec![ratio(1, 2), ratio(1, 2)],
            (0..4).map(|i| format!("e{i}")).collect(),
            UtilitySpec::Linear(ints(&[&[1, 0, 0, 0], &[1, 0, 0, 0]])),
            UtilitySpec::Linear(ints(&[&[1, 1, 3, 0], &[3, 0, 1, 0]])),
            c,
            Sense::Minimize,
        )
        .unwrap();
        let full = solve_full(&inst).unwrap();
        let none = uninformative(&inst).unwrap();
        assert!(full.sender_value <= none.sender_value);
        assert!(check_persuasive(&inst, &full.scheme).unwrap().is_persuasive());
        let p = shortest_path(
            4,
            &[(0, 1), (1, 3), (0, 2), (2, 3)],
            0,
            3,
            &[int(1), int(1), int(1), int(1)],
        )
        .unwrap();
        assert_eq!(p, ActionSet::new([0, 1]));
    }
}
