//! CCE-persuasive schemes: following the recommendation must be worth at
//! least `C`, the receiver's best value under the prior alone.
//!
//! The primal LP has one column per (state, action); its dual has two kinds
//! of variables, `x_θ` and `y ≥ 0`, and one row per column:
//!
//! ```text
//! min  Σ_θ x_θ − C·y   s.t.   x_θ − μ(θ)·r_θ(S)·y ≥ μ(θ)·s_θ(S)
//! ```
//!
//! Rows are produced on demand by a (possibly approximate) oracle. Two
//! engines are provided: an exact cutting-plane loop and the central-cut
//! ellipsoid method inside a binary search on the objective.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::field::{ceil_log2, common_denominator, int, max_or_zero, Field, Rational};
use crate::lp::{self, LpModel, Objective, Relation};
use crate::matroid::{self, MatroidOracle};
use crate::model::{ActionSet, ConstraintSpec, Instance, Sense, SignalingScheme, UtilitySpec};
use crate::persuasion::{self, enumerate_actions_limited, LpStats, Method, SolveResult, DEFAULT_MAX_ACTIONS};

/// Default cap on cutting-plane rounds.
pub const DEFAULT_CUT_CAP: usize = 10_000;
/// Dyadic precision of the ellipsoid center and matrix.
pub const ELLIPSOID_BITS: u32 = 128;

/// `(C, S_C)`: the receiver's best prior value and an action attaining it.
pub fn prior_best_value(instance: &Instance) -> Result<(Rational, ActionSet)> {
    let action = persuasion::receiver_choice(instance, &instance.prior, None)?;
    let c = persuasion::expectation(&instance.receiver, &instance.prior, &action)?;
    Ok((c, action))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Greedy on `s + y·r` for linear utilities over a matroid.
    ExactLinearGreedy,
    /// Shortest path on `s + y·r` for linear costs.
    ExactShortestPath,
    /// Marginal greedy on `s + 2y·r` with `s` monotone submodular: one half of
    /// the sender term, all of the receiver term.
    HalfGreedySubmodular,
    /// Exhaustive search over an explicit action list.
    BruteForce,
}

/// Returns, for state `θ` and `y ≥ 0`, an action `S` with
/// `s_θ(S) + y·r_θ(S) ≥ α·s_θ(S') + y·r_θ(S')` for every feasible `S'`
/// (reversed, with `α = 1`, when minimizing).
#[derive(Clone, Debug)]
pub struct ApproxOracle {
    kind: OracleKind,
    alpha: Rational,
    actions: Vec<ActionSet>,
    audit: bool,
}

impl ApproxOracle {
    /// The exact oracle suited to the instance.
    pub fn exact(instance: &Instance) -> Result<Self> {
        let linear = instance.sender.is_linear() && instance.receiver.is_linear();
        let kind = match (&instance.constraint, instance.sense, linear) {
            (ConstraintSpec::Path { .. }, Sense::Minimize, true) => OracleKind::ExactShortestPath,
            (c, Sense::Maximize, true) if c.is_matroid() => OracleKind::ExactLinearGreedy,
            _ => return Self::brute_force(instance, DEFAULT_MAX_ACTIONS),
        };
        Ok(ApproxOracle {
            kind,
            alpha: int(1),
            actions: Vec::new(),
            audit: false,
        })
    }

    pub fn half_greedy(instance: &Instance) -> Result<Self> {
        if !instance.constraint.is_matroid() || instance.sense != Sense::Maximize {
            return Err(Error::UnsupportedCombination(
                "the greedy oracle needs a matroid and a maximizing sender".into(),
            ));
        }
        if !instance.receiver.is_linear() {
            return Err(Error::NonLinearReceiver);
        }
        Ok(ApproxOracle {
            kind: OracleKind::HalfGreedySubmodular,
            alpha: Rational::new(1.into(), 2.into()),
            actions: Vec::new(),
            audit: false,
        })
    }

    pub fn brute_force(instance: &Instance, max_actions: usize) -> Result<Self> {
        Ok(ApproxOracle {
            kind: OracleKind::BruteForce,
            alpha: int(1),
            actions: enumerate_actions_limited(&instance.constraint, instance.n(), max_actions)?,
            audit: false,
        })
    }

    /// Checks every answer against exhaustive search.
    pub fn with_audit(mut self, instance: &Instance) -> Result<Self> {
        if self.actions.is_empty() {
            self.actions = persuasion::enumerate_actions(&instance.constraint, instance.n())?;
        }
        self.audit = true;
        Ok(self)
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn query(&self, instance: &Instance, state: usize, y: &Rational) -> Result<ActionSet> {
        let answer = self.answer(instance, state, y)?;
        if self.audit {
            self.audit_answer(instance, state, y, &answer)?;
        }
        Ok(answer)
    }

    fn answer(&self, instance: &Instance, state: usize, y: &Rational) -> Result<ActionSet> {
        match self.kind {
            OracleKind::ExactLinearGreedy | OracleKind::ExactShortestPath => {
                let s = instance.sender.linear().expect("linear sender");
                let r = instance.receiver.linear().expect("linear receiver");
                let w: Vec<Rational> = s[state].iter().zip(&r[state]).map(|(a, b)| a + y * b).collect();
                matroid::max_weight_action(&instance.constraint, instance.sense, &w)
            }
            OracleKind::HalfGreedySubmodular => {
                let oracle = MatroidOracle::new(&instance.constraint)?;
                let two_y = y * int(2);
                let f = |s: &ActionSet| -> Result<Rational> {
                    Ok(instance.sender.value(state, s)? + &two_y * instance.receiver.value(state, s)?)
                };
                let mut current = ActionSet::empty();
                let mut value = f(&current)?;
                loop {
                    let mut best: Option<(ActionSet, Rational)> = None;
                    for i in 0..instance.n() {
                        if current.contains(i) {
                            continue;
                        }
                        let next = current.with(i);
                        if !oracle.is_independent(&next) {
                            continue;
                        }
                        let v = f(&next)?;
                        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                            best = Some((next, v));
                        }
                    }
                    match best {
                        Some((next, v)) if v >= value => {
                            current = next;
                            value = v;
                        }
                        _ => return Ok(current),
                    }
                }
            }
            OracleKind::BruteForce => {
                let mut best: Option<(&ActionSet, Rational)> = None;
                for a in &self.actions {
                    let v = row_value(instance, state, a, y)?;
                    if best.as_ref().is_none_or(|(_, bv)| instance.sense.prefers(&v, bv)) {
                        best = Some((a, v));
                    }
                }
                best.map(|(a, _)| a.clone())
                    .ok_or_else(|| Error::InvalidInstance("no feasible actions".into()))
            }
        }
    }

    fn audit_answer(&self, instance: &Instance, state: usize, y: &Rational, answer: &ActionSet) -> Result<()> {
        let s = instance.sender.value(state, answer)?;
        let r = instance.receiver.value(state, answer)?;
        let got = &s + y * &r;
        for other in &self.actions {
            let bound =
                &self.alpha * instance.sender.value(state, other)? + y * instance.receiver.value(state, other)?;
            let ok = match instance.sense {
                Sense::Maximize => got >= bound,
                Sense::Minimize => got <= bound,
            };
            if !ok {
                return Err(Error::OracleContractViolation(format!(
                    "state {state}, y = {y}: {answer:?} gives {got}, {other:?} needs {bound}"
                )));
            }
        }
        Ok(())
    }
}

/// `s_θ(S) + y·r_θ(S)`.
fn row_value(instance: &Instance, state: usize, action: &ActionSet, y: &Rational) -> Result<Rational> {
    Ok(instance.sender.value(state, action)? + y * instance.receiver.value(state, action)?)
}

/// A point of the dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPoint {
    pub x: Vec<Rational>,
    pub y: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// The row of `(state, action)` is violated.
    Cut { state: usize, action: ActionSet },
    /// No row found violated; scaled by `1/α` the point is dual feasible.
    ApproxFeasible,
}

/// Everything the CCE solvers need about one instance.
#[derive(Clone, Debug)]
pub struct CceView<'a> {
    pub instance: &'a Instance,
    pub oracle: ApproxOracle,
    pub c: Rational,
    pub s_c: ActionSet,
    /// `None` when every sender utility is zero.
    pub bounds: Option<(Rational, Rational)>,
    pub epsilon: Rational,
    pub cut_cap: usize,
}

impl<'a> CceView<'a> {
    pub fn new(instance: &'a Instance, oracle: ApproxOracle, epsilon: Rational) -> Result<Self> {
        if !epsilon.is_positive() || epsilon >= *oracle.alpha() {
            return Err(Error::ParameterError(format!(
                "epsilon {epsilon} must lie in (0, {})",
                oracle.alpha()
            )));
        }
        let (c, s_c) = prior_best_value(instance)?;
        let bounds = match compute_v_bounds(instance) {
            Ok(b) => Some(b),
            Err(Error::DegenerateBounds) => None,
            Err(e) => return Err(e),
        };
        Ok(CceView {
            instance,
            oracle,
            c,
            s_c,
            bounds,
            epsilon,
            cut_cap: DEFAULT_CUT_CAP,
        })
    }

    pub fn alpha(&self) -> &Rational {
        self.oracle.alpha()
    }

    fn row_rhs(&self, state: usize, action: &ActionSet, y: &Rational) -> Result<Rational> {
        Ok(&self.instance.prior[state] * row_value(self.instance, state, action, y)?)
    }
}

/// One oracle call per state; the first violated row wins.
pub fn separation(view: &CceView, point: &DualPoint) -> Result<Separation> {
    Ok(match violated_rows(view, point, true)?.into_iter().next() {
        Some((state, action)) => Separation::Cut { state, action },
        None => Separation::ApproxFeasible,
    })
}

fn violated_rows(view: &CceView, point: &DualPoint, first_only: bool) -> Result<Vec<(usize, ActionSet)>> {
    let mut out = Vec::new();
    for state in 0..view.instance.num_states() {
        let action = view.oracle.query(view.instance, state, &point.y)?;
        let rhs = view.row_rhs(state, &action, &point.y)?;
        let violated = match view.instance.sense {
            Sense::Maximize => point.x[state] < rhs,
            Sense::Minimize => point.x[state] > rhs,
        };
        if violated {
            out.push((state, action));
            if first_only {
                break;
            }
        }
    }
    Ok(out)
}

type Columns = BTreeSet<(usize, ActionSet)>;

fn seed_columns(view: &CceView) -> Columns {
    (0..view.instance.num_states()).map(|t| (t, view.s_c.clone())).collect()
}

/// Restricted primal over `columns`: the CCE row and one simplex row per state.
fn restricted_primal(instance: &Instance, c: &Rational, columns: &Columns, method: Method) -> Result<SolveResult> {
    let mu = &instance.prior;
    let k = instance.num_states();
    let mut model = LpModel::new(match instance.sense {
        Sense::Maximize => Objective::Maximize,
        Sense::Minimize => Objective::Minimize,
    });
    let cols: Vec<&(usize, ActionSet)> = columns.iter().collect();
    let mut cce_row = Vec::new();
    let mut simplex_rows = vec![Vec::new(); k];
    for (j, (t, a)) in cols.iter().enumerate() {
        let v = model.add_var(format!("phi[{t}]{a:?}"), &mu[*t] * instance.sender.value(*t, a)?);
        debug_assert_eq!(v, j);
        cce_row.push((v, &mu[*t] * instance.receiver.value(*t, a)?));
        simplex_rows[*t].push((v, int(1)));
    }
    let rel = match instance.sense {
        Sense::Maximize => Relation::Ge,
        Sense::Minimize => Relation::Le,
    };
    model.add_row(cce_row, rel, c.clone());
    for row in simplex_rows {
        model.add_row(row, Relation::Eq, int(1));
    }
    let sol = lp::solve(&model)?.optimal()?;
    let mut scheme = SignalingScheme::new();
    for (j, (t, a)) in cols.iter().enumerate() {
        if !sol.x[j].is_zero() {
            scheme.add(*t, a.clone(), sol.x[j].clone(), k);
        }
    }
    let scheme = scheme.strip_zeros();
    assert_eq!(instance.sender_value(&scheme)?, sol.value);
    Ok(SolveResult {
        scheme,
        sender_value: sol.value,
        method,
        catalog_size: columns.len(),
        stats: LpStats {
            solves: 1,
            pivots: sol.pivots,
            columns: model.num_vars(),
            rows: model.rows.len(),
            notes: Vec::new(),
        },
    })
}

/// Optimal CCE-persuasive scheme by brute force over the given actions.
pub fn solve_cce_brute_force(instance: &Instance, actions: &[ActionSet]) -> Result<SolveResult> {
    let (c, _) = prior_best_value(instance)?;
    let columns: Columns = (0..instance.num_states())
        .flat_map(|t| actions.iter().map(move |a| (t, a.clone())))
        .collect();
    restricted_primal(instance, &c, &columns, Method::CceBruteForce)
}

/// Whether `(C, S)` satisfies the CCE row exactly.
pub fn satisfies_cce(instance: &Instance, scheme: &SignalingScheme) -> Result<bool> {
    let (c, _) = prior_best_value(instance)?;
    let mut total = int(0);
    for (a, probs) in scheme.entries() {
        for (t, p) in probs.iter().enumerate() {
            total += &instance.prior[t] * p * instance.receiver.value(t, a)?;
        }
    }
    Ok(match instance.sense {
        Sense::Maximize => total >= c,
        Sense::Minimize => total <= c,
    })
}

/// Exact optimum by cutting planes on the dual (requires an exact oracle).
pub fn solve_cce_exact(view: &CceView) -> Result<SolveResult> {
    Ok(solve_cce_exact_with_dual(view)?.0)
}

/// As [`solve_cce_exact`], also returning the final dual point.
pub fn solve_cce_exact_with_dual(view: &CceView) -> Result<(SolveResult, DualPoint)> {
    if *view.alpha() != int(1) {
        return Err(Error::ParameterError(
            "the cutting-plane engine needs an exact oracle".into(),
        ));
    }
    let inst = view.instance;
    let k = inst.num_states();
    let mut columns = seed_columns(view);
    let mut rounds = 0;
    let mut pivots = 0;
    loop {
        if rounds == view.cut_cap {
            return Err(Error::IterationCap(view.cut_cap));
        }
        rounds += 1;
        let mut model = LpModel::new(match inst.sense {
            Sense::Maximize => Objective::Minimize,
            Sense::Minimize => Objective::Maximize,
        });
        let xs: Vec<usize> = (0..k)
            .map(|t| model.add_bounded_var(format!("x{t}"), int(1), None, None))
            .collect();
        let y = model.add_var("y", -view.c.clone());
        let rel = match inst.sense {
            Sense::Maximize => Relation::Ge,
            Sense::Minimize => Relation::Le,
        };
        for (t, a) in &columns {
            let mu = &inst.prior[*t];
            model.add_row(
                vec![(xs[*t], int(1)), (y, -(mu * inst.receiver.value(*t, a)?))],
                rel,
                mu * inst.sender.value(*t, a)?,
            );
        }
        let sol = lp::solve(&model)?.optimal()?;
        pivots += sol.pivots;
        let point = DualPoint {
            x: xs.iter().map(|&j| sol.x[j].clone()).collect(),
            y: sol.x[y].clone(),
        };
        let fresh: Vec<(usize, ActionSet)> = violated_rows(view, &point, false)?
            .into_iter()
            .filter(|c| !columns.contains(c))
            .collect();
        if fresh.is_empty() {
            let mut res = restricted_primal(inst, &view.c, &columns, Method::CceExact)?;
            assert_eq!(res.sender_value, sol.value, "restricted primal and dual disagree");
            res.stats.solves += rounds;
            res.stats.pivots += pivots;
            res.stats.notes.push(("cut_rounds".into(), rounds.to_string()));
            return Ok((res, point));
        }
        columns.extend(fresh);
    }
}

/// `(v_min, v_max)` with `v_min < OPT < v_max` whenever `OPT > 0`.
pub fn compute_v_bounds(instance: &Instance) -> Result<(Rational, Rational)> {
    let n = instance.n();
    let k = instance.num_states();
    if instance.sender.all_values().into_iter().all(Field::is_zero) {
        return Err(Error::DegenerateBounds);
    }
    let mut singles = Vec::with_capacity(n * k);
    for t in 0..k {
        for i in 0..n {
            singles.push(instance.sender.singleton(t, i)?);
        }
    }
    let v_max = int(n as i64) * max_or_zero(singles.iter()) + int(1);
    let s_min = instance
        .sender
        .all_values()
        .into_iter()
        .filter(|v| v.is_positive())
        .min()
        .cloned()
        .expect("some sender value is positive");
    let mu_min = instance.prior.iter().min().cloned().expect("at least one state");
    let q_mu = common_denominator(instance.prior.iter());
    let q_r = common_denominator(instance.receiver.all_values());
    let r_span = receiver_span(&instance.receiver, n);
    let phi_min = if r_span.is_zero() {
        int(1)
    } else {
        let bound = Rational::from_integer(q_mu * q_r) * r_span;
        let inv = int(1) / bound;
        inv.min(int(1))
    };
    let v_min = mu_min * phi_min * s_min / int(2);
    if v_min >= v_max {
        return Err(Error::ParameterError("v_min is not below v_max".into()));
    }
    Ok((v_min, v_max))
}

/// An upper bound on `r_θ(S)` over states and actions.
fn receiver_span(r: &UtilitySpec, n: usize) -> Rational {
    match r {
        UtilitySpec::Linear(v) => int(n as i64) * max_or_zero(v.iter().flatten()),
        UtilitySpec::Tabular(_) => max_or_zero(r.all_values()),
    }
}

/// Binary search on the dual objective with an ellipsoid feasibility test
/// per step, then an exact LP over the rows the decisive run produced.
/// Returns an `(α − ε)`-approximate scheme. Maximization only.
pub fn solve_cce_approx(view: &CceView) -> Result<SolveResult> {
    let inst = view.instance;
    if inst.sense != Sense::Maximize {
        return Err(Error::UnsupportedCombination(
            "the ellipsoid engine handles maximizing senders only".into(),
        ));
    }
    let Some((v_min, v_max)) = view.bounds.clone() else {
        return prior_scheme(view, vec![("v_bounds".into(), "degenerate".into())]);
    };
    let eps_prime = &view.epsilon * &v_min;
    let searches = ceil_log2(&(&v_max / &eps_prime)).max(0) as usize + 1;
    let geometry = Geometry::new(view, &v_max, &eps_prime);

    let mut lo = int(0);
    let mut hi = v_max.clone();
    let mut decisive: Option<Columns> = None;
    let mut notes = Vec::new();
    let mut total_iterations = 0;
    for _ in 0..searches {
        let v = (&lo + &hi) / int(2);
        let run = geometry.run(view, &v)?;
        total_iterations += run.iterations;
        notes.push((
            format!("v={v}"),
            format!(
                "{} after {} iterations",
                if run.feasible { "approx-feasible" } else { "infeasible" },
                run.iterations
            ),
        ));
        if run.feasible {
            hi = v;
        } else {
            lo = v;
            decisive = Some(run.columns);
        }
    }
    notes.push(("iterations".into(), total_iterations.to_string()));
    notes.push(("bracket".into(), format!("[{lo}, {hi}]")));
    let Some(mut columns) = decisive else {
        return prior_scheme(view, notes);
    };
    columns.extend(seed_columns(view));
    let mut res = restricted_primal(inst, &view.c, &columns, Method::CceEllipsoid)?;
    res.stats.notes = notes;
    Ok(res)
}

fn prior_scheme(view: &CceView, notes: Vec<(String, String)>) -> Result<SolveResult> {
    let scheme = SignalingScheme::constant(view.s_c.clone(), view.instance.num_states());
    Ok(SolveResult {
        sender_value: view.instance.sender_value(&scheme)?,
        scheme,
        method: Method::CceEllipsoid,
        catalog_size: 1,
        stats: LpStats {
            notes,
            ..LpStats::default()
        },
    })
}

struct Geometry {
    /// Box upper bounds: `X_θ` for each state, then `Y`.
    upper: Vec<Rational>,
    max_iterations: usize,
}

struct Run {
    feasible: bool,
    columns: Columns,
    iterations: usize,
}

impl Geometry {
    fn new(view: &CceView, v_max: &Rational, eps_prime: &Rational) -> Self {
        let inst = view.instance;
        let k = inst.num_states();
        let d = k + 1;
        let q_r = Rational::from_integer(common_denominator(inst.receiver.all_values()));
        let y_max = int(2) * v_max * q_r;
        let span = receiver_span(&inst.receiver, inst.n());
        let mut upper: Vec<Rational> = inst.prior.iter().map(|mu| mu * (v_max + &y_max * &span)).collect();
        upper.push(y_max);
        // Volume ratio per dimension is at most 2R·4D(1 + v_max)/ε'.
        let radius_sq: Rational = upper.iter().map(|u| u * u / int(4)).sum();
        let log_radius = (ceil_log2(&radius_sq).max(0) + 1) / 2 + 1;
        let log_rest = ceil_log2(&(int(8 * d as i64) * (int(1) + v_max) / eps_prime)).max(0);
        let log_ratio = (d as i64) * (log_radius + log_rest);
        // ln x <= 0.7 log2 x, and each step shrinks volume by e^(-1/(4(D+1))).
        let n = (4 * (d as i64 + 1) * log_ratio * 7).div_euclid(10) + 1;
        Geometry {
            upper,
            max_iterations: n as usize,
        }
    }

    /// Central-cut ellipsoid on `{box, Σx − C·y ≤ v, dual rows}`. The center
    /// and shape matrix are kept in fixed point with `ELLIPSOID_BITS`
    /// fractional bits; cuts are scaled to integer vectors so the update
    /// needs integer arithmetic only. The `β` blow-up absorbs the rounding.
    fn run(&self, view: &CceView, v: &Rational) -> Result<Run> {
        let inst = view.instance;
        let d = inst.num_states() + 1;
        let scale = BigInt::from(1) << ELLIPSOID_BITS;
        let dd = BigInt::from(d * d);
        // expand = β·D²/(D² − 1) with β = 1 + 1/(16D²), as num/den.
        let expand_num: BigInt = (BigInt::from(16) * &dd + 1) * &dd;
        let expand_den: BigInt = BigInt::from(16) * &dd * (&dd - 1);
        let d1 = BigInt::from(d + 1);

        let fixed = |q: &Rational| -> BigInt { (q * Rational::from_integer(scale.clone())).floor().to_integer() };
        let mut center: Vec<BigInt> = self.upper.iter().map(|u| fixed(&(u / int(2)))).collect();
        let radius_sq: Rational = self.upper.iter().map(|u| u * u / int(4)).sum();
        let r2: BigInt = fixed(&radius_sq) + 1;
        let mut q: Vec<Vec<BigInt>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { r2.clone() } else { BigInt::from(0) })
                    .collect()
            })
            .collect();
        let mut columns = Columns::new();
        for it in 0..self.max_iterations {
            let z: Vec<Rational> = center.iter().map(|c| Rational::new(c.clone(), scale.clone())).collect();
            let Some(a) = self.violated(view, v, &z, &mut columns)? else {
                return Ok(Run {
                    feasible: true,
                    columns,
                    iterations: it,
                });
            };
            let den = Rational::from_integer(common_denominator(a.iter()));
            let a: Vec<BigInt> = a.iter().map(|x| (x * &den).to_integer()).collect();
            // g = Q·a = 2^B·P·a and a·g = 2^B·aᵀPa.
            let g: Vec<BigInt> = q
                .iter()
                .map(|row| row.iter().zip(&a).map(|(x, y)| x * y).sum())
                .collect();
            let aga: BigInt = a.iter().zip(&g).map(|(x, y)| x * y).sum();
            if aga <= BigInt::from(0) {
                break;
            }
            // sqrt(aᵀPa)·2^B, rounded down so the step is never too short.
            let root = (&aga << ELLIPSOID_BITS).sqrt();
            if root == BigInt::from(0) {
                break;
            }
            for (c, gi) in center.iter_mut().zip(&g) {
                *c -= (gi << ELLIPSOID_BITS) / (&root * &d1);
            }
            for i in 0..d {
                for j in i..d {
                    let inner: BigInt = &d1 * &aga * &q[i][j] - BigInt::from(2) * &g[i] * &g[j];
                    let e = (inner * &expand_num).div_floor(&(&expand_den * &d1 * &aga));
                    q[i][j] = e.clone();
                    q[j][i] = e;
                }
            }
        }
        Ok(Run {
            feasible: false,
            columns,
            iterations: self.max_iterations,
        })
    }

    /// A constraint `a·z ≤ b` violated at `z`, as the vector `a`; `None` if
    /// every test passes. Order: box, objective row, separation.
    fn violated(
        &self,
        view: &CceView,
        v: &Rational,
        z: &[Rational],
        columns: &mut Columns,
    ) -> Result<Option<Vec<Rational>>> {
        let d = z.len();
        let unit = |j: usize, sign: i64| -> Vec<Rational> {
            (0..d).map(|i| if i == j { int(sign) } else { int(0) }).collect()
        };
        for j in 0..d {
            if z[j].is_negative() {
                return Ok(Some(unit(j, -1)));
            }
            if z[j] > self.upper[j] {
                return Ok(Some(unit(j, 1)));
            }
        }
        let k = d - 1;
        let objective: Rational = z[..k].iter().sum::<Rational>() - &view.c * &z[k];
        if objective > *v {
            let mut a = vec![int(1); d];
            a[k] = -view.c.clone();
            return Ok(Some(a));
        }
        let point = DualPoint {
            x: z[..k].to_vec(),
            y: z[k].clone(),
        };
        match separation(view, &point)? {
            Separation::ApproxFeasible => Ok(None),
            Separation::Cut { state, action } => {
                let mut a = unit(state, -1);
                a[k] = &view.instance.prior[state] * view.instance.receiver.value(state, &action)?;
                columns.insert((state, action));
                Ok(Some(a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ratio;
    use crate::persuasion::{enumerate_actions, solve_full, uninformative};

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

    fn sample() -> Instance {
        instance(
            vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
            &[&[1, 0, 2, 0], &[0, 3, 0, 1], &[2, 2, 0, 0]],
            &[&[4, 1, 2, 3], &[1, 5, 2, 2], &[3, 3, 1, 6]],
            ConstraintSpec::Uniform { k: 2 },
        )
    }

    #[test]
    fn prior_best_examples() {
        let one = instance(vec![int(1)], &[&[0, 0]], &[&[2, 7]], ConstraintSpec::Uniform { k: 1 });
        assert_eq!(prior_best_value(&one).unwrap(), (int(7), ActionSet::new([1])));
        let two = instance(
            vec![ratio(1, 2), ratio(1, 2)],
            &[&[0], &[0]],
            &[&[2], &[0]],
            ConstraintSpec::Uniform { k: 1 },
        );
        assert_eq!(prior_best_value(&two).unwrap().0, int(1));
    }

    #[test]
    fn v_bounds_examples() {
        let inst = instance(
            vec![int(1)],
            &[&[5, 1, 0, 2]],
            &[&[1, 1, 1, 1]],
            ConstraintSpec::Uniform { k: 2 },
        );
        assert_eq!(compute_v_bounds(&inst).unwrap().1, int(21));
        let zero = instance(vec![int(1)], &[&[0, 0]], &[&[1, 1]], ConstraintSpec::Uniform { k: 1 });
        assert_eq!(compute_v_bounds(&zero), Err(Error::DegenerateBounds));
    }

    #[test]
    fn separation_examples() {
        let inst = sample();
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), ratio(1, 10)).unwrap();
        let origin = DualPoint {
            x: vec![int(0); 3],
            y: int(0),
        };
        assert!(matches!(separation(&view, &origin).unwrap(), Separation::Cut { .. }));
        let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
        let x = (0..3)
            .map(|t| {
                let best = actions.iter().map(|a| inst.sender.value(t, a).unwrap()).max().unwrap();
                &inst.prior[t] * best
            })
            .collect();
        let dominating = DualPoint { x, y: int(0) };
        assert_eq!(separation(&view, &dominating).unwrap(), Separation::ApproxFeasible);
    }

    #[test]
    fn exact_engine_matches_brute_force_and_sandwich() {
        let inst = sample();
        let view = CceView::new(
            &inst,
            ApproxOracle::exact(&inst).unwrap().with_audit(&inst).unwrap(),
            ratio(1, 10),
        )
        .unwrap();
        let (exact, dual) = solve_cce_exact_with_dual(&view).unwrap();
        let actions = enumerate_actions(&inst.constraint, inst.n()).unwrap();
        let brute = solve_cce_brute_force(&inst, &actions).unwrap();
        assert_eq!(exact.sender_value, brute.sender_value);
        assert!(satisfies_cce(&inst, &exact.scheme).unwrap());
        let pers = solve_full(&inst).unwrap().sender_value;
        assert!(exact.sender_value >= pers);
        assert!(pers >= uninformative(&inst).unwrap().sender_value);
        for t in 0..3 {
            for a in &actions {
                let rhs =
                    &inst.prior[t] * (inst.sender.value(t, a).unwrap() + &dual.y * inst.receiver.value(t, a).unwrap());
                assert!(dual.x[t] >= rhs);
            }
        }
    }

    #[test]
    fn aligned_utilities_reach_full_information() {
        let u: &[&[i64]] = &[&[3, 1], &[0, 4]];
        let inst = instance(vec![ratio(1, 2), ratio(1, 2)], u, u, ConstraintSpec::Uniform { k: 1 });
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), ratio(1, 10)).unwrap();
        assert_eq!(solve_cce_exact(&view).unwrap().sender_value, ratio(7, 2));
    }

    #[test]
    fn ellipsoid_within_epsilon() {
        let inst = instance(
            vec![ratio(1, 2), ratio(1, 2)],
            &[&[1, 0, 2], &[0, 3, 1]],
            &[&[4, 1, 2], &[1, 5, 2]],
            ConstraintSpec::Uniform { k: 1 },
        );
        let eps = ratio(1, 10);
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), eps.clone()).unwrap();
        let opt = solve_cce_exact(&view).unwrap().sender_value;
        let approx = solve_cce_approx(&view).unwrap();
        assert!(approx.sender_value <= opt);
        assert!(
            approx.sender_value >= (int(1) - eps) * &opt,
            "{} vs {}",
            approx.sender_value,
            opt
        );
        assert!(satisfies_cce(&inst, &approx.scheme).unwrap());
    }

    #[test]
    fn zero_sender_returns_prior_scheme() {
        let inst = instance(
            vec![ratio(1, 2), ratio(1, 2)],
            &[&[0, 0], &[0, 0]],
            &[&[1, 2], &[2, 1]],
            ConstraintSpec::Uniform { k: 1 },
        );
        let view = CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), ratio(1, 10)).unwrap();
        assert_eq!(solve_cce_approx(&view).unwrap().sender_value, int(0));
    }

    #[test]
    fn bad_epsilon_is_rejected() {
        let inst = sample();
        assert!(matches!(
            CceView::new(&inst, ApproxOracle::exact(&inst).unwrap(), int(1)),
            Err(Error::ParameterError(_))
        ));
    }
}
