//! Core domain types: instances, utilities, constraints, schemes and posteriors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{int, Field, Rational};
use crate::matroid::MatroidOracle;
use crate::persuasion::paths;

/// Largest ground set for which tabular utilities are accepted.
pub const MAX_TABULAR_ELEMENTS: usize = 16;

/// A combinatorial action: a set of element indices, kept sorted and unique.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ActionSet(Vec<usize>);

impl ActionSet {
    pub fn new(elements: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = elements.into_iter().collect();
        ActionSet(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        ActionSet(Vec::new())
    }

    /// Members of the bitmask `mask` over elements `0..n`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        ActionSet((0..n).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&i) {
            v.insert(pos, i);
        }
        ActionSet(v)
    }

    pub fn is_subset_of(&self, other: &ActionSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromIterator<usize> for ActionSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        ActionSet::new(iter)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// `Greater` when `a` is strictly preferred to `b` by an agent with this sense.
    pub fn prefers<F: Field>(self, a: &F, b: &F) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

/// Per-state utility (or cost) set functions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UtilitySpec {
    /// `values[θ][i]` is the value of the singleton `{i}` in state `θ`.
    Linear(Vec<Vec<Rational>>),
    /// Explicit value per action and state.
    Tabular(Vec<BTreeMap<ActionSet, Rational>>),
}

impl UtilitySpec {
    pub fn is_linear(&self) -> bool {
        matches!(self, UtilitySpec::Linear(_))
    }

    pub fn num_states(&self) -> usize {
        match self {
            UtilitySpec::Linear(v) => v.len(),
            UtilitySpec::Tabular(v) => v.len(),
        }
    }

    pub fn value(&self, state: usize, action: &ActionSet) -> Result<Rational> {
        match self {
            UtilitySpec::Linear(v) => Ok(action.elements().iter().fold(int(0), |acc, &i| acc + &v[state][i])),
            UtilitySpec::Tabular(t) => t[state]
                .get(action)
                .cloned()
                .ok_or_else(|| Error::MissingTabularEntry(action.elements().to_vec())),
        }
    }

    /// Value of `{i}` in `state`.
    pub fn singleton(&self, state: usize, i: usize) -> Result<Rational> {
        match self {
            UtilitySpec::Linear(v) => Ok(v[state][i].clone()),
            UtilitySpec::Tabular(_) => self.value(state, &ActionSet::new([i])),
        }
    }

    /// Linear coefficients, if this utility is linear.
    pub fn linear(&self) -> Option<&[Vec<Rational>]> {
        match self {
            UtilitySpec::Linear(v) => Some(v),
            UtilitySpec::Tabular(_) => None,
        }
    }

    /// Every stored number, in an unspecified order.
    pub fn all_values(&self) -> Vec<&Rational> {
        match self {
            UtilitySpec::Linear(v) => v.iter().flatten().collect(),
            UtilitySpec::Tabular(t) => t.iter().flat_map(|m| m.values()).collect(),
        }
    }

    fn restrict_states(&self, keep: &[usize]) -> UtilitySpec {
        match self {
            UtilitySpec::Linear(v) => UtilitySpec::Linear(keep.iter().map(|&s| v[s].clone()).collect()),
            UtilitySpec::Tabular(t) => UtilitySpec::Tabular(keep.iter().map(|&s| t[s].clone()).collect()),
        }
    }
}

/// Black-box independence test for matroids given only by oracle access.
pub trait IndependenceOracle: Send + Sync + fmt::Debug {
    fn is_independent(&self, action: &ActionSet) -> bool;
}

/// A matroid known only through an independence oracle.
#[derive(Clone, Debug)]
pub struct OracleMatroid {
    pub id: String,
    pub oracle: Arc<dyn IndependenceOracle>,
    /// Concrete family behind the oracle, kept for serialization only.
    pub wraps: Option<Box<ConstraintSpec>>,
}

impl OracleMatroid {
    /// Hides `inner` behind an opaque oracle.
    pub fn wrapping(id: impl Into<String>, inner: ConstraintSpec) -> Result<Self> {
        let oracle = MatroidOracle::new(&inner)?;
        Ok(OracleMatroid {
            id: id.into(),
            oracle: Arc::new(oracle),
            wraps: Some(Box::new(inner)),
        })
    }

    pub fn custom(id: impl Into<String>, oracle: Arc<dyn IndependenceOracle>) -> Self {
        OracleMatroid {
            id: id.into(),
            oracle,
            wraps: None,
        }
    }
}

impl PartialEq for OracleMatroid {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.wraps == other.wraps
    }
}

impl Eq for OracleMatroid {}

/// The receiver's feasible action family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConstraintSpec {
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    /// Element `i` is the undirected edge `edges[i]`.
    Graphic {
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
    },
    Oracle(OracleMatroid),
    /// Element `i` is the directed arc `arcs[i]`; actions are simple source-sink paths.
    Path {
        vertices: Vec<String>,
        arcs: Vec<(usize, usize)>,
        source: usize,
        sink: usize,
    },
}

impl ConstraintSpec {
    pub fn is_matroid(&self) -> bool {
        !matches!(self, ConstraintSpec::Path { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConstraintSpec::Uniform { .. } => "uniform",
            ConstraintSpec::Partition { .. } => "partition",
            ConstraintSpec::Graphic { .. } => "graphic",
            ConstraintSpec::Oracle(_) => "oracle",
            ConstraintSpec::Path { .. } => "path",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        match self {
            ConstraintSpec::Uniform { k } => {
                if *k < 1 || *k > n {
                    return bad(format!("uniform rank k={k} outside 1..={n}"));
                }
            }
            ConstraintSpec::Partition { blocks, caps } => {
                if blocks.len() != caps.len() {
                    return bad("partition blocks and caps differ in length".into());
                }
                if caps.contains(&0) {
                    return bad("partition caps must be positive".into());
                }
                let mut seen = vec![false; n];
                for &e in blocks.iter().flatten() {
                    if e >= n || seen[e] {
                        return bad(format!("element {e} out of range or in two blocks"));
                    }
                    seen[e] = true;
                }
                if seen.iter().any(|s| !s) {
                    return bad("partition blocks do not cover the ground set".into());
                }
            }
            ConstraintSpec::Graphic { vertices, edges } => {
                if edges.len() != n {
                    return bad(format!("graphic: {} edges for {n} elements", edges.len()));
                }
                if edges.iter().any(|&(u, v)| u >= vertices.len() || v >= vertices.len()) {
                    return bad("graphic: edge endpoint out of range".into());
                }
            }
            ConstraintSpec::Oracle(_) => {}
            ConstraintSpec::Path {
                vertices,
                arcs,
                source,
                sink,
            } => {
                if arcs.len() != n {
                    return bad(format!("path: {} arcs for {n} elements", arcs.len()));
                }
                let nv = vertices.len();
                if *source >= nv || *sink >= nv || source == sink {
                    return bad("path: invalid source or sink".into());
                }
                if arcs.iter().any(|&(u, v)| u >= nv || v >= nv) {
                    return bad("path: arc endpoint out of range".into());
                }
                if !paths::sink_reachable(nv, arcs, *source, *sink) {
                    return bad("path: sink unreachable from source".into());
                }
            }
        }
        Ok(())
    }
}

/// A Bayesian persuasion instance with combinatorial receiver actions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub states: Vec<String>,
    pub prior: Vec<Rational>,
    pub elements: Vec<String>,
    pub sender: UtilitySpec,
    pub receiver: UtilitySpec,
    pub constraint: ConstraintSpec,
    pub sense: Sense,
}

impl Instance {
    /// Validates and normalizes an instance. States with zero prior mass are
    /// dropped together with their utility rows.
    pub fn new(
        states: Vec<String>,
        prior: Vec<Rational>,
        elements: Vec<String>,
        sender: UtilitySpec,
        receiver: UtilitySpec,
        constraint: ConstraintSpec,
        sense: Sense,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        let n = elements.len();
        if states.is_empty() {
            return bad("no states".into());
        }
        if prior.len() != states.len() {
            return bad("prior length differs from number of states".into());
        }
        if prior.iter().any(Field::is_negative) {
            return bad("negative prior probability".into());
        }
        let total = prior.iter().fold(int(0), |a, p| a + p);
        if total != int(1) {
            return bad(format!("prior sums to {total}, not 1"));
        }
        for (name, u) in [("sender", &sender), ("receiver", &receiver)] {
            if u.num_states() != states.len() {
                return bad(format!("{name} utility has wrong number of states"));
            }
            match u {
                UtilitySpec::Linear(v) => {
                    if v.iter().any(|row| row.len() != n) {
                        return bad(format!("{name} utility rows must have {n} entries"));
                    }
                }
                UtilitySpec::Tabular(t) => {
                    if n > MAX_TABULAR_ELEMENTS {
                        return bad(format!("tabular {name} utility needs n <= {MAX_TABULAR_ELEMENTS}"));
                    }
                    for m in t {
                        if !m.contains_key(&ActionSet::empty()) {
                            return bad(format!("tabular {name} utility lacks the empty set"));
                        }
                        if m.keys().any(|s| s.elements().iter().any(|&i| i >= n)) {
                            return bad(format!("tabular {name} utility names unknown elements"));
                        }
                    }
                }
            }
            if u.all_values().into_iter().any(Field::is_negative) {
                return bad(format!("{name} utility has negative values"));
            }
        }
        if sense == Sense::Minimize && constraint.is_matroid() {
            return bad("minimization is only supported with path constraints".into());
        }
        constraint.validate(n)?;

        let keep: Vec<usize> = (0..states.len()).filter(|&s| !prior[s].is_zero()).collect();
        let inst = if keep.len() == states.len() {
            Instance {
                states,
                prior,
                elements,
                sender,
                receiver,
                constraint,
                sense,
            }
        } else {
            Instance {
                states: keep.iter().map(|&s| states[s].clone()).collect(),
                prior: keep.iter().map(|&s| prior[s].clone()).collect(),
                elements,
                sender: sender.restrict_states(&keep),
                receiver: receiver.restrict_states(&keep),
                constraint,
                sense,
            }
        };
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Whether `action` is a feasible receiver action.
    pub fn admits(&self, action: &ActionSet) -> bool {
        if action.elements().iter().any(|&i| i >= self.n()) {
            return false;
        }
        match &self.constraint {
            ConstraintSpec::Path { arcs, source, sink, .. } => paths::is_simple_path(arcs, *source, *sink, action),
            c => MatroidOracle::new(c).is_ok_and(|o| o.is_independent(action)),
        }
    }

    /// Expected sender utility (or cost) of a direct scheme.
    pub fn sender_value(&self, scheme: &SignalingScheme) -> Result<Rational> {
        let mut total = int(0);
        for (action, probs) in scheme.entries() {
            for (state, p) in probs.iter().enumerate() {
                if !p.is_zero() {
                    total += &self.prior[state] * p * self.sender.value(state, action)?;
                }
            }
        }
        Ok(total)
    }

    /// Probability that `action` is recommended.
    pub fn signal_mass(&self, scheme: &SignalingScheme, action: &ActionSet) -> Rational {
        scheme.probabilities(action).map_or_else(
            || int(0),
            |probs| probs.iter().zip(&self.prior).fold(int(0), |acc, (p, mu)| acc + p * mu),
        )
    }

    /// Expected receiver weight of each element under belief `xi` (linear receiver only).
    pub fn expected_receiver_weights(&self, xi: &Posterior) -> Result<Vec<Rational>> {
        let lin = self.receiver.linear().ok_or(Error::NonLinearReceiver)?;
        Ok(expected_weights(lin, xi.values()))
    }
}

/// `Σ_θ xi(θ)·values[θ][i]` for every element `i`.
pub fn expected_weights<F: Field>(values: &[Vec<Rational>], xi: &[F]) -> Vec<F> {
    let n = values.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            values
                .iter()
                .zip(xi)
                .fold(F::zero(), |acc, (row, x)| acc.plus(&F::from_rational(&row[i]).times(x)))
        })
        .collect()
}

/// A direct signaling scheme: for each recommended action, its probability in every state.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SignalingScheme {
    phi: BTreeMap<ActionSet, Vec<Rational>>,
}

impl SignalingScheme {
    pub fn new() -> Self {
        Self::default()
    }

    /// The scheme recommending `action` in every state.
    pub fn constant(action: ActionSet, num_states: usize) -> Self {
        let mut s = Self::new();
        s.phi.insert(action, vec![int(1); num_states]);
        s
    }

    /// Adds `p` to `phi(state, action)`.
    pub fn add(&mut self, state: usize, action: ActionSet, p: Rational, num_states: usize) {
        let row = self.phi.entry(action).or_insert_with(|| vec![int(0); num_states]);
        row[state] += p;
    }

    pub fn phi(&self, state: usize, action: &ActionSet) -> Rational {
        self.phi.get(action).map_or_else(|| int(0), |v| v[state].clone())
    }

    pub fn probabilities(&self, action: &ActionSet) -> Option<&[Rational]> {
        self.phi.get(action).map(Vec::as_slice)
    }

    pub fn support(&self) -> impl Iterator<Item = &ActionSet> {
        self.phi.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ActionSet, &[Rational])> {
        self.phi.iter().map(|(a, v)| (a, v.as_slice()))
    }

    /// Drops actions that are never recommended.
    pub fn strip_zeros(mut self) -> Self {
        self.phi.retain(|_, v| v.iter().any(|p| !p.is_zero()));
        self
    }

    /// Checks the probability-simplex and feasibility invariants.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let k = instance.num_states();
        for (action, probs) in &self.phi {
            if probs.len() != k {
                return Err(Error::InvalidInstance("scheme row has wrong number of states".into()));
            }
            if probs.iter().any(Field::is_negative) {
                return Err(Error::InvalidInstance("scheme has negative probability".into()));
            }
            if !instance.admits(action) {
                return Err(Error::InvalidInstance(format!("action {action:?} is not feasible")));
            }
        }
        for state in 0..k {
            let total = self.phi.values().fold(int(0), |acc, v| acc + &v[state]);
            if total != int(1) {
                return Err(Error::InvalidInstance(format!(
                    "scheme probabilities in state {state} sum to {total}"
                )));
            }
        }
        Ok(())
    }
}

/// Receiver belief over states.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Posterior(Vec<Rational>);

impl Posterior {
    /// Wraps a belief vector; it must sum to one.
    pub fn new(xi: Vec<Rational>) -> Result<Self> {
        let total = xi.iter().fold(int(0), |a, x| a + x);
        if total != int(1) {
            return Err(Error::InvalidInstance(format!("posterior sums to {total}")));
        }
        Ok(Posterior(xi))
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }
}

/// Bayes-updated belief after observing the recommendation `action`.
pub fn posterior(instance: &Instance, scheme: &SignalingScheme, action: &ActionSet) -> Result<Posterior> {
    let weights: Vec<Rational> = (0..instance.num_states())
        .map(|s| &instance.prior[s] * scheme.phi(s, action))
        .collect();
    let mass = weights.iter().fold(int(0), |a, w| a + w);
    if mass.is_zero() {
        return Err(Error::ZeroMassSignal);
    }
    Ok(Posterior(weights.into_iter().map(|w| w / &mass).collect()))
}

/// `Σ_θ xi(θ)·u_θ(S)`.
pub fn expected_value(utility: &UtilitySpec, xi: &Posterior, action: &ActionSet) -> Result<Rational> {
    let mut total = int(0);
    for (state, x) in xi.values().iter().enumerate() {
        if !x.is_zero() {
            total += x * utility.value(state, action)?;
        }
    }
    Ok(total)
}
