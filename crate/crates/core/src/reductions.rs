//! Instance generators built from linear-equation systems and from public
//! persuasion with many independent binary receivers.
//!
//! Every LINEQ-MA gadget shares the same normalization: with
//! `τ = 2·max{max|A|, max|c|, n_var²}`, `Ā = A/τ` and `c̄ = c/τ²`, there is one
//! "neutral" state 0 with prior `(n_var − 1)/n_var` and one state per variable
//! with prior `1/n_var²`. Each equation `t` contributes three receiver options
//! whose expected weights under a posterior `ξ` are
//! `1`, `1 + c̄_t − (Āξ)_t` and `1 − c̄_t + (Āξ)_t`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{int, max_or_zero, Field, Rational};
use crate::matroid::k4;
use crate::model::{ActionSet, ConstraintSpec, Instance, Sense, SignalingScheme, UtilitySpec};
use crate::persuasion::receiver_choice;

/// A system `A x = c` together with its promise-gap parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineqMaSpec {
    pub a: Vec<Vec<Rational>>,
    pub c: Vec<Rational>,
    pub zeta: Rational,
    pub delta: Rational,
    pub known_solution: Option<Vec<bool>>,
}

impl LineqMaSpec {
    pub fn new(a: Vec<Vec<Rational>>, c: Vec<Rational>, zeta: Rational, delta: Rational) -> Result<Self> {
        let spec = LineqMaSpec {
            a,
            c,
            zeta,
            delta,
            known_solution: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_solution(mut self, x: Vec<bool>) -> Result<Self> {
        self.known_solution = Some(x);
        self.validate()?;
        Ok(self)
    }

    /// Random integer system with entries in `-3..=3` and a planted 0/1
    /// solution satisfying every equation (`ζ = 0`).
    pub fn random_satisfiable(n_eq: usize, n_var: usize, rng: &mut impl Rng) -> Self {
        let x: Vec<bool> = (0..n_var).map(|_| rng.gen_bool(0.5)).collect();
        let a: Vec<Vec<Rational>> = (0..n_eq)
            .map(|_| (0..n_var).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        let c = a
            .iter()
            .map(|row| row.iter().zip(&x).filter(|(_, &b)| b).map(|(v, _)| v.clone()).sum())
            .collect();
        LineqMaSpec {
            a,
            c,
            zeta: int(0),
            delta: int(0),
            known_solution: Some(x),
        }
    }

    pub fn n_eq(&self) -> usize {
        self.a.len()
    }

    pub fn n_var(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInstance(m.into()));
        if self.a.is_empty() {
            return bad("the system has no equations");
        }
        let n_var = self.n_var();
        if self.a.iter().any(|row| row.len() != n_var) {
            return bad("ragged coefficient matrix");
        }
        if self.c.len() != self.a.len() {
            return bad("right-hand side length differs from the number of equations");
        }
        let one = int(1);
        let upper = &one - &self.zeta;
        if self.delta.is_negative() || self.delta > upper || upper > one || upper.is_negative() {
            return bad("need 0 <= delta <= 1 - zeta <= 1");
        }
        if let Some(x) = &self.known_solution {
            if x.len() != n_var {
                return bad("known solution has the wrong length");
            }
        }
        if n_var < 2 {
            return Err(Error::PriorDegenerate(format!(
                "n_var = {n_var} leaves no mass on the variable states"
            )));
        }
        Ok(())
    }

    /// The normalization constant `τ`.
    pub fn tau(&self) -> Rational {
        let n = self.n_var() as i64;
        let m = max_or_zero(
            self.a
                .iter()
                .flatten()
                .chain(&self.c)
                .map(abs)
                .collect::<Vec<_>>()
                .iter(),
        );
        int(2) * m.max(int(n * n))
    }

    pub fn a_bar(&self) -> Vec<Vec<Rational>> {
        let tau = self.tau();
        self.a
            .iter()
            .map(|row| row.iter().map(|v| v / &tau).collect())
            .collect()
    }

    pub fn c_bar(&self) -> Vec<Rational> {
        let tau2 = self.tau() * self.tau();
        self.c.iter().map(|v| v / &tau2).collect()
    }

    /// Prior over `{0, 1, .., n_var}`.
    pub fn prior(&self) -> Vec<Rational> {
        let n = self.n_var() as i64;
        let mut mu = vec![Rational::new((n - 1).into(), n.into())];
        mu.extend((0..n).map(|_| Rational::new(1.into(), (n * n).into())));
        mu
    }

    /// Fraction of equations satisfied by `x`.
    pub fn satisfied_fraction(&self, x: &[Rational]) -> Rational {
        let ok = self
            .a
            .iter()
            .zip(&self.c)
            .filter(|(row, c)| row.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>() == **c)
            .count();
        Rational::new((ok as i64).into(), (self.n_eq() as i64).into())
    }

    /// Whether `(n_var − 1)/n_var ≤ (1 − 2ζ)/(1 − ζ)`, i.e. the completeness
    /// bound does not separate from `1 − 2ζ` at this size.
    pub fn n_var_too_small(&self) -> bool {
        let one = int(1);
        if self.zeta >= one {
            return false;
        }
        let n = self.n_var() as i64;
        Rational::new((n - 1).into(), n.into()) <= (&one - int(2) * &self.zeta) / (&one - &self.zeta)
    }

    /// `(w0, w1, w2)` per equation and state, the three option weights.
    fn option_weights(&self) -> Vec<Vec<[Rational; 3]>> {
        let a = self.a_bar();
        let c = self.c_bar();
        let one = int(1);
        (0..self.n_eq())
            .map(|t| {
                let mut per_state = vec![[one.clone(), &one + &c[t], &one - &c[t]]];
                for th in 0..self.n_var() {
                    per_state.push([one.clone(), &one - &a[t][th] + &c[t], &one + &a[t][th] - &c[t]]);
                }
                per_state
            })
            .collect()
    }
}

fn abs(v: &Rational) -> Rational {
    if v.is_negative() {
        -v.clone()
    } else {
        v.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Uniform,
    Graphic,
    Path,
}

fn state_names(spec: &LineqMaSpec) -> Vec<String> {
    (0..=spec.n_var()).map(|t| format!("theta{t}")).collect()
}

fn transpose(per_element: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let k = per_element.first().map_or(0, Vec::len);
    (0..k)
        .map(|t| per_element.iter().map(|col| col[t].clone()).collect())
        .collect()
}

pub fn generate(spec: &LineqMaSpec, target: Target) -> Result<Instance> {
    match target {
        Target::Uniform => gen_uniform_from_lineq(spec),
        Target::Graphic => gen_graphic_from_lineq(spec),
        Target::Path => gen_path_from_lineq(spec),
    }
}

/// Ground set `[n_eq] × {a0, a1, a2}` with rank `n_eq`; the sender earns
/// `1/n_eq` per chosen `a0`.
pub fn gen_uniform_from_lineq(spec: &LineqMaSpec) -> Result<Instance> {
    spec.validate()?;
    let n_eq = spec.n_eq();
    let share = Rational::new(1.into(), (n_eq as i64).into());
    let weights = spec.option_weights();
    let mut elements = Vec::new();
    let mut r_cols = Vec::new();
    let mut s_cols = Vec::new();
    for (t, per_state) in weights.iter().enumerate() {
        for a in 0..3 {
            elements.push(format!("eq{t}_a{a}"));
            r_cols.push(per_state.iter().map(|w| w[a].clone()).collect());
            s_cols.push(vec![if a == 0 { share.clone() } else { int(0) }; per_state.len()]);
        }
    }
    Instance::new(
        state_names(spec),
        spec.prior(),
        elements,
        UtilitySpec::Linear(transpose(s_cols)),
        UtilitySpec::Linear(transpose(r_cols)),
        ConstraintSpec::Uniform { k: n_eq },
        Sense::Maximize,
    )
}

/// The heavy edge weight in each `K_4`.
pub fn graphic_heavy_weight(spec: &LineqMaSpec) -> Rational {
    let c = max_or_zero(spec.c_bar().iter().map(abs).collect::<Vec<_>>().iter());
    let a = max_or_zero(spec.a_bar().iter().flatten().map(abs).collect::<Vec<_>>().iter());
    int(1) + int(spec.n_eq() as i64) * (int(2) + c + a)
}

/// One `K_4` per equation. Edge `{1,2}` carries the heavy weight `L`, edge
/// `{0,1}` pays the sender `1/n_eq`; the other four pair up as the `a1` and
/// `a2` options.
pub fn gen_graphic_from_lineq(spec: &LineqMaSpec) -> Result<Instance> {
    spec.validate()?;
    let n_eq = spec.n_eq();
    let share = Rational::new(1.into(), (n_eq as i64).into());
    let heavy = graphic_heavy_weight(spec);
    let ConstraintSpec::Graphic { edges: k4_edges, .. } = k4() else {
        unreachable!()
    };
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut elements = Vec::new();
    let mut r_cols = Vec::new();
    let mut s_cols = Vec::new();
    for (t, per_state) in spec.option_weights().iter().enumerate() {
        vertices.extend((0..4).map(|i| format!("v{t}_{i}")));
        for &(i, j) in &k4_edges {
            edges.push((4 * t + i, 4 * t + j));
            elements.push(format!("eq{t}_{i}{j}"));
            let option = match (i, j) {
                (0, 1) => Some(0),
                (0, 2) | (1, 3) => Some(1),
                (0, 3) | (2, 3) => Some(2),
                _ => None,
            };
            r_cols.push(
                per_state
                    .iter()
                    .map(|w| option.map_or_else(|| heavy.clone(), |o| w[o].clone()))
                    .collect(),
            );
            s_cols.push(vec![
                if (i, j) == (0, 1) { share.clone() } else { int(0) };
                per_state.len()
            ]);
        }
    }
    Instance::new(
        state_names(spec),
        spec.prior(),
        elements,
        UtilitySpec::Linear(transpose(s_cols)),
        UtilitySpec::Linear(transpose(r_cols)),
        ConstraintSpec::Graphic { vertices, edges },
        Sense::Maximize,
    )
}

/// Layered digraph `v_0 → u_{1,i} → v_1 → … → v_{n_eq}`. Entering `u_{t,i}`
/// costs the receiver option weight `i` and the sender `1/n_eq` for
/// `i ∈ {1, 2}`; leaving it is free.
pub fn gen_path_from_lineq(spec: &LineqMaSpec) -> Result<Instance> {
    spec.validate()?;
    let n_eq = spec.n_eq();
    let k = spec.n_var() + 1;
    let share = Rational::new(1.into(), (n_eq as i64).into());
    let mut vertices: Vec<String> = (0..=n_eq).map(|t| format!("v{t}")).collect();
    let mut arcs = Vec::new();
    let mut elements = Vec::new();
    let mut r_cols = Vec::new();
    let mut s_cols = Vec::new();
    for (t, per_state) in spec.option_weights().iter().enumerate() {
        let base = vertices.len();
        vertices.extend((0..3).map(|i| format!("u{}_{i}", t + 1)));
        for i in 0..3 {
            arcs.push((t, base + i));
            elements.push(format!("v{t}->u{}_{i}", t + 1));
            r_cols.push(per_state.iter().map(|w| w[i].clone()).collect());
            s_cols.push(vec![if i == 0 { int(0) } else { share.clone() }; k]);
        }
        for i in 0..3 {
            arcs.push((base + i, t + 1));
            elements.push(format!("u{}_{i}->v{}", t + 1, t + 1));
            r_cols.push(vec![int(0); k]);
            s_cols.push(vec![int(0); k]);
        }
    }
    Instance::new(
        state_names(spec),
        spec.prior(),
        elements,
        UtilitySpec::Linear(transpose(s_cols)),
        UtilitySpec::Linear(transpose(r_cols)),
        ConstraintSpec::Path {
            vertices,
            arcs,
            source: 0,
            sink: n_eq,
        },
        Sense::Minimize,
    )
}

/// The two-signal scheme built from the planted solution: signal 1 is sent
/// with certainty in state 0 and with probability `q·x̄_θ` otherwise, where
/// `x̄ = x̂/τ` and `q = n_var(n_var − 1)/(1 − Σx̄)`, so that its posterior puts
/// mass `x̄_θ` on each variable state. Each signal becomes the action the
/// receiver picks under its posterior; equal actions are merged.
pub fn completeness_scheme(spec: &LineqMaSpec, target: Target) -> Result<(Instance, SignalingScheme)> {
    let x = spec.known_solution.as_ref().ok_or(Error::MissingSolution)?;
    let instance = generate(spec, target)?;
    let tau = spec.tau();
    let x_bar: Vec<Rational> = x.iter().map(|&b| if b { int(1) / &tau } else { int(0) }).collect();
    let n = spec.n_var() as i64;
    let sum: Rational = x_bar.iter().sum();
    let q = int(n * (n - 1)) / (int(1) - sum);
    let mut first = vec![int(1)];
    first.extend(x_bar.iter().map(|v| &q * v));
    let second: Vec<Rational> = first.iter().map(|p| int(1) - p).collect();

    let k = instance.num_states();
    let mut scheme = SignalingScheme::new();
    for signal in [first, second] {
        let weights: Vec<Rational> = signal.iter().zip(&instance.prior).map(|(p, mu)| p * mu).collect();
        let mass: Rational = weights.iter().sum();
        if mass.is_zero() {
            continue;
        }
        let xi: Vec<Rational> = weights.iter().map(|w| w / &mass).collect();
        let action: ActionSet = receiver_choice(&instance, &xi, None)?;
        for (t, p) in signal.into_iter().enumerate() {
            scheme.add(t, action.clone(), p, k);
        }
    }
    Ok((instance, scheme.strip_zeros()))
}

/// Public persuasion without externalities: receiver `i` picks a binary
/// action, and the sender's linear utility counts receivers picking 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicPersuasionSpec {
    pub prior: Vec<Rational>,
    /// `receiver[θ][i] = [r̃_θ(i, 0), r̃_θ(i, 1)]`.
    pub receiver: Vec<Vec<[Rational; 2]>>,
    /// `sender[θ][i]`, paid when receiver `i` picks 1.
    pub sender: Vec<Vec<Rational>>,
}

impl PublicPersuasionSpec {
    pub fn n_rec(&self) -> usize {
        self.receiver.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.prior.len();
        let n = self.n_rec();
        if n == 0 || self.receiver.len() != k || self.sender.len() != k {
            return Err(Error::InvalidInstance("public spec dimensions disagree".into()));
        }
        if self.receiver.iter().any(|r| r.len() != n) || self.sender.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidInstance("ragged public spec".into()));
        }
        let negative = self
            .receiver
            .iter()
            .flatten()
            .flatten()
            .chain(self.sender.iter().flatten())
            .any(|v| v.is_negative());
        if negative {
            return Err(Error::InvalidInstance(
                "public spec utilities must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Random instance with utilities in `0..=max`.
    pub fn random(k: usize, n_rec: usize, max: i64, rng: &mut impl Rng) -> Self {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
        let total: i64 = raw.iter().sum();
        PublicPersuasionSpec {
            prior: raw.iter().map(|&p| Rational::new(p.into(), total.into())).collect(),
            receiver: (0..k)
                .map(|_| {
                    (0..n_rec)
                        .map(|_| [int(rng.gen_range(0..=max)), int(rng.gen_range(0..=max))])
                        .collect()
                })
                .collect(),
            sender: (0..k)
                .map(|_| (0..n_rec).map(|_| int(rng.gen_range(0..=max))).collect())
                .collect(),
        }
    }

    /// Receivers choosing 1 under posterior `xi`: strict preference, or
    /// indifference when the sender gains from it.
    pub fn public_choice(&self, xi: &[Rational]) -> Vec<usize> {
        (0..self.n_rec())
            .filter(|&i| {
                let e = |b: usize| -> Rational { xi.iter().zip(&self.receiver).map(|(p, r)| p * &r[i][b]).sum() };
                let s: Rational = xi.iter().zip(&self.sender).map(|(p, s)| p * &s[i]).sum();
                let (r0, r1) = (e(0), e(1));
                r1 > r0 || (r1 == r0 && s.is_positive())
            })
            .collect()
    }
}

/// Receiver `i` becomes the block `{a_{i,0}, a_{i,1}}` (elements `2i`,
/// `2i + 1`) with capacity one.
pub fn gen_partition_from_public(spec: &PublicPersuasionSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n_rec();
    let receiver = spec
        .receiver
        .iter()
        .map(|row| row.iter().flat_map(|pair| pair.iter().cloned()).collect())
        .collect();
    let sender = spec
        .sender
        .iter()
        .map(|row| row.iter().flat_map(|v| [int(0), v.clone()]).collect())
        .collect();
    Instance::new(
        (0..spec.prior.len()).map(|t| format!("theta{t}")).collect(),
        spec.prior.clone(),
        (0..n).flat_map(|i| [format!("a{i}_0"), format!("a{i}_1")]).collect(),
        UtilitySpec::Linear(sender),
        UtilitySpec::Linear(receiver),
        ConstraintSpec::Partition {
            blocks: (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect(),
            caps: vec![1; n],
        },
        Sense::Maximize,
    )
}

/// Receivers choosing 1 in a partition-instance action.
pub fn public_receivers_of(action: &ActionSet) -> Vec<usize> {
    action
        .elements()
        .iter()
        .filter(|&&e| e % 2 == 1)
        .map(|&e| e / 2)
        .collect()
}
