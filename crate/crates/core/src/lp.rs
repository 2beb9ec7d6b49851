//! Exact linear programming: a model builder and a two-phase dense tableau
//! simplex with Bland's rule.
//!
//! Works over any [`Field`], so the same code solves rational models and
//! models whose data carry symbolic infinitesimals.

use crate::error::{Error, Result};
use crate::field::Field;

/// Default pivot cap; exceeding it indicates a bug rather than a hard model.
pub const DEFAULT_PIVOT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Row<F> {
    pub coeffs: Vec<(usize, F)>,
    pub relation: Relation,
    pub rhs: F,
}

/// A linear program. Variables default to `x >= 0`; `lower = None` means unbounded below.
#[derive(Clone, Debug)]
pub struct LpModel<F> {
    pub objective_sense: Objective,
    pub objective: Vec<F>,
    pub rows: Vec<Row<F>>,
    pub lower: Vec<Option<F>>,
    pub upper: Vec<Option<F>>,
    pub labels: Vec<String>,
    pub pivot_cap: usize,
}

impl<F: Field> LpModel<F> {
    pub fn new(sense: Objective) -> Self {
        LpModel {
            objective_sense: sense,
            objective: Vec::new(),
            rows: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            labels: Vec::new(),
            pivot_cap: DEFAULT_PIVOT_CAP,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a nonnegative variable with objective coefficient `cost`.
    pub fn add_var(&mut self, label: impl Into<String>, cost: F) -> usize {
        self.add_bounded_var(label, cost, Some(F::zero()), None)
    }

    pub fn add_bounded_var(&mut self, label: impl Into<String>, cost: F, lower: Option<F>, upper: Option<F>) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.labels.push(label.into());
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, F)>, relation: Relation, rhs: F) -> usize {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars()));
        let coeffs = coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        self.rows.push(Row { coeffs, relation, rhs });
        self.rows.len() - 1
    }

    pub fn add_dense_row(&mut self, coeffs: &[F], relation: Relation, rhs: F) -> usize {
        let sparse = coeffs.iter().cloned().enumerate().collect();
        self.add_row(sparse, relation, rhs)
    }

    fn row_activity(&self, row: &Row<F>, x: &[F]) -> F {
        row.coeffs
            .iter()
            .fold(F::zero(), |acc, (j, a)| acc.plus(&a.times(&x[*j])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution<F> {
    pub value: F,
    pub x: Vec<F>,
    /// Row multipliers `y` with `c_j - Σ_i y_i a_ij = reduced_costs[j]`.
    pub duals: Vec<F>,
    pub reduced_costs: Vec<F>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<F> {
    Optimal(LpSolution<F>),
    Infeasible,
    Unbounded,
}

impl<F> LpOutcome<F> {
    /// The optimal solution, or the matching error.
    pub fn optimal(self) -> Result<LpSolution<F>> {
        match self {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible => Err(Error::Infeasible),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }
}

/// How an original variable maps onto nonnegative internal columns.
#[derive(Clone, Debug)]
enum ColMap<F> {
    /// `x = lower + x'`
    Shifted(usize, F),
    /// `x = upper - x'`
    Mirrored(usize, F),
    /// `x = x⁺ - x⁻`
    Split(usize, usize),
}

struct Tableau<F> {
    t: Vec<Vec<F>>,
    obj: Vec<F>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
    cap: usize,
}

impl<F: Field> Tableau<F> {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, e: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(Error::IterationCap(self.cap));
        }
        let p = self.t[r][e].clone();
        let mut prow = Vec::new();
        for j in 0..=self.width {
            if !self.t[r][j].is_zero() {
                let v = self.t[r][j].over(&p);
                self.t[r][j] = v.clone();
                prow.push((j, v));
            }
        }
        let eliminate = |row: &mut Vec<F>| {
            let f = row[e].clone();
            if f.is_zero() {
                return;
            }
            for (j, v) in &prow {
                row[*j] = row[*j].minus(&f.times(v));
            }
        };
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = e;
        Ok(())
    }

    fn set_costs(&mut self, costs: &[F]) {
        let mut obj: Vec<F> = costs.to_vec();
        obj.push(F::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.t[r].iter().enumerate() {
                if !v.is_zero() {
                    obj[j] = obj[j].minus(&cb.times(v));
                }
            }
        }
        self.obj = obj;
    }

    /// Minimizes the current cost row. Returns `false` if unbounded.
    fn run(&mut self, blocked: &[bool]) -> Result<bool> {
        loop {
            let Some(e) = (0..self.width).find(|&j| !blocked[j] && self.obj[j].is_negative()) else {
                return Ok(true);
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, F)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.t[r][rhs].over(a);
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv || (ratio == bv && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            self.pivot(r, e)?;
        }
    }
}

type InternalRow<F> = (Vec<(usize, F)>, Relation, F);

/// Solves `model` exactly.
pub fn solve<F: Field>(model: &LpModel<F>) -> Result<LpOutcome<F>> {
    let nv = model.num_vars();
    let maximize = model.objective_sense == Objective::Maximize;

    let mut maps = Vec::with_capacity(nv);
    let mut ns = 0;
    for j in 0..nv {
        let m = match (&model.lower[j], &model.upper[j]) {
            (Some(l), _) => ColMap::Shifted(ns, l.clone()),
            (None, Some(u)) => ColMap::Mirrored(ns, u.clone()),
            (None, None) => {
                ns += 1;
                ColMap::Split(ns - 1, ns)
            }
        };
        ns += 1;
        maps.push(m);
    }

    let mut cost = vec![F::zero(); ns];
    for (j, m) in maps.iter().enumerate() {
        let c = if maximize {
            model.objective[j].negated()
        } else {
            model.objective[j].clone()
        };
        match m {
            ColMap::Shifted(k, _) => cost[*k] = c,
            ColMap::Mirrored(k, _) => cost[*k] = c.negated(),
            ColMap::Split(p, q) => {
                cost[*q] = c.negated();
                cost[*p] = c;
            }
        }
    }

    // Internal rows: coefficients over structural columns, relation, rhs.
    let mut rows: Vec<InternalRow<F>> = Vec::new();
    for row in &model.rows {
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        let mut rhs = row.rhs.clone();
        for (j, a) in &row.coeffs {
            match &maps[*j] {
                ColMap::Shifted(k, l) => {
                    rhs = rhs.minus(&a.times(l));
                    coeffs.push((*k, a.clone()));
                }
                ColMap::Mirrored(k, u) => {
                    rhs = rhs.minus(&a.times(u));
                    coeffs.push((*k, a.negated()));
                }
                ColMap::Split(p, q) => {
                    coeffs.push((*p, a.clone()));
                    coeffs.push((*q, a.negated()));
                }
            }
        }
        rows.push((coeffs, row.relation, rhs));
    }
    for (j, m) in maps.iter().enumerate() {
        if let (ColMap::Shifted(k, l), Some(u)) = (m, &model.upper[j]) {
            rows.push((vec![(*k, F::one())], Relation::Le, u.minus(l)));
        }
    }

    let m = rows.len();
    let mut flipped = vec![false; m];
    for (r, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
        let flip = rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge);
        if flip {
            flipped[r] = true;
            for (_, a) in coeffs.iter_mut() {
                *a = a.negated();
            }
            *rhs = rhs.negated();
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let mut width = ns;
    let mut slack_col = vec![None; m];
    for (r, (_, rel, _)) in rows.iter().enumerate() {
        if *rel != Relation::Eq {
            slack_col[r] = Some(width);
            width += 1;
        }
    }
    let first_art = width;
    let mut ident = vec![0; m];
    for (r, (_, rel, _)) in rows.iter().enumerate() {
        if *rel == Relation::Le {
            ident[r] = slack_col[r].unwrap();
        } else {
            ident[r] = width;
            width += 1;
        }
    }

    let mut t = vec![vec![F::zero(); width + 1]; m];
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        for (k, a) in coeffs {
            t[r][*k] = t[r][*k].plus(a);
        }
        if let Some(s) = slack_col[r] {
            t[r][s] = if *rel == Relation::Le {
                F::one()
            } else {
                F::one().negated()
            };
        }
        t[r][ident[r]] = F::one();
        t[r][width] = rhs.clone();
    }
    let mut tab = Tableau {
        t,
        obj: Vec::new(),
        basis: ident.clone(),
        width,
        pivots: 0,
        cap: model.pivot_cap,
    };
    let is_art = |j: usize| j >= first_art;

    let mut row_origin: Vec<usize> = (0..m).collect();
    if width > first_art {
        let mut c1 = vec![F::zero(); width];
        for c in c1.iter_mut().skip(first_art) {
            *c = F::one();
        }
        tab.set_costs(&c1);
        let none_blocked = vec![false; width];
        tab.run(&none_blocked)?;
        let infeasibility = tab.obj[width].negated();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        let mut redundant = Vec::new();
        for r in 0..tab.t.len() {
            if !is_art(tab.basis[r]) {
                continue;
            }
            match (0..first_art).find(|&j| !tab.t[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j)?,
                None => redundant.push(r),
            }
        }
        for &r in redundant.iter().rev() {
            tab.t.remove(r);
            tab.basis.remove(r);
            row_origin.remove(r);
        }
    }

    let mut c2 = vec![F::zero(); width];
    c2[..ns].clone_from_slice(&cost);
    tab.set_costs(&c2);
    let blocked: Vec<bool> = (0..width).map(is_art).collect();
    if !tab.run(&blocked)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut xi = vec![F::zero(); width];
    for (r, &b) in tab.basis.iter().enumerate() {
        xi[b] = tab.t[r][width].clone();
    }
    let x: Vec<F> = maps
        .iter()
        .map(|mp| match mp {
            ColMap::Shifted(k, l) => l.plus(&xi[*k]),
            ColMap::Mirrored(k, u) => u.minus(&xi[*k]),
            ColMap::Split(p, q) => xi[*p].minus(&xi[*q]),
        })
        .collect();

    // π_r = -(reduced cost of the row's identity column); removed rows get 0.
    let mut duals = vec![F::zero(); model.rows.len()];
    let kept: Vec<bool> = {
        let mut k = vec![false; m];
        for &r in &row_origin {
            k[r] = true;
        }
        k
    };
    for r in 0..model.rows.len() {
        if !kept[r] {
            continue;
        }
        let mut pi = tab.obj[ident[r]].negated();
        if flipped[r] {
            pi = pi.negated();
        }
        duals[r] = if maximize { pi.negated() } else { pi };
    }

    let value = crate::field::dot(&model.objective, &x);
    let mut reduced = model.objective.clone();
    for (row, y) in model.rows.iter().zip(&duals) {
        if y.is_zero() {
            continue;
        }
        for (j, a) in &row.coeffs {
            reduced[*j] = reduced[*j].minus(&y.times(a));
        }
    }
    let sol = LpSolution {
        value,
        x,
        duals,
        reduced_costs: reduced,
        pivots: tab.pivots,
    };
    certify(model, &sol);
    Ok(LpOutcome::Optimal(sol))
}

/// Asserts primal feasibility, dual sign conditions, complementary slackness
/// and strong duality of an optimal solution.
fn certify<F: Field>(model: &LpModel<F>, sol: &LpSolution<F>) {
    let maximize = model.objective_sense == Objective::Maximize;
    let mut dual_value = F::zero();
    for (row, y) in model.rows.iter().zip(&sol.duals) {
        let act = model.row_activity(row, &sol.x);
        let ok = match row.relation {
            Relation::Le => act <= row.rhs,
            Relation::Ge => act >= row.rhs,
            Relation::Eq => act == row.rhs,
        };
        assert!(ok, "simplex returned an infeasible point");
        if !y.is_zero() {
            assert!(act == row.rhs, "complementary slackness violated on a row");
            let sign_ok = match (row.relation, maximize) {
                (Relation::Le, true) | (Relation::Ge, false) => y.is_positive(),
                (Relation::Ge, true) | (Relation::Le, false) => y.is_negative(),
                (Relation::Eq, _) => true,
            };
            assert!(sign_ok, "dual multiplier has the wrong sign");
        }
        dual_value = dual_value.plus(&y.times(&row.rhs));
    }
    for j in 0..model.num_vars() {
        let d = &sol.reduced_costs[j];
        if d.is_zero() {
            continue;
        }
        let at_lower = model.lower[j].as_ref() == Some(&sol.x[j]);
        let at_upper = model.upper[j].as_ref() == Some(&sol.x[j]);
        let pushes_up = if maximize { d.is_positive() } else { d.is_negative() };
        assert!(
            (at_upper && pushes_up) || (at_lower && !pushes_up),
            "reduced cost of variable {j} is inconsistent with its bound"
        );
        dual_value = dual_value.plus(&d.times(&sol.x[j]));
    }
    assert!(dual_value == sol.value, "strong duality violated");
}

/// Finds a point satisfying the rows and bounds of `model`, ignoring its objective.
pub fn feasibility<F: Field>(model: &LpModel<F>) -> Result<Option<Vec<F>>> {
    let mut m = model.clone();
    m.objective = vec![F::zero(); m.num_vars()];
    Ok(match solve(&m)? {
        LpOutcome::Optimal(s) => Some(s.x),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    })
}
