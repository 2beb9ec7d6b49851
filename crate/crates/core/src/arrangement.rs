//! Cell enumeration for hyperplane arrangements inside the affine hull of the
//! probability simplex.
//!
//! Cells are found by a breadth-first flood over single sign flips, each
//! candidate certified by a max-slack LP. A second pass seeds the flood from
//! every vertex of the arrangement so that no region is missed even when many
//! hyperplanes pass through one point.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::field::{dot, solve_square, Field};
use crate::lp::{self, LpModel, LpOutcome, Objective, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// Strict sign of `v`, `None` on zero.
    pub fn of<F: Field>(v: &F) -> Option<Sign> {
        if v.is_positive() {
            Some(Sign::Plus)
        } else if v.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// `{ξ : normal·ξ = 0, Σξ = 1}`, labelled by the element pair it compares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane<F> {
    pub normal: Vec<F>,
    pub label: (usize, usize),
}

/// A full-dimensional region of constant signs, with a certified interior point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell<F> {
    /// One sign per input hyperplane.
    pub signs: Vec<Sign>,
    pub interior: Vec<F>,
}

/// Where cells are looked for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// All of `aff(Δ)`.
    Affine,
    /// Cells meeting the open simplex; witnesses lie inside it.
    OpenSimplex,
    /// Cells whose closure meets the closed simplex. Witnesses lie inside the
    /// simplex when possible and otherwise just outside it.
    SimplexClosure,
}

/// Cells of the arrangement in `aff(Δ_Θ)` with `|Θ| = dim`, optionally
/// restricted to the open simplex.
pub fn enumerate_cells<F: Field>(
    dim: usize,
    hyperplanes: &[Hyperplane<F>],
    restrict_to_simplex: bool,
) -> Result<Vec<Cell<F>>> {
    let region = if restrict_to_simplex {
        Region::OpenSimplex
    } else {
        Region::Affine
    };
    enumerate_cells_in(dim, hyperplanes, region)
}

pub fn enumerate_cells_in<F: Field>(dim: usize, hyperplanes: &[Hyperplane<F>], region: Region) -> Result<Vec<Cell<F>>> {
    if dim == 0 {
        return Err(Error::DimensionTooSmall);
    }
    if hyperplanes.iter().any(|h| h.normal.len() != dim) {
        return Err(Error::InvalidInstance("hyperplane normal has wrong length".into()));
    }
    if hyperplanes.iter().any(|h| h.normal.iter().all(Field::is_zero)) {
        return Err(Error::InvalidInstance("zero hyperplane normal".into()));
    }
    if dim == 1 {
        let point = vec![F::one()];
        let signs = hyperplanes
            .iter()
            .map(|h| Sign::of(&h.normal[0]).expect("nonzero normal"))
            .collect();
        return Ok(vec![Cell { signs, interior: point }]);
    }

    let (unique, map) = coalesce(hyperplanes);
    let mut found: Vec<(Vec<Sign>, Vec<F>)> = Vec::new();
    let mut known: HashSet<Vec<Sign>> = HashSet::new();
    let mut rejected: HashSet<Vec<Sign>> = HashSet::new();

    let seed = find_seed(&unique, dim, region)?;
    if let Some((signs, point)) = seed {
        flood(
            &unique,
            dim,
            region,
            signs,
            point,
            &mut found,
            &mut known,
            &mut rejected,
        )?;
        seed_from_vertices(&unique, dim, region, &mut found, &mut known, &mut rejected)?;
    }

    let mut cells: Vec<Cell<F>> = found
        .into_iter()
        .map(|(signs, interior)| Cell {
            signs: map
                .iter()
                .map(|&(u, flipped)| if flipped { signs[u].flip() } else { signs[u] })
                .collect(),
            interior,
        })
        .collect();
    cells.sort_by(|a, b| a.signs.cmp(&b.signs));
    Ok(cells)
}

/// Merges hyperplanes equal up to positive or negative scaling. Returns the
/// canonical normals and, per input, its canonical index and whether it was flipped.
fn coalesce<F: Field>(hyperplanes: &[Hyperplane<F>]) -> (Vec<Vec<F>>, Vec<(usize, bool)>) {
    let mut unique: Vec<Vec<F>> = Vec::new();
    let mut map = Vec::with_capacity(hyperplanes.len());
    for h in hyperplanes {
        let lead = h.normal.iter().find(|v| !v.is_zero()).expect("nonzero normal");
        let flipped = lead.is_negative();
        let scale = if flipped { lead.negated() } else { lead.clone() };
        let canon: Vec<F> = h.normal.iter().map(|v| v.over(&scale)).collect();
        let canon: Vec<F> = if flipped {
            canon.iter().map(Field::negated).collect()
        } else {
            canon
        };
        let idx = match unique.iter().position(|u| *u == canon) {
            Some(i) => i,
            None => {
                unique.push(canon);
                unique.len() - 1
            }
        };
        map.push((idx, flipped));
    }
    (unique, map)
}

/// Certifies the strict sign pattern `signs` on `normals` inside `region`.
/// Entries equal to `None` are unconstrained.
pub fn interior_point<F: Field>(
    normals: &[Vec<F>],
    signs: &[Option<Sign>],
    dim: usize,
    region: Region,
) -> Result<Option<Vec<F>>> {
    match region {
        Region::Affine => max_slack(normals, signs, dim, Bounds::Free),
        Region::OpenSimplex => max_slack(normals, signs, dim, Bounds::OpenSimplex),
        Region::SimplexClosure => {
            if let Some(p) = max_slack(normals, signs, dim, Bounds::OpenSimplex)? {
                return Ok(Some(p));
            }
            if !weakly_meets_simplex(normals, signs, dim)? {
                return Ok(None);
            }
            max_slack(normals, signs, dim, Bounds::NearSimplex)
        }
    }
}

enum Bounds {
    Free,
    OpenSimplex,
    NearSimplex,
}

/// Maximizes `t ∈ [0,1]` subject to `σ_h (n_h·ξ) ≥ t`, `Σξ = 1` and the
/// region bounds; the pattern is realizable iff `t* > 0`.
fn max_slack<F: Field>(
    normals: &[Vec<F>],
    signs: &[Option<Sign>],
    dim: usize,
    bounds: Bounds,
) -> Result<Option<Vec<F>>> {
    let mut m = LpModel::new(Objective::Maximize);
    let xi: Vec<usize> = (0..dim)
        .map(|k| match bounds {
            Bounds::Free => m.add_bounded_var(format!("xi{k}"), F::zero(), None, None),
            Bounds::OpenSimplex => m.add_var(format!("xi{k}"), F::zero()),
            Bounds::NearSimplex => {
                m.add_bounded_var(format!("xi{k}"), F::zero(), Some(F::from_int(-1)), Some(F::from_int(2)))
            }
        })
        .collect();
    let t = m.add_bounded_var("t", F::one(), Some(F::zero()), Some(F::one()));
    m.add_row(xi.iter().map(|&v| (v, F::one())).collect(), Relation::Eq, F::one());
    for (n, s) in normals.iter().zip(signs) {
        let Some(s) = s else { continue };
        let mut coeffs: Vec<(usize, F)> = xi
            .iter()
            .zip(n)
            .map(|(&v, a)| (v, if *s == Sign::Plus { a.clone() } else { a.negated() }))
            .collect();
        coeffs.push((t, F::one().negated()));
        m.add_row(coeffs, Relation::Ge, F::zero());
    }
    if matches!(bounds, Bounds::OpenSimplex) {
        for &v in &xi {
            m.add_row(vec![(v, F::one()), (t, F::one().negated())], Relation::Ge, F::zero());
        }
    }
    let sol = match lp::solve(&m)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => unreachable!("slack is bounded by one"),
    };
    if !sol.value.is_positive() {
        return Ok(None);
    }
    let point: Vec<F> = xi.iter().map(|&v| sol.x[v].clone()).collect();
    for (n, s) in normals.iter().zip(signs) {
        if let Some(s) = s {
            assert_eq!(Sign::of(&dot(n, &point)), Some(*s), "witness fails its sign vector");
        }
    }
    Ok(Some(point))
}

fn weakly_meets_simplex<F: Field>(normals: &[Vec<F>], signs: &[Option<Sign>], dim: usize) -> Result<bool> {
    let mut m = LpModel::new(Objective::Minimize);
    let xi: Vec<usize> = (0..dim).map(|k| m.add_var(format!("xi{k}"), F::zero())).collect();
    m.add_row(xi.iter().map(|&v| (v, F::one())).collect(), Relation::Eq, F::one());
    for (n, s) in normals.iter().zip(signs) {
        let Some(s) = s else { continue };
        let coeffs = xi
            .iter()
            .zip(n)
            .map(|(&v, a)| (v, if *s == Sign::Plus { a.clone() } else { a.negated() }))
            .collect();
        m.add_row(coeffs, Relation::Ge, F::zero());
    }
    Ok(lp::feasibility(&m)?.is_some())
}

fn certify_full<F: Field>(normals: &[Vec<F>], signs: &[Sign], dim: usize, region: Region) -> Result<Option<Vec<F>>> {
    let partial: Vec<Option<Sign>> = signs.iter().map(|&s| Some(s)).collect();
    interior_point(normals, &partial, dim, region)
}

/// Finds one realizable sign vector, fixing undetermined signs one at a time.
fn find_seed<F: Field>(normals: &[Vec<F>], dim: usize, region: Region) -> Result<Option<(Vec<Sign>, Vec<F>)>> {
    let bary = vec![F::one().over(&F::from_int(dim as i64)); dim];
    let mut partial: Vec<Option<Sign>> = normals.iter().map(|n| Sign::of(&dot(n, &bary))).collect();
    let mut point = match interior_point(normals, &partial, dim, region)? {
        Some(p) => p,
        None => return Ok(None),
    };
    for h in 0..normals.len() {
        if partial[h].is_some() {
            continue;
        }
        partial[h] = Some(Sign::Plus);
        match interior_point(normals, &partial, dim, region)? {
            Some(p) => point = p,
            None => {
                partial[h] = Some(Sign::Minus);
                point =
                    interior_point(normals, &partial, dim, region)?.expect("one side of a hyperplane is realizable");
            }
        }
    }
    Ok(Some((partial.into_iter().map(Option::unwrap).collect(), point)))
}

#[allow(clippy::too_many_arguments)]
fn flood<F: Field>(
    normals: &[Vec<F>],
    dim: usize,
    region: Region,
    signs: Vec<Sign>,
    point: Vec<F>,
    found: &mut Vec<(Vec<Sign>, Vec<F>)>,
    known: &mut HashSet<Vec<Sign>>,
    rejected: &mut HashSet<Vec<Sign>>,
) -> Result<()> {
    if !known.insert(signs.clone()) {
        return Ok(());
    }
    let mut queue = VecDeque::from([signs.clone()]);
    found.push((signs, point));
    while let Some(cur) = queue.pop_front() {
        for h in 0..normals.len() {
            let mut next = cur.clone();
            next[h] = next[h].flip();
            if known.contains(&next) || rejected.contains(&next) {
                continue;
            }
            match certify_full(normals, &next, dim, region)? {
                Some(p) => {
                    known.insert(next.clone());
                    found.push((next.clone(), p));
                    queue.push_back(next);
                }
                None => {
                    rejected.insert(next);
                }
            }
        }
    }
    Ok(())
}

/// Largest number of hyperplanes through one vertex whose sign patterns are tried exhaustively.
const MAX_VERTEX_DEGREE: usize = 10;

fn seed_from_vertices<F: Field>(
    normals: &[Vec<F>],
    dim: usize,
    region: Region,
    found: &mut Vec<(Vec<Sign>, Vec<F>)>,
    known: &mut HashSet<Vec<Sign>>,
    rejected: &mut HashSet<Vec<Sign>>,
) -> Result<()> {
    let d = dim - 1;
    if normals.len() < d {
        return Ok(());
    }
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let mut a: Vec<Vec<F>> = subset.iter().map(|&h| normals[h].clone()).collect();
        a.push(vec![F::one(); dim]);
        let mut b = vec![F::zero(); d];
        b.push(F::one());
        if let Some(v) = solve_square(&a, &b) {
            let values: Vec<Option<Sign>> = normals.iter().map(|n| Sign::of(&dot(n, &v))).collect();
            let zeros: Vec<usize> = (0..normals.len()).filter(|&h| values[h].is_none()).collect();
            if zeros.len() <= MAX_VERTEX_DEGREE {
                for mask in 0..1u32 << zeros.len() {
                    let mut cand: Vec<Sign> = values.iter().map(|s| s.unwrap_or(Sign::Plus)).collect();
                    for (bit, &h) in zeros.iter().enumerate() {
                        cand[h] = if mask >> bit & 1 == 1 { Sign::Minus } else { Sign::Plus };
                    }
                    if known.contains(&cand) || rejected.contains(&cand) {
                        continue;
                    }
                    match certify_full(normals, &cand, dim, region)? {
                        Some(p) => flood(normals, dim, region, cand, p, found, known, rejected)?,
                        None => {
                            rejected.insert(cand);
                        }
                    }
                }
            }
        }
        // Next d-subset in lexicographic order.
        let Some(i) = (0..d).rev().find(|&i| subset[i] < normals.len() - d + i) else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(())
}

/// `Σ_{i=0}^{d} C(m, i)`, the maximum number of regions of `m` hyperplanes in dimension `d`.
pub fn region_bound(m: usize, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=d.min(m) {
        if i > 0 {
            binom = binom * (m - i + 1) as u128 / i as u128;
        }
        total += binom;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, Rational};

    fn hp(n: &[i64]) -> Hyperplane<Rational> {
        Hyperplane {
            normal: n.iter().map(|&v| int(v)).collect(),
            label: (0, 0),
        }
    }

    #[test]
    fn trivial_counts() {
        assert_eq!(enumerate_cells::<Rational>(3, &[], true).unwrap().len(), 1);
        assert_eq!(enumerate_cells(2, &[hp(&[1, -1])], true).unwrap().len(), 2);
        assert_eq!(enumerate_cells::<Rational>(0, &[], true), Err(Error::DimensionTooSmall));
        assert_eq!(enumerate_cells(1, &[hp(&[2])], true).unwrap().len(), 1);
    }

    #[test]
    fn three_concurrent_lines_give_six_cells() {
        // Pairwise differences of (4,1,1), (1,4,1), (1,1,4).
        let hs = [hp(&[3, -3, 0]), hp(&[3, 0, -3]), hp(&[0, 3, -3])];
        let cells = enumerate_cells(3, &hs, true).unwrap();
        assert_eq!(cells.len(), 6);
        for c in &cells {
            assert!(c.interior.iter().all(|v| *v > int(0)));
            for (h, s) in hs.iter().zip(&c.signs) {
                assert_eq!(Sign::of(&dot(&h.normal, &c.interior)), Some(*s));
            }
        }
    }

    #[test]
    fn duplicates_are_coalesced() {
        let hs = [hp(&[1, -1]), hp(&[2, -2]), hp(&[-1, 1])];
        let cells = enumerate_cells(2, &hs, true).unwrap();
        assert_eq!(cells.len(), 2);
        for c in &cells {
            assert_eq!(c.signs[0], c.signs[1]);
            assert_eq!(c.signs[0], c.signs[2].flip());
        }
    }

    #[test]
    fn interior_point_examples() {
        let n = vec![vec![int(1), int(-1)]];
        let p = interior_point(&n, &[Some(Sign::Plus)], 2, Region::OpenSimplex)
            .unwrap()
            .unwrap();
        assert!(p[0] > p[1]);
        let n = vec![vec![int(1), int(-1)], vec![int(1), int(-1)]];
        let r = interior_point(&n, &[Some(Sign::Plus), Some(Sign::Minus)], 2, Region::Affine).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn closure_region_keeps_cells_touching_a_vertex() {
        // ξ0 - ξ1 vanishes only at the third vertex inside the simplex when
        // combined with ξ2 ... here both elements tie at vertex e2.
        let hs = [hp(&[1, -1, 0]), hp(&[1, 0, -1])];
        let open = enumerate_cells_in(3, &hs, Region::OpenSimplex).unwrap().len();
        let closure = enumerate_cells_in(3, &hs, Region::SimplexClosure).unwrap().len();
        let affine = enumerate_cells_in(3, &hs, Region::Affine).unwrap().len();
        assert_eq!(affine, 4);
        assert!(open <= closure && closure <= affine);
    }

    #[test]
    fn region_bound_values() {
        assert_eq!(region_bound(3, 2), 7);
        assert_eq!(region_bound(0, 2), 1);
        assert_eq!(region_bound(2, 3), 4);
    }
}
