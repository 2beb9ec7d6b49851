//! The receiver's possible best responses: hyperplanes comparing element
//! pairs, one greedy run per arrangement cell, and the non-degeneracy audit
//! with its symbolic perturbation.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{enumerate_cells_in, Hyperplane, Region};
use crate::error::{Error, Result};
use crate::field::{common_denominator, int, rank, Field, Rational};
use crate::matroid::{greedy_basis, MatroidOracle};
use crate::model::{ActionSet, ConstraintSpec, Instance, Sense};

/// Permutations are audited exhaustively up to this ground-set size.
pub const EXHAUSTIVE_AUDIT_ELEMENTS: usize = 7;
pub const RANDOM_AUDIT_PERMUTATIONS: usize = 1000;
pub const AUDIT_SEED: u64 = 0x5eed_a0d1;
const MAX_REPORTED_VIOLATIONS: usize = 64;

/// A failing family: consecutive differences along `permutation` at positions
/// `subset` are linearly dependent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegeneracyViolation {
    pub permutation: Vec<usize>,
    pub subset: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nondegeneracy {
    Clean,
    /// Found violations (at most 64 are kept) and their total count.
    Violations(Vec<NondegeneracyViolation>, usize),
}

impl Nondegeneracy {
    pub fn is_clean(&self) -> bool {
        matches!(self, Nondegeneracy::Clean)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegeneracyReport {
    Clean,
    /// Receiver utilities were raised by `ε` times the sender's (when linear),
    /// and element `i`'s utility in state `state` by `ε^power`.
    Perturbed {
        schedule: Vec<(usize, usize, usize)>,
        violations: usize,
        epsilon: Rational,
    },
    /// Violations found but left unperturbed.
    Violations(Vec<NondegeneracyViolation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponseCatalog {
    /// Sorted, duplicate-free.
    pub actions: Vec<ActionSet>,
    /// A belief at which each action is the greedy optimum (of the perturbed
    /// utilities when `report` is `Perturbed`).
    pub witnesses: Vec<Vec<Rational>>,
    pub cells: usize,
    pub hyperplanes: usize,
    pub report: DegeneracyReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogOptions {
    pub perturb: bool,
    pub region: Region,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            perturb: true,
            region: Region::SimplexClosure,
        }
    }
}

fn require_linear_matroid(instance: &Instance) -> Result<&[Vec<Rational>]> {
    let lin = instance.receiver.linear().ok_or(Error::NonLinearReceiver)?;
    if !instance.constraint.is_matroid() {
        return Err(Error::UnsupportedCombination(
            "best-response enumeration needs a matroid constraint".into(),
        ));
    }
    if instance.sense != Sense::Maximize {
        return Err(Error::UnsupportedSense("best-response enumeration".into()));
    }
    Ok(lin)
}

/// Pairs whose order can change the greedy outcome: all pairs, or pairs inside
/// one block for partition matroids.
fn comparable_pairs(constraint: &ConstraintSpec, n: usize) -> Vec<(usize, usize)> {
    match constraint {
        ConstraintSpec::Partition { blocks, .. } => blocks
            .iter()
            .flat_map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b.into_iter().tuple_combinations::<(usize, usize)>()
            })
            .sorted()
            .collect(),
        _ => (0..n).tuple_combinations().collect(),
    }
}

/// Hyperplanes `h_ij` over `values[θ][i]`, skipping identical elements.
pub fn hyperplanes_for<F: Field>(values: &[Vec<F>], pairs: &[(usize, usize)]) -> Vec<Hyperplane<F>> {
    pairs
        .iter()
        .filter_map(|&(i, j)| {
            let normal: Vec<F> = values.iter().map(|row| row[i].minus(&row[j])).collect();
            (!normal.iter().all(Field::is_zero)).then_some(Hyperplane { normal, label: (i, j) })
        })
        .collect()
}

pub fn receiver_hyperplanes(instance: &Instance) -> Result<Vec<Hyperplane<Rational>>> {
    let lin = require_linear_matroid(instance)?;
    let pairs = comparable_pairs(&instance.constraint, instance.n());
    Ok(hyperplanes_for(lin, &pairs))
}

/// Audits linear independence of consecutive-difference families.
pub fn check_nondegeneracy(instance: &Instance) -> Result<Nondegeneracy> {
    let lin = instance.receiver.linear().ok_or(Error::NonLinearReceiver)?;
    let n = instance.n();
    let k = instance.num_states();
    if n < k + 1 {
        return Ok(Nondegeneracy::Clean);
    }
    // psi[i][θ]
    let psi: Vec<Vec<Rational>> = (0..n).map(|i| (0..k).map(|t| lin[t][i].clone()).collect()).collect();
    let mut cache: HashMap<Vec<(usize, usize)>, bool> = HashMap::new();
    let mut found = Vec::new();
    let mut count = 0usize;
    let mut audit = |perm: &[usize]| {
        for subset in (0..n - 1).combinations(k) {
            let mut key: Vec<(usize, usize)> = subset
                .iter()
                .map(|&p| {
                    let (a, b) = (perm[p], perm[p + 1]);
                    (a.min(b), a.max(b))
                })
                .collect();
            key.sort_unstable();
            let ok = *cache.entry(key.clone()).or_insert_with(|| {
                let rows: Vec<Vec<Rational>> = key
                    .iter()
                    .map(|&(a, b)| psi[a].iter().zip(&psi[b]).map(|(x, y)| x - y).collect())
                    .collect();
                rank(&rows) == k
            });
            if !ok {
                count += 1;
                if found.len() < MAX_REPORTED_VIOLATIONS {
                    found.push(NondegeneracyViolation {
                        permutation: perm.to_vec(),
                        subset,
                    });
                }
            }
        }
    };
    if n <= EXHAUSTIVE_AUDIT_ELEMENTS {
        for perm in (0..n).permutations(n) {
            audit(&perm);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED);
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..RANDOM_AUDIT_PERMUTATIONS {
            perm.shuffle(&mut rng);
            audit(&perm);
        }
    }
    Ok(if count == 0 {
        Nondegeneracy::Clean
    } else {
        Nondegeneracy::Violations(found, count)
    })
}

/// Greedy outcome in every cell of the receiver arrangement, deduplicated.
pub fn enumerate_best_responses(instance: &Instance) -> Result<BestResponseCatalog> {
    enumerate_best_responses_with(instance, CatalogOptions::default())
}

pub fn enumerate_best_responses_with(instance: &Instance, options: CatalogOptions) -> Result<BestResponseCatalog> {
    let lin = require_linear_matroid(instance)?;
    let audit = check_nondegeneracy(instance)?;
    let k = instance.num_states();
    let pairs = comparable_pairs(&instance.constraint, instance.n());
    let oracle = MatroidOracle::new(&instance.constraint)?;
    match audit {
        Nondegeneracy::Violations(_, count) if options.perturb => {
            // Tier 1 carries the sender's utility so ties go the sender's way;
            // element i then gets ε^(i+2) in state i mod |Θ|.
            let sender = instance.sender.linear();
            let schedule: Vec<(usize, usize, usize)> = (0..instance.n()).map(|i| (i, i % k, i + 2)).collect();
            let epsilon = perturbation_epsilon(lin, sender);
            let values: Vec<Vec<Rational>> = (0..k)
                .map(|t| {
                    (0..instance.n())
                        .map(|i| {
                            let mut v = lin[t][i].clone();
                            if let Some(s) = sender {
                                v += &epsilon * &s[t][i];
                            }
                            if i % k == t {
                                v += epsilon.pow(i as i32 + 2);
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            let (found, cells, hyperplanes) = catalog_over(&values, &pairs, &oracle, options.region)?;
            Ok(assemble(
                found,
                cells,
                hyperplanes,
                DegeneracyReport::Perturbed {
                    schedule,
                    violations: count,
                    epsilon,
                },
            ))
        }
        audit => {
            let report = match audit {
                Nondegeneracy::Clean => DegeneracyReport::Clean,
                Nondegeneracy::Violations(list, _) => DegeneracyReport::Violations(list),
            };
            let (found, cells, hyperplanes) = catalog_over(lin, &pairs, &oracle, options.region)?;
            Ok(assemble(found, cells, hyperplanes, report))
        }
    }
}

/// A value `ε₀ > 0` below every positive root of every minor of the
/// perturbed hyperplane normals together with the simplex facets. All such
/// minors keep the sign they have as `ε → 0⁺`, so the arrangement at `ε₀` has
/// exactly the cells of the symbolic one.
///
/// After scaling to integers, a nonzero minor has lowest coefficient at
/// least 1 and absolute coefficient sum at most `H = d!·A^d`, where `A` bounds
/// the coefficient sum of one entry; it cannot vanish on `(0, 1/H)`.
pub fn perturbation_epsilon(receiver: &[Vec<Rational>], sender: Option<&[Vec<Rational>]>) -> Rational {
    let d = receiver.len();
    let abs_max = |rows: &[Vec<Rational>]| -> Rational {
        rows.iter()
            .flatten()
            .map(|v| if v.is_negative() { -v.clone() } else { v.clone() })
            .max()
            .unwrap_or_else(|| int(0))
    };
    let r = abs_max(receiver);
    let s = sender.map_or_else(|| int(0), abs_max);
    let q = common_denominator(receiver.iter().flatten().chain(sender.into_iter().flatten().flatten()));
    let a = Rational::from_integer(q) * (int(2) * r + int(2) * s + int(2));
    let factorial: i64 = (1..=d as i64).product();
    let h = int(factorial) * a.pow(d as i32);
    int(1) / (h.ceil() + int(1))
}

type Found<F> = (Vec<(ActionSet, Vec<F>)>, usize, usize);

fn catalog_over<F: Field>(
    values: &[Vec<F>],
    pairs: &[(usize, usize)],
    oracle: &MatroidOracle,
    region: Region,
) -> Result<Found<F>> {
    let hyperplanes = hyperplanes_for(values, pairs);
    let cells = enumerate_cells_in(values.len(), &hyperplanes, region)?;
    let mut out = Vec::with_capacity(cells.len());
    for cell in &cells {
        let weights = expected(values, &cell.interior);
        out.push((greedy_basis(oracle, &weights), cell.interior.clone()));
    }
    Ok((out, cells.len(), hyperplanes.len()))
}

fn expected<F: Field>(values: &[Vec<F>], xi: &[F]) -> Vec<F> {
    let n = values.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            values
                .iter()
                .zip(xi)
                .fold(F::zero(), |acc, (row, x)| acc.plus(&row[i].times(x)))
        })
        .collect()
}

fn assemble(
    found: Vec<(ActionSet, Vec<Rational>)>,
    cells: usize,
    hyperplanes: usize,
    report: DegeneracyReport,
) -> BestResponseCatalog {
    let mut unique: BTreeMap<ActionSet, Vec<Rational>> = BTreeMap::new();
    for (a, w) in found {
        unique.entry(a).or_insert(w);
    }
    let (actions, witnesses) = unique.into_iter().unzip();
    BestResponseCatalog {
        actions,
        witnesses,
        cells,
        hyperplanes,
        report,
    }
}
