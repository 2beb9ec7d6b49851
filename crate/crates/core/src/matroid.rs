//! Independence oracles for the built-in matroid families and the greedy
//! maximum-weight independent set algorithm.

use crate::error::{Error, Result};
use crate::field::{Field, Weight};
use crate::model::{ActionSet, ConstraintSpec, IndependenceOracle, Sense};
use crate::persuasion::paths;

/// Independence oracle for any non-path constraint.
#[derive(Clone, Debug)]
pub struct MatroidOracle {
    constraint: ConstraintSpec,
}

impl MatroidOracle {
    pub fn new(constraint: &ConstraintSpec) -> Result<Self> {
        if !constraint.is_matroid() {
            return Err(Error::UnsupportedCombination(
                "path constraints are not matroids".into(),
            ));
        }
        Ok(MatroidOracle {
            constraint: constraint.clone(),
        })
    }

    pub fn constraint(&self) -> &ConstraintSpec {
        &self.constraint
    }

    pub fn is_independent(&self, s: &ActionSet) -> bool {
        match &self.constraint {
            ConstraintSpec::Uniform { k } => s.len() <= *k,
            ConstraintSpec::Partition { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .all(|(b, &cap)| b.iter().filter(|&&e| s.contains(e)).count() <= cap),
            ConstraintSpec::Graphic { vertices, edges } => {
                let mut uf = UnionFind::new(vertices.len());
                s.elements().iter().all(|&e| {
                    let (u, v) = edges[e];
                    uf.union(u, v)
                })
            }
            ConstraintSpec::Oracle(o) => o.oracle.is_independent(s),
            ConstraintSpec::Path { .. } => unreachable!("rejected in MatroidOracle::new"),
        }
    }
}

impl IndependenceOracle for MatroidOracle {
    fn is_independent(&self, action: &ActionSet) -> bool {
        MatroidOracle::is_independent(self, action)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; `false` if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Greedy over any ordered weight: scan by descending weight (ties by index),
/// keep an element when its weight is nonnegative and independence is preserved.
pub fn greedy<W: Weight>(oracle: &MatroidOracle, weights: &[W]) -> ActionSet {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let zero = W::zero_weight();
    let mut current = ActionSet::empty();
    for i in order {
        if weights[i] < zero {
            break;
        }
        let next = current.with(i);
        if oracle.is_independent(&next) {
            current = next;
        }
    }
    current
}

/// Scans by descending weight (ties by index) and keeps every element that
/// preserves independence, regardless of sign. Returns a basis.
pub fn greedy_basis<W: Weight>(oracle: &MatroidOracle, weights: &[W]) -> ActionSet {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut current = ActionSet::empty();
    for i in order {
        let next = current.with(i);
        if oracle.is_independent(&next) {
            current = next;
        }
    }
    current
}

/// Maximum-weight independent set over any ordered field.
pub fn greedy_max_weight<F: Field>(oracle: &MatroidOracle, weights: &[F]) -> ActionSet {
    greedy(oracle, weights)
}

/// Best action for an agent optimizing `weights`: greedy on matroids
/// (maximize), shortest path on path constraints (minimize).
pub fn max_weight_action<W: Weight>(constraint: &ConstraintSpec, sense: Sense, weights: &[W]) -> Result<ActionSet> {
    match (constraint, sense) {
        (
            ConstraintSpec::Path {
                vertices,
                arcs,
                source,
                sink,
            },
            Sense::Minimize,
        ) => paths::shortest_path(vertices.len(), arcs, *source, *sink, weights),
        (ConstraintSpec::Path { .. }, Sense::Maximize) => Err(Error::UnsupportedSense("maximum-weight paths".into())),
        (c, Sense::Maximize) => Ok(greedy(&MatroidOracle::new(c)?, weights)),
        (_, Sense::Minimize) => Err(Error::UnsupportedSense("minimum-weight matroid actions".into())),
    }
}

/// Canonical `K_4` on vertices 0..4 with edges (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
pub fn k4() -> ConstraintSpec {
    ConstraintSpec::Graphic {
        vertices: (0..4).map(|v| format!("v{v}")).collect(),
        edges: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    }
}
