//! Source-sink paths in a directed graph whose arcs are the ground set.

use crate::error::{Error, Result};
use crate::field::Weight;
use crate::model::ActionSet;

fn out_arcs(nv: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); nv];
    for (i, &(u, _)) in arcs.iter().enumerate() {
        out[u].push(i);
    }
    out
}

pub fn sink_reachable(nv: usize, arcs: &[(usize, usize)], source: usize, sink: usize) -> bool {
    let out = out_arcs(nv, arcs);
    let mut seen = vec![false; nv];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(u) = stack.pop() {
        if u == sink {
            return true;
        }
        for &a in &out[u] {
            let v = arcs[a].1;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

/// Whether `action` is exactly the arc set of a simple source-sink path.
pub fn is_simple_path(arcs: &[(usize, usize)], source: usize, sink: usize, action: &ActionSet) -> bool {
    let chosen = action.elements();
    let mut visited = vec![source];
    let mut at = source;
    let mut used = 0;
    while at != sink {
        let mut next = chosen.iter().filter(|&&a| arcs[a].0 == at);
        let (Some(&a), None) = (next.next(), next.next()) else {
            return false;
        };
        at = arcs[a].1;
        if visited.contains(&at) {
            return false;
        }
        visited.push(at);
        used += 1;
    }
    used == chosen.len()
}

/// All simple source-sink paths, in DFS order over ascending arc indices.
pub fn enumerate_paths(
    nv: usize,
    arcs: &[(usize, usize)],
    source: usize,
    sink: usize,
    limit: usize,
) -> Result<Vec<ActionSet>> {
    let out = out_arcs(nv, arcs);
    let mut found = Vec::new();
    let mut on_path = vec![false; nv];
    let mut stack: Vec<usize> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        u: usize,
        sink: usize,
        arcs: &[(usize, usize)],
        out: &[Vec<usize>],
        on_path: &mut [bool],
        stack: &mut Vec<usize>,
        found: &mut Vec<ActionSet>,
        limit: usize,
    ) -> Result<()> {
        if u == sink {
            if found.len() >= limit {
                return Err(Error::TooLarge {
                    what: "source-sink paths".into(),
                    limit,
                });
            }
            found.push(ActionSet::new(stack.iter().copied()));
            return Ok(());
        }
        on_path[u] = true;
        for &a in &out[u] {
            let v = arcs[a].1;
            if !on_path[v] {
                stack.push(a);
                dfs(v, sink, arcs, out, on_path, stack, found, limit)?;
                stack.pop();
            }
        }
        on_path[u] = false;
        Ok(())
    }
    dfs(source, sink, arcs, &out, &mut on_path, &mut stack, &mut found, limit)?;
    Ok(found)
}

/// Minimum-weight source-sink path for nonnegative weights. Among minimum-weight
/// paths it takes the fewest arcs, then the lexicographically smallest arc sequence.
pub fn shortest_path<W: Weight>(
    nv: usize,
    arcs: &[(usize, usize)],
    source: usize,
    sink: usize,
    weights: &[W],
) -> Result<ActionSet> {
    // Dijkstra towards the sink on the reversed graph, keyed by (weight, hops).
    let mut dist: Vec<Option<(W, usize)>> = vec![None; nv];
    let mut done = vec![false; nv];
    dist[sink] = Some((W::zero_weight(), 0));
    loop {
        let next = (0..nv)
            .filter(|&v| !done[v] && dist[v].is_some())
            .min_by(|&a, &b| dist[a].cmp(&dist[b]));
        let Some(v) = next else { break };
        done[v] = true;
        let (dv, hv) = dist[v].clone().unwrap();
        for (i, &(u, head)) in arcs.iter().enumerate() {
            if head != v || done[u] {
                continue;
            }
            let cand = (weights[i].sum_with(&dv), hv + 1);
            if dist[u].as_ref().is_none_or(|d| cand < *d) {
                dist[u] = Some(cand);
            }
        }
    }
    let Some(mut here) = dist[source].clone() else {
        return Err(Error::NoPath);
    };
    let mut at = source;
    let mut path = Vec::new();
    while at != sink {
        let arc = arcs
            .iter()
            .enumerate()
            .find(|&(i, &(u, v))| {
                u == at
                    && dist[v]
                        .as_ref()
                        .is_some_and(|(dv, hv)| (weights[i].sum_with(dv), hv + 1) == here)
            })
            .map(|(i, _)| i)
            .expect("tight arc exists on a shortest path");
        path.push(arc);
        at = arcs[arc].1;
        here = dist[at].clone().unwrap();
    }
    Ok(ActionSet::new(path))
}
