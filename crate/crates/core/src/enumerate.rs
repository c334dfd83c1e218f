//! Labelled enumeration of small oriented graphs and tournaments.
//!
//! Every graph has a numeric code, so callers can shard `0..count` into
//! ranges and visit the pieces independently.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::{OrientedGraph, Tournament};

pub const DEFAULT_ORIENTED_CAP: usize = 6;
pub const DEFAULT_TOURNAMENT_CAP: usize = 7;

fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// 3^C(n,2).
pub fn oriented_graph_count(n: usize) -> u64 {
    3u64.pow(pairs(n) as u32)
}

/// 2^C(n,2).
pub fn tournament_count(n: usize) -> u64 {
    1u64 << pairs(n)
}

/// Oriented graph number `code`: base-3 digit `k` of `code` is the state of
/// the `k`-th pair `(i, j)`, `i < j`, in lexicographic order (0 absent,
/// 1 `i → j`, 2 `j → i`).
pub fn oriented_graph_from_code(n: usize, mut code: u64) -> OrientedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match code % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            code /= 3;
        }
    }
    OrientedGraph::new(n, edges).expect("codes always describe oriented graphs")
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

/// Visits every labelled oriented graph on `n` vertices once and returns the
/// visit count, 3^C(n,2).
pub fn enumerate_oriented_graphs<F: FnMut(&OrientedGraph)>(n: usize, visit: F) -> Result<u64> {
    enumerate_oriented_graphs_with_cap(n, DEFAULT_ORIENTED_CAP, visit)
}

pub fn enumerate_oriented_graphs_with_cap<F: FnMut(&OrientedGraph)>(n: usize, cap: usize, visit: F) -> Result<u64> {
    check_cap("oriented graph enumeration", n, cap)?;
    Ok(enumerate_oriented_range(n, 0..oriented_graph_count(n), visit))
}

/// Visits the graphs whose codes fall in `codes`.
pub fn enumerate_oriented_range<F: FnMut(&OrientedGraph)>(n: usize, codes: Range<u64>, mut visit: F) -> u64 {
    let mut count = 0;
    for code in codes {
        visit(&oriented_graph_from_code(n, code));
        count += 1;
    }
    count
}

/// Visits every labelled tournament on `n` vertices once and returns the
/// visit count, 2^C(n,2).
pub fn enumerate_tournaments<F: FnMut(&Tournament)>(n: usize, visit: F) -> Result<u64> {
    enumerate_tournaments_with_cap(n, DEFAULT_TOURNAMENT_CAP, visit)
}

pub fn enumerate_tournaments_with_cap<F: FnMut(&Tournament)>(n: usize, cap: usize, mut visit: F) -> Result<u64> {
    check_cap("tournament enumeration", n, cap)?;
    let total = tournament_count(n);
    for code in 0..total {
        visit(&Tournament::from_code(n, code));
    }
    Ok(total)
}

/// Canonical representative of the isomorphism class of `g`: the relabelling
/// with the lexicographically smallest sorted edge list, searched over
/// permutations that respect an iterated degree refinement.
pub fn canonical_form(g: &OrientedGraph) -> OrientedGraph {
    let n = g.vertex_count();
    let colors = refine_colors(g);
    let adj = g.adjacency();

    // vertices are placed in order of colour class; only the order inside a
    // class is searched
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (colors[v], v));
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    search(0, &order, &colors, &adj, n, &mut perm, &mut used, &mut best);
    OrientedGraph::new(n, best.unwrap_or_default()).expect("relabelling keeps the graph oriented")
}

#[allow(clippy::too_many_arguments)]
fn search(
    pos: usize,
    order: &[usize],
    colors: &[usize],
    adj: &[bool],
    n: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if pos == n {
        let mut edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| adj[u * n + v])
            .map(|(u, v)| (perm[u], perm[v]))
            .collect();
        edges.sort_unstable();
        if best.as_ref().is_none_or(|b| edges < *b) {
            *best = Some(edges);
        }
        return;
    }
    // position `pos` is reserved for the colour class of order[pos]
    let class = colors[order[pos]];
    for v in 0..n {
        if used[v] || colors[v] != class {
            continue;
        }
        used[v] = true;
        perm[v] = pos;
        search(pos + 1, order, colors, adj, n, perm, used, best);
        used[v] = false;
        perm[v] = usize::MAX;
    }
}

/// Iterated (out-degree, in-degree) refinement; returns dense colour ids that
/// are invariant under relabelling.
fn refine_colors(g: &OrientedGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut colors: Vec<usize> = vec![0; n];
    let mut classes = 1;
    loop {
        let signatures: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut outs: Vec<usize> = g.out_neighbors(v).map(|w| colors[w]).collect();
                let mut ins: Vec<usize> = g.in_neighbors(v).map(|w| colors[w]).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                (colors[v], outs, ins)
            })
            .collect();
        let distinct: BTreeSet<_> = signatures.iter().cloned().collect();
        let ids: Vec<_> = distinct.into_iter().collect();
        let next: Vec<usize> = signatures.iter().map(|s| ids.binary_search(s).unwrap()).collect();
        if ids.len() == classes {
            return next;
        }
        classes = ids.len();
        colors = next;
    }
}

/// Isomorphism-class representatives on `n` vertices, via [`canonical_form`].
pub fn oriented_graphs_up_to_isomorphism(n: usize) -> Result<Vec<OrientedGraph>> {
    let mut reps = BTreeSet::new();
    enumerate_oriented_graphs(n, |g| {
        reps.insert(canonical_form(g));
    })?;
    Ok(reps.into_iter().collect())
}
