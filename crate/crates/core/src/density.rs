//! Exact homomorphism counts and densities between finite graphs.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, OrientedGraph, UndirectedGraph};
use crate::par;
use crate::rational::{self, Rational};

/// A number of maps between graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomCount(pub BigUint);

impl HomCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for HomCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for HomCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl From<u64> for HomCount {
    fn from(v: u64) -> Self {
        Self(BigUint::from(v))
    }
}

/// An exact density in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Density(Rational);

impl Density {
    fn from_count(count: &HomCount, maps: BigUint) -> Self {
        Self(Rational::new(BigInt::from(count.0.clone()), BigInt::from(maps)))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::to_string(&self.0))
    }
}

impl Serialize for Density {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serialize(&self.0, s)
    }
}

/// A pattern prepared for backtracking: vertices in search order, with the
/// constraints each vertex has towards earlier ones.
struct SearchPlan {
    order: Vec<usize>,
    /// For position `p`: `(q, forward)` meaning the pattern has the arc
    /// `order[q] → order[p]` (`forward`) or `order[p] → order[q]`.
    back_arcs: Vec<Vec<(usize, bool)>>,
}

/// Descending degree, preferring vertices adjacent to those already placed,
/// ties broken by index.
pub(crate) fn search_order(n: usize, arcs: &[(usize, usize)]) -> Vec<usize> {
    let mut degree = vec![0usize; n];
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in arcs {
        degree[u] += 1;
        degree[v] += 1;
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let mut placed = vec![false; n];
    let mut touched = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = |only_touched: bool| {
            (0..n)
                .filter(|&v| !placed[v] && (!only_touched || touched[v]))
                .max_by(|&a, &b| degree[a].cmp(&degree[b]).then(b.cmp(&a)))
        };
        let v = pick(true).or_else(|| pick(false)).expect("a vertex remains");
        placed[v] = true;
        for &w in &nbrs[v] {
            touched[w] = true;
        }
        order.push(v);
    }
    order
}

impl SearchPlan {
    fn new(n: usize, arcs: &[(usize, usize)]) -> Self {
        let order = search_order(n, arcs);
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut back_arcs = vec![Vec::new(); n];
        for &(u, v) in arcs {
            let (pu, pv) = (pos[u], pos[v]);
            if pu < pv {
                back_arcs[pv].push((pu, true));
            } else {
                back_arcs[pu].push((pv, false));
            }
        }
        Self { order, back_arcs }
    }
}

/// Counts maps `f` from the pattern to the host with `host_adj[f(u)·m + f(v)]`
/// for every pattern arc `(u, v)`, optionally injective, optionally with a
/// per-pattern-vertex allowed set of host vertices.
pub(crate) fn count_maps(
    pattern_n: usize,
    arcs: &[(usize, usize)],
    host_n: usize,
    host_adj: &[bool],
    allowed: Option<&[Vec<bool>]>,
    injective: bool,
) -> BigUint {
    if pattern_n == 0 {
        return BigUint::one();
    }
    if host_n == 0 || (injective && pattern_n > host_n) {
        return BigUint::zero();
    }
    let plan = SearchPlan::new(pattern_n, arcs);
    let ok = |p: usize, x: usize| allowed.is_none_or(|a| a[plan.order[p]][x]);

    let first: Vec<usize> = (0..host_n).filter(|&x| ok(0, x)).collect();
    let partials = par::map_slice(&first, |&x| {
        let mut image = vec![0usize; pattern_n];
        let mut used = vec![false; host_n];
        image[0] = x;
        used[x] = true;
        extend(1, &plan, host_n, host_adj, &ok, injective, &mut image, &mut used)
    });
    partials.into_iter().map(BigUint::from).sum()
}

#[allow(clippy::too_many_arguments)]
fn extend(
    p: usize,
    plan: &SearchPlan,
    m: usize,
    adj: &[bool],
    ok: &impl Fn(usize, usize) -> bool,
    injective: bool,
    image: &mut [usize],
    used: &mut [bool],
) -> u128 {
    let n = plan.order.len();
    if p == n {
        return 1;
    }
    let mut total = 0u128;
    for x in 0..m {
        if (injective && used[x]) || !ok(p, x) {
            continue;
        }
        let fits = plan.back_arcs[p].iter().all(|&(q, forward)| {
            let y = image[q];
            if forward { adj[y * m + x] } else { adj[x * m + y] }
        });
        if !fits {
            continue;
        }
        if p + 1 == n {
            total += 1;
            continue;
        }
        image[p] = x;
        used[x] = true;
        total += extend(p + 1, plan, m, adj, ok, injective, image, used);
        used[x] = false;
    }
    total
}

/// Number of maps V(B) → V(G) sending every edge of `b` to an edge of `g`
/// with the same direction.
pub fn hom_count_directed(b: &OrientedGraph, g: &OrientedGraph) -> HomCount {
    HomCount(count_maps(b.vertex_count(), b.edges(), g.vertex_count(), &g.adjacency(), None, false))
}

/// t(B, G) = hom(B, G) / v(G)^v(B).
pub fn t_directed(b: &OrientedGraph, g: &OrientedGraph) -> Result<Density> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyHost);
    }
    let maps = num_traits::pow(BigUint::from(g.vertex_count()), b.vertex_count());
    Ok(Density::from_count(&hom_count_directed(b, g), maps))
}

/// Injective homomorphisms, i.e. labelled copies of `b` in `g`.
pub fn labeled_copies(b: &OrientedGraph, g: &OrientedGraph) -> HomCount {
    HomCount(count_maps(b.vertex_count(), b.edges(), g.vertex_count(), &g.adjacency(), None, true))
}

/// Part-respecting homomorphisms from `a` to `h`.
pub fn hom_count_bip(a: &BipartiteGraph, h: &BipartiteGraph) -> HomCount {
    let pattern = a.to_part_oriented();
    let host = h.to_part_oriented();
    let (n1, m1) = (a.part1_count(), h.part1_count());
    let allowed: Vec<Vec<bool>> = (0..a.vertex_count())
        .map(|v| (0..h.vertex_count()).map(|x| (v < n1) == (x < m1)).collect())
        .collect();
    HomCount(count_maps(
        pattern.vertex_count(),
        pattern.edges(),
        host.vertex_count(),
        &host.adjacency(),
        Some(&allowed),
        false,
    ))
}

/// t_bip(A, H) = hom_bip(A, H) / (|U₁|^|A₁| · |U₂|^|A₂|).
pub fn t_bip(a: &BipartiteGraph, h: &BipartiteGraph) -> Result<Density> {
    if a.part1_count() > 0 && h.part1_count() == 0 {
        return Err(Error::EmptyHostPart(1));
    }
    if a.part2_count() > 0 && h.part2_count() == 0 {
        return Err(Error::EmptyHostPart(2));
    }
    let maps = num_traits::pow(BigUint::from(h.part1_count()), a.part1_count())
        * num_traits::pow(BigUint::from(h.part2_count()), a.part2_count());
    Ok(Density::from_count(&hom_count_bip(a, h), maps))
}

/// Homomorphisms between simple undirected graphs.
pub fn hom_count_undirected(a: &UndirectedGraph, h: &UndirectedGraph) -> HomCount {
    HomCount(count_maps(a.vertex_count(), a.edges(), h.vertex_count(), &h.adjacency(), None, false))
}

pub fn t_undirected(a: &UndirectedGraph, h: &UndirectedGraph) -> Result<Density> {
    if h.vertex_count() == 0 {
        return Err(Error::EmptyHost);
    }
    let maps = num_traits::pow(BigUint::from(h.vertex_count()), a.vertex_count());
    Ok(Density::from_count(&hom_count_undirected(a, h), maps))
}

/// e(G)/v(G)², the density of the single directed edge in `g`.
pub fn edge_density(g: &OrientedGraph) -> Result<Density> {
    t_directed(&OrientedGraph::single_edge(), g)
}
