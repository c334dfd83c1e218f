//! Oriented, undirected and bipartite graphs on index-labelled vertices.

use serde::Serialize;

use crate::error::{Error, Result};

/// A loopless digraph with no anti-parallel pair of edges.
///
/// Vertices are `0..vertex_count`. Edges are kept sorted so two graphs with
/// the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrientedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl OrientedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
            }
        }
        for &(u, v) in &edges {
            if edges.binary_search(&(v, u)).is_ok() {
                return Err(Error::InvalidGraph(format!("anti-parallel pair between {u} and {v}")));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// The single directed edge 0 → 1.
    pub fn single_edge() -> Self {
        Self { n: 2, edges: vec![(0, 1)] }
    }

    /// Directed path 0 → 1 → … → k−1 on `k` vertices.
    pub fn directed_path(k: usize) -> Self {
        Self { n: k, edges: (1..k).map(|i| (i - 1, i)).collect() }
    }

    /// Directed cycle 0 → 1 → … → k−1 → 0. Needs `k ≥ 3`.
    pub fn directed_cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidGraph(format!("directed cycle needs at least 3 vertices, got {k}")));
        }
        Self::new(k, (0..k).map(|i| (i, (i + 1) % k)))
    }

    /// Transitive tournament with `i → j` whenever `i < j`.
    pub fn transitive_tournament(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    /// N⁺(v).
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == v).map(|e| e.1)
    }

    /// N⁻(v).
    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.1 == v).map(|e| e.0)
    }

    /// d⁺(v) = |N⁺(v)|.
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_neighbors(v).count()
    }

    /// d⁻(v) = |N⁻(v)|.
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_neighbors(v).count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        !self.edges.iter().any(|e| e.0 == v || e.1 == v)
    }

    pub fn isolated_count(&self) -> usize {
        (0..self.n).filter(|&v| self.is_isolated(v)).count()
    }

    /// Row-major `n × n` adjacency matrix.
    pub fn adjacency(&self) -> Vec<bool> {
        let mut adj = vec![false; self.n * self.n];
        for &(u, v) in &self.edges {
            adj[u * self.n + v] = true;
        }
        adj
    }

    /// Same graph with every edge reversed.
    pub fn reverse(&self) -> Self {
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, v)| (v, u)).collect();
        edges.sort_unstable();
        Self { n: self.n, edges }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidGraph("permutation length differs from vertex count".into()));
        }
        Self::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Disjoint union, with `other`'s vertices shifted past ours.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        edges.sort_unstable();
        Self { n: self.n + other.n, edges }
    }

    /// The graph with isolated vertices removed (remaining vertices keep their order).
    pub fn without_isolated(&self) -> Self {
        let mut index = vec![usize::MAX; self.n];
        let mut next = 0;
        for (v, slot) in index.iter_mut().enumerate() {
            if !self.is_isolated(v) {
                *slot = next;
                next += 1;
            }
        }
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, v)| (index[u], index[v])).collect();
        edges.sort_unstable();
        Self { n: next, edges }
    }

    /// B̄: forget the orientation.
    pub fn underlying(&self) -> UndirectedGraph {
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        UndirectedGraph { n: self.n, edges }
    }

    /// A 2-colouring with every edge running from `part1` to `part2`, i.e. a
    /// homomorphism to the single directed edge, if one exists. Isolated
    /// vertices go to `part1`.
    pub fn hom_to_edge_bipartition(&self) -> Option<Bipartition> {
        let mut part1 = Vec::new();
        let mut part2 = Vec::new();
        for v in 0..self.n {
            let tail = self.edges.iter().any(|e| e.0 == v);
            let head = self.edges.iter().any(|e| e.1 == v);
            match (tail, head) {
                (true, true) => return None,
                (false, true) => part2.push(v),
                _ => part1.push(v),
            }
        }
        Some(Bipartition { part1, part2 })
    }

    pub fn has_hom_to_edge(&self) -> bool {
        self.hom_to_edge_bipartition().is_some()
    }

    /// Whether B̄ contains a cycle.
    pub fn underlying_has_cycle(&self) -> bool {
        self.underlying().has_cycle()
    }
}

/// The two sides of a homomorphism to the directed edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    /// Builds a simple graph; each edge may be given in either order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {{{u},{v}}} out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self { n, edges: normalized })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    /// Symmetric row-major adjacency matrix.
    pub fn adjacency(&self) -> Vec<bool> {
        let mut adj = vec![false; self.n * self.n];
        for &(u, v) in &self.edges {
            adj[u * self.n + v] = true;
            adj[v * self.n + u] = true;
        }
        adj
    }

    pub fn has_cycle(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return true;
            }
            parent[ru] = rv;
        }
        false
    }

    /// Bipartite double cover: parts are two copies of V(H) and `(u, v)` is an
    /// edge whenever `{u, v} ∈ E(H)`.
    pub fn double_cover(&self) -> BipartiteGraph {
        let mut edges: Vec<_> = self.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        edges.sort_unstable();
        BipartiteGraph { part1: self.n, part2: self.n, edges }
    }
}

/// An undirected graph with a fixed bipartition; edge `(i, j)` joins vertex
/// `i` of part 1 to vertex `j` of part 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BipartiteGraph {
    part1: usize,
    part2: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(part1: usize, part2: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= part1 || j >= part2 {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range for parts ({part1},{part2})")));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self { part1, part2, edges })
    }

    pub fn complete(part1: usize, part2: usize) -> Self {
        let edges = (0..part1).flat_map(|i| (0..part2).map(move |j| (i, j))).collect();
        Self { part1, part2, edges }
    }

    /// Even cycle on `2k` vertices, alternating between the parts.
    pub fn even_cycle(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGraph("an even cycle needs k ≥ 2".into()));
        }
        Self::new(k, k, (0..k).flat_map(|i| [(i, i), (i, (i + 1) % k)]))
    }

    pub fn part1_count(&self) -> usize {
        self.part1
    }

    pub fn part2_count(&self) -> usize {
        self.part2
    }

    pub fn vertex_count(&self) -> usize {
        self.part1 + self.part2
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    /// Concatenates the parts (part 1 first) and directs every edge from part 1
    /// to part 2.
    pub fn to_part_oriented(&self) -> OrientedGraph {
        let edges = self.edges.iter().map(|&(i, j)| (i, self.part1 + j)).collect();
        OrientedGraph { n: self.vertex_count(), edges }
    }

    /// Forgets the bipartition.
    pub fn underlying(&self) -> UndirectedGraph {
        self.to_part_oriented().underlying()
    }
}

/// A complete oriented graph: exactly one of `(u, v)`, `(v, u)` per pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Tournament {
    graph: OrientedGraph,
}

impl Tournament {
    pub fn new(graph: OrientedGraph) -> Result<Self> {
        let n = graph.vertex_count();
        if graph.edge_count() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidGraph(format!(
                "a tournament on {n} vertices needs {} edges, got {}",
                n * n.saturating_sub(1) / 2,
                graph.edge_count()
            )));
        }
        Ok(Self { graph })
    }

    /// Tournament number `code` in the labelled enumeration: bit `k` of
    /// `code` set means the `k`-th pair `(i, j)`, `i < j` in lexicographic
    /// order, is oriented `j → i`.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if code >> bit & 1 == 1 {
                    edges.push((j, i));
                } else {
                    edges.push((i, j));
                }
                bit += 1;
            }
        }
        edges.sort_unstable();
        Self { graph: OrientedGraph { n, edges } }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn as_oriented(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn reverse(&self) -> Self {
        Self { graph: self.graph.reverse() }
    }
}

/// Complete balanced bipartite oriented graph K⃗_{n,n}: vertices `0..n` form
/// part 1, `n..2n` part 2, and every edge runs from part 1 to part 2.
pub fn oriented_knn(n: usize) -> Result<OrientedGraph> {
    if n == 0 {
        return Err(Error::OutOfRange("oriented K_{n,n} needs n ≥ 1".into()));
    }
    Ok(BipartiteGraph::complete(n, n).to_part_oriented())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_triangle() -> OrientedGraph {
        OrientedGraph::directed_cycle(3).unwrap()
    }

    #[test]
    fn rejects_loops_digons_and_out_of_range() {
        assert!(OrientedGraph::new(2, [(0, 0)]).is_err());
        assert!(OrientedGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(OrientedGraph::new(2, [(0, 2)]).is_err());
        assert!(OrientedGraph::new(2, [(0, 1), (0, 1)]).is_err());
        assert!(BipartiteGraph::new(1, 1, [(0, 1)]).is_err());
        assert!(UndirectedGraph::new(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn underlying_forgets_direction() {
        let e = OrientedGraph::single_edge().underlying();
        assert_eq!(e.edges(), &[(0, 1)]);
        let k3 = cyclic_triangle().underlying();
        assert_eq!(k3, UndirectedGraph::complete(3));
        let empty = OrientedGraph::empty(3).underlying();
        assert_eq!(empty.vertex_count(), 3);
        assert_eq!(empty.edge_count(), 0);
    }

    // exhaustive over all 2^n colourings, independent of the degree rule
    fn brute_force_edge_coloring(b: &OrientedGraph) -> bool {
        (0u32..1 << b.vertex_count()).any(|mask| b.edges().iter().all(|&(u, v)| mask >> u & 1 == 0 && mask >> v & 1 == 1))
    }

    #[test]
    fn hom_to_edge_examples() {
        let e = OrientedGraph::single_edge().hom_to_edge_bipartition().unwrap();
        assert_eq!((e.part1, e.part2), (vec![0], vec![1]));

        let path = OrientedGraph::directed_path(3);
        assert!(path.hom_to_edge_bipartition().is_none());
        assert!(!brute_force_edge_coloring(&path));

        // a → b ← c
        let alt = OrientedGraph::new(3, [(0, 1), (2, 1)]).unwrap();
        let bp = alt.hom_to_edge_bipartition().unwrap();
        assert_eq!((bp.part1, bp.part2), (vec![0, 2], vec![1]));
    }

    #[test]
    fn hom_to_edge_agrees_with_brute_force_on_all_small_graphs() {
        for n in 0..=4 {
            crate::enumerate::enumerate_oriented_graphs(n, |b| {
                assert_eq!(b.has_hom_to_edge(), brute_force_edge_coloring(b), "{b:?}");
            })
            .unwrap();
        }
    }

    #[test]
    fn isolated_vertices_land_in_part1() {
        let g = OrientedGraph::new(4, [(1, 2)]).unwrap();
        let bp = g.hom_to_edge_bipartition().unwrap();
        assert_eq!(bp.part1, vec![0, 1, 3]);
        assert_eq!(bp.part2, vec![2]);
    }

    #[test]
    fn to_part_oriented_examples() {
        let k2 = BipartiteGraph::complete(1, 1).to_part_oriented();
        assert_eq!(k2, OrientedGraph::single_edge());

        let c4 = BipartiteGraph::even_cycle(2).unwrap();
        assert_eq!(c4.edge_count(), 4);
        let b = c4.to_part_oriented();
        assert_eq!(b.edges(), &[(0, 2), (0, 3), (1, 2), (1, 3)]);

        let empty = BipartiteGraph::new(2, 2, []).unwrap().to_part_oriented();
        assert_eq!(empty, OrientedGraph::empty(4));
    }

    #[test]
    fn double_cover_examples() {
        let m = UndirectedGraph::complete(2).double_cover();
        assert_eq!((m.part1_count(), m.part2_count()), (2, 2));
        assert_eq!(m.edges(), &[(0, 1), (1, 0)]);

        // K3's double cover is a 6-cycle: connected and 2-regular on 6 vertices
        let c6 = UndirectedGraph::complete(3).double_cover();
        let u = c6.underlying();
        assert_eq!(u.vertex_count(), 6);
        assert!((0..6).all(|v| u.degree(v) == 2));
        let mut seen = [false; 6];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend((0..6).filter(|&w| u.has_edge(v, w)));
        }
        assert!(seen.iter().all(|&s| s));

        let iso = UndirectedGraph::empty(1).double_cover();
        assert_eq!((iso.vertex_count(), iso.edge_count()), (2, 0));
    }

    #[test]
    fn double_cover_inherits_degrees() {
        let h = UndirectedGraph::new(5, [(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)]).unwrap();
        let d = h.double_cover();
        assert_eq!(d.edge_count(), 2 * h.edge_count());
        let u = d.underlying();
        for v in 0..5 {
            assert_eq!(u.degree(v), h.degree(v));
            assert_eq!(u.degree(5 + v), h.degree(v));
        }
    }

    #[test]
    fn oriented_knn_shape() {
        assert_eq!(oriented_knn(1).unwrap(), OrientedGraph::single_edge());
        let k2 = oriented_knn(2).unwrap();
        assert_eq!((k2.vertex_count(), k2.edge_count()), (4, 4));
        assert!((0..2).all(|v| k2.out_degree(v) == 2));
        let k3 = oriented_knn(3).unwrap();
        assert_eq!(k3.edge_count(), 9);
        assert!((0..3).all(|v| k3.out_degree(v) == 3 && k3.in_degree(v) == 0));
        assert!(k3.has_hom_to_edge());
        assert!(oriented_knn(0).is_err());
    }

    #[test]
    fn underlying_cycle_detection() {
        assert!(cyclic_triangle().underlying_has_cycle());
        assert!(!OrientedGraph::directed_path(3).underlying_has_cycle());
        // a→b←c→d←a
        let alt = OrientedGraph::new(4, [(0, 1), (2, 1), (2, 3), (0, 3)]).unwrap();
        assert!(alt.underlying_has_cycle());
    }

    #[test]
    fn tournament_codes_and_reversal() {
        let t = Tournament::from_code(3, 0);
        assert_eq!(t.as_oriented(), &OrientedGraph::transitive_tournament(3));
        assert_eq!(t.reverse().reverse(), t);
        assert!(Tournament::new(OrientedGraph::directed_path(3)).is_err());
        assert!(Tournament::new(cyclic_triangle()).is_ok());
    }

    #[test]
    fn without_isolated_compacts_labels() {
        let g = OrientedGraph::new(5, [(1, 3)]).unwrap();
        assert_eq!(g.without_isolated(), OrientedGraph::single_edge());
        assert_eq!(g.isolated_count(), 3);
    }
}
