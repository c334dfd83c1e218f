use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use disid::cutnorm::{cut_norm, cut_norm_heuristic};
use disid::density::{hom_count_directed, t_directed};
use disid::format::{emit_graph, emit_graphon, parse_graph, parse_graphon, GraphFile};
use disid::graphon::{t_bip_step, t_step};
use disid::rational::{ratio, Rational};
use disid::{BipartiteGraph, OrientedGraph, StepGraphon, UndirectedGraph};

fn oriented(max_n: usize) -> impl Strategy<Value = OrientedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0u8..3, n * (n - 1) / 2).prop_map(move |states| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges = pairs.zip(states).filter_map(|((i, j), s)| match s {
                1 => Some((i, j)),
                2 => Some((j, i)),
                _ => None,
            });
            OrientedGraph::new(n, edges).unwrap()
        })
    })
}

fn bipartite() -> impl Strategy<Value = BipartiteGraph> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(a, b)| {
        prop::collection::vec(any::<bool>(), a * b).prop_map(move |bits| {
            let edges = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).zip(bits).filter(|(_, on)| *on).map(|(e, _)| e);
            BipartiteGraph::new(a, b, edges).unwrap()
        })
    })
}

fn graphon(max_parts: usize) -> impl Strategy<Value = StepGraphon> {
    (1..=max_parts).prop_flat_map(|k| {
        (prop::collection::vec(1i64..6, k), prop::collection::vec(0i64..=12, k * k)).prop_map(move |(units, cells)| {
            let total: i64 = units.iter().sum();
            let lengths = units.iter().map(|&u| ratio(u, total)).collect();
            let values = cells.chunks(k).map(|row| row.iter().map(|&c| ratio(c, 12)).collect()).collect();
            StepGraphon::new(lengths, values).unwrap()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_counts_ignore_labels((b, g, perm) in (oriented(3), oriented(5)).prop_flat_map(|(b, g)| {
        let n = g.vertex_count();
        (Just(b), Just(g), permutation(n))
    })) {
        prop_assert_eq!(hom_count_directed(&b, &g), hom_count_directed(&b, &g.relabel(&perm).unwrap()));
    }

    #[test]
    fn densities_are_probabilities(b in oriented(3), g in oriented(5)) {
        let t = t_directed(&b, &g).unwrap().into_inner();
        prop_assert!(!t.is_negative() && t <= Rational::one());
    }

    #[test]
    fn reversing_both_sides_keeps_density(b in oriented(3), g in oriented(5)) {
        prop_assert_eq!(t_directed(&b, &g).unwrap(), t_directed(&b.reverse(), &g.reverse()).unwrap());
    }

    #[test]
    fn graph_files_round_trip(g in oriented(6), h in bipartite()) {
        let u = GraphFile::Undirected(g.underlying());
        for file in [GraphFile::Directed(g), GraphFile::Bipartite(h), u] {
            prop_assert_eq!(parse_graph(&emit_graph(&file)).unwrap(), file);
        }
    }

    #[test]
    fn graphon_files_round_trip(w in graphon(5)) {
        prop_assert_eq!(parse_graphon(&emit_graphon(&w)).unwrap(), w);
    }

    #[test]
    fn switching_identity(a in bipartite(), w in graphon(3)) {
        prop_assert_eq!(t_bip_step(&a, &w), t_step(&a.to_part_oriented(), &w));
    }

    #[test]
    fn halving_scales_by_two_per_edge(b in oriented(4), w in graphon(3)) {
        let half = ratio(1, 2);
        let scaled = t_step(&b, &w.scale(&half).unwrap());
        prop_assert_eq!(scaled, disid::rational::pow(&half, b.edge_count() as i32) * t_step(&b, &w));
    }

    #[test]
    fn graph_and_graphon_densities_agree(b in oriented(3), g in oriented(4)) {
        prop_assert_eq!(t_directed(&b, &g).unwrap().into_inner(), t_step(&b, &StepGraphon::from_oriented(&g).unwrap()));
    }

    #[test]
    fn cut_norm_bounds(w in graphon(5), seed in any::<u64>()) {
        let exact = cut_norm(&w).unwrap();
        prop_assert!(cut_norm_heuristic(&w, seed).value <= exact.value);
        // nonnegative graphons attain the cut norm on the full square
        prop_assert_eq!(exact.value, w.integral());
    }

    #[test]
    fn undirected_underlying_has_same_size(g in oriented(6)) {
        let u: UndirectedGraph = g.underlying();
        prop_assert_eq!(u.edge_count(), g.edge_count());
        prop_assert_eq!(g.underlying_has_cycle(), u.has_cycle());
        prop_assert!(g.isolated_count() <= g.vertex_count());
        prop_assert!(!g.without_isolated().edges().is_empty() || g.edge_count().is_zero());
    }
}
