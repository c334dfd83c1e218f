//! Seeded random rational graphons and random oriented graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::OrientedGraph;
use crate::graphon::StepGraphon;
use crate::rational::{ratio, Rational};

pub const DEFAULT_SEED: u64 = 0x5eed_0d15;
pub const DEFAULT_VALUE_DENOMINATOR: i64 = 64;

/// Shape of the random graphons a batch draws.
#[derive(Debug, Clone, Copy)]
pub struct GraphonShape {
    pub parts: usize,
    /// Values are `k / value_denominator`, `k` uniform in `0..=value_denominator`.
    pub value_denominator: i64,
    /// If set, part lengths are a uniform random composition of this many
    /// equal units; otherwise all parts have length `1/parts`.
    pub length_units: Option<usize>,
}

impl GraphonShape {
    pub fn equal(parts: usize) -> Self {
        Self { parts, value_denominator: DEFAULT_VALUE_DENOMINATOR, length_units: None }
    }
}

pub fn random_graphon<R: Rng + ?Sized>(rng: &mut R, shape: GraphonShape) -> StepGraphon {
    let k = shape.parts;
    let lengths: Vec<Rational> = match shape.length_units {
        Some(units) if units >= k => {
            // choose k−1 distinct cut points among units−1 interior ones
            let mut cuts: Vec<usize> = (1..units).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
            cuts.sort_unstable();
            let mut prev = 0;
            let mut lengths = Vec::with_capacity(k);
            for c in cuts.into_iter().chain(std::iter::once(units)) {
                lengths.push(ratio((c - prev) as i64, units as i64));
                prev = c;
            }
            lengths
        }
        _ => vec![ratio(1, k as i64); k],
    };
    let d = shape.value_denominator;
    let values = (0..k).map(|_| (0..k).map(|_| ratio(rng.gen_range(0..=d), d)).collect()).collect();
    StepGraphon::new(lengths, values).expect("random graphon is valid by construction")
}

/// Each pair becomes an edge with probability `p`, oriented uniformly.
pub fn random_oriented<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> OrientedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
            }
        }
    }
    OrientedGraph::new(n, edges).expect("one orientation per pair")
}
