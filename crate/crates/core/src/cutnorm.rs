//! Cut norm of signed step functions and the permutation bound on cut distance.
//!
//! For a step function the supremum over measurable rectangles is attained on
//! unions of parts, so the exact mode enumerates row subsets `S` and takes the
//! best column set for each.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::par;
use crate::rational::{self, Rational};

pub const EXACT_PART_CAP: usize = 20;
pub const HEURISTIC_RESTARTS: usize = 32;
pub const CUT_DISTANCE_PART_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutNormResult {
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    pub witness_s: Vec<usize>,
    pub witness_t: Vec<usize>,
    /// Whether `value` is certified to be the maximum.
    pub exact: bool,
}

/// A step function with arbitrary rational values (e.g. `W − p`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedStep {
    lengths: Vec<Rational>,
    values: Vec<Vec<Rational>>,
}

impl SignedStep {
    pub fn new(lengths: Vec<Rational>, values: Vec<Vec<Rational>>) -> Result<Self> {
        let k = lengths.len();
        if values.len() != k || values.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidGraphon(format!("value matrix must be {k}×{k}")));
        }
        Ok(Self { lengths, values })
    }

    pub fn from_graphon(w: &StepGraphon) -> Self {
        Self { lengths: w.lengths().to_vec(), values: w.values().to_vec() }
    }

    /// `W − p`.
    pub fn centered(w: &StepGraphon, p: &Rational) -> Self {
        let values = w.values().iter().map(|row| row.iter().map(|v| v - p).collect()).collect();
        Self { lengths: w.lengths().to_vec(), values }
    }

    /// `W − U` for graphons on the same partition.
    pub fn difference(w: &StepGraphon, u: &StepGraphon) -> Result<Self> {
        if w.lengths() != u.lengths() {
            return Err(Error::InvalidGraphon("graphons are on different partitions".into()));
        }
        let values = w
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self { lengths: w.lengths().to_vec(), values })
    }

    pub fn parts(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// ∫_{S×T} of the function, for unions of parts `S` and `T`.
    pub fn rectangle_integral(&self, s: &[usize], t: &[usize]) -> Rational {
        let mut total = Rational::zero();
        for &i in s {
            for &j in t {
                total += &self.values[i][j] * &self.lengths[i] * &self.lengths[j];
            }
        }
        total
    }

    /// Cell weights `values[i][j]·len(i)·len(j)` as integers over one denominator.
    fn weights(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let cells: Vec<Vec<Rational>> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, v)| v * &self.lengths[i] * &self.lengths[j]).collect())
            .collect();
        let den = rational::lcm_of_denominators(cells.iter().flatten());
        let ints = cells.iter().map(|row| row.iter().map(|c| rational::scaled_numerator(c, &den)).collect()).collect();
        (ints, den)
    }

    /// Exact cut norm by subset enumeration (at most [`EXACT_PART_CAP`] parts).
    pub fn cut_norm(&self) -> Result<CutNormResult> {
        let k = self.parts();
        if k > EXACT_PART_CAP {
            return Err(Error::TooManyParts { parts: k, cap: EXACT_PART_CAP });
        }
        let (weights, den) = self.weights();
        let best = match to_i128(&weights) {
            Some(small) => exact_search(&small).into_result(den, true),
            None => exact_search(&weights).into_result(den, true),
        };
        Ok(best)
    }

    /// Alternating best-response search from seeded random row sets. The value
    /// is the exact integral of the returned rectangle, so it never exceeds
    /// the true cut norm.
    pub fn cut_norm_heuristic(&self, seed: u64, restarts: usize) -> CutNormResult {
        let (weights, den) = self.weights();
        match to_i128(&weights) {
            Some(small) => heuristic_search(&small, seed, restarts).into_result(den, false),
            None => heuristic_search(&weights, seed, restarts).into_result(den, false),
        }
    }
}

fn to_i128(weights: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    let k = weights.len().max(1) as i128;
    // any subset sum stays below k² · max|w|
    let limit = i128::MAX / (k * k);
    weights
        .iter()
        .map(|row| {
            row.iter()
                .map(|w| w.to_i128().filter(|x| x.checked_abs().is_some_and(|a| a < limit)))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// Integer arithmetic the subset searches need.
trait Acc: Clone + Zero + Signed + Ord + Send + Sync + for<'a> std::ops::AddAssign<&'a Self> + for<'a> std::ops::SubAssign<&'a Self> {}
impl<T> Acc for T where T: Clone + Zero + Signed + Ord + Send + Sync + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T> {}

#[derive(Debug, Clone)]
struct Candidate<T> {
    value: T,
    s: u64,
    t: u64,
    positive: bool,
}

impl<T: Acc> Candidate<T> {
    fn empty() -> Self {
        Self { value: T::zero(), s: 0, t: 0, positive: true }
    }

    /// Larger value wins; ties go to the smaller `S` mask, then the positive side.
    fn better_than(&self, other: &Self) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (self.s, !self.positive, self.t) < (other.s, !other.positive, other.t),
        }
    }

    fn pick(self, other: Self) -> Self {
        if other.better_than(&self) { other } else { self }
    }

    fn into_result(self, den: BigInt, exact: bool) -> CutNormResult
    where
        T: Into<BigInt>,
    {
        let bits = |m: u64| (0..64).filter(|&i| m >> i & 1 == 1).collect::<Vec<usize>>();
        CutNormResult {
            value: Rational::new(self.value.into(), den),
            witness_s: bits(self.s),
            witness_t: bits(self.t),
            exact,
        }
    }
}

/// Best rectangle for fixed row set given its column sums.
fn best_columns<T: Acc>(cols: &[T], s: u64) -> Candidate<T> {
    let mut pos = T::zero();
    let mut neg = T::zero();
    let (mut tp, mut tn) = (0u64, 0u64);
    for (j, c) in cols.iter().enumerate() {
        if c.is_positive() {
            pos += c;
            tp |= 1 << j;
        } else if c.is_negative() {
            neg -= c;
            tn |= 1 << j;
        }
    }
    let a = Candidate { value: pos, s, t: tp, positive: true };
    let b = Candidate { value: neg, s, t: tn, positive: false };
    a.pick(b)
}

fn exact_search<T: Acc + Into<BigInt>>(w: &[Vec<T>]) -> Candidate<T> {
    let k = w.len();
    if k == 0 {
        return Candidate::empty();
    }
    // shard on the top `high` rows, Gray code over the rest
    let high = k.saturating_sub(8).min(6);
    let low = k - high;
    let shards = par::map_range(0..1u64 << high, |prefix| {
        let mut cols = vec![T::zero(); k];
        let mut s = prefix << low;
        for i in 0..high {
            if prefix >> i & 1 == 1 {
                for (c, x) in cols.iter_mut().zip(&w[low + i]) {
                    *c += x;
                }
            }
        }
        let mut best = best_columns(&cols, s);
        for g in 1u64..1 << low {
            let flip = g.trailing_zeros() as usize;
            let bit = 1u64 << flip;
            if s & bit == 0 {
                for (c, x) in cols.iter_mut().zip(&w[flip]) {
                    *c += x;
                }
            } else {
                for (c, x) in cols.iter_mut().zip(&w[flip]) {
                    *c -= x;
                }
            }
            s ^= bit;
            best = best.pick(best_columns(&cols, s));
        }
        best
    });
    shards.into_iter().fold(Candidate::empty(), Candidate::pick)
}

fn heuristic_search<T: Acc + Into<BigInt>>(w: &[Vec<T>], seed: u64, restarts: usize) -> Candidate<T> {
    let k = w.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Candidate::empty();
    let col_sums = |s: u64| -> Vec<T> {
        let mut cols = vec![T::zero(); k];
        for (i, row) in w.iter().enumerate() {
            if s >> i & 1 == 1 {
                for (c, x) in cols.iter_mut().zip(row) {
                    *c += x;
                }
            }
        }
        cols
    };
    let row_sums = |t: u64| -> Vec<T> {
        w.iter()
            .map(|row| {
                let mut acc = T::zero();
                for (j, x) in row.iter().enumerate() {
                    if t >> j & 1 == 1 {
                        acc += x;
                    }
                }
                acc
            })
            .collect()
    };
    for _ in 0..restarts {
        let start: u64 = if k == 0 { 0 } else { rng.gen::<u64>() & ((1u64 << k) - 1) };
        for positive in [true, false] {
            let mut s = start;
            let mut current = Candidate::empty();
            let mut first = true;
            loop {
                let cols = col_sums(s);
                let mut t = 0u64;
                let mut value = T::zero();
                for (j, c) in cols.iter().enumerate() {
                    if (positive && c.is_positive()) || (!positive && c.is_negative()) {
                        t |= 1 << j;
                        value += &c.abs();
                    }
                }
                let cand = Candidate { value, s, t, positive };
                if !first && cand.value <= current.value {
                    break;
                }
                first = false;
                current = cand;
                let rows = row_sums(t);
                let mut next = 0u64;
                for (i, r) in rows.iter().enumerate() {
                    if (positive && r.is_positive()) || (!positive && r.is_negative()) {
                        next |= 1 << i;
                    }
                }
                if next == s {
                    break;
                }
                s = next;
            }
            best = best.pick(current);
        }
    }
    best
}

/// ‖W‖_□, exact.
pub fn cut_norm(w: &StepGraphon) -> Result<CutNormResult> {
    SignedStep::from_graphon(w).cut_norm()
}

/// ‖W − p‖_□, exact.
pub fn cut_norm_centered(w: &StepGraphon, p: &Rational) -> Result<CutNormResult> {
    SignedStep::centered(w, p).cut_norm()
}

/// ‖W‖_□ from the heuristic search; a lower bound on the exact value.
pub fn cut_norm_heuristic(w: &StepGraphon, seed: u64) -> CutNormResult {
    SignedStep::from_graphon(w).cut_norm_heuristic(seed, HEURISTIC_RESTARTS)
}

pub fn cut_norm_centered_heuristic(w: &StepGraphon, p: &Rational, seed: u64) -> CutNormResult {
    SignedStep::centered(w, p).cut_norm_heuristic(seed, HEURISTIC_RESTARTS)
}

/// Minimum over part permutations π of ‖W − U^π‖_□ on the common equal-length
/// refinement. An upper bound on the cut distance δ_□(W, U).
pub fn cut_distance_upper(w: &StepGraphon, u: &StepGraphon) -> Result<Rational> {
    let count = rational::lcm_of_denominators(w.lengths().iter().chain(u.lengths()));
    let count: usize = count.to_usize().filter(|&c| c <= CUT_DISTANCE_PART_CAP).ok_or_else(|| {
        Error::RefinementTooLarge { parts: count.to_usize().unwrap_or(usize::MAX), cap: CUT_DISTANCE_PART_CAP }
    })?;
    let (wf, _) = w.refine_equal(count).expect("lcm refinement always exists");
    let (_, owner) = u.refine_equal(count).expect("lcm refinement always exists");

    // slots holding copies of the same part of U are interchangeable, so it is
    // enough to visit distinct arrangements of the owner labels
    let mut arrangements = Vec::new();
    let mut labels = owner.clone();
    labels.sort_unstable();
    loop {
        arrangements.push(labels.clone());
        if !next_permutation(&mut labels) {
            break;
        }
    }
    let lengths = wf.lengths().to_vec();
    let norms = par::map_slice(&arrangements, |labels| {
        let values = (0..count)
            .map(|i| (0..count).map(|j| wf.value(i, j) - u.value(labels[i], labels[j])).collect())
            .collect();
        SignedStep { lengths: lengths.clone(), values }.cut_norm().map(|r| r.value)
    });
    let mut best: Option<Rational> = None;
    for n in norms {
        let n = n?;
        if best.as_ref().is_none_or(|b| n < *b) {
            best = Some(n);
        }
    }
    Ok(best.expect("at least one arrangement"))
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OrientedGraph;
    use crate::rational::{int, ratio};

    /// Every (S, T) pair of part subsets.
    fn double_enumeration(f: &SignedStep) -> Rational {
        let k = f.parts();
        let mut best = Rational::zero();
        for s in 0u32..1 << k {
            for t in 0u32..1 << k {
                let sv: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).collect();
                let tv: Vec<usize> = (0..k).filter(|i| t >> i & 1 == 1).collect();
                let v = f.rectangle_integral(&sv, &tv).abs();
                if v > best {
                    best = v;
                }
            }
        }
        best
    }

    #[test]
    fn constant_and_zero() {
        let p = ratio(2, 7);
        let c = cut_norm(&StepGraphon::constant(p.clone()).unwrap()).unwrap();
        assert_eq!(c.value, p);
        assert_eq!((c.witness_s, c.witness_t), (vec![0], vec![0]));
        assert!(c.exact);
        let z = cut_norm(&StepGraphon::equipartition(vec![vec![int(0); 3]; 3]).unwrap()).unwrap();
        assert!(z.value.is_zero());
        assert!(cut_norm_centered(&StepGraphon::constant(p.clone()).unwrap(), &p).unwrap().value.is_zero());
    }

    #[test]
    fn centered_single_edge_is_three_sixteenths() {
        let w = StepGraphon::from_oriented(&OrientedGraph::single_edge()).unwrap();
        let f = SignedStep::centered(&w, &ratio(1, 4));
        assert_eq!(double_enumeration(&f), ratio(3, 16));
        let c = cut_norm_centered(&w, &ratio(1, 4)).unwrap();
        assert_eq!(c.value, ratio(3, 16));
        assert_eq!(f.rectangle_integral(&c.witness_s, &c.witness_t).abs(), c.value);
    }

    #[test]
    fn exact_matches_double_enumeration_on_mixed_lengths() {
        let f = SignedStep::new(
            vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)],
            vec![
                vec![ratio(1, 2), ratio(-3, 4), ratio(1, 5)],
                vec![ratio(-1, 3), ratio(2, 3), ratio(-1, 7)],
                vec![ratio(1, 9), ratio(-1, 2), ratio(1, 4)],
            ],
        )
        .unwrap();
        let c = f.cut_norm().unwrap();
        assert_eq!(c.value, double_enumeration(&f));
        assert_eq!(f.rectangle_integral(&c.witness_s, &c.witness_t).abs(), c.value);
        assert!(f.cut_norm_heuristic(3, 8).value <= c.value);
    }

    #[test]
    fn sharded_search_matches_plain_search() {
        // 12 parts forces the prefix sharding path
        let k = 12;
        let values: Vec<Vec<Rational>> =
            (0..k).map(|i| (0..k).map(|j| ratio(((i * 7 + j * 13) % 11) as i64 - 5, 11)).collect()).collect();
        let f = SignedStep::new(vec![ratio(1, k as i64); k], values).unwrap();
        let (w, _) = f.weights();
        let small = to_i128(&w).unwrap();
        let sharded = exact_search(&small);
        let mut plain = Candidate::empty();
        for s in 0u64..1 << k {
            let mut cols = vec![0i128; k];
            for (i, row) in small.iter().enumerate() {
                if s >> i & 1 == 1 {
                    for (c, x) in cols.iter_mut().zip(row) {
                        *c += x;
                    }
                }
            }
            plain = plain.pick(best_columns(&cols, s));
        }
        assert_eq!((sharded.value, sharded.s, sharded.t), (plain.value, plain.s, plain.t));
    }

    #[test]
    fn big_integer_path_agrees() {
        let f = SignedStep::new(
            vec![ratio(1, 2), ratio(1, 2)],
            vec![vec![ratio(1, 3), ratio(-1, 5)], vec![ratio(-2, 7), ratio(1, 11)]],
        )
        .unwrap();
        let (w, den) = f.weights();
        let big = exact_search(&w).into_result(den.clone(), true);
        let small = exact_search(&to_i128(&w).unwrap()).into_result(den, true);
        assert_eq!(big, small);
    }

    #[test]
    fn too_many_parts() {
        let w = StepGraphon::equipartition(vec![vec![int(0); 21]; 21]).unwrap();
        assert!(matches!(cut_norm(&w), Err(Error::TooManyParts { .. })));
        assert!(cut_norm_heuristic(&w, 1).value.is_zero());
    }

    #[test]
    fn cut_distance_examples() {
        let g = OrientedGraph::new(4, [(0, 1), (1, 2), (3, 0)]).unwrap();
        let w = StepGraphon::from_oriented(&g).unwrap();
        assert!(cut_distance_upper(&w, &w).unwrap().is_zero());
        let h = g.relabel(&[2, 0, 3, 1]).unwrap();
        let u = StepGraphon::from_oriented(&h).unwrap();
        assert!(cut_distance_upper(&w, &u).unwrap().is_zero());
        let p = StepGraphon::constant(ratio(1, 3)).unwrap();
        let q = StepGraphon::constant(ratio(3, 4)).unwrap();
        assert_eq!(cut_distance_upper(&p, &q).unwrap(), ratio(5, 12));
        let big = StepGraphon::equipartition(vec![vec![int(0); 11]; 11]).unwrap();
        assert!(matches!(cut_distance_upper(&big, &p), Err(Error::RefinementTooLarge { .. })));
    }

    #[test]
    fn permutations_of_multisets() {
        let mut v = vec![0, 0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 12);
    }
}
