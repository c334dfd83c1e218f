//! Step graphons and their homomorphism densities.
//!
//! A [`StepGraphon`] is constant on the rectangles `Iᵢ × Iⱼ` of an interval
//! partition of `[0, 1]`. Rows index the first coordinate `x`, columns the
//! second coordinate `y`, so for an oriented pattern the edge `(u, v)`
//! contributes the factor `W(x_u, x_v)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::density::search_order;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, OrientedGraph};
use crate::rational::{self, Rational};

/// Density evaluations above this many assignments are refused by the
/// `_checked` variants.
pub const TERM_WARNING: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StepGraphon {
    #[serde(serialize_with = "rational::serialize_vec")]
    lengths: Vec<Rational>,
    #[serde(serialize_with = "rational::serialize_matrix")]
    values: Vec<Vec<Rational>>,
}

impl StepGraphon {
    pub fn new(lengths: Vec<Rational>, values: Vec<Vec<Rational>>) -> Result<Self> {
        let k = lengths.len();
        if k == 0 {
            return Err(Error::InvalidGraphon("no parts".into()));
        }
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(Error::InvalidGraphon("part lengths must be positive".into()));
        }
        if lengths.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::InvalidGraphon("part lengths must sum to 1".into()));
        }
        if values.len() != k || values.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidGraphon(format!("value matrix must be {k}×{k}")));
        }
        let one = Rational::one();
        if values.iter().flatten().any(|v| v.is_negative() || *v > one) {
            return Err(Error::InvalidGraphon("values must lie in [0, 1]".into()));
        }
        Ok(Self { lengths, values })
    }

    /// `k` parts of length `1/k`.
    pub fn equipartition(values: Vec<Vec<Rational>>) -> Result<Self> {
        let k = values.len();
        if k == 0 {
            return Err(Error::InvalidGraphon("no parts".into()));
        }
        Self::new(vec![rational::ratio(1, k as i64); k], values)
    }

    /// The constant graphon `p`.
    pub fn constant(p: Rational) -> Result<Self> {
        Self::new(vec![Rational::one()], vec![vec![p]])
    }

    /// W_G: `n` equal parts with the 0/1 edge indicators of `g`.
    pub fn from_oriented(g: &OrientedGraph) -> Result<Self> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(Error::EmptyHost);
        }
        let values = (0..n)
            .map(|i| (0..n).map(|j| if g.has_edge(i, j) { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self::equipartition(values)
    }

    /// W_H on the common refinement of the row partition (|U₁| equal parts)
    /// and the column partition (|U₂| equal parts).
    pub fn from_bipartite(h: &BipartiteGraph) -> Result<Self> {
        let (n, m) = (h.part1_count(), h.part2_count());
        if n == 0 {
            return Err(Error::EmptyHostPart(1));
        }
        if m == 0 {
            return Err(Error::EmptyHostPart(2));
        }
        let mut cuts: Vec<Rational> = (0..=n)
            .map(|i| rational::ratio(i as i64, n as i64))
            .chain((0..=m).map(|j| rational::ratio(j as i64, m as i64)))
            .collect();
        cuts.sort();
        cuts.dedup();
        let lengths: Vec<Rational> = cuts.windows(2).map(|w| &w[1] - &w[0]).collect();
        // which row / column part each refined interval sits in, read off its left end
        let locate = |x: &Rational, parts: usize| -> usize {
            let scaled = x * Rational::from_integer(BigInt::from(parts));
            scaled.floor().to_integer().try_into().unwrap_or(0usize)
        };
        let rows: Vec<usize> = cuts[..cuts.len() - 1].iter().map(|x| locate(x, n)).collect();
        let cols: Vec<usize> = cuts[..cuts.len() - 1].iter().map(|x| locate(x, m)).collect();
        let values = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| if h.has_edge(i, j) { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self::new(lengths, values)
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

    pub fn value(&self, i: usize, j: usize) -> &Rational {
        &self.values[i][j]
    }

    /// ∫W = t(K⃗₂, W).
    pub fn integral(&self) -> Rational {
        let mut total = Rational::zero();
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                total += v * &self.lengths[i] * &self.lengths[j];
            }
        }
        total
    }

    /// `c · W` for `c ∈ [0, 1]`.
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if c.is_negative() || *c > Rational::one() {
            return Err(Error::OutOfRange(format!("scale factor {} not in [0, 1]", rational::to_string(c))));
        }
        let values = self.values.iter().map(|row| row.iter().map(|v| v * c).collect()).collect();
        Ok(Self { lengths: self.lengths.clone(), values })
    }

    /// Whether W is a.e. constant.
    pub fn is_constant(&self) -> bool {
        let first = &self.values[0][0];
        self.values.iter().flatten().all(|v| v == first)
    }

    /// The same function on `count` equal parts, if every part length is a
    /// multiple of `1/count`. Also returns the original part of each new part.
    pub fn refine_equal(&self, count: usize) -> Option<(Self, Vec<usize>)> {
        let unit = rational::ratio(1, count as i64);
        let mut owner = Vec::with_capacity(count);
        for (i, l) in self.lengths.iter().enumerate() {
            let q = l / &unit;
            if !q.is_integer() {
                return None;
            }
            let times: usize = q.to_integer().try_into().ok()?;
            owner.extend(std::iter::repeat_n(i, times));
        }
        let values = owner.iter().map(|&i| owner.iter().map(|&j| self.values[i][j].clone()).collect()).collect();
        Some((Self { lengths: vec![unit; count], values }, owner))
    }

    pub fn values_f64(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|row| row.iter().map(rational::to_f64).collect()).collect()
    }

    /// Integer numerators over common denominators, for fast exact sums.
    fn integer_view(&self) -> IntegerView {
        let len_den = rational::lcm_of_denominators(&self.lengths);
        let val_den = rational::lcm_of_denominators(self.values.iter().flatten());
        let k = self.parts();
        IntegerView {
            k,
            lengths: self.lengths.iter().map(|l| rational::scaled_numerator(l, &len_den)).collect(),
            values: self.values.iter().flatten().map(|v| rational::scaled_numerator(v, &val_den)).collect(),
            len_den,
            val_den,
        }
    }
}

struct IntegerView {
    k: usize,
    lengths: Vec<BigInt>,
    values: Vec<BigInt>,
    len_den: BigInt,
    val_den: BigInt,
}

/// Number of part assignments a density evaluation of `b` in `w` visits
/// (isolated vertices are factored out).
pub fn t_step_terms(b: &OrientedGraph, w: &StepGraphon) -> u128 {
    let live = b.vertex_count() - b.isolated_count();
    (w.parts() as u128).saturating_pow(live as u32)
}

/// t(B, W) = Σ over maps g: V(B) → parts of Π len(g(v)) · Π W[g(u)][g(v)].
pub fn t_step(b: &OrientedGraph, w: &StepGraphon) -> Rational {
    let core = b.without_isolated();
    let n = core.vertex_count();
    if n == 0 {
        return Rational::one();
    }
    let view = w.integer_view();
    let order = search_order(n, core.edges());
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    // for each position, the (earlier position, forward) arcs it closes
    let mut back = vec![Vec::new(); n];
    for &(u, v) in core.edges() {
        if pos[u] < pos[v] {
            back[pos[v]].push((pos[u], true));
        } else {
            back[pos[u]].push((pos[v], false));
        }
    }
    let mut image = vec![0usize; n];
    let numer = step_sum(0, &back, &view, &mut image);
    let denom = num_traits::pow(view.len_den.clone(), n) * num_traits::pow(view.val_den.clone(), core.edge_count());
    Rational::new(numer, denom)
}

/// Like [`t_step`] but refuses evaluations above [`TERM_WARNING`] assignments.
pub fn t_step_checked(b: &OrientedGraph, w: &StepGraphon) -> Result<Rational> {
    let terms = t_step_terms(b, w);
    if terms > TERM_WARNING {
        return Err(Error::OutOfRange(format!("density evaluation needs {terms} terms")));
    }
    Ok(t_step(b, w))
}

fn step_sum(p: usize, back: &[Vec<(usize, bool)>], view: &IntegerView, image: &mut [usize]) -> BigInt {
    let k = view.k;
    let mut total = BigInt::zero();
    for a in 0..k {
        let mut factor = view.lengths[a].clone();
        for &(q, forward) in &back[p] {
            let b = image[q];
            let v = if forward { &view.values[b * k + a] } else { &view.values[a * k + b] };
            if v.is_zero() {
                factor.set_zero();
                break;
            }
            factor *= v;
        }
        if factor.is_zero() {
            continue;
        }
        if p + 1 < back.len() {
            image[p] = a;
            factor *= step_sum(p + 1, back, view, image);
        }
        total += factor;
    }
    total
}

/// t_bip(A, W): part-1 vertices of `a` range over rows, part-2 vertices over
/// columns.
///
/// Evaluated by enumerating row assignments of part 1 and integrating each
/// part-2 vertex out independently, which is a different route from
/// [`t_step`] on the part orientation.
pub fn t_bip_step(a: &BipartiteGraph, w: &StepGraphon) -> Rational {
    let view = w.integer_view();
    let k = view.k;
    let (n1, n2) = (a.part1_count(), a.part2_count());
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n2];
    for &(i, j) in a.edges() {
        nbrs[j].push(i);
    }
    let mut numer = BigInt::zero();
    let mut rows = vec![0usize; n1];
    'outer: loop {
        let mut term: BigInt = rows.iter().map(|&r| view.lengths[r].clone()).product();
        for col_nbrs in &nbrs {
            if term.is_zero() {
                break;
            }
            let mut integral = BigInt::zero();
            for c in 0..k {
                let mut f = view.lengths[c].clone();
                for &i in col_nbrs {
                    f *= &view.values[rows[i] * k + c];
                }
                integral += f;
            }
            term *= integral;
        }
        numer += term;
        // odometer over row assignments
        for slot in rows.iter_mut() {
            *slot += 1;
            if *slot < k {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let denom =
        num_traits::pow(view.len_den.clone(), n1 + n2) * num_traits::pow(view.val_den.clone(), a.edge_count());
    Rational::new(numer, denom)
}
