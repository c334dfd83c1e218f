//! The W^(λ) family, the λ₀ root finder, necessary conditions for directed
//! forcing, quasirandomness traces and a search for forcing-violation
//! witnesses.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cutnorm::{cut_norm_centered, cut_norm_centered_heuristic, EXACT_PART_CAP};
use crate::error::{Error, Result};
use crate::graph::OrientedGraph;
use crate::graphon::{t_step, StepGraphon};
use crate::optimize::{random_start, CellPolynomial, Problem, SearchConfig};
use crate::par;
use crate::random::DEFAULT_SEED;
use crate::rational::{self, ratio, Rational};

pub const DEFAULT_GRID: usize = 256;
/// Witness cells are rounded to multiples of `1 / WITNESS_DENOMINATOR`.
pub const WITNESS_DENOMINATOR: i64 = 1 << 16;
pub const MAX_WITNESS_PARTS: usize = 8;

/// 2⁻⁴⁰.
pub fn default_precision() -> Rational {
    rational::pow(&rational::int(2), -40)
}

/// W^(λ) on four parts of length 1/4: `1 − λ` on rows of part 2 × columns of
/// part 1, `λ/4` on parts {3, 4} × {3, 4}, zero elsewhere. Its integral is
/// 1/16 for every λ.
pub fn w_lambda(lambda: &Rational) -> Result<StepGraphon> {
    if lambda.is_negative() || *lambda > Rational::one() {
        return Err(Error::OutOfRange(format!("λ = {} not in [0, 1]", rational::to_string(lambda))));
    }
    let zero = Rational::zero();
    let low = Rational::one() - lambda;
    let high = lambda / rational::int(4);
    let mut values = vec![vec![zero; 4]; 4];
    values[1][0] = low;
    for row in values.iter_mut().skip(2) {
        row[2] = high.clone();
        row[3] = high.clone();
    }
    StepGraphon::equipartition(values)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaProfile {
    #[serde(serialize_with = "rational::serialize_vec")]
    pub lambda_grid: Vec<Rational>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub densities: Vec<Rational>,
    /// (1/16)^e(B).
    #[serde(serialize_with = "rational::serialize")]
    pub target: Rational,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub lambda0: Option<Rational>,
    /// t(B, W^(λ₀)) − target.
    #[serde(serialize_with = "rational::serialize_opt")]
    pub residual: Option<Rational>,
}

/// (1/2)^v(B) · (1/4)^e(B).
pub fn w_one_density(b: &OrientedGraph) -> Rational {
    rational::pow(&ratio(1, 2), b.vertex_count() as i32) * rational::pow(&ratio(1, 4), b.edge_count() as i32)
}

pub fn find_lambda0(b: &OrientedGraph, precision: &Rational) -> Result<LambdaProfile> {
    find_lambda0_on_grid(b, precision, DEFAULT_GRID)
}

/// Smallest grid-bracketed root of λ ↦ t(B, W^(λ)) − (1/16)^e(B), refined by
/// bisection until both the bracket width and the residual are within
/// `precision`.
pub fn find_lambda0_on_grid(b: &OrientedGraph, precision: &Rational, grid: usize) -> Result<LambdaProfile> {
    if b.edge_count() == 0 {
        return Err(Error::Precondition("B has no edges".into()));
    }
    if b.isolated_count() > 0 {
        return Err(Error::Precondition("B has isolated vertices".into()));
    }
    if b.has_hom_to_edge() {
        return Err(Error::Precondition(
            "B has a homomorphism to the directed edge, so t(B, W^(λ)) = (1/16)^e(B) for every λ".into(),
        ));
    }
    if !precision.is_positive() || grid == 0 {
        return Err(Error::OutOfRange("precision and grid size must be positive".into()));
    }
    let target = rational::pow(&ratio(1, 16), b.edge_count() as i32);
    let density = |lambda: &Rational| -> Result<Rational> { Ok(t_step(b, &w_lambda(lambda)?)) };

    let start = density(&Rational::zero())?;
    if !start.is_zero() {
        return Err(Error::Precondition("t(B, W^(0)) is not zero".into()));
    }
    let end = density(&Rational::one())?;
    if end != w_one_density(b) || end < target {
        return Err(Error::Precondition("t(B, W^(1)) does not reach the target".into()));
    }

    let lambda_grid: Vec<Rational> = (0..=grid).map(|i| ratio(i as i64, grid as i64)).collect();
    let densities: Vec<Rational> = par::map_slice(&lambda_grid, |l| t_step(b, &w_lambda(l).expect("grid is in [0, 1]")));
    let mut profile = LambdaProfile { lambda_grid, densities, target: target.clone(), lambda0: None, residual: None };

    let f = |d: &Rational| d - &target;
    let Some(i) = (1..=grid).find(|&i| !f(&profile.densities[i]).is_negative()) else {
        return Err(Error::NoBracket(grid));
    };
    let (mut lo, mut hi) = (profile.lambda_grid[i - 1].clone(), profile.lambda_grid[i].clone());
    let mut f_hi = f(&profile.densities[i]);
    let mut f_lo = f(&profile.densities[i - 1]);
    // f(lo) < 0 ≤ f(hi) throughout
    for _ in 0..400 {
        if f_hi.is_zero() || (&hi - &lo <= *precision && f_hi.abs() <= *precision) {
            break;
        }
        if &hi - &lo <= *precision && f_lo.abs() <= *precision {
            break;
        }
        let mid = (&lo + &hi) / rational::int(2);
        let fm = f(&density(&mid)?);
        if fm.is_negative() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let (lambda0, residual) = if f_hi.is_zero() || f_hi.abs() <= f_lo.abs() { (hi, f_hi) } else { (lo, f_lo) };
    profile.lambda0 = Some(lambda0);
    profile.residual = Some(residual);
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NecessaryConditions {
    pub hom_to_edge: bool,
    pub underlying_cycle: bool,
}

impl NecessaryConditions {
    pub fn both(&self) -> bool {
        self.hom_to_edge && self.underlying_cycle
    }
}

/// Directed forcing requires a homomorphism to K⃗₂ and a cycle in B̄.
pub fn necessary_conditions(b: &OrientedGraph) -> NecessaryConditions {
    NecessaryConditions { hom_to_edge: b.has_hom_to_edge(), underlying_cycle: b.underlying_has_cycle() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub vertices: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    pub exact: bool,
}

/// ‖W_{G_n} − p‖_□ for each graph; exact up to [`EXACT_PART_CAP`] vertices,
/// heuristic (a lower bound) beyond.
pub fn quasirandom_trace(graphs: &[OrientedGraph], p: &Rational) -> Result<Vec<TracePoint>> {
    graphs
        .iter()
        .map(|g| {
            let w = StepGraphon::from_oriented(g)?;
            let r = if w.parts() <= EXACT_PART_CAP {
                cut_norm_centered(&w, p)?
            } else {
                cut_norm_centered_heuristic(&w, p, DEFAULT_SEED)
            };
            Ok(TracePoint { vertices: g.vertex_count(), value: r.value, exact: r.exact })
        })
        .collect()
}

/// A rational step graphon certified, in exact arithmetic, to match the
/// random densities of `B` while staying away from the constant `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcingWitness {
    pub graphon: StepGraphon,
    /// t(B, W) − p^e(B).
    #[serde(serialize_with = "rational::serialize")]
    pub density_residual: Rational,
    /// ∫W − p.
    #[serde(serialize_with = "rational::serialize")]
    pub mean_residual: Rational,
    /// ‖W − p‖_□.
    #[serde(serialize_with = "rational::serialize")]
    pub separation: Rational,
    pub restart: usize,
}

pub fn forcing_witness_search(b: &OrientedGraph, p: f64, parts: usize, tol: f64, seed: u64) -> Result<Option<ForcingWitness>> {
    forcing_witness_search_with(b, p, parts, tol, seed, &SearchConfig::default())
}

/// Multistart search for W with |t(B, W) − p^e(B)| ≤ tol, |∫W − p| ≤ tol and
/// ‖W − p‖_□ ≥ 10·tol. Each restart descends in floating point, polishes onto
/// the constraints, rounds to multiples of 2⁻¹⁶ and re-verifies exactly.
/// Among certified restarts the lexicographically smallest graphon wins.
pub fn forcing_witness_search_with(
    b: &OrientedGraph,
    p: f64,
    parts: usize,
    tol: f64,
    seed: u64,
    config: &SearchConfig,
) -> Result<Option<ForcingWitness>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} not in (0, 1)")));
    }
    if parts == 0 || parts > MAX_WITNESS_PARTS {
        return Err(Error::CapExceeded { what: "witness search parts", n: parts, cap: MAX_WITNESS_PARTS });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::OutOfRange(format!("tolerance {tol} must be positive")));
    }
    let poly = CellPolynomial::new(b, parts);
    let p_exact = rational::from_f64(p).expect("p is finite");
    let tol_exact = rational::from_f64(tol).expect("tol is finite");
    let target_t = rational::pow(&p_exact, b.edge_count() as i32);
    let problem = Problem { poly: &poly, target_t: rational::to_f64(&target_t), target_mean: p };

    let restarts: Vec<usize> = (0..config.restarts).collect();
    let found = par::map_slice(&restarts, |&r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut x = random_start(&mut rng, poly.cells(), p);
        problem.descend(&mut x, config);
        problem.polish(&mut x, config.polish_iterations);
        let ints = round_to_lattice(&problem, &x, tol)?;
        certify(b, parts, &ints, &p_exact, &target_t, &tol_exact, r)
    });
    Ok(found.into_iter().flatten().min_by(|a, b| a.graphon.values().cmp(b.graphon.values())))
}

fn certify(
    b: &OrientedGraph,
    parts: usize,
    ints: &[i64],
    p: &Rational,
    target_t: &Rational,
    tol: &Rational,
    restart: usize,
) -> Option<ForcingWitness> {
    let values =
        (0..parts).map(|i| (0..parts).map(|j| ratio(ints[i * parts + j], WITNESS_DENOMINATOR)).collect()).collect();
    let graphon = StepGraphon::equipartition(values).ok()?;
    let density_residual = t_step(b, &graphon) - target_t;
    let mean_residual = graphon.integral() - p;
    if density_residual.abs() > *tol || mean_residual.abs() > *tol {
        return None;
    }
    let separation = cut_norm_centered(&graphon, p).ok()?.value;
    if separation < tol * rational::int(10) {
        return None;
    }
    Some(ForcingWitness { graphon, density_residual, mean_residual, separation, restart })
}

/// Rounds a float solution to the 2⁻¹⁶ lattice, restores the exact cell sum,
/// then searches two-pair transfers (which keep the sum) to bring t back
/// within `tol` of its target.
fn round_to_lattice(problem: &Problem<'_>, x: &[f64], tol: f64) -> Option<Vec<i64>> {
    let d = WITNESS_DENOMINATOR;
    let df = d as f64;
    let m = x.len();
    let mut ints: Vec<i64> = x.iter().map(|v| ((v * df).round() as i64).clamp(0, d)).collect();

    let want = (problem.target_mean * df * m as f64).round() as i64;
    let mut diff = want - ints.iter().sum::<i64>();
    // push the cells whose rounding went furthest the wrong way first
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let ra = x[a] * df - ints[a] as f64;
        let rb = x[b] * df - ints[b] as f64;
        if diff > 0 { rb.total_cmp(&ra) } else { ra.total_cmp(&rb) }
    });
    let mut guard = 0;
    while diff != 0 && guard < 4 * m * (diff.unsigned_abs() as usize + 1) {
        for &c in &order {
            if diff > 0 && ints[c] < d {
                ints[c] += 1;
                diff -= 1;
            } else if diff < 0 && ints[c] > 0 {
                ints[c] -= 1;
                diff += 1;
            }
            if diff == 0 {
                break;
            }
        }
        guard += 1;
    }
    if diff != 0 {
        return None;
    }

    let eval = |v: &[i64]| -> f64 {
        let xs: Vec<f64> = v.iter().map(|&k| k as f64 / df).collect();
        problem.poly.value(&xs) - problem.target_t
    };
    let goal = tol / 64.0;
    if eval(&ints).abs() <= goal {
        return Some(ints);
    }

    let xs: Vec<f64> = ints.iter().map(|&k| k as f64 / df).collect();
    let (_, grad) = problem.poly.value_and_gradient(&xs);
    let margin = 4096;
    let interior: Vec<usize> = (0..m).filter(|&c| ints[c] >= margin && ints[c] <= d - margin).collect();
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (ai, &a) in interior.iter().enumerate() {
        for &c in &interior[ai + 1..] {
            let slope = (grad[a] - grad[c]) / df;
            if slope != 0.0 {
                pairs.push((a, c, slope));
            }
        }
    }
    pairs.sort_by(|u, v| v.2.abs().total_cmp(&u.2.abs()));
    pairs.truncate(10);

    let mut best: Option<(f64, Vec<i64>)> = None;
    for (i, &(a1, b1, s1)) in pairs.iter().enumerate() {
        for &(a2, b2, s2) in &pairs[i + 1..] {
            if let Some(found) = two_pair_search(&ints, (a1, b1, s1), (a2, b2, s2), margin, &eval) {
                let r = eval(&found).abs();
                if best.as_ref().is_none_or(|(br, _)| r < *br) {
                    best = Some((r, found));
                }
                if r <= goal {
                    return best.map(|(_, v)| v);
                }
            }
        }
    }
    best.map(|(_, v)| v)
}

/// For each shift `n1` along the first pair, solves for the best shift along
/// the second pair with a few secant steps, keeping the smallest residual.
fn two_pair_search(
    base: &[i64],
    first: (usize, usize, f64),
    second: (usize, usize, f64),
    margin: i64,
    eval: &impl Fn(&[i64]) -> f64,
) -> Option<Vec<i64>> {
    let (a1, b1, _) = first;
    let (a2, b2, s2) = second;
    let shift = |v: &mut Vec<i64>, a: usize, b: usize, n: i64| {
        v[a] += n;
        v[b] -= n;
    };
    let limit = margin / 2;
    let mut best: Option<(f64, Vec<i64>)> = None;
    for n1 in -limit..=limit {
        let mut v = base.to_vec();
        shift(&mut v, a1, b1, n1);
        let r0 = eval(&v);
        let mut n2 = (-r0 / s2).round() as i64;
        if n2.abs() > limit {
            continue;
        }
        // refine against the curvature along the second pair
        for _ in 0..3 {
            let mut w = v.clone();
            shift(&mut w, a2, b2, n2);
            let r = eval(&w);
            let mut w1 = w.clone();
            shift(&mut w1, a2, b2, 1);
            let local = eval(&w1) - r;
            if local == 0.0 {
                break;
            }
            let step = (-r / local).round() as i64;
            if step == 0 {
                break;
            }
            n2 = (n2 + step).clamp(-limit, limit);
        }
        for cand in [n2 - 1, n2, n2 + 1] {
            let mut w = v.clone();
            shift(&mut w, a2, b2, cand);
            if w.iter().any(|&k| !(0..=WITNESS_DENOMINATOR).contains(&k)) {
                continue;
            }
            let r = eval(&w).abs();
            if best.as_ref().is_none_or(|(br, _)| r < *br) {
                best = Some((r, w));
            }
        }
    }
    best.map(|(_, v)| v)
}
