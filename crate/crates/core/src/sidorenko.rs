//! Checks of Sidorenko-type inequalities with exact margins.
//!
//! Every check compares a left-hand density with a right-hand bound and
//! records `margin = lhs − rhs`; a negative margin is a violation.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::density::{edge_density, t_directed, t_undirected};
use crate::enumerate::{oriented_graph_count, oriented_graph_from_code, DEFAULT_ORIENTED_CAP};
use crate::error::{Error, Result};
use crate::graph::{oriented_knn, BipartiteGraph, OrientedGraph, Tournament};
use crate::graphon::{t_bip_step, t_step, StepGraphon};
use crate::par;
use crate::random::{random_graphon, GraphonShape};
use crate::rational::{self, Rational};

/// Once a violation is known, exhaustive scans stop after this many instances.
pub const VIOLATION_SCAN_LIMIT: u64 = 1_000_000;
const SCAN_BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnFamily,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Host {
    Oriented(OrientedGraph),
    Tournament(Tournament),
    Graphon(StepGraphon),
}

/// One evaluated instance of an inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub host: Host,
    #[serde(serialize_with = "rational::serialize")]
    pub lhs: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub rhs: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub margin: Rational,
}

impl Instance {
    pub fn new(host: Host, lhs: Rational, rhs: Rational) -> Self {
        let margin = &lhs - &rhs;
        Self { host, lhs, rhs, margin }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub verdict: Verdict,
    /// The violating instance, present exactly when the verdict is `Violated`.
    pub witness: Option<Instance>,
    /// The instance with the smallest margin seen, violated or not.
    pub extremal: Option<Instance>,
    pub instances_checked: u64,
}

impl CheckReport {
    fn single(property: &str, instance: Instance) -> Self {
        let violated = instance.margin.is_negative();
        Self {
            property: property.to_string(),
            verdict: if violated { Verdict::Violated } else { Verdict::HoldsOnFamily },
            witness: violated.then(|| instance.clone()),
            extremal: Some(instance),
            instances_checked: 1,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnFamily
    }

    /// Smallest margin seen.
    pub fn min_margin(&self) -> Option<&Rational> {
        self.extremal.as_ref().map(|i| &i.margin)
    }
}

/// Running state of an exhaustive scan: the first violation in enumeration
/// order and the smallest margin.
#[derive(Default)]
pub(crate) struct Scan {
    first: Option<(u64, Instance)>,
    worst: Option<(u64, Instance)>,
    count: u64,
}

impl Scan {
    pub(crate) fn record(mut self, key: u64, make: impl FnOnce() -> Instance) -> Self {
        let inst = make();
        self.count += 1;
        if inst.margin.is_negative() && self.first.as_ref().is_none_or(|(k, _)| key < *k) {
            self.first = Some((key, inst.clone()));
        }
        let worse = match &self.worst {
            None => true,
            Some((k, w)) => inst.margin < w.margin || (inst.margin == w.margin && key < *k),
        };
        if worse {
            self.worst = Some((key, inst));
        }
        self
    }

    pub(crate) fn merge(mut self, other: Scan) -> Scan {
        self.count += other.count;
        if let Some((k, inst)) = other.first {
            if self.first.as_ref().is_none_or(|(mine, _)| k < *mine) {
                self.first = Some((k, inst));
            }
        }
        if let Some((k, inst)) = other.worst {
            let replace = match &self.worst {
                None => true,
                Some((mk, m)) => inst.margin < m.margin || (inst.margin == m.margin && k < *mk),
            };
            if replace {
                self.worst = Some((k, inst));
            }
        }
        self
    }

    pub(crate) fn into_report(self, property: &str) -> CheckReport {
        let witness = self.first.map(|(_, i)| i);
        CheckReport {
            property: property.to_string(),
            verdict: if witness.is_some() { Verdict::Violated } else { Verdict::HoldsOnFamily },
            witness,
            extremal: self.worst.map(|(_, i)| i),
            instances_checked: self.count,
        }
    }
}

fn directed_instance(b: &OrientedGraph, g: &OrientedGraph) -> Instance {
    let lhs = t_directed(b, g).expect("hosts are nonempty").into_inner();
    let p = edge_density(g).expect("hosts are nonempty").into_inner();
    let rhs = rational::pow(&p, b.edge_count() as i32);
    Instance::new(Host::Oriented(g.clone()), lhs, rhs)
}

/// Tests t(B, G) ≥ t(K⃗₂, G)^e(B) over every labelled oriented G with
/// `1 ≤ v(G) ≤ n_max`.
///
/// When B has an edge but no homomorphism to K⃗₂, K⃗_{2,2} is evaluated first
/// (it contains no homomorphic image of B), so it is the reported witness.
pub fn check_directed_sidorenko_exhaustive(b: &OrientedGraph, n_max: usize) -> Result<CheckReport> {
    if n_max > DEFAULT_ORIENTED_CAP {
        return Err(Error::CapExceeded { what: "directed Sidorenko scan", n: n_max, cap: DEFAULT_ORIENTED_CAP });
    }
    let mut scan = Scan::default();
    if b.edge_count() > 0 && !b.has_hom_to_edge() {
        let knn = oriented_knn(2)?;
        scan = scan.record(0, || directed_instance(b, &knn));
    }
    // keys: certificate 0, then enumeration order
    let mut offset = 1u64;
    'levels: for n in 1..=n_max {
        let total = oriented_graph_count(n);
        let mut start = 0;
        while start < total {
            let end = (start + SCAN_BLOCK).min(total);
            let block = par::fold_chunks(
                start..end,
                256,
                Scan::default,
                |acc, code| acc.record(offset + code, || directed_instance(b, &oriented_graph_from_code(n, code))),
                Scan::merge,
            );
            scan = scan.merge(block);
            if scan.first.is_some() && scan.count >= VIOLATION_SCAN_LIMIT {
                break 'levels;
            }
            start = end;
        }
        offset += total;
    }
    Ok(scan.into_report("directed-sidorenko"))
}

/// Tests t(B, W) ≥ (∫W)^e(B).
pub fn check_directed_sidorenko_graphon(b: &OrientedGraph, w: &StepGraphon) -> CheckReport {
    let rhs = rational::pow(&w.integral(), b.edge_count() as i32);
    CheckReport::single("directed-sidorenko-graphon", Instance::new(Host::Graphon(w.clone()), t_step(b, w), rhs))
}

/// Tests t_bip(A, W) ≥ (∫W)^e(A).
pub fn check_asym_sidorenko(a: &BipartiteGraph, w: &StepGraphon) -> CheckReport {
    let rhs = rational::pow(&w.integral(), a.edge_count() as i32);
    CheckReport::single("asymmetric-sidorenko", Instance::new(Host::Graphon(w.clone()), t_bip_step(a, w), rhs))
}

fn batch(property: &str, count: usize, seed: u64, shape: GraphonShape, one: impl Fn(&StepGraphon) -> CheckReport + Sync + Send) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphons: Vec<StepGraphon> = (0..count).map(|_| random_graphon(&mut rng, shape)).collect();
    let reports = par::map_slice(&graphons, one);
    let mut scan = Scan::default();
    for (i, r) in reports.into_iter().enumerate() {
        let inst = r.extremal.expect("single checks carry their instance");
        scan = scan.record(i as u64, || inst);
    }
    scan.into_report(property)
}

/// [`check_directed_sidorenko_graphon`] over `count` seeded random graphons.
pub fn check_directed_sidorenko_random(b: &OrientedGraph, shape: GraphonShape, count: usize, seed: u64) -> CheckReport {
    batch("directed-sidorenko-graphon", count, seed, shape, |w| check_directed_sidorenko_graphon(b, w))
}

/// [`check_asym_sidorenko`] over `count` seeded random graphons.
pub fn check_asym_sidorenko_random(a: &BipartiteGraph, shape: GraphonShape, count: usize, seed: u64) -> CheckReport {
    batch("asymmetric-sidorenko", count, seed, shape, |w| check_asym_sidorenko(a, w))
}

/// Margins of the directed check on the part orientation of `a` and of the
/// asymmetric check on `a`, on the same graphon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    pub directed: CheckReport,
    pub asymmetric: CheckReport,
    /// `−|directed margin − asymmetric margin|`; zero when the two agree.
    #[serde(serialize_with = "rational::serialize")]
    pub discrepancy: Rational,
    pub verdict: Verdict,
}

pub fn check_equivalence_bridge(a: &BipartiteGraph, w: &StepGraphon) -> BridgeReport {
    let directed = check_directed_sidorenko_graphon(&a.to_part_oriented(), w);
    let asymmetric = check_asym_sidorenko(a, w);
    let dm = directed.min_margin().expect("single check").clone();
    let am = asymmetric.min_margin().expect("single check").clone();
    let discrepancy = -(dm - am).abs();
    let verdict = if discrepancy.is_zero() { Verdict::HoldsOnFamily } else { Verdict::Violated };
    BridgeReport { directed, asymmetric, discrepancy, verdict }
}

/// Tests t(B, G) ≥ 2^−e(B) · t(B̄, Ḡ) with the right side an undirected
/// homomorphism density.
pub fn check_second_sidorenko(b: &OrientedGraph, g: &OrientedGraph) -> Result<CheckReport> {
    let lhs = t_directed(b, g)?.into_inner();
    let undirected = t_undirected(&b.underlying(), &g.underlying())?.into_inner();
    let rhs = undirected * rational::pow(&rational::int(2), -(b.edge_count() as i32));
    Ok(CheckReport::single("second-directed-sidorenko", Instance::new(Host::Oriented(g.clone()), lhs, rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn single_edge_always_holds_with_equality() {
        let e = OrientedGraph::single_edge();
        let r = check_directed_sidorenko_exhaustive(&e, 4).unwrap();
        assert!(r.holds());
        assert!(r.min_margin().unwrap().is_zero());
        assert_eq!(r.instances_checked, 1 + 3 + 27 + 729);
        let w = StepGraphon::equipartition(vec![
            vec![ratio(1, 3), ratio(0, 1)],
            vec![ratio(1, 1), ratio(5, 8)],
        ])
        .unwrap();
        assert!(check_directed_sidorenko_graphon(&e, &w).min_margin().unwrap().is_zero());
    }

    #[test]
    fn directed_path_is_violated_on_knn() {
        let p3 = OrientedGraph::directed_path(3);
        let r = check_directed_sidorenko_exhaustive(&p3, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        let w = r.witness.unwrap();
        assert_eq!(w.host, Host::Oriented(oriented_knn(2).unwrap()));
        assert!(w.lhs.is_zero());
        assert_eq!(w.margin, ratio(-1, 16));
    }

    #[test]
    fn alternating_four_cycle_holds_up_to_four_vertices() {
        let c4 = BipartiteGraph::even_cycle(2).unwrap().to_part_oriented();
        let r = check_directed_sidorenko_exhaustive(&c4, 4).unwrap();
        assert!(r.holds(), "{:?}", r.witness);
    }

    #[test]
    fn graphon_checks() {
        let p3 = OrientedGraph::directed_path(3);
        let c = StepGraphon::constant(ratio(2, 9)).unwrap();
        assert!(check_directed_sidorenko_graphon(&p3, &c).min_margin().unwrap().is_zero());
        let knn = StepGraphon::from_oriented(&oriented_knn(2).unwrap()).unwrap();
        let r = check_directed_sidorenko_graphon(&p3, &knn);
        assert_eq!(r.min_margin().unwrap(), &ratio(-1, 16));
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn asymmetric_checks() {
        let k2 = BipartiteGraph::complete(1, 1);
        let w = StepGraphon::equipartition(vec![vec![ratio(1, 4), ratio(3, 4)], vec![ratio(0, 1), ratio(1, 2)]]).unwrap();
        assert!(check_asym_sidorenko(&k2, &w).min_margin().unwrap().is_zero());

        let star = BipartiteGraph::new(1, 2, [(0, 0), (0, 1)]).unwrap();
        let r = check_asym_sidorenko_random(&star, GraphonShape::equal(4), 1000, crate::random::DEFAULT_SEED);
        assert!(r.holds());
        assert_eq!(r.instances_checked, 1000);

        let c4 = BipartiteGraph::even_cycle(2).unwrap();
        let m = StepGraphon::from_bipartite(&BipartiteGraph::new(2, 2, [(0, 0), (1, 1)]).unwrap()).unwrap();
        let r = check_asym_sidorenko(&c4, &m);
        // only the two "diagonal" cycles survive: t_bip = 2 / 2⁴ = 1/8 ≥ (1/2)⁴
        assert_eq!(r.extremal.as_ref().unwrap().lhs, ratio(1, 8));
        assert_eq!(r.min_margin().unwrap(), &ratio(1, 16));
    }

    #[test]
    fn bridge_margins_agree() {
        let c4 = BipartiteGraph::even_cycle(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let w = random_graphon(&mut rng, GraphonShape::equal(3));
            let r = check_equivalence_bridge(&c4, &w);
            assert_eq!(r.verdict, Verdict::HoldsOnFamily);
            assert_eq!(r.directed.min_margin(), r.asymmetric.min_margin());
        }
        let k2 = BipartiteGraph::complete(1, 1);
        let w = random_graphon(&mut rng, GraphonShape::equal(3));
        let r = check_equivalence_bridge(&k2, &w);
        assert!(r.directed.min_margin().unwrap().is_zero());
        assert!(r.asymmetric.min_margin().unwrap().is_zero());
    }

    #[test]
    fn second_property_examples() {
        let e = OrientedGraph::single_edge();
        let g = OrientedGraph::new(4, [(0, 1), (1, 2), (3, 1)]).unwrap();
        assert!(check_second_sidorenko(&e, &g).unwrap().min_margin().unwrap().is_zero());

        let p3 = OrientedGraph::directed_path(3);
        let tt = OrientedGraph::transitive_tournament(3);
        let r = check_second_sidorenko(&p3, &tt).unwrap();
        let inst = r.witness.unwrap();
        assert_eq!((inst.lhs, inst.rhs), (ratio(1, 27), ratio(1, 9)));

        let c3 = OrientedGraph::directed_cycle(3).unwrap();
        let r = check_second_sidorenko(&p3, &c3).unwrap();
        assert!(r.holds());
        assert!(r.min_margin().unwrap().is_zero());
        assert_eq!(r.extremal.unwrap().lhs, ratio(3, 27));
    }

    #[test]
    fn scan_cap() {
        assert!(check_directed_sidorenko_exhaustive(&OrientedGraph::single_edge(), 7).is_err());
    }
}
