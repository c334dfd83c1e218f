//! Copy counts and densities of small oriented graphs across all labelled
//! tournaments on `n` vertices.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::density::{labeled_copies, t_directed, HomCount};
use crate::enumerate::tournament_count;
use crate::error::{Error, Result};
use crate::graph::{OrientedGraph, Tournament};
use crate::par;
use crate::rational::{self, ratio};
use crate::sidorenko::{CheckReport, Host, Instance, Scan};

pub const IMPARTIAL_CAP: usize = 6;
pub const ANTI_SIDORENKO_CAP: usize = 6;
const CHUNK: u64 = 64;

pub fn copies_in_tournament(b: &OrientedGraph, t: &Tournament) -> HomCount {
    labeled_copies(b, t.as_oriented())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TournamentStats {
    pub n: usize,
    /// Copy count ↦ number of labelled tournaments with that count.
    pub counts: BTreeMap<u64, u64>,
    pub min: u64,
    pub max: u64,
    pub constant: bool,
}

impl TournamentStats {
    pub fn tournaments(&self) -> u64 {
        self.counts.values().sum()
    }
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

pub fn impartiality_check(b: &OrientedGraph, n: usize) -> Result<TournamentStats> {
    impartiality_check_with_cap(b, n, IMPARTIAL_CAP)
}

pub fn impartiality_check_with_cap(b: &OrientedGraph, n: usize, cap: usize) -> Result<TournamentStats> {
    check_cap("impartiality check", n, cap)?;
    let counts = par::fold_chunks(
        0..tournament_count(n),
        CHUNK,
        BTreeMap::new,
        |mut acc: BTreeMap<u64, u64>, code| {
            let c = copies_in_tournament(b, &Tournament::from_code(n, code));
            *acc.entry(c.value().to_u64().expect("copy counts of small tournaments fit in u64")).or_default() += 1;
            acc
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        },
    );
    let min = *counts.keys().next().expect("at least one tournament");
    let max = *counts.keys().next_back().expect("at least one tournament");
    Ok(TournamentStats { n, counts, min, max, constant: min == max })
}

pub fn anti_sidorenko_check(b: &OrientedGraph, n: usize) -> Result<CheckReport> {
    anti_sidorenko_check_with_cap(b, n, ANTI_SIDORENKO_CAP)
}

/// Tests t(B, T) ≤ (1/2)^e(B) over every labelled tournament on `n ≥ 1`
/// vertices. Each instance has `lhs = (1/2)^e(B)`, `rhs = t(B, T)`, so the
/// extremal instance carries the largest density.
pub fn anti_sidorenko_check_with_cap(b: &OrientedGraph, n: usize, cap: usize) -> Result<CheckReport> {
    check_cap("anti-Sidorenko check", n, cap)?;
    if n == 0 {
        return Err(Error::EmptyHost);
    }
    let bound = rational::pow(&ratio(1, 2), b.edge_count() as i32);
    let scan = par::fold_chunks(
        0..tournament_count(n),
        CHUNK,
        Scan::default,
        |acc, code| {
            acc.record(code, || {
                let t = Tournament::from_code(n, code);
                let density = t_directed(b, t.as_oriented()).expect("n ≥ 1").into_inner();
                Instance::new(Host::Tournament(t), bound.clone(), density)
            })
        },
        Scan::merge,
    );
    Ok(scan.into_report("tournament-anti-sidorenko"))
}
