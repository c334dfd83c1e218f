//! Plain-text graph and graphon files.
//!
//! ```text
//! D n m        U n m        B n1 n2 m        W k
//! u v          u v          i j              l_1 … l_k
//! …            …            …                w_11 … w_1k
//!                                            …
//! ```
//!
//! Indices are 0-based. Blank lines and lines starting with `#` are skipped.
//! Numbers in graphon files are `p/q`, integers or decimals; emitted files
//! always use `p/q`, so emit-then-parse is exact.

use std::fmt::Write;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, OrientedGraph, UndirectedGraph};
use crate::graphon::StepGraphon;
use crate::rational::{self, Rational};

/// Decimal part lengths may miss 1 by at most this much.
pub const DECIMAL_LENGTH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFile {
    Directed(OrientedGraph),
    Undirected(UndirectedGraph),
    Bipartite(BipartiteGraph),
}

impl GraphFile {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphFile::Directed(_) => "directed",
            GraphFile::Undirected(_) => "undirected",
            GraphFile::Bipartite(_) => "bipartite",
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn usizes(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, got {t:?}"))))
        .collect()
}

fn relocate(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => Error::Parse { line, msg: other.to_string() },
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "empty graph file"))?;
    let mut fields = header.split_whitespace();
    let tag = fields.next().unwrap_or_default();
    let nums = usizes(hl, &fields.collect::<Vec<_>>().join(" "))?;
    let expected = match (tag, nums.len()) {
        ("D" | "U", 2) => nums[1],
        ("B", 3) => nums[2],
        _ => return Err(parse_err(hl, format!("bad header {header:?}; expected \"D n m\", \"U n m\" or \"B n1 n2 m\""))),
    };
    let mut edges = Vec::with_capacity(expected);
    let mut last = hl;
    for (ln, l) in lines {
        let pair = usizes(ln, l)?;
        if pair.len() != 2 {
            return Err(parse_err(ln, format!("expected two endpoints, got {l:?}")));
        }
        if edges.len() == expected {
            return Err(parse_err(ln, format!("more than the {expected} edges declared in the header")));
        }
        edges.push((pair[0], pair[1]));
        last = ln;
    }
    if edges.len() != expected {
        return Err(parse_err(last, format!("header declares {expected} edges, found {}", edges.len())));
    }
    let built = match tag {
        "D" => OrientedGraph::new(nums[0], edges).map(GraphFile::Directed),
        "U" => UndirectedGraph::new(nums[0], edges).map(GraphFile::Undirected),
        _ => BipartiteGraph::new(nums[0], nums[1], edges).map(GraphFile::Bipartite),
    };
    built.map_err(|e| relocate(hl, e))
}

pub fn emit_graph(g: &GraphFile) -> String {
    let mut out = String::new();
    let (header, edges) = match g {
        GraphFile::Directed(g) => (format!("D {} {}", g.vertex_count(), g.edge_count()), g.edges()),
        GraphFile::Undirected(g) => (format!("U {} {}", g.vertex_count(), g.edge_count()), g.edges()),
        GraphFile::Bipartite(g) => {
            (format!("B {} {} {}", g.part1_count(), g.part2_count(), g.edge_count()), g.edges())
        }
    };
    out.push_str(&header);
    out.push('\n');
    for (u, v) in edges {
        writeln!(out, "{u} {v}").expect("writing to a String");
    }
    out
}

pub fn emit_oriented(g: &OrientedGraph) -> String {
    emit_graph(&GraphFile::Directed(g.clone()))
}

fn rationals(line: usize, text: &str) -> Result<Vec<(Rational, bool)>> {
    text.split_whitespace()
        .map(|t| rational::parse(t).map(|r| (r, rational::is_decimal_literal(t))).map_err(|e| relocate(line, e)))
        .collect()
}

pub fn parse_graphon(text: &str) -> Result<StepGraphon> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "empty graphon file"))?;
    let k = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["W", k] => k.parse::<usize>().map_err(|_| parse_err(hl, format!("bad part count {k:?}")))?,
        _ => return Err(parse_err(hl, format!("bad header {header:?}; expected \"W k\""))),
    };
    if k == 0 {
        return Err(parse_err(hl, "a graphon needs at least one part"));
    }
    let (ll, lengths_line) = lines.next().ok_or_else(|| parse_err(hl, "missing part lengths"))?;
    let lengths = rationals(ll, lengths_line)?;
    if lengths.len() != k {
        return Err(parse_err(ll, format!("expected {k} part lengths, got {}", lengths.len())));
    }
    let any_decimal = lengths.iter().any(|(_, d)| *d);
    let mut lengths: Vec<Rational> = lengths.into_iter().map(|(r, _)| r).collect();
    if lengths.iter().any(|l| !l.is_positive()) {
        return Err(parse_err(ll, "part lengths must be positive"));
    }
    let total: Rational = lengths.iter().sum();
    if total != Rational::one() {
        let gap = rational::to_f64(&(&total - Rational::one())).abs();
        if !any_decimal || gap > DECIMAL_LENGTH_SLACK {
            return Err(parse_err(ll, format!("part lengths sum to {}, not 1", rational::to_string(&total))));
        }
        for l in &mut lengths {
            *l = &*l / &total;
        }
    }
    let mut values = Vec::with_capacity(k);
    let mut last = ll;
    for (ln, l) in lines {
        if values.len() == k {
            return Err(parse_err(ln, format!("more than {k} value rows")));
        }
        let row: Vec<Rational> = rationals(ln, l)?.into_iter().map(|(r, _)| r).collect();
        if row.len() != k {
            return Err(parse_err(ln, format!("expected {k} values, got {}", row.len())));
        }
        values.push(row);
        last = ln;
    }
    if values.len() != k {
        return Err(parse_err(last, format!("expected {k} value rows, found {}", values.len())));
    }
    StepGraphon::new(lengths, values).map_err(|e| relocate(hl, e))
}

pub fn emit_graphon(w: &StepGraphon) -> String {
    let row = |r: &[Rational]| r.iter().map(rational::to_string).collect::<Vec<_>>().join(" ");
    let mut out = format!("W {}\n{}\n", w.parts(), row(w.lengths()));
    for r in w.values() {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}
