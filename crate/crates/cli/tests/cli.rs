use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn disid(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disid")).args(args).current_dir(dir).output().expect("runs the binary")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

fn single(out: &Output) -> Value {
    let mut all = lines(out);
    assert_eq!(all.len(), 1, "{}", String::from_utf8_lossy(&out.stdout));
    all.remove(0)
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        let f = Files(tempfile::tempdir().unwrap());
        f.put("edge.graph", "D 2 1\n0 1\n");
        f.put("c3.graph", "D 3 3\n0 1\n1 2\n2 0\n");
        f.put("path3.graph", "D 3 2\n0 1\n1 2\n");
        f.put("fork.graph", "D 4 3\n0 1\n2 3\n0 2\n");
        f.put("c4.bip", "B 2 2 4\n0 0\n0 1\n1 0\n1 1\n");
        f.put("k3.graph", "U 3 3\n0 1\n1 2\n0 2\n");
        f.put("half.graphon", "W 2\n1/2 1/2\n0 1\n0 0\n");
        f
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn dir(&self) -> &Path {
        self.0.path()
    }

    fn run(&self, args: &[&str]) -> Output {
        disid(args, self.dir())
    }
}

#[test]
fn edge_density_in_cyclic_triangle() {
    let f = Files::new();
    let out = f.run(&["density", "edge.graph", "c3.graph"]);
    assert!(out.status.success());
    assert_eq!(single(&out)["t"], "1/3");
}

#[test]
fn undirected_and_bipartite_densities() {
    let f = Files::new();
    let out = f.run(&["density", "k3.graph", "k3.graph"]);
    assert_eq!(single(&out)["hom"], "6");
    let out = f.run(&["density-bip", "c4.bip", "c4.bip"]);
    assert_eq!(single(&out)["t"], "1/1");
    let out = f.run(&["density-graphon", "edge.graph", "half.graphon"]);
    assert_eq!(single(&out)["t"], "1/4");
}

#[test]
fn wlambda_then_cutnorm_is_positive() {
    let f = Files::new();
    let out = f.run(&["wlambda", "--lambda", "1/2", "--emit", "w.graphon"]);
    assert!(out.status.success());
    assert_eq!(single(&out)["integral"], "1/16");
    let out = f.run(&["cutnorm", "w.graphon", "--center", "1/16"]);
    assert!(out.status.success());
    let v = single(&out);
    assert_eq!(v["value"], "7/256");
    assert_eq!(v["exact"], true);
    let out = f.run(&["cutnorm", "w.graphon", "--center", "1/16", "--heuristic", "--seed", "3"]);
    assert_eq!(single(&out)["exact"], false);
}

#[test]
fn sidorenko_violation_exits_one_with_knn_witness() {
    let f = Files::new();
    let out = f.run(&["check-sidorenko", "path3.graph", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = single(&out);
    assert_eq!(v["verdict"], "violated");
    let edges: Vec<Value> = serde_json::from_str("[[0,2],[0,3],[1,2],[1,3]]").unwrap();
    assert_eq!(v["witness"]["host"]["edges"], Value::Array(edges));
    assert_eq!(v["witness"]["lhs"], "0/1");
}

#[test]
fn sidorenko_holds_exits_zero() {
    let f = Files::new();
    let out = f.run(&["check-sidorenko", "edge.graph", "--nmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = f.run(&["check-sidorenko", "path3.graph", "--second", "c3.graph"]);
    assert_eq!(out.status.code(), Some(0));
    let out = f.run(&["check-asym", "c4.bip", "--graphon", "half.graphon"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(single(&out)["extremal"]["lhs"], "1/16");
    let out = f.run(&["bridge", "c4.bip", "half.graphon"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(single(&out)["discrepancy"], "0/1");
}

#[test]
fn lambda0_and_witness() {
    let f = Files::new();
    let out = f.run(&["find-lambda0", "c3.graph"]);
    assert!(out.status.success());
    assert_eq!(single(&out)["lambda0"], "1/2");
    let out = f.run(&["find-lambda0", "edge.graph"]);
    assert_eq!(out.status.code(), Some(2));

    let out = f.run(&["search-witness", "c3.graph", "--p", "1/16", "--parts", "4", "--tol", "1e-8", "--seed", "0"]);
    assert!(out.status.success());
    let v = single(&out);
    assert_eq!(v["mean"], "1/16");
    assert_eq!(v["forcing_p"], "1/8");
    assert!(v["witness"].is_object());
    let again = f.run(&["search-witness", "c3.graph", "--p", "1/16", "--parts", "4", "--tol", "1e-8", "--seed", "0"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn tournament_commands() {
    let f = Files::new();
    let out = f.run(&["impartial", "fork.graph", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(single(&out)["constant"], true);
    let out = f.run(&["impartial", "c3.graph", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = f.run(&["anti-sidorenko", "path3.graph", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(single(&out)["extremal"]["rhs"], "1/9");
}

#[test]
fn constructions_and_enumeration() {
    let f = Files::new();
    let out = f.run(&["knn", "2", "--emit", "k.graph"]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(f.dir().join("k.graph")).unwrap(), "D 4 4\n0 2\n0 3\n1 2\n1 3\n");
    let out = f.run(&["double-cover", "k3.graph"]);
    assert_eq!(single(&out)["part1"], 3);
    assert_eq!(lines(&f.run(&["enumerate", "--oriented", "3"])).len(), 27);
    assert_eq!(lines(&f.run(&["enumerate", "--oriented", "4", "--classes"])).len(), 42);
    assert_eq!(lines(&f.run(&["enumerate", "--tournaments", "4"])).len(), 64);
}

#[test]
fn trace_reads_listed_graphs() {
    let f = Files::new();
    f.run(&["knn", "2", "--emit", "k.graph"]);
    f.put("list.txt", "c3.graph\n\nk.graph\n");
    let out = f.run(&["quasirandom-trace", "list.txt", "--p", "1/4"]);
    assert!(out.status.success());
    let all = lines(&out);
    assert_eq!(all.len(), 2);
    assert_eq!(all[0]["value"], "1/9");
    assert_eq!(all[1]["vertices"], 4);
}

#[test]
fn bad_input_exits_two() {
    let f = Files::new();
    f.put("loop.graph", "D 2 1\n1 1\n");
    f.put("short.graph", "D 3 2\n0 1\n");
    f.put("digon.graph", "D 2 2\n0 1\n1 0\n");
    f.put("sum.graphon", "W 2\n1/2 1/3\n0 0\n0 0\n");
    for args in [
        &["density", "loop.graph", "c3.graph"][..],
        &["density", "short.graph", "c3.graph"],
        &["density", "digon.graph", "c3.graph"],
        &["density", "missing.graph", "c3.graph"],
        &["density", "edge.graph", "k3.graph"],
        &["cutnorm", "sum.graphon"],
        &["wlambda", "--lambda", "3/2"],
        &["impartial", "fork.graph", "--n", "9"],
        &["search-witness", "c3.graph", "--p", "2"],
        &["no-such-command"],
    ] {
        let out = f.run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
