use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde_json::{json, Value};

use disid::cutnorm::{cut_norm, cut_norm_centered, cut_norm_centered_heuristic, cut_norm_heuristic};
use disid::density::{hom_count_bip, hom_count_directed, hom_count_undirected, t_bip, t_directed, t_undirected};
use disid::enumerate::{
    enumerate_oriented_graphs, enumerate_tournaments, oriented_graphs_up_to_isomorphism,
};
use disid::forcing::{find_lambda0, forcing_witness_search, quasirandom_trace, w_lambda};
use disid::format::{emit_graph, emit_graphon, parse_graph, parse_graphon, GraphFile};
use disid::graph::oriented_knn;
use disid::graphon::{t_bip_step, t_step, t_step_terms, TERM_WARNING};
use disid::rational::{self, Rational};
use disid::sidorenko::{
    check_asym_sidorenko, check_directed_sidorenko_exhaustive, check_directed_sidorenko_graphon,
    check_equivalence_bridge, check_second_sidorenko, CheckReport,
};
use disid::tournament::{anti_sidorenko_check, impartiality_check};
use disid::{BipartiteGraph, OrientedGraph, StepGraphon};

/// Homomorphism densities, Sidorenko checks and forcing witnesses for
/// oriented graphs and step graphons. Prints one JSON object per line.
///
/// Exit status: 0 success or property holds, 1 property violated or no
/// witness found, 2 bad input.
#[derive(Parser)]
#[command(name = "disid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// t(B, G) for two directed or two undirected graph files.
    Density { pattern: PathBuf, host: PathBuf },
    /// Part-respecting density t_bip(A, H) of bipartite graph files.
    DensityBip { pattern: PathBuf, host: PathBuf },
    /// t(B, W); a bipartite B gives t_bip(B, W).
    DensityGraphon { pattern: PathBuf, graphon: PathBuf },
    /// Cut norm ‖W‖□ or ‖W − p‖□.
    Cutnorm {
        graphon: PathBuf,
        #[arg(long, value_name = "p")]
        center: Option<String>,
        /// Alternating-maximization lower bound instead of exact search.
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = disid::random::DEFAULT_SEED)]
        seed: u64,
    },
    /// Directed Sidorenko: exhaustively over small hosts, on a graphon, or the
    /// second (undirected-bound) form on one host.
    CheckSidorenko {
        pattern: PathBuf,
        #[arg(long, conflicts_with_all = ["graphon", "second"])]
        nmax: Option<usize>,
        #[arg(long, conflicts_with = "second")]
        graphon: Option<PathBuf>,
        #[arg(long, value_name = "G")]
        second: Option<PathBuf>,
    },
    /// Asymmetric bipartite Sidorenko t_bip(A, W) ≥ (∫W)^e(A).
    CheckAsym {
        pattern: PathBuf,
        #[arg(long)]
        graphon: PathBuf,
    },
    /// Compares the directed and asymmetric margins of A on W.
    Bridge { pattern: PathBuf, graphon: PathBuf },
    /// The four-part family W^(λ).
    Wlambda {
        #[arg(long)]
        lambda: String,
        /// Also write the graphon file here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Smallest λ with t(B, W^(λ)) = (1/16)^e(B).
    FindLambda0 {
        pattern: PathBuf,
        #[arg(long, default_value = "2^-40")]
        precision: String,
    },
    /// ‖W_G − p‖□ for each graph file listed (one path per line).
    QuasirandomTrace {
        list: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Searches for a non-constant W with ∫W = p and t(B, W) = p^e(B).
    SearchWitness {
        pattern: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 4)]
        parts: usize,
        #[arg(long, default_value = "1e-8")]
        tol: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Copy counts of B across all labelled tournaments on n vertices.
    Impartial {
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// t(B, T) ≤ (1/2)^e(B) over all labelled tournaments on n vertices.
    AntiSidorenko {
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Lists small oriented graphs or tournaments.
    Enumerate {
        #[arg(long, conflicts_with = "tournaments", required_unless_present = "tournaments")]
        oriented: Option<usize>,
        #[arg(long)]
        tournaments: Option<usize>,
        /// One representative per isomorphism class (oriented graphs only).
        #[arg(long, requires = "oriented")]
        classes: bool,
    },
    /// Bipartite double cover of an undirected graph.
    DoubleCover {
        graph: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Oriented complete bipartite graph K⃗_{n,n}.
    Knn {
        n: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// Whether the command's property held (or its search succeeded).
type Held = bool;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<GraphFile> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_directed(path: &Path) -> Result<OrientedGraph> {
    match load_graph(path)? {
        GraphFile::Directed(g) => Ok(g),
        other => bail!("{}: expected a directed graph, got a {} one", path.display(), other.kind()),
    }
}

fn load_bipartite(path: &Path) -> Result<BipartiteGraph> {
    match load_graph(path)? {
        GraphFile::Bipartite(g) => Ok(g),
        other => bail!("{}: expected a bipartite graph, got a {} one", path.display(), other.kind()),
    }
}

fn load_graphon(path: &Path) -> Result<StepGraphon> {
    parse_graphon(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn number(text: &str) -> Result<Rational> {
    rational::parse(text).map_err(|_| anyhow::anyhow!("not a number: {text:?}"))
}

fn emit(out: &mut impl Write, value: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn report(out: &mut impl Write, r: &CheckReport) -> Result<Held> {
    emit(out, &serde_json::to_value(r)?)?;
    Ok(r.holds())
}

fn q(r: &Rational) -> Value {
    Value::String(rational::to_string(r))
}

fn run(command: Command, out: &mut impl Write) -> Result<Held> {
    match command {
        Command::Density { pattern, host } => {
            let (hom, t) = match (load_graph(&pattern)?, load_graph(&host)?) {
                (GraphFile::Directed(b), GraphFile::Directed(g)) => (hom_count_directed(&b, &g), t_directed(&b, &g)?),
                (GraphFile::Undirected(a), GraphFile::Undirected(h)) => {
                    (hom_count_undirected(&a, &h), t_undirected(&a, &h)?)
                }
                (b, g) => bail!("density needs two directed or two undirected graphs, got {} and {}", b.kind(), g.kind()),
            };
            emit(out, &json!({ "hom": hom, "t": t }))?;
        }
        Command::DensityBip { pattern, host } => {
            let (a, h) = (load_bipartite(&pattern)?, load_bipartite(&host)?);
            emit(out, &json!({ "hom": hom_count_bip(&a, &h), "t": t_bip(&a, &h)? }))?;
        }
        Command::DensityGraphon { pattern, graphon } => {
            let w = load_graphon(&graphon)?;
            let t = match load_graph(&pattern)? {
                GraphFile::Directed(b) => {
                    let terms = t_step_terms(&b, &w);
                    if terms > TERM_WARNING {
                        eprintln!("warning: evaluating {terms} part assignments");
                    }
                    t_step(&b, &w)
                }
                GraphFile::Bipartite(a) => t_bip_step(&a, &w),
                GraphFile::Undirected(_) => bail!("density-graphon needs a directed or bipartite pattern"),
            };
            emit(out, &json!({ "t": q(&t), "integral": q(&w.integral()) }))?;
        }
        Command::Cutnorm { graphon, center, heuristic, seed } => {
            let w = load_graphon(&graphon)?;
            let center = center.as_deref().map(number).transpose()?;
            let r = match (&center, heuristic) {
                (None, false) => cut_norm(&w)?,
                (Some(p), false) => cut_norm_centered(&w, p)?,
                (None, true) => cut_norm_heuristic(&w, seed),
                (Some(p), true) => cut_norm_centered_heuristic(&w, p, seed),
            };
            let mut v = serde_json::to_value(&r)?;
            v["center"] = center.as_ref().map(q).unwrap_or(Value::Null);
            emit(out, &v)?;
        }
        Command::CheckSidorenko { pattern, nmax, graphon, second } => {
            let b = load_directed(&pattern)?;
            let r = match (graphon, second) {
                (Some(path), _) => check_directed_sidorenko_graphon(&b, &load_graphon(&path)?),
                (None, Some(path)) => check_second_sidorenko(&b, &load_directed(&path)?)?,
                (None, None) => check_directed_sidorenko_exhaustive(&b, nmax.unwrap_or(4))?,
            };
            return report(out, &r);
        }
        Command::CheckAsym { pattern, graphon } => {
            let r = check_asym_sidorenko(&load_bipartite(&pattern)?, &load_graphon(&graphon)?);
            return report(out, &r);
        }
        Command::Bridge { pattern, graphon } => {
            let r = check_equivalence_bridge(&load_bipartite(&pattern)?, &load_graphon(&graphon)?);
            emit(out, &serde_json::to_value(&r)?)?;
            return Ok(r.discrepancy.is_zero());
        }
        Command::Wlambda { lambda, emit: path } => {
            let lambda = number(&lambda)?;
            let w = w_lambda(&lambda)?;
            if let Some(path) = path {
                fs::write(&path, emit_graphon(&w)).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(out, &json!({ "lambda": q(&lambda), "integral": q(&w.integral()), "graphon": w }))?;
        }
        Command::FindLambda0 { pattern, precision } => {
            let profile = find_lambda0(&load_directed(&pattern)?, &number(&precision)?)?;
            emit(out, &serde_json::to_value(&profile)?)?;
        }
        Command::QuasirandomTrace { list, p } => {
            let p = number(&p)?;
            let base = list.parent().map(Path::to_path_buf).unwrap_or_default();
            let paths: Vec<PathBuf> = read(&list)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| base.join(l))
                .collect();
            let graphs = paths.iter().map(|p| load_directed(p)).collect::<Result<Vec<_>>>()?;
            for (path, point) in paths.iter().zip(quasirandom_trace(&graphs, &p)?) {
                let mut v = serde_json::to_value(&point)?;
                v["graph"] = json!(path.display().to_string());
                v["p"] = q(&p);
                emit(out, &v)?;
            }
        }
        Command::SearchWitness { pattern, p, parts, tol, seed } => {
            let b = load_directed(&pattern)?;
            let p_exact = number(&p)?;
            let tol = rational::to_f64(&number(&tol)?);
            let found = forcing_witness_search(&b, rational::to_f64(&p_exact), parts, tol, seed)?;
            let two_p = &p_exact * rational::int(2);
            emit(
                out,
                &json!({
                    "mean": q(&p_exact),
                    "forcing_p": q(&two_p),
                    "target": q(&rational::pow(&p_exact, b.edge_count() as i32)),
                    "parts": parts,
                    "seed": seed,
                    "witness": found,
                }),
            )?;
            return Ok(found.is_some());
        }
        Command::Impartial { pattern, n } => {
            let stats = impartiality_check(&load_directed(&pattern)?, n)?;
            emit(out, &serde_json::to_value(&stats)?)?;
            return Ok(stats.constant);
        }
        Command::AntiSidorenko { pattern, n } => {
            return report(out, &anti_sidorenko_check(&load_directed(&pattern)?, n)?);
        }
        Command::Enumerate { oriented, tournaments, classes } => {
            let mut failure = None;
            let mut line = |n: usize, edges: &[(usize, usize)]| {
                if failure.is_none() {
                    failure = emit(out, &json!({ "n": n, "edges": edges })).err();
                }
            };
            match (oriented, tournaments) {
                (Some(n), _) if classes => {
                    for g in oriented_graphs_up_to_isomorphism(n)? {
                        line(n, g.edges());
                    }
                }
                (Some(n), _) => {
                    enumerate_oriented_graphs(n, |g| line(n, g.edges()))?;
                }
                (None, Some(n)) => {
                    enumerate_tournaments(n, |t| line(n, t.as_oriented().edges()))?;
                }
                (None, None) => bail!("enumerate needs --oriented N or --tournaments N"),
            }
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Command::DoubleCover { graph, emit: path } => {
            let h = match load_graph(&graph)? {
                GraphFile::Undirected(h) => h,
                other => bail!("double-cover needs an undirected graph, got a {} one", other.kind()),
            };
            let cover = h.double_cover();
            if let Some(path) = path {
                fs::write(&path, emit_graph(&GraphFile::Bipartite(cover.clone())))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(out, &serde_json::to_value(&cover)?)?;
        }
        Command::Knn { n, emit: path } => {
            let g = oriented_knn(n)?;
            if let Some(path) = path {
                fs::write(&path, emit_graph(&GraphFile::Directed(g.clone())))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(out, &serde_json::to_value(&g)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
        (Err(e), _) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
