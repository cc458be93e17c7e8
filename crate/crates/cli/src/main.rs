use std::fs;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use splicer_cli::config::ExperimentConfig;
use splicer_cli::presets::{run_preset, PresetError, PRESETS};
use splicer_core::cuts::{edge_expansion_exact, spectral_lower_bound, vertex_expansion_exact, EXACT_LIMIT};
use splicer_core::graph::{
    complete_graph, cycle_graph, gnp_graph, lower_bound_family, path_graph, petersen_graph, random_regular_graph, Graph,
};
use splicer_core::io;
use splicer_core::route::reliability_experiment;
use splicer_core::sampler::{aldous_broder, process_bp};
use splicer_core::splicer::{sparsify_gnp, splice};
use splicer_core::stats;
use splicer_core::Seed;

#[derive(Parser)]
#[command(name = "splicer", version, about = "Random spanning trees, k-splicers and the experiments around them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate(GraphArgs),
    /// Sample one spanning tree.
    SampleTree {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Sampler::AldousBroder)]
        sampler: Sampler,
        /// Also write the walk, one vertex per line.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Union of k uniform spanning trees.
    Splice {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Weighted two-tree sparsifier of G(n, p) (or of --graph with --p).
    Sparsify(GraphArgs),
    /// Exact expansion for small graphs, the spectral bound otherwise.
    Expansion(GraphArgs),
    /// One statistical check; exits 1 if it fails.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Edge set as `u-v,u-v` (correlation) or vertex set as `a,b,c` (tail).
        #[arg(long)]
        set: Option<String>,
    },
    /// Route random pairs over a splicer while base edges fail.
    RouteSim {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        failure_prob: f64,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a named experiment and write its JSON summary and CSV detail.
    Preset {
        /// Preset name; may instead come from --config.
        name: Option<String>,
        /// Flat `key = value` config file.
        #[arg(long)]
        config: Option<String>,
        /// `key=value` overrides applied after the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        ell: Option<usize>,
        /// JSON summary path (stdout if absent).
        #[arg(long)]
        out: Option<String>,
        /// CSV detail path.
        #[arg(long)]
        csv: Option<String>,
        /// Leave the metadata timestamp out of the summary.
        #[arg(long)]
        no_metadata: bool,
    },
    /// List preset names.
    Presets,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Read the graph from an edge-list file instead of generating it.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_enum, default_value_t = Kind::Complete)]
    kind: Kind,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout if absent).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Complete,
    Gnp,
    Regular,
    Cycle,
    Path,
    Petersen,
    LowerBound,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    AldousBroder,
    ProcessBp,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Uniformity,
    Correlation,
    Tail,
    MinEdge,
    Coupling,
}

enum Failure {
    Usage(String),
    Assertion,
}

impl From<splicer_core::Error> for Failure {
    fn from(e: splicer_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn p_or_default(a: &GraphArgs) -> f64 {
    a.p.unwrap_or_else(|| (10.0 * (a.n as f64).ln() / a.n as f64).min(1.0))
}

fn load_graph(a: &GraphArgs) -> Result<Graph, Failure> {
    if let Some(path) = &a.graph {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
        return io::read_graph(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")));
    }
    let seed = Seed(a.seed);
    Ok(match a.kind {
        Kind::Complete => complete_graph(a.n)?,
        Kind::Gnp => gnp_graph(a.n, p_or_default(a), seed)?,
        Kind::Regular => random_regular_graph(a.n, a.d, seed)?,
        Kind::Cycle => cycle_graph(a.n)?,
        Kind::Path => path_graph(a.n)?,
        Kind::Petersen => petersen_graph(),
        Kind::LowerBound => lower_bound_family(a.n, a.d, a.ell, seed)?.graph,
    })
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, Failure> {
    text.split(',')
        .map(|e| {
            let (u, v) = e.split_once('-').ok_or_else(|| Failure::Usage(format!("bad edge {e:?}")))?;
            let num = |x: &str| x.trim().parse().map_err(|_| Failure::Usage(format!("bad vertex {x:?}")));
            Ok((num(u)?, num(v)?))
        })
        .collect()
}

fn parse_vertices(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|x| x.trim().parse().map_err(|_| Failure::Usage(format!("bad vertex {x:?}"))))
        .collect()
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain values");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate(a) => emit(&a.out, &io::write_graph(&load_graph(&a)?)),
        Command::SampleTree { graph, sampler, trace } => {
            let g = load_graph(&graph)?;
            let seed = Seed(graph.seed);
            let (tree, walk) = match sampler {
                Sampler::AldousBroder => aldous_broder(&g, seed, None)?,
                Sampler::ProcessBp => {
                    let r = process_bp(&g, p_or_default(&graph), seed, 0)?;
                    match r.outcome {
                        splicer_core::sampler::BpOutcome::Success { tree, trace } => (tree, trace),
                        splicer_core::sampler::BpOutcome::Failure { stuck, steps } => {
                            eprintln!("process B_p got stuck at vertex {stuck} after {steps} steps");
                            return Err(Failure::Assertion);
                        }
                    }
                }
            };
            if let Some(path) = trace {
                emit(&Some(path), &io::write_trace(&walk))?;
            }
            emit(&graph.out, &io::write_tree(&tree))
        }
        Command::Splice { graph, k, format } => {
            let g = load_graph(&graph)?;
            let sp = splice(&g, k, Seed(graph.seed))?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("u,v,multiplicity\n");
                    for (&(u, v), m) in sp.support().edges().iter().zip(sp.multiplicity()) {
                        s.push_str(&format!("{u},{v},{m}\n"));
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "n": sp.n(), "k": sp.k(), "edges": sp.support().edges(), "multiplicity": sp.multiplicity(),
                })),
            };
            emit(&graph.out, &text)
        }
        Command::Sparsify(a) => {
            let (h, p) = if a.graph.is_some() {
                let p = a.p.ok_or_else(|| Failure::Usage("--p is required with --graph".into()))?;
                (load_graph(&a)?, p)
            } else {
                let p = p_or_default(&a);
                (gnp_graph(a.n, p, Seed(a.seed))?, p)
            };
            let w = sparsify_gnp(&h, p, Seed(a.seed).derive("cli.sparsify", 0))?;
            emit(&a.out, &io::write_weighted(&w))
        }
        Command::Expansion(a) => {
            let g = load_graph(&a)?;
            let v = if g.n() <= EXACT_LIMIT {
                json!({"edge": edge_expansion_exact(&g)?, "vertex": vertex_expansion_exact(&g)?})
            } else {
                json!({"spectral": spectral_lower_bound(&g)?})
            };
            emit(&a.out, &pretty(&v))
        }
        Command::Verify { graph, check, trials, set } => {
            let g = load_graph(&graph)?;
            let seed = Seed(graph.seed);
            let (pass, v) = match check {
                Check::Uniformity => {
                    let space = stats::TreeSpace::new(&g)?;
                    let mut counts = vec![0u64; space.len()];
                    for i in 0..trials {
                        let t = splicer_core::sampler::aldous_broder_tree(&g, seed.derive("cli.verify", i as u64), None)?;
                        counts[space.index_of(&g, &t)?] += 1;
                    }
                    let chi = stats::chi_square_uniform(&counts);
                    let tv = stats::total_variation_from_uniform(&counts);
                    (chi.p_value > 1e-4, json!({"trees": space.len(), "tv": tv, "chi_square": chi, "trials": trials}))
                }
                Check::Correlation => {
                    let edges = parse_pairs(set.as_deref().ok_or_else(|| Failure::Usage("--set u-v,u-v required".into()))?)?;
                    let r = stats::negative_correlation_check(&g, &edges, trials, seed)?;
                    (r.holds && r.holds_absent, json!(r))
                }
                Check::Tail => {
                    let a = parse_vertices(set.as_deref().ok_or_else(|| Failure::Usage("--set a,b,c required".into()))?)?;
                    let r = stats::chernoff_tail_check(&g, &a, trials, seed)?;
                    (r.pass, json!(r))
                }
                Check::MinEdge => {
                    let r = stats::min_tree_edge_probability(&g, trials, seed)?;
                    let d = g.max_degree() as f64;
                    (r.estimate.value >= 1.0 / d - 4.0 * r.estimate.se, json!(r))
                }
                Check::Coupling => {
                    let r = stats::coupling_distance_estimate(graph.n, p_or_default(&graph), trials, seed)?;
                    (true, json!(r))
                }
            };
            emit(&graph.out, &pretty(&json!({"pass": pass, "seed": graph.seed, "report": v})))?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Assertion)
            }
        }
        Command::RouteSim { graph, k, failure_prob, pairs, trials, format } => {
            let g = load_graph(&graph)?;
            let r = reliability_experiment(&g, k, failure_prob, pairs, trials, Seed(graph.seed))?;
            let text = match format {
                Format::Json => pretty(&json!(r)),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for row in &r.rows {
                        w.serialize(row).map_err(|e| Failure::Usage(e.to_string()))?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?)
                        .expect("ascii output")
                }
            };
            emit(&graph.out, &text)
        }
        Command::Preset {
            name,
            config,
            overrides,
            seed,
            trials,
            n,
            p,
            d,
            k,
            ell,
            out,
            csv,
            no_metadata,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
                    ExperimentConfig::from_text(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(name) = name {
                cfg.preset = name;
            }
            if cfg.preset.is_empty() {
                return Err(Failure::Usage("preset name required".into()));
            }
            for o in overrides {
                let (key, value) = o.split_once('=').ok_or_else(|| Failure::Usage(format!("bad override {o:?}")))?;
                cfg.set(key.trim(), value.trim()).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.trials = trials.or(cfg.trials);
            cfg.n = n.or(cfg.n);
            cfg.p = p.or(cfg.p);
            cfg.d = d.or(cfg.d);
            cfg.k = k.or(cfg.k);
            cfg.ell = ell.or(cfg.ell);
            cfg.out = out.or(cfg.out);
            cfg.csv = csv.or(cfg.csv);

            let started = Instant::now();
            let report = run_preset(&cfg).map_err(|e| match e {
                PresetError::Unknown(name) => {
                    Failure::Usage(format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")))
                }
                other => Failure::Usage(other.to_string()),
            })?;
            let metadata = (!no_metadata).then(|| {
                let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                json!({"timestamp": ts, "elapsed_seconds": started.elapsed().as_secs_f64()})
            });
            emit(&cfg.out, &report.summary_json(metadata))?;
            if let Some(path) = &cfg.csv {
                emit(&Some(path.clone()), &report.detail.to_csv())?;
            }
            for a in &report.assertions {
                eprintln!("{} {} (observed {}, bound {})", if a.pass { "PASS" } else { "FAIL" }, a.name, a.observed, a.bound);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Assertion)
            }
        }
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
