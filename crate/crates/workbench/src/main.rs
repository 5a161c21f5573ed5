use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use sha_core::graph::{gnp_random_graph, Graph};
use sha_core::instances::{brute_force_oracle, ProblemInstance, ProblemKind};
use sha_workbench::experiment::{run_experiment, WORKERS_ENV};
use sha_workbench::{fixtures, graph_io, store, summary, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sha", version, about = "Sequential Hamiltonian assembly workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write graph instances as edge-list files.
    Generate {
        #[command(subcommand)]
        what: Generate,
    },
    /// Brute-force ground truth for a graph (fixture name or file).
    Oracle {
        graph: String,
        /// `coloring:<k>` or `maxcut`.
        #[arg(long, default_value = "coloring:4")]
        problem: ProblemKind,
        /// Also list every optimal bitstring.
        #[arg(long)]
        all: bool,
    },
    /// Run an experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Parallel cells.
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Rebuild the summary tables from persisted records.
    Summarize {
        /// Experiment output directory (holding `records/`).
        dir: PathBuf,
        /// Trailing share of evaluations for the windowed metrics.
        #[arg(long, default_value_t = 0.02)]
        window: f64,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Copy the shipped benchmark graphs (edge lists plus metadata).
    Fixtures { out: PathBuf },
    /// A seeded G(n, p) graph.
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip ahead to the first connected draw.
        #[arg(long)]
        connected: bool,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct OracleSummary {
    graph: String,
    problem: ProblemKind,
    nodes: usize,
    edges: usize,
    n_qubits: usize,
    n_terms: usize,
    valid_count: u64,
    valid_ratio: f64,
    optimum_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimum_cut: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimizer_args: Option<Vec<String>>,
}

fn load_graph(spec: &str) -> Result<Graph> {
    if fixtures::names().contains(&spec) {
        return Ok(fixtures::by_name(spec)?.graph);
    }
    graph_io::read_graph(Path::new(spec))
}

fn generate(what: Generate) -> Result<()> {
    match what {
        Generate::Fixtures { out } => {
            for f in fixtures::all() {
                store::write_atomic(&out.join(format!("{}.txt", f.name)), graph_io::format_graph(&f.graph).as_bytes())?;
                store::write_json(&out.join(format!("{}.json", f.name)), &f.meta)?;
            }
            println!("wrote {} fixtures to {}", fixtures::names().len(), out.display());
        }
        Generate::Gnp { n, p, seed, connected, out } => {
            let mut s = seed;
            let g = loop {
                let g = gnp_random_graph(n, p, s)?;
                if !connected || g.is_connected() {
                    break g;
                }
                s = s.checked_add(1).context("no connected draw found")?;
            };
            let text = format!("# gnp n={n} p={p} seed={s}\n{}", graph_io::format_graph(&g));
            match out {
                Some(path) => store::write_atomic(&path, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn oracle(graph: &str, problem: ProblemKind, all: bool) -> Result<()> {
    let g = load_graph(graph)?;
    let inst = ProblemInstance::build(&g, problem)?;
    let o = brute_force_oracle(&inst)?;
    let report = OracleSummary {
        graph: graph.to_string(),
        problem,
        nodes: g.n_nodes(),
        edges: g.n_edges(),
        n_qubits: inst.n_qubits(),
        n_terms: inst.n_terms(),
        valid_count: o.valid_count,
        valid_ratio: o.valid_ratio,
        optimum_energy: o.optimum_energy,
        optimum_cut: o.optimum_cut(),
        optimizer_args: all.then(|| o.optimizer_args.iter().map(ToString::to_string).collect()),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run(config: &Path, output: Option<PathBuf>, workers: Option<usize>) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(o) = output {
        cfg.output_dir = o;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    let outcome = run_experiment(&cfg)?;
    println!(
        "{} run(s) completed, {} failed; results in {}",
        outcome.records.len(),
        outcome.failures.len(),
        cfg.output_dir.display()
    );
    for f in &outcome.failures {
        eprintln!("failed: {} {} {:?} seed {}: {}", f.instance, f.method, f.ansatz, f.seed, f.error);
    }
    Ok(outcome.all_completed())
}

fn summarize(dir: &Path, window: f64) -> Result<()> {
    let records = store::load_records(&dir.join(store::RECORDS_DIR))?;
    let files = summary::write_all(&records, window, dir)?;
    let rows = summary::rows(&records, window)?;
    println!("{:<24} {:>5} {:>10} {:>10} {:>10} {:>10}", "method", "runs", "acc mean", "acc med", "iters", "gap");
    for m in summary::by_method(&rows) {
        let gap = m.mean_energy_gap.map_or("-".to_string(), |g| format!("{g:.3}"));
        println!(
            "{:<24} {:>5} {:>10.4} {:>10.4} {:>10.1} {:>10}",
            m.method, m.runs, m.mean_final_accuracy, m.median_final_accuracy, m.mean_total_iterations, gap
        );
    }
    println!("wrote {} file(s) to {}", files.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { what } => generate(what).map(|_| true),
        Command::Oracle { graph, problem, all } => oracle(&graph, problem, all).map(|_| true),
        Command::Run { config, output, workers } => run(&config, output, workers),
        Command::Summarize { dir, window } => summarize(&dir, window).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
