//! Command-line front end: dataset generation, decomposition, compilation,
//! simulation, method comparison, and report aggregation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qwalk::bench::{self, run_sweep, BenchInput, Method, SweepGrid};
use qwalk::commuting::{local_block_perm, modular_times3_perm, pauli_witness_check, relabel_graph};
use qwalk::compile::{compile_matching_trotter, TrotterPlan};
use qwalk::graph::{DatasetSpec, LabeledGraph};
use qwalk::linalg::{exact_evolution, spectral_norm_diff};
use qwalk::matching::{compress_matching, compressed_matching_to_json, greedy_matching_decompose};
use qwalk::pauli::{compile_pauli_trotter, pauli_decompose};
use qwalk::peephole::peephole_optimize;
use qwalk::synth::lower_circuit;
use qwalk::{Error, GateCircuit, Result};

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Quantum-walk circuit compiler and benchmark lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reproducible graph dataset plus a manifest.
    Generate(GenerateArgs),
    /// Decompose a graph into compressed matchings.
    Decompose(DecomposeArgs),
    /// Compile a graph to a gate circuit with one method.
    Compile(CompileArgs),
    /// Compile and measure the spectral-norm error against the exact walk.
    Simulate(SimulateArgs),
    /// Sweep graphs x methods x (t, steps) grids into benchmark records.
    Compare(CompareArgs),
    /// Aggregate a record CSV into plot-ready tables.
    Report(ReportArgs),
    /// Contrast the structural commutation verdict with Pauli witnesses.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Dataset kind: connected-path, erdos-renyi, or hypercube.
    #[arg(long)]
    dataset: String,
    /// Number of vertices (a power of two).
    #[arg(long)]
    vertices: u64,
    /// Edge probability, erdos-renyi only.
    #[arg(long)]
    prob: Option<f64>,
    /// How many graphs to generate.
    #[arg(long)]
    count: usize,
    /// Master seed for the whole dataset.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Graph file (JSON or edge-list text).
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Graph file (JSON or edge-list text).
    #[arg(long)]
    input: PathBuf,
    /// Compilation method: matching or pauli.
    #[arg(long)]
    method: Method,
    /// Evolution time.
    #[arg(long)]
    t: f64,
    /// Trotter step count.
    #[arg(long)]
    steps: usize,
    /// Circuit JSON output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a plain-text gate dump here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Graph file (JSON or edge-list text).
    #[arg(long)]
    input: PathBuf,
    /// Compilation method: matching or pauli.
    #[arg(long)]
    method: Method,
    /// Evolution time.
    #[arg(long)]
    t: f64,
    /// Trotter step count.
    #[arg(long)]
    steps: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Dataset directory produced by `qwalk generate`.
    #[arg(long)]
    input: PathBuf,
    /// Evolution times (repeatable).
    #[arg(long = "t", required = true)]
    t: Vec<f64>,
    /// Trotter step counts (repeatable).
    #[arg(long, required = true)]
    steps: Vec<usize>,
    /// Methods to run (repeatable); defaults to both.
    #[arg(long)]
    method: Vec<Method>,
    /// Rerun the matching heuristic this many times per cell with a
    /// shuffled multi-bit scan order; reruns get a /r<k> id suffix.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Record output file; stdout when omitted. A summary table lands
    /// next to it with a .summary suffix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct ReportArgs {
    /// Record CSV produced by `qwalk compare`.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for the aggregated tables.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WitnessArgs {
    /// Graph file (JSON or edge-list text).
    #[arg(long)]
    input: PathBuf,
    /// Relabel the graph first and hand the permutation to the checker:
    /// "times3" or "block:<i>".
    #[arg(long)]
    relabel: Option<String>,
    /// Identifier stamped into the report; defaults to the file stem.
    #[arg(long)]
    graph_id: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Dataset directory index: everything needed to reproduce or reload it.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    spec: DatasetSpec,
    files: Vec<String>,
    graph_ids: Vec<String>,
    seeds: Vec<u64>,
    mean_edges: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } | Error::Parse(_) => 2,
                Error::QubitBudget { .. } | Error::NotSymmetric => 3,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Report(args) => cmd_report(args),
        Command::Witness(args) => cmd_witness(args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        LabeledGraph::from_json_str(&text)
    } else {
        LabeledGraph::from_edge_list_str(&text)
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = DatasetSpec {
        kind: args.dataset.parse()?,
        num_vertices: args.vertices,
        edge_probability: args.prob,
        seed: args.seed,
        count: args.count,
    };
    spec.validate()?;
    let graphs = spec.generate()?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let mut files = Vec::with_capacity(graphs.len());
    let mut total_edges = 0usize;
    for (i, g) in graphs.iter().enumerate() {
        let name = format!("graph_{i:03}.json");
        write_file(&args.out.join(&name), &g.to_json_string())?;
        total_edges += g.num_edges();
        files.push(name);
    }
    let manifest = Manifest {
        graph_ids: (0..graphs.len()).map(|i| spec.graph_id(i)).collect(),
        seeds: spec.graph_seeds(),
        mean_edges: total_edges as f64 / graphs.len().max(1) as f64,
        files,
        spec,
    };
    write_file(&args.out.join("manifest.json"), &pretty(&manifest))?;
    println!(
        "wrote {} graphs to {} (mean edges {:.3})",
        graphs.len(),
        args.out.display(),
        manifest.mean_edges
    );
    Ok(())
}

fn cmd_decompose(args: DecomposeArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let matchings = greedy_matching_decompose(&graph);
    let compressed: Vec<serde_json::Value> = matchings
        .iter()
        .map(|m| {
            let json = compressed_matching_to_json(&compress_matching(m));
            serde_json::from_str(&json).expect("compressed matching serializes")
        })
        .collect();
    let doc = serde_json::json!({
        "num_qubits": graph.num_qubits(),
        "num_edges": graph.num_edges(),
        "matchings": compressed,
    });
    emit(args.out.as_deref(), &pretty(&doc))?;
    eprintln!(
        "{} edges split into {} matchings",
        graph.num_edges(),
        matchings.len()
    );
    Ok(())
}

/// Shared compile pipeline: Trotterize, lower multicontrolled gates, peephole.
fn build_circuit(graph: &LabeledGraph, method: Method, plan: &TrotterPlan) -> Result<(GateCircuit, usize)> {
    let (raw, terms) = match method {
        Method::Matching => {
            let matchings = greedy_matching_decompose(graph);
            let count = matchings.len();
            (compile_matching_trotter(graph, plan)?, count)
        }
        Method::Pauli => {
            let terms = pauli_decompose(&graph.adjacency_matrix()?)?;
            let count = terms.len();
            let circuit = if terms.is_empty() {
                GateCircuit::empty(graph.num_qubits())
            } else {
                compile_pauli_trotter(&terms, plan)?
            };
            (circuit, count)
        }
    };
    Ok((peephole_optimize(&lower_circuit(&raw)?), terms))
}

fn cmd_compile(args: CompileArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let plan = TrotterPlan::new(args.t, args.steps)?;
    let (circuit, num_terms) = build_circuit(&graph, args.method, &plan)?;

    emit(args.out.as_deref(), &circuit.to_json_string())?;
    if let Some(dump) = &args.dump {
        write_file(dump, &circuit.to_text_dump())?;
    }
    if let Some(out) = &args.out {
        let mut meta = serde_json::json!({
            "method": args.method,
            "t": args.t,
            "trotter_steps": args.steps,
            "cx_count": circuit.cx_count()?,
            "depth": circuit.depth(),
        });
        let key = match args.method {
            Method::Matching => "num_matchings",
            Method::Pauli => "num_terms",
        };
        meta.as_object_mut().expect("meta is an object").insert(key.into(), num_terms.into());
        write_file(&out.with_extension("meta.json"), &pretty(&meta))?;
    }
    eprintln!(
        "{} gates, {} cx, depth {}",
        circuit.len(),
        circuit.cx_count()?,
        circuit.depth()
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let plan = TrotterPlan::new(args.t, args.steps)?;
    let (circuit, _) = build_circuit(&graph, args.method, &plan)?;
    let exact = exact_evolution(&graph.adjacency_matrix()?, args.t)?;
    let error = spectral_norm_diff(&circuit.unitary()?, &exact)?;
    let doc = serde_json::json!({
        "method": args.method,
        "t": args.t,
        "trotter_steps": args.steps,
        "num_qubits": graph.num_qubits(),
        "cx_count": circuit.cx_count()?,
        "depth": circuit.depth(),
        "error_2norm": error,
    });
    emit(args.out.as_deref(), &pretty(&doc))
}

fn load_dataset(dir: &Path) -> Result<(Manifest, Vec<BenchInput>)> {
    let manifest_path = dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&read_file(&manifest_path)?)
        .map_err(|e| Error::parse(format!("{}: {e}", manifest_path.display())))?;
    if manifest.files.len() != manifest.graph_ids.len()
        || manifest.files.len() != manifest.seeds.len()
    {
        return Err(Error::parse(format!(
            "{}: files, graph_ids, and seeds disagree in length",
            manifest_path.display()
        )));
    }
    let dataset = manifest.spec.kind.to_string();
    let mut inputs = Vec::with_capacity(manifest.files.len());
    for ((file, id), seed) in manifest
        .files
        .iter()
        .zip(&manifest.graph_ids)
        .zip(&manifest.seeds)
    {
        inputs.push(BenchInput {
            graph_id: id.clone(),
            dataset: dataset.clone(),
            seed: *seed,
            graph: load_graph(&dir.join(file))?,
        });
    }
    Ok((manifest, inputs))
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let (_, inputs) = load_dataset(&args.input)?;
    let methods = if args.method.is_empty() {
        vec![Method::Matching, Method::Pauli]
    } else {
        args.method.clone()
    };
    let grid = SweepGrid {
        t_values: args.t.clone(),
        step_values: args.steps.clone(),
        methods,
        repeat: args.repeat,
    };
    let records = run_sweep(&inputs, &grid)?;
    let summary = bench::summarize(&records);

    match args.format {
        OutputFormat::Csv => {
            emit(args.out.as_deref(), &bench::records_to_csv(&records)?)?;
            if let Some(out) = &args.out {
                write_file(&summary_path(out, "csv"), &bench::summary_to_csv(&summary))?;
            }
        }
        OutputFormat::Json => {
            emit(args.out.as_deref(), &pretty(&records))?;
            if let Some(out) = &args.out {
                write_file(&summary_path(out, "json"), &pretty(&summary))?;
            }
        }
    }
    eprintln!("{} records over {} graphs", records.len(), inputs.len());
    Ok(())
}

fn summary_path(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(format!("summary.{ext}"))
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let records = bench::records_from_csv(&read_file(&args.input)?)?;
    if records.is_empty() {
        eprintln!("warning: no records in {}; emitting empty tables", args.input.display());
    }
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    write_file(&args.out.join("convergence.csv"), &bench::convergence_table(&records))?;
    write_file(&args.out.join("gate_counts.csv"), &bench::gate_count_table(&records))?;
    println!("wrote convergence.csv and gate_counts.csv to {}", args.out.display());
    Ok(())
}

fn cmd_witness(args: WitnessArgs) -> Result<()> {
    let input = load_graph(&args.input)?;
    let graph_id = args.graph_id.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".to_string())
    });

    let report = match args.relabel.as_deref() {
        None => pauli_witness_check(&input, None, graph_id)?,
        Some(spec) => {
            let perm = if spec == "times3" {
                modular_times3_perm(input.num_qubits())?
            } else if let Some(pos) = spec.strip_prefix("block:") {
                let pos: usize = pos
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad block position {pos:?}")))?;
                local_block_perm(input.num_qubits(), pos)?
            } else {
                return Err(Error::invalid(format!(
                    "unknown relabeling {spec:?}; use times3 or block:<i>"
                )));
            };
            let relabeled = relabel_graph(&input, &perm)?;
            pauli_witness_check(&relabeled, Some(&perm), graph_id)?
        }
    };
    emit(args.out.as_deref(), &pretty(&report))
}
