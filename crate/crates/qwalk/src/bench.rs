//! Benchmark plumbing: per-cell compilation records, reproducible sweeps,
//! versioned CSV artifacts, and the aggregations behind the plot data.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compile::{trotter_from_matchings, TrotterPlan};
use crate::graph::LabeledGraph;
use crate::linalg::{exact_evolution, spectral_norm_diff};
use crate::matching::{greedy_matching_decompose, greedy_matching_decompose_seeded};
use crate::pauli::{compile_pauli_trotter, pauli_decompose};
use crate::peephole::peephole_optimize;
use crate::synth::lower_circuit;
use crate::{Error, Result, MAX_DENSE_QUBITS};

pub const RECORD_CSV_HEADER: &str = "# qwalk-bench-csv v1";
pub const SUMMARY_CSV_HEADER: &str = "# qwalk-bench-summary-csv v1";
pub const CONVERGENCE_CSV_HEADER: &str = "# qwalk-report-convergence-csv v1";
pub const GATECOUNT_CSV_HEADER: &str = "# qwalk-report-gatecounts-csv v1";

const RECORD_COLUMNS: &str =
    "graph_id,dataset,num_vertices,method,t,trotter_steps,cx_count,depth,error_2norm,seed,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Matching,
    Pauli,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Matching => write!(f, "matching"),
            Method::Pauli => write!(f, "pauli"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(Method::Matching),
            "pauli" => Ok(Method::Pauli),
            other => Err(Error::parse(format!("unknown method {other:?}"))),
        }
    }
}

/// One compiled (graph, method, t, N) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub graph_id: String,
    pub dataset: String,
    pub num_vertices: u64,
    pub method: Method,
    pub t: f64,
    pub trotter_steps: usize,
    pub cx_count: usize,
    pub depth: usize,
    pub error_2norm: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: u64,
}

/// Compiles one cell through the full pipeline (decompose or Pauli-expand,
/// Trotterize, lower multicontrolled gates, peephole) and measures the
/// result. The spectral-norm error is computed whenever the operator fits
/// the dense simulator. A scan seed shuffles the matching heuristic's
/// multi-bit edge order; Pauli cells ignore it.
pub fn bench_cell(
    input: &BenchInput,
    method: Method,
    t: f64,
    steps: usize,
    scan_seed: Option<u64>,
) -> Result<BenchRecord> {
    let started = Instant::now();
    let graph = &input.graph;
    let plan = TrotterPlan::new(t, steps)?;
    let raw = match method {
        Method::Matching => {
            let matchings = match scan_seed {
                Some(s) => greedy_matching_decompose_seeded(graph, s),
                None => greedy_matching_decompose(graph),
            };
            trotter_from_matchings(graph.num_qubits(), &matchings, &plan)?
        }
        Method::Pauli => {
            let terms = pauli_decompose(&graph.adjacency_matrix()?)?;
            if terms.is_empty() {
                crate::circuit::GateCircuit::empty(graph.num_qubits())
            } else {
                compile_pauli_trotter(&terms, &plan)?
            }
        }
    };
    let optimized = peephole_optimize(&lower_circuit(&raw)?);
    let error_2norm = if graph.num_qubits() <= MAX_DENSE_QUBITS {
        let exact = exact_evolution(&graph.adjacency_matrix()?, t)?;
        Some(spectral_norm_diff(&optimized.unitary()?, &exact)?)
    } else {
        None
    };
    Ok(BenchRecord {
        graph_id: input.graph_id.clone(),
        dataset: input.dataset.clone(),
        num_vertices: graph.num_vertices(),
        method,
        t,
        trotter_steps: steps,
        cx_count: optimized.cx_count()?,
        depth: optimized.depth(),
        error_2norm,
        seed: input.seed,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

/// One graph entering a sweep.
#[derive(Debug, Clone)]
pub struct BenchInput {
    pub graph_id: String,
    pub dataset: String,
    pub seed: u64,
    pub graph: LabeledGraph,
}

/// Cell grid for a sweep. `repeat` > 1 reruns the matching method with a
/// shuffled multi-bit scan order; repeat runs carry a `/r<k>` id suffix.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub t_values: Vec<f64>,
    pub step_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub repeat: usize,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() || self.step_values.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("sweep grid needs t values, step counts, and methods"));
        }
        if self.repeat == 0 {
            return Err(Error::invalid("repeat count must be at least one"));
        }
        Ok(())
    }
}

fn repeat_scan_seed(seed: u64, run: usize) -> u64 {
    seed ^ (run as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs every cell of the grid over every input, sorted by
/// (graph_id, method, t, steps) for stable artifacts.
pub fn run_sweep(inputs: &[BenchInput], grid: &SweepGrid) -> Result<Vec<BenchRecord>> {
    grid.validate()?;
    let mut records = Vec::new();
    for input in inputs {
        for method in &grid.methods {
            for &t in &grid.t_values {
                for &steps in &grid.step_values {
                    let runs = if *method == Method::Matching { grid.repeat } else { 1 };
                    for run in 0..runs {
                        if run == 0 {
                            records.push(bench_cell(input, *method, t, steps, None)?);
                            continue;
                        }
                        let rerun = BenchInput {
                            graph_id: format!("{}/r{run}", input.graph_id),
                            ..input.clone()
                        };
                        let scan = Some(repeat_scan_seed(input.seed, run));
                        records.push(bench_cell(&rerun, *method, t, steps, scan)?);
                    }
                }
            }
        }
    }
    sort_records(&mut records);
    Ok(records)
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| {
        a.graph_id
            .cmp(&b.graph_id)
            .then_with(|| a.method.cmp(&b.method))
            .then_with(|| a.t.total_cmp(&b.t))
            .then_with(|| a.trotter_steps.cmp(&b.trotter_steps))
    });
}

fn check_field(name: &str, value: &str) -> Result<()> {
    if value.contains(',') || value.contains('\n') {
        return Err(Error::invalid(format!("{name} {value:?} cannot contain commas or newlines")));
    }
    Ok(())
}

pub fn records_to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut out = format!("{RECORD_CSV_HEADER}\n{RECORD_COLUMNS}\n");
    for r in records {
        check_field("graph_id", &r.graph_id)?;
        check_field("dataset", &r.dataset)?;
        let error = r.error_2norm.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.graph_id,
            r.dataset,
            r.num_vertices,
            r.method,
            r.t,
            r.trotter_steps,
            r.cx_count,
            r.depth,
            error,
            r.seed,
            r.wall_time_ms,
        ));
    }
    Ok(out)
}

fn parse_cell<T: FromStr>(line_no: usize, name: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::parse(format!("line {line_no}: bad {name} {value:?}: {e}")))
}

pub fn records_from_csv(s: &str) -> Result<Vec<BenchRecord>> {
    let mut lines = s.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse("line 1: missing header"))?;
    if header.trim() != RECORD_CSV_HEADER {
        return Err(Error::parse(format!(
            "line 1: expected {RECORD_CSV_HEADER:?}, found {header:?}"
        )));
    }
    let (_, columns) = lines
        .next()
        .ok_or_else(|| Error::parse("line 2: missing column row"))?;
    if columns.trim() != RECORD_COLUMNS {
        return Err(Error::parse(format!("line 2: unexpected columns {columns:?}")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::parse(format!(
                "line {line_no}: expected 11 fields, found {}",
                fields.len()
            )));
        }
        let error_2norm = if fields[8].is_empty() {
            None
        } else {
            Some(parse_cell(line_no, "error_2norm", fields[8])?)
        };
        records.push(BenchRecord {
            graph_id: fields[0].to_string(),
            dataset: fields[1].to_string(),
            num_vertices: parse_cell(line_no, "num_vertices", fields[2])?,
            method: parse_cell(line_no, "method", fields[3])?,
            t: parse_cell(line_no, "t", fields[4])?,
            trotter_steps: parse_cell(line_no, "trotter_steps", fields[5])?,
            cx_count: parse_cell(line_no, "cx_count", fields[6])?,
            depth: parse_cell(line_no, "depth", fields[7])?,
            error_2norm,
            seed: parse_cell(line_no, "seed", fields[9])?,
            wall_time_ms: parse_cell(line_no, "wall_time_ms", fields[10])?,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        Some(Stats { count, mean, std: var.sqrt() })
    }

    /// Coefficient of variation, defined for positive means.
    pub fn cv(&self) -> Option<f64> {
        (self.mean > 0.0).then(|| self.std / self.mean)
    }
}

/// Per-cell aggregate over all graphs sharing (dataset, size, method, t, N).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub num_vertices: u64,
    pub method: Method,
    pub t: f64,
    pub trotter_steps: usize,
    pub count: usize,
    pub error: Option<Stats>,
    pub cx: Stats,
    pub depth: Stats,
}

pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.dataset, a.num_vertices, a.method, a.trotter_steps)
            .cmp(&(&b.dataset, b.num_vertices, b.method, b.trotter_steps))
            .then_with(|| a.t.total_cmp(&b.t))
    });
    let mut rows = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let key = sorted[i];
        let mut j = i;
        while j < sorted.len()
            && sorted[j].dataset == key.dataset
            && sorted[j].num_vertices == key.num_vertices
            && sorted[j].method == key.method
            && sorted[j].t == key.t
            && sorted[j].trotter_steps == key.trotter_steps
        {
            j += 1;
        }
        let cell = &sorted[i..j];
        let errors: Vec<f64> = cell.iter().filter_map(|r| r.error_2norm).collect();
        let cx: Vec<f64> = cell.iter().map(|r| r.cx_count as f64).collect();
        let depth: Vec<f64> = cell.iter().map(|r| r.depth as f64).collect();
        rows.push(SummaryRow {
            dataset: key.dataset.clone(),
            num_vertices: key.num_vertices,
            method: key.method,
            t: key.t,
            trotter_steps: key.trotter_steps,
            count: cell.len(),
            error: Stats::of(&errors),
            cx: Stats::of(&cx).expect("cell is nonempty"),
            depth: Stats::of(&depth).expect("cell is nonempty"),
        });
        i = j;
    }
    rows
}

fn opt_str(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{SUMMARY_CSV_HEADER}\ndataset,num_vertices,method,t,trotter_steps,count,\
         error_mean,error_std,error_cv,cx_mean,cx_std,cx_cv,depth_mean,depth_std,depth_cv\n"
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.dataset,
            r.num_vertices,
            r.method,
            r.t,
            r.trotter_steps,
            r.count,
            opt_str(r.error.map(|s| s.mean)),
            opt_str(r.error.map(|s| s.std)),
            opt_str(r.error.and_then(|s| s.cv())),
            r.cx.mean,
            r.cx.std,
            opt_str(r.cx.cv()),
            r.depth.mean,
            r.depth.std,
            opt_str(r.depth.cv()),
        ));
    }
    out
}

/// Error-vs-steps table: one row per (method, t, N), for convergence plots.
pub fn convergence_table(records: &[BenchRecord]) -> String {
    let mut keys: Vec<(Method, f64, usize)> = Vec::new();
    for r in records {
        if r.error_2norm.is_some() && !keys.iter().any(|k| k.0 == r.method && k.1 == r.t && k.2 == r.trotter_steps) {
            keys.push((r.method, r.t, r.trotter_steps));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = format!("{CONVERGENCE_CSV_HEADER}\nmethod,t,trotter_steps,error_mean,error_std\n");
    for (method, t, steps) in keys {
        let errors: Vec<f64> = records
            .iter()
            .filter(|r| r.method == method && r.t == t && r.trotter_steps == steps)
            .filter_map(|r| r.error_2norm)
            .collect();
        let stats = Stats::of(&errors).expect("key came from a record with an error");
        out.push_str(&format!("{method},{t},{steps},{},{}\n", stats.mean, stats.std));
    }
    out
}

/// Cost-vs-size table: one row per (method, num_vertices).
pub fn gate_count_table(records: &[BenchRecord]) -> String {
    let mut keys: Vec<(Method, u64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|k| k.0 == r.method && k.1 == r.num_vertices) {
            keys.push((r.method, r.num_vertices));
        }
    }
    keys.sort();
    let mut out = format!(
        "{GATECOUNT_CSV_HEADER}\nmethod,num_vertices,cx_mean,cx_std,depth_mean,depth_std\n"
    );
    for (method, size) in keys {
        let pick: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.method == method && r.num_vertices == size)
            .collect();
        let cx: Vec<f64> = pick.iter().map(|r| r.cx_count as f64).collect();
        let depth: Vec<f64> = pick.iter().map(|r| r.depth as f64).collect();
        let cx = Stats::of(&cx).expect("nonempty by construction");
        let depth = Stats::of(&depth).expect("nonempty by construction");
        out.push_str(&format!(
            "{method},{size},{},{},{},{}\n",
            cx.mean, cx.std, depth.mean, depth.std
        ));
    }
    out
}
