//! Bitstring-labeled graphs, Hamming utilities, and the dataset generators
//! behind the benchmark suite.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{DenseOperator, C64};
use crate::{Error, Result};

/// Generators refuse specs above this, independent of the dense-matrix cap;
/// compilation of larger externally supplied graphs is still allowed.
pub const MAX_DATASET_VERTICES: u64 = 4096;

const MAX_QUBITS: usize = 63;

/// Fixed-width bit vector. Bit i is the i-th least significant bit; the
/// textual form writes bit width-1 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    value: u64,
    width: usize,
}

impl Bitstring {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::invalid(format!("bit width {width} out of range 1..=64")));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::invalid(format!("value {value} does not fit in {width} bits")));
        }
        Ok(Bitstring { value, width })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.width && (self.value >> i) & 1 == 1
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::parse("empty bitstring"));
        }
        if s.len() > 64 {
            return Err(Error::parse(format!("bitstring '{s}' longer than 64 bits")));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::parse(format!("bad character '{c}' in bitstring"))),
                };
        }
        Ok(Bitstring { value, width: s.len() })
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            write!(f, "{}", (self.value >> i) & 1)?;
        }
        Ok(())
    }
}

/// Number of positions at which two equal-width bitstrings differ.
pub fn hamming_distance(u: &Bitstring, v: &Bitstring) -> Result<u32> {
    if u.width != v.width {
        return Err(Error::WidthMismatch(u.width, v.width));
    }
    Ok(hamming(u.value, v.value))
}

pub(crate) fn hamming(u: u64, v: u64) -> u32 {
    (u ^ v).count_ones()
}

/// Simple undirected graph on the 2^n vertex labels {0,1}^n. Edges are kept
/// smaller-label-first and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    num_qubits: usize,
    edges: Vec<(u64, u64)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    num_qubits: usize,
    edges: Vec<(u64, u64)>,
}

impl LabeledGraph {
    pub fn new(num_qubits: usize, edges: Vec<(u64, u64)>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "num_qubits {num_qubits} out of range 1..={MAX_QUBITS}"
            )));
        }
        let cap = 1u64 << num_qubits;
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= cap || v >= cap {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has a label outside {num_qubits} bits"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            canon.push(if u < v { (u, v) } else { (v, u) });
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(LabeledGraph { num_qubits, edges: canon })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_vertices(&self) -> u64 {
        1u64 << self.num_qubits
    }

    pub fn edges(&self) -> &[(u64, u64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg: HashMap<u64, usize> = HashMap::new();
        for &(u, v) in &self.edges {
            *deg.entry(u).or_insert(0) += 1;
            *deg.entry(v).or_insert(0) += 1;
        }
        deg.values().copied().max().unwrap_or(0)
    }

    pub fn adjacency_matrix(&self) -> Result<DenseOperator> {
        let mut a = DenseOperator::zeros(self.num_qubits)?;
        for &(u, v) in &self.edges {
            a.set(u as usize, v as usize, C64::new(1.0, 0.0));
            a.set(v as usize, u as usize, C64::new(1.0, 0.0));
        }
        Ok(a)
    }

    /// Breadth-first search over all 2^n labels; isolated labels count as
    /// disconnected components.
    pub fn is_connected(&self) -> Result<bool> {
        if self.num_qubits > 24 {
            return Err(Error::invalid("connectivity check capped at 2^24 vertices"));
        }
        let total = self.num_vertices();
        let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut seen = HashSet::from([0u64]);
        let mut queue = VecDeque::from([0u64]);
        while let Some(u) = queue.pop_front() {
            for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        Ok(seen.len() as u64 == total)
    }

    pub fn to_json_string(&self) -> String {
        let doc = GraphJson { num_qubits: self.num_qubits, edges: self.edges.clone() };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        LabeledGraph::new(doc.num_qubits, doc.edges)
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = format!("#qubits {}\n", self.num_qubits);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_edge_list_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::parse("empty edge list"))?;
        let num_qubits = header
            .strip_prefix("#qubits")
            .map(str::trim)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(format!("expected '#qubits n' header, got '{header}'")))?;
        let mut edges = Vec::new();
        for line in lines {
            if line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (
                    a.parse::<u64>().map_err(|e| Error::parse(e.to_string()))?,
                    b.parse::<u64>().map_err(|e| Error::parse(e.to_string()))?,
                ),
                _ => return Err(Error::parse(format!("expected 'u v', got '{line}'"))),
            };
            edges.push((u, v));
        }
        LabeledGraph::new(num_qubits, edges)
    }
}

/// Numeric-order path 0 -> 1 -> ... -> 2^n - 1.
pub fn gen_numeric_path(num_qubits: usize) -> Result<LabeledGraph> {
    if num_qubits == 0 {
        return Err(Error::invalid("path needs at least one qubit"));
    }
    let n_vertices = 1u64 << num_qubits;
    LabeledGraph::new(num_qubits, (0..n_vertices - 1).map(|i| (i, i + 1)).collect())
}

/// Hypercube Q_n: an edge wherever two labels differ in exactly one bit.
pub fn gen_hypercube(num_qubits: usize) -> Result<LabeledGraph> {
    if num_qubits == 0 {
        return Err(Error::invalid("hypercube needs at least one qubit"));
    }
    if num_qubits > 12 {
        return Err(Error::invalid("hypercube generator capped at 12 qubits"));
    }
    let n_vertices = 1u64 << num_qubits;
    let mut edges = Vec::new();
    for u in 0..n_vertices {
        for b in 0..num_qubits {
            let v = u ^ (1u64 << b);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::new(num_qubits, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    ConnectedPath,
    ErdosRenyi,
    Hypercube,
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetKind::ConnectedPath => "connected-path",
            DatasetKind::ErdosRenyi => "erdos-renyi",
            DatasetKind::Hypercube => "hypercube",
        })
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "connected-path" => Ok(DatasetKind::ConnectedPath),
            "erdos-renyi" => Ok(DatasetKind::ErdosRenyi),
            "hypercube" => Ok(DatasetKind::Hypercube),
            _ => Err(Error::parse(format!(
                "unknown dataset kind '{s}' (expected connected-path, erdos-renyi, or hypercube)"
            ))),
        }
    }
}

/// Recipe for a reproducible family of graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub num_vertices: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge_probability: Option<f64>,
    pub seed: u64,
    pub count: usize,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_vertices < 2 || !self.num_vertices.is_power_of_two() {
            return Err(Error::invalid(format!(
                "num_vertices {} is not a power of two >= 2",
                self.num_vertices
            )));
        }
        if self.num_vertices > MAX_DATASET_VERTICES {
            return Err(Error::invalid(format!(
                "num_vertices {} exceeds the generator cap of {MAX_DATASET_VERTICES}",
                self.num_vertices
            )));
        }
        match (self.kind, self.edge_probability) {
            (DatasetKind::ErdosRenyi, Some(p)) if (0.0..=1.0).contains(&p) => Ok(()),
            (DatasetKind::ErdosRenyi, Some(p)) => {
                Err(Error::invalid(format!("edge probability {p} outside [0, 1]")))
            }
            (DatasetKind::ErdosRenyi, None) => {
                Err(Error::invalid("erdos-renyi requires an edge probability"))
            }
            (_, Some(_)) => {
                Err(Error::invalid(format!("edge probability does not apply to {}", self.kind)))
            }
            (_, None) => Ok(()),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_vertices.trailing_zeros() as usize
    }

    /// One independent seed per graph, drawn from a master stream so the
    /// whole dataset is a pure function of `seed`.
    pub fn graph_seeds(&self) -> Vec<u64> {
        let mut master = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count).map(|_| master.next_u64()).collect()
    }

    pub fn graph_id(&self, index: usize) -> String {
        format!("{}-v{}-s{}-g{index:03}", self.kind, self.num_vertices, self.seed)
    }

    pub fn generate(&self) -> Result<Vec<LabeledGraph>> {
        self.validate()?;
        match self.kind {
            DatasetKind::ConnectedPath => gen_connected_path(self),
            DatasetKind::ErdosRenyi => gen_erdos_renyi(self),
            DatasetKind::Hypercube => {
                let g = gen_hypercube(self.num_qubits())?;
                Ok(vec![g; self.count])
            }
        }
    }
}

/// G(N, p) over the 2^n labels: every unordered pair tossed independently.
pub fn gen_erdos_renyi(spec: &DatasetSpec) -> Result<Vec<LabeledGraph>> {
    spec.validate()?;
    if spec.kind != DatasetKind::ErdosRenyi {
        return Err(Error::invalid(format!("expected erdos-renyi spec, got {}", spec.kind)));
    }
    let p = spec.edge_probability.expect("validated");
    let n = spec.num_qubits();
    let n_vertices = spec.num_vertices;
    spec.graph_seeds()
        .iter()
        .map(|&gs| {
            let mut rng = ChaCha8Rng::seed_from_u64(gs);
            let mut edges = Vec::new();
            for u in 0..n_vertices {
                for v in u + 1..n_vertices {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            LabeledGraph::new(n, edges)
        })
        .collect()
}

/// Numeric-order path backbone plus 1 + Binomial(2, 0.4) random chords, so
/// the 8-vertex family averages about 8.8 edges. Connectivity comes from the
/// backbone; chords are rejection-sampled to stay off it.
pub fn gen_connected_path(spec: &DatasetSpec) -> Result<Vec<LabeledGraph>> {
    spec.validate()?;
    if spec.kind != DatasetKind::ConnectedPath {
        return Err(Error::invalid(format!("expected connected-path spec, got {}", spec.kind)));
    }
    let n = spec.num_qubits();
    let n_vertices = spec.num_vertices;
    let non_path_pairs = n_vertices * (n_vertices - 1) / 2 - (n_vertices - 1);
    spec.graph_seeds()
        .iter()
        .map(|&gs| {
            let mut rng = ChaCha8Rng::seed_from_u64(gs);
            let mut edges: Vec<(u64, u64)> = (0..n_vertices - 1).map(|i| (i, i + 1)).collect();
            let mut extra = 1u64;
            for _ in 0..2 {
                if rng.gen_bool(0.4) {
                    extra += 1;
                }
            }
            extra = extra.min(non_path_pairs);
            let mut chords = HashSet::new();
            while (chords.len() as u64) < extra {
                let u = rng.gen_range(0..n_vertices);
                let v = rng.gen_range(0..n_vertices);
                if u == v {
                    continue;
                }
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                if b == a + 1 || !chords.insert((a, b)) {
                    continue;
                }
                edges.push((a, b));
            }
            LabeledGraph::new(n, edges)
        })
        .collect()
}
