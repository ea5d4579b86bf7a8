//! Structural commutation tests for matchings, vertex relabelings, and the
//! witness report contrasting both for a given graph.
//!
//! Two matchings commute exactly when every component of their union is an
//! isolated vertex, a single edge, or a 4-cycle. Relabeling vertices
//! preserves that structure, which is how hypercube walks turn into graphs
//! with commuting matchings but anti-commuting Pauli terms.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{hamming, LabeledGraph};
use crate::linalg::DenseOperator;
use crate::matching::Matching;
use crate::pauli::{pauli_decompose, PauliTerm};
use crate::{Error, Result};

/// Union classification walks every label, so keep the space dense-sized.
const MAX_CLASSIFY_QUBITS: usize = 12;
/// Permutations store their full value table.
const MAX_PERM_QUBITS: usize = 20;
/// Witness checks decompose the adjacency operator term by term.
const MAX_WITNESS_QUBITS: usize = 6;

/// Shape of one connected component in a union of two matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    K1,
    K2,
    C4,
    /// Open path with this many edges.
    Path(usize),
    /// Even cycle with this many edges, longer than four.
    Cycle(usize),
}

impl ComponentKind {
    pub fn commutes(self) -> bool {
        matches!(self, ComponentKind::K1 | ComponentKind::K2 | ComponentKind::C4)
    }
}

impl std::fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentKind::K1 => write!(f, "K1"),
            ComponentKind::K2 => write!(f, "K2"),
            ComponentKind::C4 => write!(f, "C4"),
            ComponentKind::Path(len) => write!(f, "PATH({len})"),
            ComponentKind::Cycle(len) => write!(f, "CYCLE({len})"),
        }
    }
}

/// Component census of the union of two matchings, vertices partitioned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionStructure {
    components: Vec<(ComponentKind, Vec<u64>)>,
}

impl UnionStructure {
    pub fn components(&self) -> &[(ComponentKind, Vec<u64>)] {
        &self.components
    }

    pub fn kinds(&self) -> Vec<ComponentKind> {
        self.components.iter().map(|(k, _)| *k).collect()
    }

    pub fn commutes(&self) -> bool {
        self.components.iter().all(|(k, _)| k.commutes())
    }
}

/// Classifies every component of the simple union of two matchings over the
/// same label space. An edge present in both matchings is one K2.
pub fn classify_matching_union(m1: &Matching, m2: &Matching) -> Result<UnionStructure> {
    if m1.num_qubits() != m2.num_qubits() {
        return Err(Error::WidthMismatch(m1.num_qubits(), m2.num_qubits()));
    }
    let n = m1.num_qubits();
    if n > MAX_CLASSIFY_QUBITS {
        return Err(Error::QubitBudget { requested: n, cap: MAX_CLASSIFY_QUBITS });
    }

    let mut union: HashSet<(u64, u64)> = HashSet::new();
    for &(u, v) in m1.edges().iter().chain(m2.edges()) {
        union.insert((u.min(v), u.max(v)));
    }
    let mut neighbors: HashMap<u64, Vec<u64>> = HashMap::new();
    for &(u, v) in &union {
        neighbors.entry(u).or_default().push(v);
        neighbors.entry(v).or_default().push(u);
    }

    let size = 1u64 << n;
    let mut visited = vec![false; size as usize];
    let mut components = Vec::new();
    for start in 0..size {
        if visited[start as usize] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        visited[start as usize] = true;
        let mut vertices = Vec::new();
        let mut degree_sum = 0usize;
        while let Some(v) = queue.pop_front() {
            vertices.push(v);
            if let Some(adj) = neighbors.get(&v) {
                degree_sum += adj.len();
                for &w in adj {
                    if !visited[w as usize] {
                        visited[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        vertices.sort_unstable();
        let edges = degree_sum / 2;
        let kind = match (vertices.len(), edges) {
            (1, 0) => ComponentKind::K1,
            (2, 1) => ComponentKind::K2,
            (k, e) if e == k && k == 4 => ComponentKind::C4,
            (k, e) if e == k => ComponentKind::Cycle(e),
            (k, e) if e + 1 == k => ComponentKind::Path(e),
            // Matching validity caps every degree at two.
            (k, e) => unreachable!("union component with {k} vertices and {e} edges"),
        };
        components.push((kind, vertices));
    }
    Ok(UnionStructure { components })
}

/// Commutation via the path-count balance: the two edge sets commute iff
/// for every ordered label pair the number of two-step paths taking a
/// first-set edge then a second-set edge equals the reversed count.
pub fn subgraphs_commute_by_paths(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<bool> {
    if g1.num_qubits() != g2.num_qubits() {
        return Err(Error::WidthMismatch(g1.num_qubits(), g2.num_qubits()));
    }
    let neighbor_map = |g: &LabeledGraph| {
        let mut map: HashMap<u64, Vec<u64>> = HashMap::new();
        for &(u, v) in g.edges() {
            map.entry(u).or_default().push(v);
            map.entry(v).or_default().push(u);
        }
        map
    };
    let n1 = neighbor_map(g1);
    let n2 = neighbor_map(g2);

    let mut balance: HashMap<(u64, u64), i64> = HashMap::new();
    for (&u, mids) in &n1 {
        for w in mids {
            if let Some(ends) = n2.get(w) {
                for &v in ends {
                    *balance.entry((u, v)).or_insert(0) += 1;
                }
            }
        }
    }
    for (&u, mids) in &n2 {
        for w in mids {
            if let Some(ends) = n1.get(w) {
                for &v in ends {
                    *balance.entry((u, v)).or_insert(0) -= 1;
                }
            }
        }
    }
    Ok(balance.values().all(|&c| c == 0))
}

/// Bijection on the 2^n vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexPermutation {
    num_qubits: usize,
    map: Vec<u64>,
}

impl VertexPermutation {
    pub fn new(num_qubits: usize, map: Vec<u64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a permutation needs at least one qubit"));
        }
        if num_qubits > MAX_PERM_QUBITS {
            return Err(Error::QubitBudget { requested: num_qubits, cap: MAX_PERM_QUBITS });
        }
        let size = 1u64 << num_qubits;
        if map.len() as u64 != size {
            return Err(Error::invalid(format!(
                "permutation table has {} entries for {size} labels",
                map.len()
            )));
        }
        let mut seen = vec![false; size as usize];
        for &y in &map {
            if y >= size || seen[y as usize] {
                return Err(Error::invalid(format!("map is not a bijection at value {y}")));
            }
            seen[y as usize] = true;
        }
        Ok(VertexPermutation { num_qubits, map })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        let size = 1u64 << num_qubits.min(MAX_PERM_QUBITS);
        Self::new(num_qubits, (0..size).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn map(&self) -> &[u64] {
        &self.map
    }

    pub fn apply(&self, label: u64) -> u64 {
        self.map[label as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| x as u64 == y)
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0u64; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        VertexPermutation { num_qubits: self.num_qubits, map: inv }
    }

    /// Permutation unitary: column x carries a single 1 in row f(x).
    pub fn to_operator(&self) -> Result<DenseOperator> {
        let mut op = DenseOperator::zeros(self.num_qubits)?;
        for (x, &y) in self.map.iter().enumerate() {
            op.set(y as usize, x, num_complex::Complex::new(1.0, 0.0));
        }
        Ok(op)
    }
}

/// Applies a vertex permutation to every edge.
pub fn relabel_graph(g: &LabeledGraph, perm: &VertexPermutation) -> Result<LabeledGraph> {
    if g.num_qubits() != perm.num_qubits() {
        return Err(Error::WidthMismatch(g.num_qubits(), perm.num_qubits()));
    }
    let edges = g.edges().iter().map(|&(u, v)| (perm.apply(u), perm.apply(v))).collect();
    LabeledGraph::new(g.num_qubits(), edges)
}

/// Multiplication by three modulo 2^n; odd factor, hence a bijection.
pub fn modular_times3_perm(num_qubits: usize) -> Result<VertexPermutation> {
    if num_qubits == 0 || num_qubits > MAX_PERM_QUBITS {
        return VertexPermutation::new(num_qubits, Vec::new());
    }
    let size = 1u64 << num_qubits;
    let map = (0..size).map(|x| x.wrapping_mul(3) & (size - 1)).collect();
    VertexPermutation::new(num_qubits, map)
}

/// Times-three map applied to the three-bit block at `position`, identity
/// elsewhere; the induced unitary factors across the block boundary.
pub fn local_block_perm(num_qubits: usize, position: usize) -> Result<VertexPermutation> {
    if num_qubits < 3 || position + 3 > num_qubits {
        return Err(Error::invalid(format!(
            "block at position {position} does not fit in {num_qubits} qubits"
        )));
    }
    if num_qubits > MAX_PERM_QUBITS {
        return Err(Error::QubitBudget { requested: num_qubits, cap: MAX_PERM_QUBITS });
    }
    let size = 1u64 << num_qubits;
    let block_mask = 7u64 << position;
    let map = (0..size)
        .map(|x| {
            let block = (x >> position) & 7;
            (x & !block_mask) | ((block * 3) & 7) << position
        })
        .collect();
    VertexPermutation::new(num_qubits, map)
}

/// Side-by-side verdicts for one graph: does the structural pipeline find a
/// pairwise-commuting matching decomposition, and does the Pauli expansion
/// contain an anti-commuting pair anyway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub graph_id: String,
    pub commuting_matching_found: bool,
    pub pauli_noncommuting: bool,
    pub witness_terms: Vec<PauliTerm>,
}

impl WitnessReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse(format!("witness report: {e}")))
    }
}

/// Runs both verdicts. With a relabeling, the graph is pulled back through
/// its inverse, decomposed by bit-flip position, and the matchings are
/// pushed forward again; without one the graph itself must be distance-one.
/// A graph with at most one edge is a single matching, trivially commuting.
pub fn pauli_witness_check(
    g: &LabeledGraph,
    relabeling: Option<&VertexPermutation>,
    graph_id: impl Into<String>,
) -> Result<WitnessReport> {
    let n = g.num_qubits();
    if n > MAX_WITNESS_QUBITS {
        return Err(Error::QubitBudget { requested: n, cap: MAX_WITNESS_QUBITS });
    }
    if let Some(p) = relabeling {
        if p.num_qubits() != n {
            return Err(Error::WidthMismatch(p.num_qubits(), n));
        }
    }

    let base = match relabeling {
        Some(p) => relabel_graph(g, &p.inverse())?,
        None => g.clone(),
    };
    let commuting_matching_found = if g.num_edges() <= 1 {
        true
    } else if base.edges().iter().all(|&(u, v)| hamming(u, v) == 1) {
        let mut groups: BTreeMap<u32, Vec<(u64, u64)>> = BTreeMap::new();
        for &(u, v) in base.edges() {
            groups.entry((u ^ v).trailing_zeros()).or_default().push((u, v));
        }
        let mut matchings = Vec::with_capacity(groups.len());
        for (_, edges) in groups {
            let edges = match relabeling {
                Some(p) => edges.iter().map(|&(u, v)| (p.apply(u), p.apply(v))).collect(),
                None => edges,
            };
            matchings.push(Matching::new(n, edges)?);
        }
        let mut all_commute = true;
        'pairs: for i in 0..matchings.len() {
            for j in i + 1..matchings.len() {
                if !classify_matching_union(&matchings[i], &matchings[j])?.commutes() {
                    all_commute = false;
                    break 'pairs;
                }
            }
        }
        all_commute
    } else {
        false
    };

    let terms = pauli_decompose(&g.adjacency_matrix()?)?;
    let mut witness_terms = Vec::new();
    'scan: for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if terms[i].anti_commutes_with(&terms[j])? {
                witness_terms = vec![terms[i].clone(), terms[j].clone()];
                break 'scan;
            }
        }
    }
    Ok(WitnessReport {
        graph_id: graph_id.into(),
        commuting_matching_found,
        pauli_noncommuting: !witness_terms.is_empty(),
        witness_terms,
    })
}
