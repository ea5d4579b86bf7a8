//! Greedy matching decomposition and iterative edge compression with full
//! metadata (active qubits, weight-reducing qubits, original XOR mask).

use serde::{Deserialize, Serialize};

use crate::graph::{hamming, LabeledGraph};
use crate::{Error, Result};

/// Vertex-disjoint edge set over n-bit labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    num_qubits: usize,
    edges: Vec<(u64, u64)>,
}

impl Matching {
    pub fn new(num_qubits: usize, edges: Vec<(u64, u64)>) -> Result<Self> {
        let g = LabeledGraph::new(num_qubits, edges)?;
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in g.edges() {
            if !seen.insert(u) || !seen.insert(v) {
                return Err(Error::invalid(format!("edge ({u}, {v}) shares a vertex")));
            }
        }
        Ok(Matching { num_qubits, edges: g.edges().to_vec() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(u64, u64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// One compressed edge standing for 2^(n-m) originals. `active[j]` is the
/// original qubit index carried by bit j of the m-bit labels; `mask` is the
/// XOR of the original endpoints and never shrinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedEdge {
    u: u64,
    v: u64,
    active: Vec<usize>,
    weight_reducing: Vec<usize>,
    mask: u64,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    u: u64,
    v: u64,
    active: Vec<usize>,
    weight_reducing: Vec<usize>,
    mask: u64,
}

impl CompressedEdge {
    pub fn new(
        u: u64,
        v: u64,
        active: Vec<usize>,
        weight_reducing: Vec<usize>,
        mask: u64,
    ) -> Result<Self> {
        if u == v {
            return Err(Error::invalid("compressed edge endpoints coincide"));
        }
        let m = active.len();
        if m == 0 || m > 63 {
            return Err(Error::invalid(format!("active list length {m} out of range 1..=63")));
        }
        if !active.windows(2).all(|w| w[0] < w[1]) || active[m - 1] >= 64 {
            return Err(Error::invalid("active qubit list must be strictly increasing, below 64"));
        }
        if u >> m != 0 || v >> m != 0 {
            return Err(Error::invalid(format!("labels ({u}, {v}) wider than {m} active bits")));
        }
        let restricted: u64 =
            active.iter().enumerate().map(|(j, &a)| ((mask >> a) & 1) << j).sum();
        if u ^ v != restricted {
            return Err(Error::invalid("label XOR disagrees with the mask on active qubits"));
        }
        let mut sorted_w = weight_reducing.clone();
        sorted_w.sort_unstable();
        if sorted_w.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate weight-reducing qubit"));
        }
        for &w in &weight_reducing {
            if w >= 64 || (mask >> w) & 1 == 0 {
                return Err(Error::invalid(format!("weight-reducing qubit {w} not set in mask")));
            }
            if active.contains(&w) {
                return Err(Error::invalid(format!("weight-reducing qubit {w} is still active")));
            }
        }
        Ok(CompressedEdge { u, v, active, weight_reducing, mask })
    }

    fn fresh(u: u64, v: u64, num_qubits: usize) -> Self {
        CompressedEdge {
            u,
            v,
            active: (0..num_qubits).collect(),
            weight_reducing: Vec::new(),
            mask: u ^ v,
        }
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn active_qubits(&self) -> &[usize] {
        &self.active
    }

    pub fn weight_reducing(&self) -> &[usize] {
        &self.weight_reducing
    }

    pub fn original_mask(&self) -> u64 {
        self.mask
    }

    fn sort_key(&self) -> (u64, &[usize], &[usize], u64, u64) {
        (
            self.mask,
            &self.active,
            &self.weight_reducing,
            self.u.min(self.v),
            self.u.max(self.v),
        )
    }
}

fn delete_bit(x: u64, q: usize) -> u64 {
    (x >> (q + 1)) << q | (x & ((1u64 << q) - 1))
}

/// Splits E(g) into matchings: single-bit-flip edges grouped by flip
/// position (ascending), the rest first-fit in (distance, min, max) order.
pub fn greedy_matching_decompose(g: &LabeledGraph) -> Vec<Matching> {
    decompose_with_scan(g, None)
}

/// Same construction with the multi-bit scan order reshuffled by a seeded
/// stream, for probing how sensitive downstream costs are to the heuristic.
pub fn greedy_matching_decompose_seeded(g: &LabeledGraph, scan_seed: u64) -> Vec<Matching> {
    decompose_with_scan(g, Some(scan_seed))
}

fn decompose_with_scan(g: &LabeledGraph, scan_seed: Option<u64>) -> Vec<Matching> {
    let n = g.num_qubits();
    let mut by_position: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
    let mut multi: Vec<(u64, u64)> = Vec::new();
    for &(u, v) in g.edges() {
        if hamming(u, v) == 1 {
            by_position[(u ^ v).trailing_zeros() as usize].push((u, v));
        } else {
            multi.push((u, v));
        }
    }
    let mut groups: Vec<Vec<(u64, u64)>> =
        by_position.into_iter().filter(|g| !g.is_empty()).collect();
    multi.sort_unstable_by_key(|&(u, v)| (hamming(u, v), u, v));
    if let Some(seed) = scan_seed {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        multi.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    }
    for (u, v) in multi {
        let slot = groups
            .iter_mut()
            .find(|m| m.iter().all(|&(a, b)| u != a && u != b && v != a && v != b));
        match slot {
            Some(m) => m.push((u, v)),
            None => groups.push(vec![(u, v)]),
        }
    }
    groups
        .into_iter()
        .map(|edges| Matching::new(n, edges).expect("groups are vertex-disjoint by construction"))
        .collect()
}

/// Smallest original position p at which the two edges can merge: metadata
/// equal, and the endpoints differ exactly at p under one of the two
/// pairings (u1 with u2, or u1 with v2).
pub fn mergeable_at(e1: &CompressedEdge, e2: &CompressedEdge) -> Option<usize> {
    if e1.mask != e2.mask || e1.active != e2.active || e1.weight_reducing != e2.weight_reducing {
        return None;
    }
    let mut best: Option<usize> = None;
    for (a, b) in [(e2.u, e2.v), (e2.v, e2.u)] {
        let d = e1.u ^ a;
        // d equal to the edge's own difference means e2 is e1 again; a merge
        // there would collapse the endpoints onto each other.
        if d == e1.v ^ b && d.count_ones() == 1 && d != (e1.u ^ e1.v) {
            let p = e1.active[d.trailing_zeros() as usize];
            best = Some(best.map_or(p, |q| q.min(p)));
        }
    }
    best
}

fn merge(e1: &CompressedEdge, p: usize) -> CompressedEdge {
    let q = e1.active.iter().position(|&a| a == p).expect("merge position is active");
    let mut active = e1.active.clone();
    active.remove(q);
    let mut weight_reducing = e1.weight_reducing.clone();
    if (e1.mask >> p) & 1 == 1 {
        weight_reducing.push(p);
    }
    CompressedEdge {
        u: delete_bit(e1.u, q),
        v: delete_bit(e1.v, q),
        active,
        weight_reducing,
        mask: e1.mask,
    }
}

/// Pairwise merging to a fixed point. Edges are kept sorted by
/// (mask, active, weight-reducing, min, max); pairs are scanned
/// lexicographically and the scan restarts after every merge, so the result
/// is a pure function of the matching.
pub fn compress_matching(m: &Matching) -> Vec<CompressedEdge> {
    let n = m.num_qubits();
    let mut edges: Vec<CompressedEdge> =
        m.edges().iter().map(|&(u, v)| CompressedEdge::fresh(u, v, n)).collect();
    loop {
        edges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut hit = None;
        'scan: for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if let Some(p) = mergeable_at(&edges[i], &edges[j]) {
                    hit = Some((i, j, p));
                    break 'scan;
                }
            }
        }
        let Some((i, j, p)) = hit else { break };
        let before = edges.len();
        edges.remove(j);
        let e1 = edges.remove(i);
        edges.push(merge(&e1, p));
        assert_eq!(edges.len(), before - 1, "every merge removes one edge");
    }
    edges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    edges
}

/// All 2^(n-m) original edges represented by `e`, smaller label first,
/// sorted. Deleted positions get every bit assignment on the u side and the
/// mask-shifted assignment on the v side.
pub fn expand_edge(e: &CompressedEdge, num_qubits: usize) -> Result<Vec<(u64, u64)>> {
    if num_qubits == 0 || num_qubits > 63 {
        return Err(Error::invalid(format!("num_qubits {num_qubits} out of range 1..=63")));
    }
    if let Some(&a) = e.active.iter().find(|&&a| a >= num_qubits) {
        return Err(Error::invalid(format!("active qubit {a} outside {num_qubits} qubits")));
    }
    if e.mask >> num_qubits != 0 {
        return Err(Error::invalid(format!("mask {} wider than {num_qubits} bits", e.mask)));
    }
    let deleted: Vec<usize> = (0..num_qubits).filter(|d| !e.active.contains(d)).collect();
    let scatter = |x: u64| -> u64 {
        e.active.iter().enumerate().map(|(j, &a)| ((x >> j) & 1) << a).sum()
    };
    let (u_base, v_base) = (scatter(e.u), scatter(e.v));
    let mut out = Vec::with_capacity(1usize << deleted.len());
    for assign in 0..(1u64 << deleted.len()) {
        let mut u = u_base;
        let mut v = v_base;
        for (idx, &d) in deleted.iter().enumerate() {
            let c = (assign >> idx) & 1;
            u |= c << d;
            v |= (c ^ ((e.mask >> d) & 1)) << d;
        }
        out.push((u.min(v), u.max(v)));
    }
    out.sort_unstable();
    Ok(out)
}

/// One matching's compressed form as a JSON array of edge records.
pub fn compressed_matching_to_json(edges: &[CompressedEdge]) -> String {
    let docs: Vec<EdgeJson> = edges
        .iter()
        .map(|e| EdgeJson {
            u: e.u,
            v: e.v,
            active: e.active.clone(),
            weight_reducing: e.weight_reducing.clone(),
            mask: e.mask,
        })
        .collect();
    serde_json::to_string(&docs).expect("edges serialize")
}

pub fn compressed_matching_from_json(s: &str) -> Result<Vec<CompressedEdge>> {
    let docs: Vec<EdgeJson> = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
    docs.into_iter()
        .map(|d| CompressedEdge::new(d.u, d.v, d.active, d.weight_reducing, d.mask))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_hypercube;

    fn square_graph() -> LabeledGraph {
        LabeledGraph::new(2, vec![(0, 1), (2, 3), (0, 3), (1, 2)]).unwrap()
    }

    #[test]
    fn decompose_square_graph() {
        let ms = greedy_matching_decompose(&square_graph());
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].edges(), &[(0, 1), (2, 3)]);
        assert_eq!(ms[1].edges(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn decompose_single_edge() {
        let g = LabeledGraph::new(3, vec![(2, 5)]).unwrap();
        let ms = greedy_matching_decompose(&g);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].edges(), &[(2, 5)]);
    }

    #[test]
    fn decompose_hypercube_by_flip_position() {
        let ms = greedy_matching_decompose(&gen_hypercube(3).unwrap());
        assert_eq!(ms.len(), 3);
        for (j, m) in ms.iter().enumerate() {
            assert_eq!(m.num_edges(), 4);
            for &(u, v) in m.edges() {
                assert_eq!(u ^ v, 1 << j);
            }
        }
    }

    #[test]
    fn decompose_partitions_edge_set() {
        for g in [
            square_graph(),
            gen_hypercube(4).unwrap(),
            LabeledGraph::new(3, vec![(0, 7), (1, 6), (0, 3), (3, 5), (2, 3)]).unwrap(),
        ] {
            let ms = greedy_matching_decompose(&g);
            let mut all: Vec<(u64, u64)> = ms.iter().flat_map(|m| m.edges().to_vec()).collect();
            all.sort_unstable();
            assert_eq!(all, g.edges());
        }
    }

    #[test]
    fn bit_flip_groups_are_matchings() {
        // Two distinct edges flipping the same bit can never share a vertex.
        for n in 1..=4usize {
            let q = gen_hypercube(n).unwrap();
            for j in 0..n {
                let edges: Vec<(u64, u64)> =
                    q.edges().iter().copied().filter(|&(u, v)| u ^ v == 1 << j).collect();
                assert_eq!(edges.len(), 1 << (n - 1));
                assert!(Matching::new(n, edges).is_ok());
            }
        }
    }

    #[test]
    fn matching_rejects_shared_vertex() {
        assert!(Matching::new(2, vec![(0, 1), (1, 2)]).is_err());
        assert!(Matching::new(2, vec![(0, 1), (2, 3)]).is_ok());
    }

    fn fresh(u: u64, v: u64, n: usize) -> CompressedEdge {
        CompressedEdge::fresh(u, v, n)
    }

    #[test]
    fn mergeable_position_examples() {
        assert_eq!(mergeable_at(&fresh(0, 1, 2), &fresh(2, 3, 2)), Some(1));
        assert_eq!(mergeable_at(&fresh(0, 3, 2), &fresh(1, 2, 2)), Some(0));
        // Different masks never merge.
        assert_eq!(mergeable_at(&fresh(0, 1, 2), &fresh(0, 3, 2)), None);
    }

    #[test]
    fn mergeable_requires_equal_metadata() {
        let a = CompressedEdge::new(0, 1, vec![0], vec![1], 3).unwrap();
        let b = CompressedEdge::new(0, 1, vec![0], vec![], 1).unwrap();
        assert_eq!(mergeable_at(&a, &b), None);
        assert_eq!(mergeable_at(&a, &a.clone()), None);
    }

    #[test]
    fn compress_square_matchings() {
        let ms = greedy_matching_decompose(&square_graph());
        let c0 = compress_matching(&ms[0]);
        assert_eq!(c0.len(), 1);
        assert_eq!((c0[0].u(), c0[0].v()), (0, 1));
        assert_eq!(c0[0].active_qubits(), &[0]);
        assert_eq!(c0[0].weight_reducing(), &[] as &[usize]);
        assert_eq!(c0[0].original_mask(), 1);

        let c1 = compress_matching(&ms[1]);
        assert_eq!(c1.len(), 1);
        assert_eq!((c1[0].u(), c1[0].v()), (0, 1));
        assert_eq!(c1[0].active_qubits(), &[1]);
        assert_eq!(c1[0].weight_reducing(), &[0]);
        assert_eq!(c1[0].original_mask(), 3);
    }

    #[test]
    fn compress_single_edge_is_identity() {
        let m = Matching::new(3, vec![(2, 5)]).unwrap();
        let c = compress_matching(&m);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].u(), c[0].v()), (2, 5));
        assert_eq!(c[0].active_qubits(), &[0, 1, 2]);
        assert_eq!(c[0].weight_reducing(), &[] as &[usize]);
        assert_eq!(c[0].original_mask(), 7);
    }

    #[test]
    fn compress_hypercube_flip_group() {
        let q3 = gen_hypercube(3).unwrap();
        let edges: Vec<(u64, u64)> =
            q3.edges().iter().copied().filter(|&(u, v)| u ^ v == 1).collect();
        let m = Matching::new(3, edges.clone()).unwrap();
        let c = compress_matching(&m);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].u(), c[0].v()), (0, 1));
        assert_eq!(c[0].active_qubits(), &[0]);
        assert_eq!(expand_edge(&c[0], 3).unwrap(), edges);
    }

    #[test]
    fn expand_uncompressed_edge_is_singleton() {
        assert_eq!(expand_edge(&fresh(2, 5, 3), 3).unwrap(), vec![(2, 5)]);
    }

    #[test]
    fn expand_rejects_out_of_range_active() {
        let e = fresh(0, 1, 3);
        assert!(expand_edge(&e, 2).is_err());
    }

    #[test]
    fn compression_roundtrips() {
        let cases: Vec<Matching> = vec![
            Matching::new(2, vec![(0, 1), (2, 3)]).unwrap(),
            Matching::new(2, vec![(0, 3), (1, 2)]).unwrap(),
            Matching::new(3, vec![(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap(),
            Matching::new(3, vec![(0, 5), (1, 4), (2, 6)]).unwrap(),
            Matching::new(4, vec![(0, 15), (1, 14), (3, 12), (5, 10)]).unwrap(),
        ];
        for m in cases {
            let c = compress_matching(&m);
            let mut expanded: Vec<(u64, u64)> = Vec::new();
            for e in &c {
                expanded.extend(expand_edge(e, m.num_qubits()).unwrap());
            }
            expanded.sort_unstable();
            assert_eq!(expanded, m.edges(), "roundtrip failed for {:?}", m.edges());
        }
    }

    #[test]
    fn weight_reducing_tracks_mask_bits() {
        // Merging across a flipped position records it; across an agreeing
        // position it does not.
        let m = Matching::new(2, vec![(0, 3), (1, 2)]).unwrap();
        let c = compress_matching(&m);
        assert_eq!(c[0].weight_reducing(), &[0]);
        let m = Matching::new(2, vec![(0, 1), (2, 3)]).unwrap();
        let c = compress_matching(&m);
        assert_eq!(c[0].weight_reducing(), &[] as &[usize]);
    }

    #[test]
    fn compressed_json_round_trip() {
        let m = Matching::new(3, vec![(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let c = compress_matching(&m);
        let s = compressed_matching_to_json(&c);
        assert_eq!(compressed_matching_from_json(&s).unwrap(), c);
        assert!(s.contains("\"active\""));
        assert!(s.contains("\"weight_reducing\""));
        assert!(s.contains("\"mask\""));
    }

    #[test]
    fn compressed_edge_validation() {
        assert!(CompressedEdge::new(1, 1, vec![0], vec![], 1).is_err());
        assert!(CompressedEdge::new(0, 1, vec![1, 0], vec![], 1).is_err());
        assert!(CompressedEdge::new(0, 1, vec![0], vec![2], 1).is_err());
        assert!(CompressedEdge::new(0, 1, vec![0], vec![0], 1).is_err());
        assert!(CompressedEdge::new(0, 1, vec![0], vec![], 2).is_err());
        assert!(CompressedEdge::new(0, 1, vec![0], vec![1], 3).is_ok());
    }
}
