//! Trotterized walk circuits built from matching decompositions.
//!
//! Every compressed edge compiles to a three-stage block: a CX layer that
//! localizes the endpoint difference on one qubit, a (multi)controlled Rx
//! there, and the mirrored CX layer. Within a matching the blocks act on
//! disjoint supports, so their product is the exact matching exponential.

use crate::circuit::{Gate, GateCircuit};
use crate::graph::LabeledGraph;
use crate::matching::{compress_matching, greedy_matching_decompose, CompressedEdge, Matching};
use crate::{Error, Result};

/// Schedule for a first-order product formula.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    time: f64,
    steps: usize,
    term_order: Vec<usize>,
}

impl TrotterPlan {
    pub fn new(time: f64, steps: usize) -> Result<Self> {
        Self::with_term_order(time, steps, Vec::new())
    }

    /// An empty `term_order` means ascending. A non-empty one must be a
    /// permutation of the term indices; that is checked at compile time,
    /// when the term count is known.
    pub fn with_term_order(time: f64, steps: usize, term_order: Vec<usize>) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::invalid(format!("evolution time {time} is not finite")));
        }
        if steps == 0 {
            return Err(Error::invalid("a Trotter plan needs at least one step"));
        }
        Ok(TrotterPlan { time, steps, term_order })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn term_order(&self) -> &[usize] {
        &self.term_order
    }

    pub(crate) fn resolve_order(&self, num_terms: usize) -> Result<Vec<usize>> {
        if self.term_order.is_empty() {
            return Ok((0..num_terms).collect());
        }
        if self.term_order.len() != num_terms {
            return Err(Error::invalid(format!(
                "term order lists {} entries for {num_terms} terms",
                self.term_order.len()
            )));
        }
        let mut seen = vec![false; num_terms];
        for &i in &self.term_order {
            if i >= num_terms || seen[i] {
                return Err(Error::invalid("term order is not a permutation of the term indices"));
            }
            seen[i] = true;
        }
        Ok(self.term_order.clone())
    }
}

/// Circuit for exp(-i * angle * A_e), where A_e sums the expanded edge
/// family of one compressed edge over `num_qubits` qubits.
pub fn edge_circuit(edge: &CompressedEdge, angle: f64, num_qubits: usize) -> Result<GateCircuit> {
    if !angle.is_finite() {
        return Err(Error::invalid(format!("rotation angle {angle} is not finite")));
    }
    for &q in edge.active_qubits().iter().chain(edge.weight_reducing()) {
        if q >= num_qubits {
            return Err(Error::invalid(format!(
                "edge touches qubit {q} but the circuit has {num_qubits} qubits"
            )));
        }
    }

    let active = edge.active_qubits();
    let diff = edge.u() ^ edge.v();
    let q_t = diff.trailing_zeros() as usize;
    let target = active[q_t];
    let t_bit = edge.u() >> q_t & 1;

    let mut forward: Vec<Gate> = Vec::new();
    for &w in edge.weight_reducing() {
        forward.push(Gate::cx(target, w));
    }
    for (p, &q) in active.iter().enumerate() {
        if p != q_t && diff >> p & 1 == 1 {
            forward.push(Gate::cx(target, q));
        }
    }

    // After the CX layer both endpoints agree on every control qubit.
    let mut controls: Vec<(usize, u8)> = Vec::new();
    for (p, &q) in active.iter().enumerate() {
        if p == q_t {
            continue;
        }
        let bit = edge.u() >> p & 1;
        let value = if diff >> p & 1 == 1 { bit ^ t_bit } else { bit };
        controls.push((q, value as u8));
    }

    let mut gates = forward.clone();
    if controls.is_empty() {
        gates.push(Gate::rx(target, 2.0 * angle));
    } else {
        gates.push(Gate::mcrx(target, controls, 2.0 * angle)?);
    }
    gates.extend(forward.into_iter().rev());
    GateCircuit::new(num_qubits, gates)
}

/// Exact circuit for exp(-i * angle * A_m) of one matching.
pub fn matching_circuit(m: &Matching, angle: f64) -> Result<GateCircuit> {
    let mut circuit = GateCircuit::empty(m.num_qubits());
    for edge in &compress_matching(m) {
        circuit.append(&edge_circuit(edge, angle, m.num_qubits())?)?;
    }
    Ok(circuit)
}

/// First-order product formula over an explicit matching list.
pub fn trotter_from_matchings(
    num_qubits: usize,
    matchings: &[Matching],
    plan: &TrotterPlan,
) -> Result<GateCircuit> {
    let order = plan.resolve_order(matchings.len())?;
    let angle = plan.time() / plan.steps() as f64;
    let mut per_matching = Vec::with_capacity(matchings.len());
    for m in matchings {
        if m.num_qubits() != num_qubits {
            return Err(Error::WidthMismatch(m.num_qubits(), num_qubits));
        }
        per_matching.push(matching_circuit(m, angle)?);
    }
    let mut circuit = GateCircuit::empty(num_qubits);
    for _ in 0..plan.steps() {
        for &i in &order {
            circuit.append(&per_matching[i])?;
        }
    }
    Ok(circuit)
}

/// Full pipeline: greedy decomposition, per-matching compression, N steps.
pub fn compile_matching_trotter(g: &LabeledGraph, plan: &TrotterPlan) -> Result<GateCircuit> {
    trotter_from_matchings(g.num_qubits(), &greedy_matching_decompose(g), plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::graph::gen_hypercube;
    use crate::linalg::{exact_evolution, spectral_norm_diff, DenseOperator};

    fn square() -> LabeledGraph {
        LabeledGraph::new(2, vec![(0, 1), (2, 3), (0, 3), (1, 2)]).unwrap()
    }

    fn assert_same_operator(a: &DenseOperator, b: &DenseOperator) {
        let d = a.sub(b).unwrap().frobenius_norm();
        assert!(d < 1e-12, "operators differ by {d}");
    }

    fn matching_exponential(m: &Matching, angle: f64) -> DenseOperator {
        let g = LabeledGraph::new(m.num_qubits(), m.edges().to_vec()).unwrap();
        exact_evolution(&g.adjacency_matrix().unwrap(), angle).unwrap()
    }

    struct XorShift(u64);

    impl XorShift {
        fn next(&mut self) -> u64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            self.0
        }

        fn below(&mut self, n: u64) -> u64 {
            self.next() % n
        }
    }

    fn random_matching(rng: &mut XorShift, num_qubits: usize) -> Matching {
        let size = 1u64 << num_qubits;
        let mut labels: Vec<u64> = (0..size).collect();
        for i in (1..labels.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            labels.swap(i, j);
        }
        let pairs = 1 + rng.below(size / 2) as usize;
        let edges = labels
            .chunks_exact(2)
            .take(pairs)
            .map(|c| (c[0], c[1]))
            .collect();
        Matching::new(num_qubits, edges).unwrap()
    }

    #[test]
    fn square_groups_compile_to_known_shapes() {
        let t = 0.9;
        let ms = greedy_matching_decompose(&square());
        assert_eq!(ms.len(), 2);

        let c0 = matching_circuit(&ms[0], t).unwrap();
        assert_eq!(c0.len(), 1);
        assert_eq!(c0.gates()[0].kind(), GateKind::Rx);
        assert_eq!(c0.gates()[0].target(), 0);
        assert!((c0.gates()[0].angle() - 2.0 * t).abs() < 1e-15);

        let c1 = matching_circuit(&ms[1], t).unwrap();
        let kinds: Vec<GateKind> = c1.gates().iter().map(|g| g.kind()).collect();
        assert_eq!(kinds, vec![GateKind::Cx, GateKind::Rx, GateKind::Cx]);
        assert_eq!(c1.gates()[0].controls(), &[(1, 1)]);
        assert_eq!(c1.gates()[0].target(), 0);
        assert_eq!(c1.gates()[1].target(), 1);
    }

    #[test]
    fn uncompressed_edge_is_one_mcrx() {
        let m = Matching::new(3, vec![(2, 6)]).unwrap();
        let c = matching_circuit(&m, 0.4).unwrap();
        assert_eq!(c.len(), 1);
        let g = &c.gates()[0];
        assert_eq!(g.kind(), GateKind::Mcrx);
        assert_eq!(g.target(), 2);
        assert_eq!(g.controls(), &[(0, 0), (1, 1)]);
        assert!((g.angle() - 0.8).abs() < 1e-15);
        assert_same_operator(&c.unitary().unwrap(), &matching_exponential(&m, 0.4));
    }

    #[test]
    fn antidiagonal_edge_uses_basis_change() {
        let m = Matching::new(2, vec![(0, 3)]).unwrap();
        let c = matching_circuit(&m, 0.3).unwrap();
        let kinds: Vec<GateKind> = c.gates().iter().map(|g| g.kind()).collect();
        assert_eq!(kinds, vec![GateKind::Cx, GateKind::Mcrx, GateKind::Cx]);
        assert_eq!(c.gates()[1].controls(), &[(1, 0)]);
        assert_same_operator(&c.unitary().unwrap(), &matching_exponential(&m, 0.3));
    }

    #[test]
    fn matching_circuits_match_exponentials() {
        let cases = [
            Matching::new(2, vec![(0, 1), (2, 3)]).unwrap(),
            Matching::new(2, vec![(0, 3), (1, 2)]).unwrap(),
            Matching::new(3, vec![(0, 5), (2, 7)]).unwrap(),
            Matching::new(3, vec![(1, 6), (3, 4)]).unwrap(),
        ];
        for m in &cases {
            for t in [0.1, 0.7, 1.3] {
                let c = matching_circuit(m, t).unwrap();
                assert_same_operator(&c.unitary().unwrap(), &matching_exponential(m, t));
            }
        }
    }

    #[test]
    fn random_matchings_compile_exactly() {
        let mut rng = XorShift(0x51ab_9e2d_77c0_13f5);
        for case in 0..30 {
            let n = 2 + (case % 3);
            let m = random_matching(&mut rng, n);
            let c = matching_circuit(&m, 0.37).unwrap();
            assert_same_operator(&c.unitary().unwrap(), &matching_exponential(&m, 0.37));
        }
    }

    #[test]
    fn empty_matching_is_identity() {
        let m = Matching::new(2, vec![]).unwrap();
        let c = matching_circuit(&m, 1.0).unwrap();
        assert!(c.is_empty());
        assert_same_operator(&c.unitary().unwrap(), &DenseOperator::identity(2).unwrap());
    }

    #[test]
    fn hypercube_groups_are_single_rotations() {
        let q3 = gen_hypercube(3).unwrap();
        let ms = greedy_matching_decompose(&q3);
        assert_eq!(ms.len(), 3);
        for (j, m) in ms.iter().enumerate() {
            let c = matching_circuit(m, 0.6).unwrap();
            assert_eq!(c.len(), 1);
            assert_eq!(c.gates()[0].kind(), GateKind::Rx);
            assert_eq!(c.gates()[0].target(), j);
            assert!((c.gates()[0].angle() - 1.2).abs() < 1e-15);
        }
    }

    #[test]
    fn square_trotter_is_exact_for_any_step_count() {
        let g = square();
        let a = g.adjacency_matrix().unwrap();
        for t in [0.1, 0.5, 1.0] {
            let exact = exact_evolution(&a, t).unwrap();
            for steps in [1, 2, 5] {
                let plan = TrotterPlan::new(t, steps).unwrap();
                let c = compile_matching_trotter(&g, &plan).unwrap();
                assert_same_operator(&c.unitary().unwrap(), &exact);
            }
        }
    }

    #[test]
    fn gate_count_scales_linearly_with_steps() {
        let g = square();
        let one = compile_matching_trotter(&g, &TrotterPlan::new(1.0, 1).unwrap()).unwrap();
        let five = compile_matching_trotter(&g, &TrotterPlan::new(1.0, 5).unwrap()).unwrap();
        assert_eq!(five.len(), 5 * one.len());
    }

    #[test]
    fn path_error_shrinks_at_first_order() {
        let g = LabeledGraph::new(2, vec![(0, 1), (1, 2)]).unwrap();
        let exact = exact_evolution(&g.adjacency_matrix().unwrap(), 1.0).unwrap();
        let error = |steps: usize| {
            let c = compile_matching_trotter(&g, &TrotterPlan::new(1.0, steps).unwrap()).unwrap();
            spectral_norm_diff(&c.unitary().unwrap(), &exact).unwrap()
        };
        let errs: Vec<f64> = [1, 2, 4, 8].iter().map(|&n| error(n)).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "errors not decreasing: {errs:?}");
        let ratio = error(10) / error(20);
        assert!((1.5..=2.5).contains(&ratio), "halving ratio {ratio}");
    }

    #[test]
    fn term_order_is_validated_and_applied() {
        let g = square();
        let a = g.adjacency_matrix().unwrap();
        let reversed = TrotterPlan::with_term_order(0.8, 2, vec![1, 0]).unwrap();
        let c = compile_matching_trotter(&g, &reversed).unwrap();
        assert_same_operator(&c.unitary().unwrap(), &exact_evolution(&a, 0.8).unwrap());

        let dup = TrotterPlan::with_term_order(0.8, 2, vec![0, 0]).unwrap();
        assert!(compile_matching_trotter(&g, &dup).is_err());
        let short = TrotterPlan::with_term_order(0.8, 2, vec![0]).unwrap();
        assert!(compile_matching_trotter(&g, &short).is_err());
    }

    #[test]
    fn plan_rejects_bad_parameters() {
        assert!(TrotterPlan::new(1.0, 0).is_err());
        assert!(TrotterPlan::new(f64::NAN, 3).is_err());
        assert!(TrotterPlan::new(0.0, 1).is_ok());
    }

    #[test]
    fn width_mismatch_is_reported() {
        let m = Matching::new(2, vec![(0, 1)]).unwrap();
        let plan = TrotterPlan::new(0.5, 1).unwrap();
        let err = trotter_from_matchings(3, &[m], &plan).unwrap_err();
        assert!(matches!(err, Error::WidthMismatch(2, 3)));
    }

    #[test]
    fn edge_circuit_rejects_bad_inputs() {
        let m = Matching::new(2, vec![(0, 1)]).unwrap();
        let e = compress_matching(&m).remove(0);
        assert!(edge_circuit(&e, f64::NAN, 2).is_err());
        assert!(edge_circuit(&e, 0.5, 0).is_err());
    }
}
