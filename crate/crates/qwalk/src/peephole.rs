//! Peephole optimizer: CX-CX and X-X cancellation, same-axis rotation
//! merging, and dead-rotation removal, iterated to a fixed point. Candidate
//! pairs may be separated by gates that provably commute with the moving
//! gate, so a rotation can slide past CX gates on the right wire.

use crate::circuit::{Gate, GateCircuit, GateKind};

const ZERO_TOL: f64 = 1e-12;

/// Angle folded into (-pi, pi]; identity rotations land near 0.
fn normalize(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = angle.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r - tau
    } else {
        r
    }
}

fn is_dead_rotation(g: &Gate) -> bool {
    matches!(g.kind(), GateKind::Rx | GateKind::Rz) && normalize(g.angle()).abs() < ZERO_TOL
}

/// True when `g` can move left past `p` without changing the unitary.
/// Only qubit-overlapping cases need an argument; each arm is an exact
/// commutation identity.
fn can_skip(g: &Gate, p: &Gate) -> bool {
    let gq = g.qubits();
    if !p.qubits().iter().any(|q| gq.contains(q)) {
        return true;
    }
    match g.kind() {
        GateKind::Cx => {
            let (ctl, tgt) = (g.controls()[0].0, g.target());
            match p.kind() {
                // X-axis gates on the target block nothing.
                GateKind::X | GateKind::Rx => p.target() == tgt,
                // Z-diagonal gates on the control.
                GateKind::Rz | GateKind::S | GateKind::Sdg => p.target() == ctl,
                GateKind::Cx => {
                    let (pc, pt) = (p.controls()[0].0, p.target());
                    (pc == ctl || pt == tgt) && pc != tgt && pt != ctl
                }
                _ => false,
            }
        }
        GateKind::X | GateKind::Rx => match p.kind() {
            GateKind::X | GateKind::Rx => p.target() == g.target(),
            GateKind::Cx => p.target() == g.target() && p.controls()[0].0 != g.target(),
            _ => false,
        },
        GateKind::Rz => match p.kind() {
            GateKind::S | GateKind::Sdg | GateKind::Rz => p.target() == g.target(),
            GateKind::Cx => p.controls()[0].0 == g.target() && p.target() != g.target(),
            _ => false,
        },
        _ => false,
    }
}

fn matches_partner(g: &Gate, p: &Gate) -> bool {
    match (g.kind(), p.kind()) {
        (GateKind::Cx, GateKind::Cx) => {
            g.target() == p.target() && g.controls() == p.controls()
        }
        (GateKind::X, GateKind::X) | (GateKind::Rx, GateKind::Rx) | (GateKind::Rz, GateKind::Rz) => {
            g.target() == p.target()
        }
        _ => false,
    }
}

struct Pass {
    alive: Vec<Option<Gate>>,
    stacks: Vec<Vec<usize>>,
    changed: bool,
}

impl Pass {
    fn new(num_qubits: usize) -> Pass {
        Pass { alive: Vec::new(), stacks: vec![Vec::new(); num_qubits], changed: false }
    }

    fn push(&mut self, g: Gate) {
        let idx = self.alive.len();
        for q in g.qubits() {
            self.stacks[q].push(idx);
        }
        self.alive.push(Some(g));
    }

    fn remove(&mut self, idx: usize) {
        let g = self.alive[idx].take().expect("removing a live gate");
        for q in g.qubits() {
            let pos = self.stacks[q].binary_search(&idx).expect("stack holds the gate");
            self.stacks[q].remove(pos);
        }
    }

    /// Most recent live gate touching any qubit of `g` strictly below
    /// `before`.
    fn prev_on_wires(&self, g: &Gate, before: usize) -> Option<usize> {
        g.qubits()
            .iter()
            .filter_map(|&q| self.stacks[q].iter().rev().find(|&&i| i < before))
            .copied()
            .max()
    }

    fn absorb(&mut self, g: Gate) {
        if is_dead_rotation(&g) {
            self.changed = true;
            return;
        }
        let mut horizon = self.alive.len();
        while let Some(idx) = self.prev_on_wires(&g, horizon) {
            let p = self.alive[idx].as_ref().expect("stacks only hold live gates");
            if matches_partner(&g, p) {
                match g.kind() {
                    GateKind::Cx | GateKind::X => self.remove(idx),
                    GateKind::Rx | GateKind::Rz => {
                        let merged = match g.kind() {
                            GateKind::Rx => Gate::rx(g.target(), p.angle() + g.angle()),
                            _ => Gate::rz(g.target(), p.angle() + g.angle()),
                        };
                        if is_dead_rotation(&merged) {
                            self.remove(idx);
                        } else {
                            self.alive[idx] = Some(merged);
                        }
                    }
                    _ => unreachable!("only CX, X, Rx, Rz have partners"),
                }
                self.changed = true;
                return;
            }
            if !can_skip(&g, p) {
                break;
            }
            horizon = idx;
        }
        self.push(g);
    }
}

/// Fixed point of the four rewrite rules. The unitary is preserved exactly
/// up to the global phase dropped with 2pi rotations.
pub fn peephole_optimize(c: &GateCircuit) -> GateCircuit {
    let mut gates: Vec<Gate> = c.gates().to_vec();
    loop {
        let mut pass = Pass::new(c.num_qubits());
        for g in gates {
            pass.absorb(g);
        }
        gates = pass.alive.into_iter().flatten().collect();
        if !pass.changed {
            break;
        }
    }
    GateCircuit::new(c.num_qubits(), gates).expect("optimizer keeps gates in range")
}
