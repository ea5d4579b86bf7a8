//! Gate-level IR: X, CX, H, S/SDG, Rx, Rz, and multicontrolled Rx with
//! explicit control values, plus dense unitary evaluation and the CX/depth
//! cost metrics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{DenseOperator, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    #[serde(rename = "CX")]
    Cx,
    Rx,
    Rz,
    H,
    S,
    #[serde(rename = "SDG")]
    Sdg,
    #[serde(rename = "MCRX")]
    Mcrx,
}

impl GateKind {
    fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Cx => "cx",
            GateKind::Rx => "rx",
            GateKind::Rz => "rz",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::Mcrx => "mcrx",
        }
    }
}

/// A single gate. Control values are explicit: (q, 0) fires when qubit q is
/// |0>. Only CX and MCRX carry controls; only Rx, Rz, MCRX carry an angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    controls: Vec<(usize, u8)>,
    angle: f64,
}

impl Gate {
    pub fn x(target: usize) -> Gate {
        Gate { kind: GateKind::X, target, controls: Vec::new(), angle: 0.0 }
    }

    pub fn h(target: usize) -> Gate {
        Gate { kind: GateKind::H, target, controls: Vec::new(), angle: 0.0 }
    }

    pub fn s(target: usize) -> Gate {
        Gate { kind: GateKind::S, target, controls: Vec::new(), angle: 0.0 }
    }

    pub fn sdg(target: usize) -> Gate {
        Gate { kind: GateKind::Sdg, target, controls: Vec::new(), angle: 0.0 }
    }

    pub fn rx(target: usize, angle: f64) -> Gate {
        Gate { kind: GateKind::Rx, target, controls: Vec::new(), angle }
    }

    pub fn rz(target: usize, angle: f64) -> Gate {
        Gate { kind: GateKind::Rz, target, controls: Vec::new(), angle }
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        assert!(control != target, "CX control equals target");
        Gate { kind: GateKind::Cx, target, controls: vec![(control, 1)], angle: 0.0 }
    }

    pub fn mcrx(target: usize, controls: Vec<(usize, u8)>, angle: f64) -> Result<Gate> {
        let mut qs: Vec<usize> = controls.iter().map(|&(q, _)| q).collect();
        qs.sort_unstable();
        if qs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate control qubit"));
        }
        if qs.contains(&target) {
            return Err(Error::invalid("control qubit equals target"));
        }
        if controls.iter().any(|&(_, v)| v > 1) {
            return Err(Error::invalid("control values must be 0 or 1"));
        }
        Ok(Gate { kind: GateKind::Mcrx, target, controls, angle })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn controls(&self) -> &[(usize, u8)] {
        &self.controls
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self.kind, GateKind::Rx | GateKind::Rz | GateKind::Mcrx)
    }

    /// Target plus control wires, in occupancy order.
    pub fn qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self.controls.iter().map(|&(q, _)| q).collect();
        qs.push(self.target);
        qs
    }

    fn max_qubit(&self) -> usize {
        self.qubits().into_iter().max().expect("at least the target")
    }

    fn validate(kind: GateKind, target: usize, controls: Vec<(usize, u8)>, angle: f64) -> Result<Gate> {
        if !angle.is_finite() {
            return Err(Error::invalid("non-finite angle"));
        }
        match kind {
            GateKind::Rx => expect_ctl(&controls, 0).map(|_| Gate::rx(target, angle)),
            GateKind::Rz => expect_ctl(&controls, 0).map(|_| Gate::rz(target, angle)),
            GateKind::X | GateKind::H | GateKind::S | GateKind::Sdg => {
                expect_ctl(&controls, 0)?;
                expect_no_angle(kind, angle)?;
                Ok(Gate { kind, target, controls, angle: 0.0 })
            }
            GateKind::Cx => {
                expect_ctl(&controls, 1)?;
                expect_no_angle(kind, angle)?;
                let (c, v) = controls[0];
                if v != 1 {
                    return Err(Error::invalid("CX control value must be 1"));
                }
                if c == target {
                    return Err(Error::invalid("CX control equals target"));
                }
                Ok(Gate::cx(c, target))
            }
            GateKind::Mcrx => Gate::mcrx(target, controls, angle),
        }
    }
}

fn expect_ctl(controls: &[(usize, u8)], want: usize) -> Result<()> {
    if controls.len() != want {
        return Err(Error::invalid(format!(
            "expected {want} controls, got {}",
            controls.len()
        )));
    }
    Ok(())
}

fn expect_no_angle(kind: GateKind, angle: f64) -> Result<()> {
    if angle != 0.0 {
        return Err(Error::invalid(format!("{} takes no angle", kind.name())));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: GateKind,
    target: usize,
    #[serde(default)]
    controls: Vec<(usize, u8)>,
    #[serde(default)]
    angle: f64,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    num_qubits: usize,
    gates: Vec<GateJson>,
}

/// Ordered gate list over a fixed register. Index 0 is the least significant
/// bit of a basis label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl GateCircuit {
    pub fn empty(num_qubits: usize) -> GateCircuit {
        GateCircuit { num_qubits, gates: Vec::new() }
    }

    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<GateCircuit> {
        let mut c = GateCircuit::empty(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_qubit() >= self.num_qubits {
            return Err(Error::invalid(format!(
                "gate on qubit {} exceeds register of {}",
                gate.max_qubit(),
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn append(&mut self, other: &GateCircuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch(self.num_qubits, other.num_qubits));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Product of the gate matrices in application order (first gate acts
    /// first). Dimension capped at 2^12.
    pub fn unitary(&self) -> Result<DenseOperator> {
        let mut out = DenseOperator::identity(self.num_qubits)?;
        for g in &self.gates {
            apply_gate(out.matrix_mut(), g);
        }
        Ok(out)
    }

    /// Number of CX gates. The circuit must already be in the
    /// {CX, single-qubit} basis.
    pub fn cx_count(&self) -> Result<usize> {
        if self.gates.iter().any(|g| g.kind == GateKind::Mcrx) {
            return Err(Error::invalid("cx_count requires a lowered circuit (MCRX present)"));
        }
        Ok(self.gates.iter().filter(|g| g.kind == GateKind::Cx).count())
    }

    /// Greedy layering: each gate lands in the earliest layer after every
    /// earlier gate that shares one of its wires.
    pub fn depth(&self) -> usize {
        let mut last = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let layer = 1 + g.qubits().iter().map(|&q| last[q]).max().unwrap_or(0);
            for q in g.qubits() {
                last[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn to_json_string(&self) -> String {
        let doc = CircuitJson {
            num_qubits: self.num_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| GateJson {
                    kind: g.kind,
                    target: g.target,
                    controls: g.controls.clone(),
                    angle: g.angle,
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("circuit serializes")
    }

    pub fn from_json_str(s: &str) -> Result<GateCircuit> {
        let doc: CircuitJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        let mut gates = Vec::with_capacity(doc.gates.len());
        for g in doc.gates {
            gates.push(Gate::validate(g.kind, g.target, g.controls, g.angle)?);
        }
        GateCircuit::new(doc.num_qubits, gates)
    }

    /// One gate per line, for diffing.
    pub fn to_text_dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            match g.kind {
                GateKind::X | GateKind::H | GateKind::S | GateKind::Sdg => {
                    out.push_str(&format!("{} q{}\n", g.kind.name(), g.target));
                }
                GateKind::Rx | GateKind::Rz => {
                    out.push_str(&format!("{} q{} {}\n", g.kind.name(), g.target, g.angle));
                }
                GateKind::Cx => {
                    out.push_str(&format!("cx q{} q{}\n", g.controls[0].0, g.target));
                }
                GateKind::Mcrx => {
                    let ctl: Vec<String> =
                        g.controls.iter().map(|(q, v)| format!("q{q}={v}")).collect();
                    out.push_str(&format!(
                        "mcrx q{} [{}] {}\n",
                        g.target,
                        ctl.join(","),
                        g.angle
                    ));
                }
            }
        }
        out
    }
}

fn single_qubit_matrix(kind: GateKind, angle: f64) -> [C64; 4] {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match kind {
        GateKind::X | GateKind::Cx => [zero, one, one, zero],
        GateKind::H => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [h, h, h, -h]
        }
        GateKind::S => [one, zero, zero, C64::new(0.0, 1.0)],
        GateKind::Sdg => [one, zero, zero, C64::new(0.0, -1.0)],
        GateKind::Rx | GateKind::Mcrx => {
            let c = C64::new((angle / 2.0).cos(), 0.0);
            let s = C64::new(0.0, -(angle / 2.0).sin());
            [c, s, s, c]
        }
        GateKind::Rz => {
            [C64::new(0.0, -angle / 2.0).exp(), zero, zero, C64::new(0.0, angle / 2.0).exp()]
        }
    }
}

fn apply_gate(u: &mut DMatrix<C64>, g: &Gate) {
    let [a, b, c, d] = single_qubit_matrix(g.kind, g.angle);
    let dim = u.nrows();
    let t_bit = 1usize << g.target;
    'rows: for r0 in 0..dim {
        if r0 & t_bit != 0 {
            continue;
        }
        for &(q, v) in &g.controls {
            if (r0 >> q) & 1 != v as usize {
                continue 'rows;
            }
        }
        let r1 = r0 | t_bit;
        for col in 0..dim {
            let x0 = u[(r0, col)];
            let x1 = u[(r1, col)];
            u[(r0, col)] = a * x0 + b * x1;
            u[(r1, col)] = c * x0 + d * x1;
        }
    }
}
