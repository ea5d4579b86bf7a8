//! Multicontrolled-Rx synthesis into the {X, CX, Rx, Rz, H} basis via
//! gray-code multiplexed rotations. Ancilla-free; the 1-controlled core uses
//! exactly 2^k CX gates for k controls.

use crate::circuit::{Gate, GateCircuit, GateKind};
use crate::{Error, Result};

/// Lower one MCRX gate. Zero-valued controls are conjugated with X so the
/// core only sees 1-valued controls; the core is H, then 2^k alternating
/// (Rz, CX) pairs whose signs follow the gray code, then H.
pub fn synthesize_mcrx(gate: &Gate, num_qubits: usize) -> Result<GateCircuit> {
    if gate.kind() != GateKind::Mcrx {
        return Err(Error::invalid(format!(
            "synthesize_mcrx expects an MCRX gate, got {:?}",
            gate.kind()
        )));
    }
    let target = gate.target();
    let theta = gate.angle();
    let k = gate.controls().len();
    let mut out = GateCircuit::empty(num_qubits);
    if k == 0 {
        out.push(Gate::rx(target, theta))?;
        return Ok(out);
    }
    let flips: Vec<usize> =
        gate.controls().iter().filter(|&&(_, v)| v == 0).map(|&(q, _)| q).collect();
    for &q in &flips {
        out.push(Gate::x(q))?;
    }
    let ctrl: Vec<usize> = gate.controls().iter().map(|&(q, _)| q).collect();
    let slice = theta / (1u64 << k) as f64;
    out.push(Gate::h(target))?;
    for i in 0..(1u64 << k) {
        let gray = i ^ (i >> 1);
        let sign = if gray.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out.push(Gate::rz(target, sign * slice))?;
        let j = if i + 1 == 1u64 << k { k - 1 } else { (i + 1).trailing_zeros() as usize };
        out.push(Gate::cx(ctrl[j], target))?;
    }
    out.push(Gate::h(target))?;
    for &q in &flips {
        out.push(Gate::x(q))?;
    }
    Ok(out)
}

/// Replace every MCRX in the circuit with its synthesis; everything else is
/// copied through unchanged.
pub fn lower_circuit(c: &GateCircuit) -> Result<GateCircuit> {
    let mut out = GateCircuit::empty(c.num_qubits());
    for g in c.gates() {
        if g.kind() == GateKind::Mcrx {
            out.append(&synthesize_mcrx(g, c.num_qubits())?)?;
        } else {
            out.push(g.clone())?;
        }
    }
    Ok(out)
}
