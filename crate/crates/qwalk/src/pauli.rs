//! Pauli-string decomposition of real symmetric operators and the
//! term-by-term Trotter compiler used as the comparison baseline.
//!
//! Strings read left to right from the highest qubit down, so the last
//! character acts on qubit 0.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateCircuit};
use crate::compile::TrotterPlan;
use crate::linalg::{DenseOperator, C64};
use crate::{Error, Result, MAX_PAULI_QUBITS, TOL};

/// Coefficients below this magnitude are dropped from decompositions.
const COEFF_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
struct RawTerm {
    string: String,
    coefficient: f64,
}

/// One weighted Pauli string with a real coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub struct PauliTerm {
    string: String,
    coefficient: f64,
}

impl TryFrom<RawTerm> for PauliTerm {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Self> {
        PauliTerm::new(raw.string, raw.coefficient)
    }
}

impl From<PauliTerm> for RawTerm {
    fn from(term: PauliTerm) -> Self {
        RawTerm { string: term.string, coefficient: term.coefficient }
    }
}

impl PauliTerm {
    pub fn new(string: impl Into<String>, coefficient: f64) -> Result<Self> {
        let string = string.into();
        if string.is_empty() {
            return Err(Error::invalid("empty Pauli string"));
        }
        if let Some(bad) = string.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(Error::invalid(format!("invalid Pauli letter {bad:?} in {string:?}")));
        }
        if !coefficient.is_finite() {
            return Err(Error::invalid(format!("coefficient {coefficient} is not finite")));
        }
        Ok(PauliTerm { string, coefficient })
    }

    pub fn string(&self) -> &str {
        &self.string
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn num_qubits(&self) -> usize {
        self.string.len()
    }

    fn letter(&self, qubit: usize) -> u8 {
        self.string.as_bytes()[self.string.len() - 1 - qubit]
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| self.letter(q) != b'I').collect()
    }

    /// The dense operator `coefficient * P`.
    pub fn to_operator(&self) -> Result<DenseOperator> {
        let n = self.num_qubits();
        let mut op = DenseOperator::zeros(n)?;
        let mut flip = 0usize;
        for q in 0..n {
            if matches!(self.letter(q), b'X' | b'Y') {
                flip |= 1 << q;
            }
        }
        for row in 0..1usize << n {
            let col = row ^ flip;
            let mut val = C64::new(self.coefficient, 0.0);
            for q in 0..n {
                let row_bit = row >> q & 1;
                val *= match self.letter(q) {
                    b'Y' if row_bit == 1 => C64::new(0.0, 1.0),
                    b'Y' => C64::new(0.0, -1.0),
                    b'Z' if row_bit == 1 => C64::new(-1.0, 0.0),
                    _ => C64::new(1.0, 0.0),
                };
            }
            op.set(row, col, val);
        }
        Ok(op)
    }

    /// Two strings anti-commute iff they disagree on an odd number of
    /// positions where both are non-identity.
    pub fn anti_commutes_with(&self, other: &PauliTerm) -> Result<bool> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::WidthMismatch(self.num_qubits(), other.num_qubits()));
        }
        let clashes = (0..self.num_qubits())
            .filter(|&q| {
                let (a, b) = (self.letter(q), other.letter(q));
                a != b'I' && b != b'I' && a != b
            })
            .count();
        Ok(clashes % 2 == 1)
    }
}

/// Expands a real symmetric operator as sum of weighted Pauli strings,
/// lexicographic in I < X < Y < Z, zero coefficients dropped.
pub fn pauli_decompose(a: &DenseOperator) -> Result<Vec<PauliTerm>> {
    let n = a.num_qubits();
    if n > MAX_PAULI_QUBITS {
        return Err(Error::QubitBudget { requested: n, cap: MAX_PAULI_QUBITS });
    }
    if !a.is_real_symmetric(TOL) {
        return Err(Error::NotSymmetric);
    }
    let mut terms = Vec::new();
    let mut prefix = String::with_capacity(n);
    split(a.matrix().clone(), &mut prefix, 1u64 << n, &mut terms);
    Ok(terms)
}

fn split(m: DMatrix<C64>, prefix: &mut String, full_dim: u64, out: &mut Vec<PauliTerm>) {
    let d = m.nrows();
    if d == 1 {
        let c = m[(0, 0)] / full_dim as f64;
        if c.norm() > COEFF_CUTOFF {
            // Real symmetric input keeps every surviving coefficient real.
            debug_assert!(c.im.abs() < 1e-9, "complex coefficient {c} for {prefix}");
            out.push(PauliTerm::new(prefix.clone(), c.re).expect("letters are valid"));
        }
        return;
    }
    let h = d / 2;
    let a00 = m.view((0, 0), (h, h)).into_owned();
    let a01 = m.view((0, h), (h, h)).into_owned();
    let a10 = m.view((h, 0), (h, h)).into_owned();
    let a11 = m.view((h, h), (h, h)).into_owned();
    let children = [
        ('I', &a00 + &a11),
        ('X', &a01 + &a10),
        ('Y', (&a01 - &a10).map(|z| z * C64::new(0.0, 1.0))),
        ('Z', &a00 - &a11),
    ];
    for (letter, child) in children {
        prefix.push(letter);
        split(child, prefix, full_dim, out);
        prefix.pop();
    }
}

/// First-order product formula over Pauli terms: per step each term becomes
/// a basis change, a CX parity ladder, and one Rz. All-identity terms only
/// shift the global phase and are skipped.
pub fn compile_pauli_trotter(terms: &[PauliTerm], plan: &TrotterPlan) -> Result<GateCircuit> {
    let first = terms.first().ok_or_else(|| Error::invalid("no Pauli terms to compile"))?;
    let n = first.num_qubits();
    for t in terms {
        if t.num_qubits() != n {
            return Err(Error::WidthMismatch(t.num_qubits(), n));
        }
    }
    let order = plan.resolve_order(terms.len())?;

    let mut step = GateCircuit::empty(n);
    for &i in &order {
        let term = &terms[i];
        let support = term.support();
        let Some(&low) = support.first() else { continue };
        let theta = 2.0 * term.coefficient() * plan.time() / plan.steps() as f64;

        for &q in &support {
            match term.letter(q) {
                b'X' => step.push(Gate::h(q))?,
                b'Y' => {
                    step.push(Gate::sdg(q))?;
                    step.push(Gate::h(q))?;
                }
                _ => {}
            }
        }
        for pair in support.windows(2).rev() {
            step.push(Gate::cx(pair[1], pair[0]))?;
        }
        step.push(Gate::rz(low, theta))?;
        for pair in support.windows(2) {
            step.push(Gate::cx(pair[1], pair[0]))?;
        }
        for &q in &support {
            match term.letter(q) {
                b'X' => step.push(Gate::h(q))?,
                b'Y' => {
                    step.push(Gate::h(q))?;
                    step.push(Gate::s(q))?;
                }
                _ => {}
            }
        }
    }

    let mut circuit = GateCircuit::empty(n);
    for _ in 0..plan.steps() {
        circuit.append(&step)?;
    }
    Ok(circuit)
}
