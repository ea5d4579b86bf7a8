//! C bindings for the qwalk compiler. Every entry point takes opaque handles
//! or plain C data, never unwinds across the boundary, and reports failures
//! through [`QwStatus`]. Out-parameters are written only on `QW_STATUS_OK`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qwalk::compile::{compile_matching_trotter, TrotterPlan};
use qwalk::graph::{gen_hypercube, LabeledGraph};
use qwalk::linalg::{exact_evolution, spectral_norm_diff};
use qwalk::pauli::{compile_pauli_trotter, pauli_decompose};
use qwalk::peephole::peephole_optimize;
use qwalk::synth::lower_circuit;
use qwalk::{Error, GateCircuit};

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwStatus {
    /// The call succeeded and all out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was structurally valid but semantically rejected.
    InvalidArgument = 2,
    /// Input text could not be parsed.
    ParseError = 3,
    /// The request needs a dense operator wider than the supported cap.
    QubitBudget = 4,
    /// The operator was expected to be real symmetric but is not.
    NotSymmetric = 5,
    /// An internal invariant failed; the out-parameters are untouched.
    Internal = 6,
}

/// Compilation strategy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwMethod {
    /// Matching decomposition with compressed multi-controlled rotations.
    Matching = 0,
    /// Pauli-string decomposition with one rotation ladder per term.
    Pauli = 1,
}

/// Opaque vertex-labeled graph handle.
pub struct QwGraph(LabeledGraph);

/// Opaque lowered gate circuit handle.
pub struct QwCircuit(GateCircuit);

fn status_of(e: &Error) -> QwStatus {
    match e {
        Error::Parse(_) | Error::Io { .. } => QwStatus::ParseError,
        Error::QubitBudget { .. } => QwStatus::QubitBudget,
        Error::NotSymmetric => QwStatus::NotSymmetric,
        _ => QwStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> QwStatus) -> QwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => QwStatus::Internal,
    }
}

/// Both methods share the CLI pipeline: Trotterize, lower, peephole.
fn build(graph: &LabeledGraph, method: QwMethod, time: f64, steps: usize) -> Result<GateCircuit, Error> {
    let plan = TrotterPlan::new(time, steps)?;
    let raw = match method {
        QwMethod::Matching => compile_matching_trotter(graph, &plan)?,
        QwMethod::Pauli => {
            let terms = pauli_decompose(&graph.adjacency_matrix()?)?;
            if terms.is_empty() {
                GateCircuit::empty(graph.num_qubits())
            } else {
                compile_pauli_trotter(&terms, &plan)?
            }
        }
    };
    Ok(peephole_optimize(&lower_circuit(&raw)?))
}

/// Parse a graph from JSON text (`{"num_qubits": n, "edges": [[u, v], ...]}`).
/// On success `*out` owns the graph; release it with `qw_graph_free`.
///
/// # Safety
/// `json` must point to a valid NUL-terminated string and `out` to writable
/// memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_graph_parse_json(
    json: *const c_char,
    out: *mut *mut QwGraph,
) -> QwStatus {
    if json.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| {
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return QwStatus::ParseError,
        };
        match LabeledGraph::from_json_str(text) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(QwGraph(g)));
                QwStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Build the hypercube graph on `num_qubits` bits.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_graph_hypercube(num_qubits: usize, out: *mut *mut QwGraph) -> QwStatus {
    if out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| match gen_hypercube(num_qubits) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(QwGraph(g)));
            QwStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Number of qubits spanned by the graph's vertex labels.
///
/// # Safety
/// `graph` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_graph_num_qubits(graph: *const QwGraph, out: *mut usize) -> QwStatus {
    if graph.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    *out = (*graph).0.num_qubits();
    QwStatus::Ok
}

/// Number of edges in the graph.
///
/// # Safety
/// `graph` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_graph_num_edges(graph: *const QwGraph, out: *mut usize) -> QwStatus {
    if graph.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    *out = (*graph).0.num_edges();
    QwStatus::Ok
}

/// Release a graph handle. A null pointer is a no-op.
///
/// # Safety
/// `graph` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qw_graph_free(graph: *mut QwGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Compile `exp(-iAt)` into a lowered, peephole-optimized circuit with
/// `steps` first-order Trotter steps. On success `*out` owns the circuit;
/// release it with `qw_circuit_free`.
///
/// # Safety
/// `graph` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_compile(
    graph: *const QwGraph,
    method: QwMethod,
    time: f64,
    steps: usize,
    out: *mut *mut QwCircuit,
) -> QwStatus {
    if graph.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| match build(&(*graph).0, method, time, steps) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(QwCircuit(c)));
            QwStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Total gate count of a circuit.
///
/// # Safety
/// `circuit` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_circuit_num_gates(
    circuit: *const QwCircuit,
    out: *mut usize,
) -> QwStatus {
    if circuit.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    *out = (*circuit).0.len();
    QwStatus::Ok
}

/// CX count of a lowered circuit.
///
/// # Safety
/// `circuit` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_circuit_cx_count(
    circuit: *const QwCircuit,
    out: *mut usize,
) -> QwStatus {
    if circuit.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| match (*circuit).0.cx_count() {
        Ok(n) => {
            *out = n;
            QwStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Circuit depth over its gate layers.
///
/// # Safety
/// `circuit` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_circuit_depth(circuit: *const QwCircuit, out: *mut usize) -> QwStatus {
    if circuit.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    *out = (*circuit).0.depth();
    QwStatus::Ok
}

/// Serialize a circuit to JSON. On success `*out` owns a NUL-terminated
/// string; release it with `qw_string_free`.
///
/// # Safety
/// `circuit` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_circuit_to_json(
    circuit: *const QwCircuit,
    out: *mut *mut c_char,
) -> QwStatus {
    if circuit.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| {
        let json = (*circuit).0.to_json_string();
        match CString::new(json) {
            Ok(s) => {
                *out = s.into_raw();
                QwStatus::Ok
            }
            Err(_) => QwStatus::Internal,
        }
    })
}

/// Release a circuit handle. A null pointer is a no-op.
///
/// # Safety
/// `circuit` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn qw_circuit_free(circuit: *mut QwCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Release a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be null or a string from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn qw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Compile with `qw_compile` semantics and write the spectral-norm distance
/// between the circuit and the exact evolution into `*out`. Fails with
/// `QW_STATUS_QUBIT_BUDGET` when the graph is too wide to simulate densely.
///
/// # Safety
/// `graph` must be a live handle from this library, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_simulate_error(
    graph: *const QwGraph,
    method: QwMethod,
    time: f64,
    steps: usize,
    out: *mut f64,
) -> QwStatus {
    if graph.is_null() || out.is_null() {
        return QwStatus::NullPointer;
    }
    guarded(|| {
        let g = &(*graph).0;
        let result = build(g, method, time, steps).and_then(|circuit| {
            let exact = exact_evolution(&g.adjacency_matrix()?, time)?;
            spectral_norm_diff(&circuit.unitary()?, &exact)
        });
        match result {
            Ok(err) => {
                *out = err;
                QwStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
