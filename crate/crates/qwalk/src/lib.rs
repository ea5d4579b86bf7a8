//! Compiler and verification lab for continuous-time quantum walks on state
//! space. A walk Hamiltonian given as a bitstring-labeled graph is decomposed
//! into matchings, the matchings are compressed, and the evolution is emitted
//! as a Trotterized gate circuit. A Pauli-decomposition baseline compiler and
//! dense linear-algebra oracles are included for validation and benchmarking.

pub mod bench;
pub mod circuit;
pub mod commuting;
pub mod compile;
pub mod graph;
pub mod linalg;
pub mod matching;
pub mod pauli;
pub mod peephole;
pub mod synth;

use std::path::PathBuf;

/// Hard cap on dense operator dimension (2^12). Everything above it is
/// refused with `Error::QubitBudget` instead of exhausting memory.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Loop guard for Pauli decomposition (4^n strings).
pub const MAX_PAULI_QUBITS: usize = 8;

/// Equality tolerance for all unitary and norm comparisons.
pub const TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bit width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("qubit budget exceeded: {requested} qubits, cap is {cap}")]
    QubitBudget { requested: usize, cap: usize },
    #[error("matrix is not real symmetric")]
    NotSymmetric,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use circuit::{Gate, GateCircuit, GateKind};
pub use commuting::{ComponentKind, UnionStructure, VertexPermutation, WitnessReport};
pub use compile::{compile_matching_trotter, edge_circuit, matching_circuit, TrotterPlan};
pub use graph::{hamming_distance, Bitstring, DatasetKind, DatasetSpec, LabeledGraph};
pub use linalg::{commutator_norm, exact_evolution, spectral_norm_diff, DenseOperator};
pub use matching::{
    compress_matching, expand_edge, greedy_matching_decompose, mergeable_at, CompressedEdge,
    Matching,
};
pub use pauli::{compile_pauli_trotter, pauli_decompose, PauliTerm};
pub use peephole::peephole_optimize;
pub use synth::{lower_circuit, synthesize_mcrx};
