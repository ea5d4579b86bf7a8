/* C interface to the qwalk quantum-walk circuit compiler. */

#ifndef QWALK_H
#define QWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Compilation strategy selector.
typedef enum QwMethod {
  // Matching decomposition with compressed multi-controlled rotations.
  QW_METHOD_MATCHING = 0,
  // Pauli-string decomposition with one rotation ladder per term.
  QW_METHOD_PAULI = 1,
} QwMethod;

// Result of every fallible call in this interface.
typedef enum QwStatus {
  // The call succeeded and all out-parameters are valid.
  QW_STATUS_OK = 0,
  // A required pointer argument was null.
  QW_STATUS_NULL_POINTER = 1,
  // An argument was structurally valid but semantically rejected.
  QW_STATUS_INVALID_ARGUMENT = 2,
  // Input text could not be parsed.
  QW_STATUS_PARSE_ERROR = 3,
  // The request needs a dense operator wider than the supported cap.
  QW_STATUS_QUBIT_BUDGET = 4,
  // The operator was expected to be real symmetric but is not.
  QW_STATUS_NOT_SYMMETRIC = 5,
  // An internal invariant failed; the out-parameters are untouched.
  QW_STATUS_INTERNAL = 6,
} QwStatus;

// Opaque lowered gate circuit handle.
typedef struct QwCircuit QwCircuit;

// Opaque vertex-labeled graph handle.
typedef struct QwGraph QwGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a graph from JSON text (`{"num_qubits": n, "edges": [[u, v], ...]}`).
// On success `*out` owns the graph; release it with `qw_graph_free`.
//
// # Safety
// `json` must point to a valid NUL-terminated string and `out` to writable
// memory for one pointer.
enum QwStatus qw_graph_parse_json(const char *json, struct QwGraph **out);

// Build the hypercube graph on `num_qubits` bits.
//
// # Safety
// `out` must point to writable memory for one pointer.
enum QwStatus qw_graph_hypercube(size_t num_qubits, struct QwGraph **out);

// Number of qubits spanned by the graph's vertex labels.
//
// # Safety
// `graph` must be a live handle from this library, `out` writable.
enum QwStatus qw_graph_num_qubits(const struct QwGraph *graph, size_t *out);

// Number of edges in the graph.
//
// # Safety
// `graph` must be a live handle from this library, `out` writable.
enum QwStatus qw_graph_num_edges(const struct QwGraph *graph, size_t *out);

// Release a graph handle. A null pointer is a no-op.
//
// # Safety
// `graph` must be null or a handle not freed before.
void qw_graph_free(struct QwGraph *graph);

// Compile `exp(-iAt)` into a lowered, peephole-optimized circuit with
// `steps` first-order Trotter steps. On success `*out` owns the circuit;
// release it with `qw_circuit_free`.
//
// # Safety
// `graph` must be a live handle from this library, `out` writable.
enum QwStatus qw_compile(const struct QwGraph *graph,
                         enum QwMethod method,
                         double time,
                         size_t steps,
                         struct QwCircuit **out);

// Total gate count of a circuit.
//
// # Safety
// `circuit` must be a live handle from this library, `out` writable.
enum QwStatus qw_circuit_num_gates(const struct QwCircuit *circuit, size_t *out);

// CX count of a lowered circuit.
//
// # Safety
// `circuit` must be a live handle from this library, `out` writable.
enum QwStatus qw_circuit_cx_count(const struct QwCircuit *circuit, size_t *out);

// Circuit depth over its gate layers.
//
// # Safety
// `circuit` must be a live handle from this library, `out` writable.
enum QwStatus qw_circuit_depth(const struct QwCircuit *circuit, size_t *out);

// Serialize a circuit to JSON. On success `*out` owns a NUL-terminated
// string; release it with `qw_string_free`.
//
// # Safety
// `circuit` must be a live handle from this library, `out` writable.
enum QwStatus qw_circuit_to_json(const struct QwCircuit *circuit, char **out);

// Release a circuit handle. A null pointer is a no-op.
//
// # Safety
// `circuit` must be null or a handle not freed before.
void qw_circuit_free(struct QwCircuit *circuit);

// Release a string returned by this library. A null pointer is a no-op.
//
// # Safety
// `s` must be null or a string from this library not freed before.
void qw_string_free(char *s);

// Compile with `qw_compile` semantics and write the spectral-norm distance
// between the circuit and the exact evolution into `*out`. Fails with
// `QW_STATUS_QUBIT_BUDGET` when the graph is too wide to simulate densely.
//
// # Safety
// `graph` must be a live handle from this library, `out` writable.
enum QwStatus qw_simulate_error(const struct QwGraph *graph,
                                enum QwMethod method,
                                double time,
                                size_t steps,
                                double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QWALK_H */
