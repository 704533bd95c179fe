#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qualm/linalg.hpp"
#include "qualm/oracle.hpp"

namespace qualm {

/// One instruction of a QUALM program: a named elementary gate on explicit
/// qubits, or an oracle-call marker.
struct Instruction {
    enum class Op { oracle_call, hadamard, pauli_x, i_sigma_y, cnot, swap, cswap };
    Op op;
    std::vector<int> qubits;  // global indices; L occupies [0, ell)

    static Instruction oracle() { return {Op::oracle_call, {}}; }
    static Instruction h(int q) { return {Op::hadamard, {q}}; }
    static Instruction x(int q) { return {Op::pauli_x, {q}}; }
    static Instruction iy(int q) { return {Op::i_sigma_y, {q}}; }
    static Instruction cx(int c, int t) { return {Op::cnot, {c, t}}; }
    static Instruction swp(int a, int b) { return {Op::swap, {a, b}}; }
    static Instruction cswp(int c, int a, int b) { return {Op::cswap, {c, a, b}}; }
};

/// Gate sequence over L (qubits [0, ell)) and W (qubits [ell, ell + w)),
/// with designated input/output qubit sets inside W.
struct QualmProgram {
    int ell = 0;
    int w = 0;
    std::vector<Instruction> instructions;
    std::vector<int> s_in;   // global qubit indices, subset of W
    std::vector<int> s_out;  // global qubit indices, subset of W; non-empty

    int total_qubits() const { return ell + w; }
    int query_complexity() const;
    int gate_complexity() const;
    void validate() const;
};

struct CoherentResult {
    std::vector<int> outcome_bits;  // one sampled bit per s_out qubit
    ComplexMatrix rho_out;          // exact reduced state on s_out (trajectory-conditional)
};

/// Runs the program on |x>_{s_in} (x bits) tensor |0...0>, substituting each
/// oracle marker with the oracle's next action on L, then measures s_out in
/// the computational basis. Randomness beyond the oracle's own sampling
/// enters only through the final Born sampling.
CoherentResult execute_coherent(const QualmProgram& program, LabOracle& oracle, SeededStream& rng,
                                const std::vector<int>& x_bits = {});

/// History-adaptive simple-measurement strategy: one rank-one POVM and one
/// preparation per oracle call, both indexed by the outcome history.
struct SmPolicy {
    int ell = 0;
    int rounds = 0;             // k = number of oracle calls
    int outcomes_per_round = 0;  // D_m

    /// POVM for round i in 0..k given history (s_0..s_{i-1}).
    std::function<std::vector<PovmElement>(int round, const std::vector<int>& history)> povm_for;
    /// State prepared after the round-i measurement, i in 0..k-1, given
    /// history (s_0..s_i).
    std::function<DensityMatrix(int round, const std::vector<int>& history)> prepare_for;
};

/// Round 0 measures |0^L>; each later round prepares, calls the oracle once,
/// and measures. Returns the transcript (s_0, ..., s_k). With
/// scrub_between_rounds the post-measurement register is overwritten before
/// the next preparation; transcripts are unchanged because no quantum state
/// of L survives a round boundary except the fresh preparation.
std::vector<int> execute_sm(const SmPolicy& policy, LabOracle& oracle, SeededStream& rng,
                            bool scrub_between_rounds = false);

/// Computational-basis projective policy preparing V|0> and measuring in the
/// Y-rotated basis every round, with no adaptivity.
SmPolicy computational_sm_policy(int ell, int k);

}  // namespace qualm
