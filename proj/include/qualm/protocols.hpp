#pragma once

#include <functional>
#include <string>

#include "qualm/qualm.hpp"

namespace qualm {

struct DistinguisherVerdict {
    std::string label;              // "LOQ"/"LOP" or "U"/"O"/"Sp"
    std::vector<int> raw_outcomes;  // per-repetition bits, stage-ordered
    int repetitions = 0;
};

/// Two oracle calls around a SWAP test on L and an ell-qubit ancilla; the
/// control qubit is s_out. Starts from |0^ell> (the entangled-preparation
/// variant is swap_test_program_entangled).
QualmProgram swap_test_program(int ell);
QualmProgram swap_test_program_entangled(int ell);

/// Pr[control reads 0] for a SWAP test between u1|0> and u2|0>.
double swap_test_pr0(const ComplexMatrix& u1, const ComplexMatrix& u2);

/// Decision for the fixed-vs-fresh task: any control-1 across the
/// repetitions means LOP (the LOQ branch reads 0 with certainty).
DistinguisherVerdict swap_distinguish(int ell, LabOracle& oracle, int reps, SeededStream& rng);

/// Stage 1 estimates |tr(A A^T)/D|^2; stage 2 conjugates by J and estimates
/// |tr(A (-J A^T J))/D|^2. Both use two oracle calls on 3*ell + 1 workspace
/// qubits with a {+,-} readout compiled as H-cSWAP-H.
QualmProgram symmetry_program_stage1(int ell);
QualmProgram symmetry_program_stage2(int ell);

double symmetry_stage1_pr_plus(const ComplexMatrix& a);
double symmetry_stage2_pr_plus(const ComplexMatrix& a);

/// All-+ at stage 1 -> O; otherwise all-+ at stage 2 -> Sp; otherwise U.
DistinguisherVerdict symmetry_distinguish(int ell, LabOracle& oracle, int reps,
                                          SeededStream& rng);

/// Non-adaptive policy: every round prepares V|0> and measures in the
/// Y-rotated computational basis {Y^dag |x>}.
SmPolicy parallel_sm_policy(int ell, int k, const ComplexMatrix& Y, const ComplexMatrix& V);

/// Adaptive baseline: re-prepares the state just observed and measures in
/// the computational basis.
SmPolicy greedy_sm_policy(int ell, int k);

/// Majority vote over m independent runs (m odd); ties cannot occur for
/// two-label verdicts and resolve to the first-seen label otherwise.
DistinguisherVerdict amplify(const std::function<DistinguisherVerdict(SeededStream&)>& run, int m,
                             SeededStream& rng);

}  // namespace qualm
