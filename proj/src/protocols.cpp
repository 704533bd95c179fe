#include "qualm/protocols.hpp"

#include <cmath>
#include <map>

#include "qualm/sampling.hpp"

namespace qualm {

QualmProgram swap_test_program(int ell) {
    if (ell < 1) throw SizeError("swap_test_program: ell must be >= 1");
    QualmProgram p;
    p.ell = ell;
    p.w = ell + 1;
    const int control = 2 * ell;  // single W_2 qubit
    p.instructions.push_back(Instruction::oracle());
    for (int i = 0; i < ell; ++i) p.instructions.push_back(Instruction::swp(i, ell + i));
    p.instructions.push_back(Instruction::oracle());
    p.instructions.push_back(Instruction::h(control));
    for (int i = 0; i < ell; ++i) p.instructions.push_back(Instruction::cswp(control, i, ell + i));
    p.instructions.push_back(Instruction::h(control));
    p.s_out = {control};
    return p;
}

QualmProgram swap_test_program_entangled(int ell) {
    // preparation of a maximally entangled pair on L x W_1 before the calls
    QualmProgram p;
    p.ell = ell;
    p.w = ell + 1;
    const int control = 2 * ell;
    for (int i = 0; i < ell; ++i) {
        p.instructions.push_back(Instruction::h(i));
        p.instructions.push_back(Instruction::cx(i, ell + i));
    }
    p.instructions.push_back(Instruction::oracle());
    for (int i = 0; i < ell; ++i) p.instructions.push_back(Instruction::swp(i, ell + i));
    p.instructions.push_back(Instruction::oracle());
    p.instructions.push_back(Instruction::h(control));
    for (int i = 0; i < ell; ++i) p.instructions.push_back(Instruction::cswp(control, i, ell + i));
    p.instructions.push_back(Instruction::h(control));
    p.s_out = {control};
    return p;
}

double swap_test_pr0(const ComplexMatrix& u1, const ComplexMatrix& u2) {
    Complex overlap = (u1.col(0).adjoint() * u2.col(0))(0, 0);
    return 0.5 * (1.0 + std::norm(overlap));
}

DistinguisherVerdict swap_distinguish(int ell, LabOracle& oracle, int reps, SeededStream& rng) {
    if (reps < 1) throw ValidationError("swap_distinguish: reps must be >= 1");
    if (oracle.ell() != ell) throw ShapeError("swap_distinguish: oracle register size mismatch");
    DistinguisherVerdict v;
    v.repetitions = reps;
    bool saw_one = false;
    for (int r = 0; r < reps; ++r) {
        CallAction a1 = oracle.next_action();
        CallAction a2 = oracle.next_action();
        if (a1.replaces_state || a2.replaces_state)
            throw ShapeError("swap_distinguish: oracle must act unitarily");
        double pr0 = swap_test_pr0(a1.unitary, a2.unitary);
        int bit = (rng.uniform() < pr0) ? 0 : 1;
        v.raw_outcomes.push_back(bit);
        saw_one = saw_one || (bit == 1);
    }
    v.label = saw_one ? "LOP" : "LOQ";
    return v;
}

namespace {

// Wires: L = [0, ell), W1 = [ell, 2 ell), W2 = [2 ell, 3 ell),
// W3 = [3 ell, 4 ell), control = 4 ell.
QualmProgram symmetry_program(int ell, bool with_J) {
    if (ell < 1) throw SizeError("symmetry_program: ell must be >= 1");
    QualmProgram p;
    p.ell = ell;
    p.w = 3 * ell + 1;
    const int w1 = ell, w2 = 2 * ell, w3 = 3 * ell, control = 4 * ell;
    // two maximally entangled pairs plus |+> on the control
    for (int i = 0; i < ell; ++i) {
        p.instructions.push_back(Instruction::h(i));
        p.instructions.push_back(Instruction::cx(i, w1 + i));
        p.instructions.push_back(Instruction::h(w2 + i));
        p.instructions.push_back(Instruction::cx(w2 + i, w3 + i));
    }
    p.instructions.push_back(Instruction::h(control));
    p.instructions.push_back(Instruction::oracle());
    if (with_J) p.instructions.push_back(Instruction::iy(0));  // J = i sigma^y x 1
    for (int i = 0; i < ell; ++i) p.instructions.push_back(Instruction::swp(i, w1 + i));
    if (with_J) p.instructions.push_back(Instruction::iy(0));
    p.instructions.push_back(Instruction::oracle());
    // controlled swap of L x W1 against W2 x W3, then the {+,-} readout
    for (int i = 0; i < ell; ++i) {
        p.instructions.push_back(Instruction::cswp(control, i, w2 + i));
        p.instructions.push_back(Instruction::cswp(control, w1 + i, w3 + i));
    }
    p.instructions.push_back(Instruction::h(control));
    p.s_out = {control};
    return p;
}

}  // namespace

QualmProgram symmetry_program_stage1(int ell) { return symmetry_program(ell, false); }
QualmProgram symmetry_program_stage2(int ell) { return symmetry_program(ell, true); }

double symmetry_stage1_pr_plus(const ComplexMatrix& a) {
    const double d = static_cast<double>(a.rows());
    Complex t = (a * a.transpose()).trace() / d;
    return 0.5 * (1.0 + std::norm(t));
}

double symmetry_stage2_pr_plus(const ComplexMatrix& a) {
    const double d = static_cast<double>(a.rows());
    ComplexMatrix J = canonical_J(static_cast<int>(a.rows()) / 2);
    Complex t = (a * (-J * a.transpose() * J)).trace() / d;
    return 0.5 * (1.0 + std::norm(t));
}

DistinguisherVerdict symmetry_distinguish(int ell, LabOracle& oracle, int reps,
                                          SeededStream& rng) {
    if (reps < 1) throw ValidationError("symmetry_distinguish: reps must be >= 1");
    if (oracle.ell() != ell) throw ShapeError("symmetry_distinguish: oracle register size mismatch");
    DistinguisherVerdict v;
    v.repetitions = reps;

    // each repetition consumes two oracle calls; the fixed matrix is the
    // same throughout, so the per-rep outcome probability is a function of
    // the hidden sample
    const ComplexMatrix& a = oracle.fixed_matrix();
    double p1 = symmetry_stage1_pr_plus(a);
    bool all_plus = true;
    for (int r = 0; r < reps; ++r) {
        oracle.next_action();
        oracle.next_action();
        int bit = (rng.uniform() < p1) ? 0 : 1;  // 0 encodes "+"
        v.raw_outcomes.push_back(bit);
        all_plus = all_plus && (bit == 0);
    }
    if (all_plus) {
        v.label = "O";
        return v;
    }
    double p2 = symmetry_stage2_pr_plus(a);
    all_plus = true;
    for (int r = 0; r < reps; ++r) {
        oracle.next_action();
        oracle.next_action();
        int bit = (rng.uniform() < p2) ? 0 : 1;
        v.raw_outcomes.push_back(bit);
        all_plus = all_plus && (bit == 0);
    }
    v.label = all_plus ? "Sp" : "U";
    return v;
}

SmPolicy parallel_sm_policy(int ell, int k, const ComplexMatrix& Y, const ComplexMatrix& V) {
    const int dim = 1 << ell;
    if (Y.rows() != dim || V.rows() != dim)
        throw ShapeError("parallel_sm_policy: rotation dimension mismatch");
    if (!is_unitary(Y) || !is_unitary(V))
        throw ValidationError("parallel_sm_policy: Y and V must be unitary");
    SmPolicy p;
    p.ell = ell;
    p.rounds = k;
    p.outcomes_per_round = dim;
    ComplexMatrix ydag = Y.adjoint();
    p.povm_for = [dim, ydag](int, const std::vector<int>&) {
        std::vector<PovmElement> povm;
        povm.reserve(dim);
        for (int i = 0; i < dim; ++i) povm.push_back({1.0, PureState(ydag.col(i))});
        return povm;
    };
    DensityMatrix prep = DensityMatrix::pure(PureState(V.col(0)));
    p.prepare_for = [prep](int, const std::vector<int>&) { return prep; };
    return p;
}

SmPolicy greedy_sm_policy(int ell, int k) {
    const int dim = 1 << ell;
    SmPolicy p = computational_sm_policy(ell, k);
    p.prepare_for = [dim](int, const std::vector<int>& history) {
        return DensityMatrix::pure(PureState::basis(dim, history.back()));
    };
    return p;
}

DistinguisherVerdict amplify(const std::function<DistinguisherVerdict(SeededStream&)>& run, int m,
                             SeededStream& rng) {
    if (m < 1 || m % 2 == 0) throw ValidationError("amplify: m must be odd and >= 1");
    std::map<std::string, int> votes;
    std::vector<std::string> order;
    DistinguisherVerdict out;
    for (int i = 0; i < m; ++i) {
        SeededStream sub = rng.derive(static_cast<std::uint64_t>(i));
        DistinguisherVerdict v = run(sub);
        if (votes.find(v.label) == votes.end()) order.push_back(v.label);
        votes[v.label] += 1;
        out.raw_outcomes.insert(out.raw_outcomes.end(), v.raw_outcomes.begin(),
                                v.raw_outcomes.end());
        out.repetitions += v.repetitions;
    }
    int best = -1;
    for (const auto& label : order)
        if (votes[label] > best) {
            best = votes[label];
            out.label = label;
        }
    return out;
}

}  // namespace qualm
