#include "qualm/qualm.hpp"

#include <algorithm>
#include <cmath>

namespace qualm {

int QualmProgram::query_complexity() const {
    int n = 0;
    for (const auto& ins : instructions)
        if (ins.op == Instruction::Op::oracle_call) ++n;
    return n;
}

int QualmProgram::gate_complexity() const {
    return static_cast<int>(instructions.size()) - query_complexity();
}

void QualmProgram::validate() const {
    if (ell < 0 || w < 0 || total_qubits() > 24)
        throw SizeError("QualmProgram: register sizes out of range");
    if (s_out.empty()) throw ValidationError("QualmProgram: s_out must be non-empty");
    auto in_w = [&](int q) { return q >= ell && q < total_qubits(); };
    for (int q : s_in)
        if (!in_w(q)) throw ValidationError("QualmProgram: s_in must lie inside W");
    for (int q : s_out)
        if (!in_w(q)) throw ValidationError("QualmProgram: s_out must lie inside W");
    for (const auto& ins : instructions)
        for (int q : ins.qubits)
            if (q < 0 || q >= total_qubits())
                throw ValidationError("QualmProgram: instruction qubit out of range");
}

namespace {

// Qubit 0 is the most significant digit of the state index.
inline std::int64_t bit_of(int qubit, int total) { return std::int64_t(1) << (total - 1 - qubit); }

void apply_1q(ComplexVector& psi, int q, int total, const Eigen::Matrix2cd& u) {
    const std::int64_t b = bit_of(q, total);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        if (i & b) continue;
        Complex a0 = psi(i), a1 = psi(i | b);
        psi(i) = u(0, 0) * a0 + u(0, 1) * a1;
        psi(i | b) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void apply_swap(ComplexVector& psi, int qa, int qb, int total) {
    const std::int64_t ba = bit_of(qa, total), bb = bit_of(qb, total);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        bool sa = i & ba, sb = i & bb;
        if (sa && !sb) std::swap(psi(i), psi((i & ~ba) | bb));
    }
}

void apply_cnot(ComplexVector& psi, int qc, int qt, int total) {
    const std::int64_t bc = bit_of(qc, total), bt = bit_of(qt, total);
    for (std::int64_t i = 0; i < psi.size(); ++i)
        if ((i & bc) && !(i & bt)) std::swap(psi(i), psi(i | bt));
}

void apply_cswap(ComplexVector& psi, int qc, int qa, int qb, int total) {
    const std::int64_t bc = bit_of(qc, total), ba = bit_of(qa, total), bb = bit_of(qb, total);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        if (!(i & bc)) continue;
        bool sa = i & ba, sb = i & bb;
        if (sa && !sb) std::swap(psi(i), psi((i & ~ba) | bb));
    }
}

// Dense operator on the L block (qubits [0, ell)): view the state as a
// 2^ell x 2^rest matrix and left-multiply.
void apply_on_L(ComplexVector& psi, const ComplexMatrix& u, int ell) {
    const std::int64_t dl = std::int64_t(1) << ell;
    const std::int64_t dr = psi.size() / dl;
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
        psi.data(), dl, dr);
    view = u * view;
}

}  // namespace

CoherentResult execute_coherent(const QualmProgram& program, LabOracle& oracle, SeededStream& rng,
                                const std::vector<int>& x_bits) {
    program.validate();
    if (oracle.ell() != program.ell)
        throw ShapeError("execute_coherent: oracle register size mismatch");
    if (x_bits.size() > program.s_in.size())
        throw ShapeError("execute_coherent: more input bits than s_in qubits");
    const int total = program.total_qubits();
    const std::int64_t dim = std::int64_t(1) << total;
    if (dim > (std::int64_t(1) << 22)) throw SizeError("execute_coherent: register too large");

    ComplexVector psi = ComplexVector::Zero(dim);
    std::int64_t init = 0;
    for (std::size_t i = 0; i < x_bits.size(); ++i)
        if (x_bits[i]) init |= bit_of(program.s_in[i], total);
    psi(init) = 1.0;

    Eigen::Matrix2cd h, x, iy;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    x << 0, 1, 1, 0;
    iy << 0, 1, -1, 0;

    for (const auto& ins : program.instructions) {
        switch (ins.op) {
            case Instruction::Op::oracle_call: {
                CallAction a = oracle.next_action();
                if (a.replaces_state) {
                    // a complete measurement of L (outcome discarded) followed
                    // by fresh preparation reproduces the replacement channel
                    const std::int64_t dl = std::int64_t(1) << program.ell;
                    const std::int64_t dr = dim / dl;
                    std::vector<double> probs(dl, 0.0);
                    for (std::int64_t i = 0; i < dim; ++i) probs[i / dr] += std::norm(psi(i));
                    double r = rng.uniform(), acc = 0.0;
                    std::int64_t picked = dl - 1;
                    for (std::int64_t v = 0; v < dl; ++v) {
                        acc += probs[v];
                        if (r < acc) {
                            picked = v;
                            break;
                        }
                    }
                    ComplexVector rest = ComplexVector::Zero(dr);
                    double nrm = std::sqrt(std::max(probs[picked], 1e-300));
                    for (std::int64_t j = 0; j < dr; ++j) rest(j) = psi(picked * dr + j) / nrm;
                    psi.setZero();
                    const auto& amp = a.state->amplitudes();
                    for (std::int64_t v = 0; v < dl; ++v)
                        for (std::int64_t j = 0; j < dr; ++j) psi(v * dr + j) = amp(v) * rest(j);
                } else {
                    apply_on_L(psi, a.unitary, program.ell);
                }
                break;
            }
            case Instruction::Op::hadamard: apply_1q(psi, ins.qubits[0], total, h); break;
            case Instruction::Op::pauli_x: apply_1q(psi, ins.qubits[0], total, x); break;
            case Instruction::Op::i_sigma_y: apply_1q(psi, ins.qubits[0], total, iy); break;
            case Instruction::Op::cnot: apply_cnot(psi, ins.qubits[0], ins.qubits[1], total); break;
            case Instruction::Op::swap: apply_swap(psi, ins.qubits[0], ins.qubits[1], total); break;
            case Instruction::Op::cswap:
                apply_cswap(psi, ins.qubits[0], ins.qubits[1], ins.qubits[2], total);
                break;
        }
    }

    // reduced state on s_out
    const int nout = static_cast<int>(program.s_out.size());
    const int dout = 1 << nout;
    ComplexMatrix rho = ComplexMatrix::Zero(dout, dout);
    std::vector<std::int64_t> out_bits(nout);
    for (int i = 0; i < nout; ++i) out_bits[i] = bit_of(program.s_out[i], total);
    std::vector<int> key(dim);
    for (std::int64_t i = 0; i < dim; ++i) {
        int v = 0;
        for (int b = 0; b < nout; ++b) v = (v << 1) | ((i & out_bits[b]) ? 1 : 0);
        key[i] = v;
    }
    // rho_{ab} = sum over rest of psi[a, rest] conj(psi[b, rest])
    std::vector<std::vector<std::int64_t>> by_key(dout);
    for (std::int64_t i = 0; i < dim; ++i) by_key[key[i]].push_back(i);
    for (int a = 0; a < dout; ++a)
        for (int b = 0; b < dout; ++b) {
            Complex acc = 0.0;
            for (std::size_t r = 0; r < by_key[a].size(); ++r)
                acc += psi(by_key[a][r]) * std::conj(psi(by_key[b][r]));
            rho(a, b) = acc;
        }

    CoherentResult res;
    res.rho_out = rho;
    double r = rng.uniform(), acc = 0.0;
    int outcome = dout - 1;
    for (int v = 0; v < dout; ++v) {
        acc += rho(v, v).real();
        if (r < acc) {
            outcome = v;
            break;
        }
    }
    res.outcome_bits.resize(nout);
    for (int b = 0; b < nout; ++b) res.outcome_bits[b] = (outcome >> (nout - 1 - b)) & 1;
    return res;
}

std::vector<int> execute_sm(const SmPolicy& policy, LabOracle& oracle, SeededStream& rng,
                            bool scrub_between_rounds) {
    if (policy.rounds < 1) throw ValidationError("execute_sm: rounds must be >= 1");
    if (oracle.ell() != policy.ell) throw ShapeError("execute_sm: oracle register size mismatch");
    const int dim = 1 << policy.ell;

    std::vector<int> history;
    DensityMatrix rho = DensityMatrix::pure(PureState::basis(dim, 0));
    int s0 = povm_measure(rho, policy.povm_for(0, history), rng);
    history.push_back(s0);

    for (int i = 1; i <= policy.rounds; ++i) {
        DensityMatrix sigma = policy.prepare_for(i - 1, history);
        DensityMatrix evolved = oracle.call_density(sigma);
        if (scrub_between_rounds) {
            // dephase L in the measurement basis; for a projective policy the
            // transcript statistics cannot change, since nothing quantum
            // crosses a round boundary except the fresh preparation
            ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
            diag.diagonal() = evolved.entries().diagonal();
            evolved = DensityMatrix(diag);
        }
        int si = povm_measure(evolved, policy.povm_for(i, history), rng);
        history.push_back(si);
    }
    return history;
}

SmPolicy computational_sm_policy(int ell, int k) {
    const int dim = 1 << ell;
    SmPolicy p;
    p.ell = ell;
    p.rounds = k;
    p.outcomes_per_round = dim;
    p.povm_for = [dim](int, const std::vector<int>&) {
        std::vector<PovmElement> povm;
        povm.reserve(dim);
        for (int i = 0; i < dim; ++i) povm.push_back({1.0, PureState::basis(dim, i)});
        return povm;
    };
    p.prepare_for = [dim](int, const std::vector<int>&) {
        return DensityMatrix::pure(PureState::basis(dim, 0));
    };
    return p;
}

}  // namespace qualm
