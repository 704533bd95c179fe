#include "qualm/linalg.hpp"

#include <cmath>

namespace qualm {

namespace {

void check_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    std::int64_t rows = std::int64_t(a.rows()) * b.rows();
    std::int64_t cols = std::int64_t(a.cols()) * b.cols();
    if (rows * cols > kMaxDenseEntries)
        throw SizeError("kron: result exceeds dense entry cap");
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& mats) {
    if (mats.empty()) return ComplexMatrix::Identity(1, 1);
    ComplexMatrix out = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) out = kron(out, mats[i]);
    return out;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

PureState::PureState(ComplexVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0) throw ShapeError("PureState: empty amplitude vector");
    if (!amp_.allFinite()) throw ValidationError("PureState: non-finite amplitudes");
    double n = amp_.norm();
    if (std::abs(n - 1.0) > 1e-12) throw ValidationError("PureState: norm != 1");
}

PureState PureState::basis(int dim, int index) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(ComplexMatrix entries) : mat_(std::move(entries)) {
    if (mat_.rows() != mat_.cols()) throw ShapeError("DensityMatrix: not square");
    check_finite(mat_, "DensityMatrix");
    if (max_abs(mat_ - mat_.adjoint()) > 1e-10)
        throw ValidationError("DensityMatrix: not Hermitian within 1e-10");
    if (std::abs(mat_.trace().real() - 1.0) > 1e-10 || std::abs(mat_.trace().imag()) > 1e-10)
        throw ValidationError("DensityMatrix: trace != 1 within 1e-10");
    // PSD floor at -1e-9 absorbs round-off from repeated channel application.
    // The eigensolve is skipped above 256 dimensions; executors that build
    // large interim operators validate their outputs at the reduced size.
    if (mat_.rows() <= 256) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw ValidationError("DensityMatrix: negative eigenvalue below -1e-9");
    }
}

DensityMatrix DensityMatrix::pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / double(dim));
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& rho, const std::vector<int>& dims,
                                const std::vector<int>& keep) {
    std::int64_t prod = 1;
    for (int d : dims) prod *= d;
    if (prod != rho.rows()) throw ShapeError("partial_trace: dims do not factor the operator");

    const int nf = static_cast<int>(dims.size());
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw ShapeError("partial_trace: keep index out of range");
        kept[k] = true;
    }
    int dkeep = 1, dtrace = 1;
    for (int f = 0; f < nf; ++f) (kept[f] ? dkeep : dtrace) *= dims[f];

    // strides of each factor in the full index
    std::vector<std::int64_t> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

    std::vector<int> keep_order, trace_order;
    for (int f = 0; f < nf; ++f) (kept[f] ? keep_order : trace_order).push_back(f);

    auto full_index = [&](int keep_idx, int trace_idx) {
        std::int64_t idx = 0;
        int r = keep_idx;
        for (int f = static_cast<int>(keep_order.size()) - 1; f >= 0; --f) {
            int d = dims[keep_order[f]];
            idx += std::int64_t(r % d) * stride[keep_order[f]];
            r /= d;
        }
        r = trace_idx;
        for (int f = static_cast<int>(trace_order.size()) - 1; f >= 0; --f) {
            int d = dims[trace_order[f]];
            idx += std::int64_t(r % d) * stride[trace_order[f]];
            r /= d;
        }
        return idx;
    };

    ComplexMatrix out = ComplexMatrix::Zero(dkeep, dkeep);
    for (int i = 0; i < dkeep; ++i)
        for (int j = 0; j < dkeep; ++j) {
            Complex acc = 0.0;
            for (int t = 0; t < dtrace; ++t) acc += rho(full_index(i, t), full_index(j, t));
            out(i, j) = acc;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
    return DensityMatrix(partial_trace_raw(rho.entries(), dims, keep));
}

namespace {

void check_orthonormal_complete(const std::vector<PureState>& basis, int dim) {
    if (basis.empty()) throw ValidationError("measurement basis is empty");
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& b : basis) {
        if (b.dim() != dim) throw ShapeError("basis state dimension mismatch");
        sum += b.projector();
    }
    if (max_abs(sum - ComplexMatrix::Identity(dim, dim)) > 1e-9)
        throw ValidationError("basis does not resolve the identity within 1e-9");
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            if (std::abs(basis[i].amplitudes().dot(basis[j].amplitudes())) > 1e-9)
                throw ValidationError("basis states are not orthogonal");
}

int sample_from_weights(const std::vector<double>& w, SeededStream& rng) {
    double total = 0.0;
    for (double x : w) total += x;
    double r = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
}

}  // namespace

std::pair<int, PureState> born_measure(const DensityMatrix& rho,
                                       const std::vector<PureState>& basis, SeededStream& rng) {
    check_orthonormal_complete(basis, rho.dim());
    std::vector<double> probs(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& v = basis[i].amplitudes();
        probs[i] = std::max(0.0, (v.adjoint() * rho.entries() * v)(0, 0).real());
    }
    int outcome = sample_from_weights(probs, rng);
    return {outcome, basis[outcome]};
}

std::pair<int, PureState> born_measure(const PureState& psi, const std::vector<PureState>& basis,
                                       SeededStream& rng) {
    check_orthonormal_complete(basis, psi.dim());
    std::vector<double> probs(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Complex a = basis[i].amplitudes().dot(psi.amplitudes());
        probs[i] = std::norm(a);
    }
    int outcome = sample_from_weights(probs, rng);
    return {outcome, basis[outcome]};
}

void check_povm_complete(const std::vector<PovmElement>& povm, int dim) {
    if (povm.empty()) throw ValidationError("POVM is empty");
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& e : povm) {
        if (e.vector.dim() != dim) throw ShapeError("POVM element dimension mismatch");
        if (e.weight <= 0.0 || e.weight > 1.0 + 1e-12)
            throw ValidationError("POVM weight outside (0, 1]");
        sum += e.weight * e.vector.projector();
    }
    if (max_abs(sum - ComplexMatrix::Identity(dim, dim)) > 1e-9)
        throw ValidationError("POVM does not resolve the identity within 1e-9");
}

int povm_measure(const DensityMatrix& rho, const std::vector<PovmElement>& povm,
                 SeededStream& rng) {
    check_povm_complete(povm, rho.dim());
    std::vector<double> probs(povm.size());
    for (std::size_t i = 0; i < povm.size(); ++i) {
        const auto& v = povm[i].vector.amplitudes();
        probs[i] = std::max(0.0, povm[i].weight * (v.adjoint() * rho.entries() * v)(0, 0).real());
    }
    return sample_from_weights(probs, rng);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())) < tol;
}

double trace_norm_hermitian(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qualm
