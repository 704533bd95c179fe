#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qualm/errors.hpp"
#include "qualm/rng.hpp"

namespace qualm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Hard cap on dense objects: 2^24 entries (a 4096x4096 matrix).
inline constexpr std::int64_t kMaxDenseEntries = std::int64_t(1) << 24;

/// Largest simulated pure-state register, 12 qubits.
inline constexpr int kMaxStateQubits = 12;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product of a list, left to right.
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& mats);

ComplexMatrix identity(int dim);

/// Normalized state vector.
class PureState {
  public:
    explicit PureState(ComplexVector amplitudes);
    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(amp_.size()); }
    const ComplexVector& amplitudes() const { return amp_; }
    Complex amplitude(int i) const { return amp_(i); }

    ComplexMatrix projector() const { return amp_ * amp_.adjoint(); }

  private:
    ComplexVector amp_;
};

/// Hermitian, unit-trace, PSD (up to round-off) operator.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix entries);
    static DensityMatrix pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const ComplexMatrix& entries() const { return mat_; }

  private:
    ComplexMatrix mat_;
};

/// Reduced operator on the kept tensor factors. `dims` lists the factor
/// dimensions in order; their product must equal rho's dimension.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep);

/// Raw-matrix variant used internally by the executors (skips the
/// DensityMatrix invariant checks on the input).
ComplexMatrix partial_trace_raw(const ComplexMatrix& rho, const std::vector<int>& dims,
                                const std::vector<int>& keep);

/// Projective measurement in an orthonormal basis. Returns the sampled
/// outcome index and the post-measurement state.
std::pair<int, PureState> born_measure(const DensityMatrix& rho,
                                       const std::vector<PureState>& basis, SeededStream& rng);
std::pair<int, PureState> born_measure(const PureState& psi, const std::vector<PureState>& basis,
                                       SeededStream& rng);

struct PovmElement {
    double weight;  // lambda in (0, 1]
    PureState vector;
};

/// Rank-one POVM sample: outcome i with probability lambda_i <y_i|rho|y_i>.
/// The elements must resolve the identity within 1e-9.
int povm_measure(const DensityMatrix& rho, const std::vector<PovmElement>& povm,
                 SeededStream& rng);

void check_povm_complete(const std::vector<PovmElement>& povm, int dim);

double max_abs(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);

/// Trace norm (sum of singular values; for Hermitian input, sum of |eigenvalues|).
double trace_norm_hermitian(const ComplexMatrix& h);

}  // namespace qualm
