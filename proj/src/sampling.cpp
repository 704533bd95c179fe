#include "qualm/sampling.hpp"

#include <cmath>

namespace qualm {

namespace {

ComplexMatrix complex_ginibre(int dim, SeededStream& rng) {
    ComplexMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    return a;
}

void check_dim(int dim) {
    if (dim < 1) throw SizeError("sampler: dimension must be >= 1");
    if (std::int64_t(dim) * dim > kMaxDenseEntries) throw SizeError("sampler: dimension too large");
}

}  // namespace

ComplexMatrix sample_haar_unitary(int dim, SeededStream& rng) {
    check_dim(dim);
    ComplexMatrix a = complex_ginibre(dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR();
    // Multiply each column by the phase of the matching R diagonal; this
    // fixes the Q-R gauge so Q is exactly Haar.
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        double m = std::abs(d);
        Complex phase = (m > 0.0) ? d / m : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

ComplexMatrix sample_haar_orthogonal(int dim, SeededStream& rng) {
    check_dim(dim);
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q.cast<Complex>();
}

ComplexMatrix canonical_J(int halfD) {
    if (halfD < 1) throw SizeError("canonical_J: halfD must be >= 1");
    int d = 2 * halfD;
    ComplexMatrix j = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < halfD; ++i) {
        j(i, halfD + i) = 1.0;
        j(halfD + i, i) = -1.0;
    }
    return j;
}

ComplexMatrix sample_haar_symplectic(int halfD, SeededStream& rng) {
    if (halfD < 1) throw SizeError("sample_haar_symplectic: halfD must be >= 1");
    const int n = halfD;
    const int d = 2 * n;
    check_dim(d);

    // Quaternion entries q = a + b j stored as 2x2 blocks [[a, b], [-b*, a*]]
    // in an interleaved basis (up/down components of site i at 2i, 2i+1).
    ComplexMatrix m(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex a(rng.normal(), rng.normal());
            Complex b(rng.normal(), rng.normal());
            m(2 * i, 2 * j) = a;
            m(2 * i, 2 * j + 1) = b;
            m(2 * i + 1, 2 * j) = -std::conj(b);
            m(2 * i + 1, 2 * j + 1) = std::conj(a);
        }

    // Quaternionic modified Gram-Schmidt over block columns, with one
    // reorthogonalization pass. Projection coefficients are 2x2 quaternion
    // blocks; normalization is by the positive real norm, which is the
    // exact-Haar gauge fixing.
    auto block = [&](ComplexMatrix& mat, int r, int c) { return mat.block(2 * r, 2 * c, 2, 2); };
    for (int j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                Eigen::Matrix2cd q = Eigen::Matrix2cd::Zero();
                for (int r = 0; r < n; ++r)
                    q += block(m, r, i).adjoint() * block(m, r, j);
                for (int r = 0; r < n; ++r)
                    block(m, r, j) -= block(m, r, i) * q;
            }
        }
        double norm2 = 0.0;
        for (int r = 0; r < n; ++r) norm2 += block(m, r, j).squaredNorm() / 2.0;
        double inv = 1.0 / std::sqrt(norm2);
        for (int r = 0; r < n; ++r) block(m, r, j) *= inv;
    }

    // Reindex from the interleaved basis to the [[0, I], [-I, 0]] block basis.
    ComplexMatrix out(d, d);
    auto big = [&](int interleaved) { return (interleaved % 2 == 0) ? interleaved / 2 : n + interleaved / 2; };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(big(i), big(j)) = m(i, j);
    return out;
}

}  // namespace qualm
