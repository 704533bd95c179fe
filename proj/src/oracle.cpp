#include "qualm/oracle.hpp"

#include "qualm/sampling.hpp"

namespace qualm {

std::string oracle_kind_name(OracleKind k) {
    switch (k) {
        case OracleKind::loq: return "loq";
        case OracleKind::lop: return "lop";
        case OracleKind::lod: return "lod";
        case OracleKind::lo_u: return "lo_u";
        case OracleKind::lo_o: return "lo_o";
        case OracleKind::lo_sp: return "lo_sp";
        case OracleKind::correlated: return "correlated";
        case OracleKind::state_ensemble: return "state_ensemble";
    }
    return "?";
}

OracleKind oracle_kind_from_name(const std::string& name) {
    for (OracleKind k : {OracleKind::loq, OracleKind::lop, OracleKind::lod, OracleKind::lo_u,
                         OracleKind::lo_o, OracleKind::lo_sp, OracleKind::correlated,
                         OracleKind::state_ensemble})
        if (oracle_kind_name(k) == name) return k;
    throw ConfigError("unknown oracle kind: " + name);
}

LabOracle::LabOracle(OracleKind kind, int ell, SeededStream rng, OracleOptions opts)
    : kind_(kind), ell_(ell), dim_(1 << ell), rng_(rng), opts_(std::move(opts)) {
    if (ell < 1 || ell > kMaxStateQubits) throw SizeError("LabOracle: ell out of range");
    switch (kind_) {
        case OracleKind::loq:
        case OracleKind::lo_u:
            fixed_ = opts_.forced_matrix ? *opts_.forced_matrix : sample_haar_unitary(dim_, rng_);
            break;
        case OracleKind::lo_o:
            fixed_ = opts_.forced_matrix ? *opts_.forced_matrix : sample_haar_orthogonal(dim_, rng_);
            break;
        case OracleKind::lo_sp:
            fixed_ =
                opts_.forced_matrix ? *opts_.forced_matrix : sample_haar_symplectic(dim_ / 2, rng_);
            break;
        case OracleKind::correlated:
            fixed_ = opts_.forced_matrix ? *opts_.forced_matrix : sample_haar_unitary(dim_, rng_);
            break;
        case OracleKind::state_ensemble:
            if (!opts_.fresh_state_per_call) {
                ComplexMatrix u = sample_haar_unitary(dim_, rng_);
                fixed_state_ = PureState(u.col(0));
            }
            break;
        case OracleKind::lop:
        case OracleKind::lod:
            break;
    }
    if (opts_.forced_matrix && opts_.forced_matrix->rows() != dim_)
        throw ShapeError("LabOracle: forced matrix has wrong dimension");
}

CallAction LabOracle::next_action() {
    CallAction a;
    switch (kind_) {
        case OracleKind::loq:
        case OracleKind::lo_u:
        case OracleKind::lo_o:
        case OracleKind::lo_sp:
            a.unitary = fixed_;
            break;
        case OracleKind::lop:
            a.unitary = sample_haar_unitary(dim_, rng_);
            break;
        case OracleKind::lod: {
            // uniformly random Pauli string; the trajectory average is the
            // completely depolarizing channel
            ComplexMatrix p = ComplexMatrix::Identity(1, 1);
            ComplexMatrix one = ComplexMatrix::Identity(2, 2);
            ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
            x << 0, 1, 1, 0;
            y << 0, Complex(0, -1), Complex(0, 1), 0;
            z << 1, 0, 0, -1;
            for (int q = 0; q < ell_; ++q) {
                switch (rng_.below(4)) {
                    case 0: p = kron(p, one); break;
                    case 1: p = kron(p, x); break;
                    case 2: p = kron(p, y); break;
                    default: p = kron(p, z); break;
                }
            }
            a.unitary = p;
            break;
        }
        case OracleKind::correlated: {
            ComplexMatrix r = ComplexMatrix::Identity(dim_, dim_);
            if (calls_ < static_cast<int>(opts_.rotations.size())) {
                r = opts_.rotations[calls_];
                if (r.rows() != dim_) throw ShapeError("correlated oracle: rotation dimension");
            }
            a.unitary = fixed_ * r;
            break;
        }
        case OracleKind::state_ensemble: {
            a.replaces_state = true;
            if (fixed_state_)
                a.state = *fixed_state_;
            else {
                ComplexMatrix u = sample_haar_unitary(dim_, rng_);
                a.state = PureState(u.col(0));
            }
            break;
        }
    }
    ++calls_;
    return a;
}

DensityMatrix LabOracle::call_density(const DensityMatrix& rho) {
    if (rho.dim() != dim_) throw ShapeError("LabOracle::call_density: dimension mismatch");
    if (kind_ == OracleKind::lod) {
        ++calls_;
        return DensityMatrix::maximally_mixed(dim_);
    }
    CallAction a = next_action();
    if (a.replaces_state) return DensityMatrix::pure(*a.state);
    return DensityMatrix(a.unitary * rho.entries() * a.unitary.adjoint());
}

const ComplexMatrix& LabOracle::fixed_matrix() const {
    switch (kind_) {
        case OracleKind::loq:
        case OracleKind::lo_u:
        case OracleKind::lo_o:
        case OracleKind::lo_sp:
        case OracleKind::correlated:
            return fixed_;
        default:
            throw ShapeError("LabOracle::fixed_matrix: oracle has no fixed matrix");
    }
}

LabOracle make_oracle(OracleKind kind, int ell, std::uint64_t seed, OracleOptions opts) {
    return LabOracle(kind, ell, SeededStream(seed), std::move(opts));
}

}  // namespace qualm
