#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qualm/linalg.hpp"
#include "qualm/rng.hpp"

namespace qualm {

enum class OracleKind {
    loq,             // one Haar unitary sampled at construction, reused every call
    lop,             // a fresh Haar unitary per call
    lod,             // completely depolarizing channel
    lo_u,            // fixed Haar U(D), same as loq (symmetry-task naming)
    lo_o,            // fixed Haar O(D)
    lo_sp,           // fixed Haar Sp(D/2)
    correlated,      // call i applies U1 * R_i for caller-supplied rotations
    state_ensemble,  // replaces L with a sampled Haar state
};

std::string oracle_kind_name(OracleKind k);
OracleKind oracle_kind_from_name(const std::string& name);

struct OracleOptions {
    std::optional<ComplexMatrix> forced_matrix;  // test hook for the fixed kinds
    std::vector<ComplexMatrix> rotations;        // correlated kind, indexed by call
    bool fresh_state_per_call = true;            // state_ensemble kind
};

/// What one oracle call does to L, in trajectory form.
struct CallAction {
    bool replaces_state = false;
    ComplexMatrix unitary;           // valid when !replaces_state
    std::optional<PureState> state;  // valid when replaces_state
};

/// Stateful lab oracle: hidden sampled matrices plus a call counter. The
/// channel acts on the ell-qubit L register only; coherent executors embed
/// the returned action into the full L x W space.
class LabOracle {
  public:
    LabOracle(OracleKind kind, int ell, SeededStream rng, OracleOptions opts = {});

    OracleKind kind() const { return kind_; }
    int ell() const { return ell_; }
    int dim() const { return dim_; }
    int calls() const { return calls_; }

    /// Exact channel action on a state of L; increments the call counter.
    /// The depolarizing kind returns I/2^ell exactly.
    DensityMatrix call_density(const DensityMatrix& rho);

    /// Trajectory action for this call; increments the call counter. For the
    /// depolarizing kind this is a uniformly random Pauli, whose average
    /// over trajectories is exactly the channel.
    CallAction next_action();

    /// The stored matrix of a fixed-matrix kind (loq / lo_u / lo_o / lo_sp,
    /// or the correlated kind's U1).
    const ComplexMatrix& fixed_matrix() const;

  private:
    OracleKind kind_;
    int ell_;
    int dim_;
    int calls_ = 0;
    SeededStream rng_;
    ComplexMatrix fixed_;         // fixed kinds and correlated U1
    std::optional<PureState> fixed_state_;  // state_ensemble with a frozen state
    OracleOptions opts_;
};

LabOracle make_oracle(OracleKind kind, int ell, std::uint64_t seed, OracleOptions opts = {});

}  // namespace qualm
