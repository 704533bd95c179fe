#pragma once

#include <functional>
#include <vector>

#include "qualm/qualm.hpp"
#include "qualm/weingarten.hpp"

namespace qualm {

/// Dense distribution over transcripts (s_0, ..., s_k), each s_i in
/// [0, arity). Index = base-arity digits, s_0 most significant.
struct OutcomeDistribution {
    int arity = 0;
    int rounds = 0;  // k
    std::vector<double> probabilities;

    std::size_t size() const { return probabilities.size(); }
    std::size_t index_of(const std::vector<int>& s) const;
    std::vector<int> transcript_of(std::size_t index) const;
    double mass(const std::vector<int>& s) const { return probabilities[index_of(s)]; }
    double total() const;
    /// Marginal over the first `rounds_kept + 1` entries of the transcript.
    OutcomeDistribution marginal(int rounds_kept) const;
};

/// Product-form distribution of a fresh-unitary oracle:
/// P(s) = Pr(s_0) D^{-k} prod_i lambda^i.
OutcomeDistribution exact_pk(const SmPolicy& policy, int threads = 1);

/// Exact fixed-matrix-ensemble distribution via the Weingarten double sum
/// over permutations (unitary) or pairings (orthogonal/symplectic). The
/// transcript map is a pure function per index; threads == 1 runs the serial
/// reference loop, larger values fan out over OpenMP. Policy callbacks must
/// be pure for threaded runs.
OutcomeDistribution exact_qk_sm(const SmPolicy& policy, const WgTable& table, int threads = 1);

/// Exact transcript distribution of the depolarizing oracle (equals
/// exact_pk for every policy).
OutcomeDistribution exact_lod(const SmPolicy& policy);

/// One-norm distance sum_s |p(s) - q(s)| (twice the conventional TVD).
double tvd(const OutcomeDistribution& p, const OutcomeDistribution& q);

/// Trace-norm distance of two single-qubit states.
double bias(const DensityMatrix& rho0, const DensityMatrix& rho1);

struct BoundReport {
    double c1 = 0, c2 = 0, T = 0;
    double rhs = 0;        // c1 + c2 T
    double lhs = 0;        // exact one-norm distance
    bool regime_ok = false;
    bool bound_holds = false;     // lhs <= rhs
    bool per_tau_ok = false;      // every nontrivial class obeys the D^{k - floor(L/2)} cap
    bool t_closed_form_ok = false;  // T <= sum_L N(k, L) D^{-floor(L/2)}
};

/// Weingarten-side constants c1, c2 from the exact table; T and the
/// per-class inequalities by transcript enumeration.
BoundReport bound_quantities(const SmPolicy& policy, const WgTable& table, int threads = 1);

struct CollisionStats {
    double empirical_rate = 0;
    double analytic_eps_p = 0;     // C(k,2) / 2^ell
    double q_bound = 0;            // 2 k^2 2^{-ell/4}
    int trials = 0;
};

CollisionStats collision_stats(int ell, int k, OracleKind kind, int trials, SeededStream rng,
                               int threads);

struct LevyRow {
    double epsilon = 0;
    double empirical_tail = 0;
    double bound = 0;  // 4 exp(-D eps^2 / (18 pi^2))
};

struct LevyReport {
    std::vector<LevyRow> rows;
    double mean_overlap = 0;
    double mean_sigma = 0;  // standard error of the mean estimate
    int trials = 0;
};

LevyReport levy_check(int ell, int trials, SeededStream rng, int threads);

/// Normalized transcript histogram from repeated executor runs; trial i uses
/// the derived stream i, so the result is independent of the thread count.
OutcomeDistribution empirical_distribution(
    const std::function<std::vector<int>(SeededStream&)>& executor, int trials, int arity,
    int rounds, SeededStream rng, int threads);

double wilson_halfwidth(double p_hat, std::int64_t n, double z);

/// Exports: CSV rows (transcript, probability) and a JSON document with the
/// same payload.
void save_distribution_csv(const OutcomeDistribution& d, const std::string& path);
void save_distribution_json(const OutcomeDistribution& d, const std::string& path);

}  // namespace qualm
