#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qualm/perms.hpp"

namespace qualm {

enum class Group { unitary, orthogonal, symplectic };

std::string group_name(Group g);
Group group_from_name(const std::string& name);

/// Exact rational scalar; canonicalized, positive denominator.
using Rational = mpq_class;

Rational rational_pow(long base, int exp);  // base^exp, exp >= 0

/// Exact Weingarten values for one (group, k, D).
///
/// unitary:    keyed by cycle type of sigma tau^{-1}.
/// orthogonal: keyed by the coset type of sigma_m^{-1} sigma_n.
/// symplectic: keyed by coset type; the stored value is the class magnitude
///             from the sign-twisted orthogonal route at dimension -D, and
///             entry lookups reattach (-1)^k eps(sigma_m) eps(sigma_n).
struct WgTable {
    Group group = Group::unitary;
    int k = 0;
    int D = 0;  // carrier dimension; 2 * halfD for the symplectic group
    std::map<CycleType, Rational> values;

    const Rational& at(const CycleType& t) const;
};

/// Gram matrix over S_k: entry (p, q) = D^{#cycles(p^{-1} q)}.
std::vector<std::vector<mpz_class>> gram_unitary(int k, int D);

/// Gram matrix over pairings: entry (m, n) = D^{#parts(cosettype(m^{-1} n))}.
std::vector<std::vector<mpz_class>> gram_orthogonal(int k, int D);

/// Direct symplectic Gram: the exact contraction of Delta'_m against
/// Delta'_n, a signed power of D per loop.
std::vector<std::vector<mpz_class>> gram_symplectic_direct(int k, int halfD);

/// Exact inverse of the Gram row through the identity, keyed by class.
/// Full fraction-free elimination up to kMaxFullInversion elements; above
/// that the class-quotient system is solved and the result is verified
/// against the inverse identity on one representative row per class.
WgTable wg_unitary(int k, int D);
WgTable wg_orthogonal(int k, int D);

/// Built two ways and cross-checked exactly: (a) sign-twisted orthogonal
/// inversion at dimension -D, (b) direct inversion of the symplectic Gram.
WgTable wg_symplectic(int k, int halfD);

/// Matrix-element lookups.
Rational wg_entry(const WgTable& t, const Permutation& sigma, const Permutation& tau);
Rational wg_entry(const WgTable& t, const PairPartition& m, const PairPartition& n);
/// Single-argument value Wg(x) = entry(identity, x).
Rational wg_single(const WgTable& t, const Permutation& sigma);
Rational wg_single(const WgTable& t, const PairPartition& m);

/// Sum of |Wg| over the whole group element set (permutations or pairings).
Rational sum_abs_wg(const WgTable& t);

/// Number of S_k elements with a given cycle type, k!/z_lambda.
mpz_class cycle_type_class_size(const CycleType& t, int k);
/// Number of pairings of 2k with a given coset type (by enumeration).
mpz_class coset_type_class_size(const CycleType& t, int k);

/// Exact evaluation of the k-fold twirl of a dense operator on (C^D)^{x k}.
ComplexMatrix haar_twirl(const WgTable& t, const ComplexMatrix& a);
ComplexMatrix haar_twirl(const WgTable& t, const std::vector<ComplexMatrix>& factors);

/// Permutation operator P_sigma |x_1..x_k> = |x_{sigma^{-1}(1)}..> on (C^D)^{x k}.
ComplexMatrix permutation_operator(const Permutation& sigma, int D);
/// Dense Delta_m / Delta'_m matrices (rows = even nodes, cols = odd nodes).
ComplexMatrix delta_matrix(const PairPartition& m, int D, PairFlavor flavor);

struct WgBoundEntry {
    CycleType type;
    bool sandwich_ok = false;
    bool mixed_ok = false;  // symplectic only: left denominator in D, right in D/2
};

struct WgBoundReport {
    Group group;
    int k = 0, D = 0;
    bool regime_ok = false;        // the D-vs-k validity condition
    bool all_sandwich_ok = false;  // the sandwich exactly as printed
    bool all_mixed_ok = true;      // symplectic only; true elsewhere
    bool identity_dev_ok = false;  // |Wg(id) - D^-k| within the derived margin
    std::vector<WgBoundEntry> entries;
};

/// Exact verification of the sandwich bounds on every class, plus the
/// |Wg(identity) - D^-k| deviation bound. Irrational factors k^{7/2} are
/// compared by squaring, so every comparison is exact.
WgBoundReport wg_bound_check(const WgTable& t);

/// JSON cache: {group, k, D, entries: [{type: [..], num: "..", den: ".."}]}.
void save_wg_table(const WgTable& t, const std::string& path);
WgTable load_wg_table(const std::string& path);
/// Load from `<cache_dir>/<group>-k<k>-D<D>.json` or build and persist.
WgTable wg_table_cached(Group g, int k, int D_or_halfD, const std::string& cache_dir);

}  // namespace qualm
