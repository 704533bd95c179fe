#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qualm/linalg.hpp"

namespace qualm {

/// Partition of an integer, parts weakly decreasing. Doubles as a cycle
/// type (of a permutation) and a coset type (of a pair partition).
struct CycleType {
    std::vector<int> parts;

    int total() const;
    /// Sum of parts > 1.
    int nontrivial_length() const;
    bool operator==(const CycleType& o) const { return parts == o.parts; }
    bool operator<(const CycleType& o) const { return parts < o.parts; }
    std::string to_string() const;
};

/// Permutation of {0..k-1} in one-line notation: image[i] = sigma(i).
class Permutation {
  public:
    explicit Permutation(std::vector<int> image);
    static Permutation identity(int k);

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_[i]; }
    const std::vector<int>& image() const { return image_; }

    Permutation inverse() const;
    Permutation compose(const Permutation& rhs) const;  // this after rhs
    std::vector<std::vector<int>> cycles() const;       // includes fixed points
    CycleType cycle_type() const;
    int num_cycles() const;
    bool is_identity() const;
    int sign() const;

    bool operator==(const Permutation& o) const { return image_ == o.image_; }
    bool operator<(const Permutation& o) const { return image_ < o.image_; }

  private:
    std::vector<int> image_;
};

/// All k! permutations in lexicographic order. k <= 8.
std::vector<Permutation> enumerate_permutations(int k);

/// Pair partition of {0..2k-1} in canonical order: each pair (a, b) has
/// a < b, and pairs are sorted by their first elements.
class PairPartition {
  public:
    explicit PairPartition(std::vector<std::pair<int, int>> pairs);
    static PairPartition identity(int k);  // {0,1}{2,3}...

    int k() const { return static_cast<int>(pairs_.size()); }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

    /// Partner of element i under the pairing.
    int partner(int i) const;

    /// The canonical permutation sigma_m in S_{2k} with sigma_m(i) = m(i).
    Permutation to_permutation() const;

    bool operator==(const PairPartition& o) const { return pairs_ == o.pairs_; }
    bool operator<(const PairPartition& o) const { return pairs_ < o.pairs_; }

  private:
    std::vector<std::pair<int, int>> pairs_;
};

/// All (2k-1)!! canonical pair partitions. k <= 6.
std::vector<PairPartition> enumerate_pair_partitions(int k);

/// Coset type of a pairing: alternate its links with the identity pairing's
/// and halve the even block lengths.
CycleType coset_type(const PairPartition& m);

/// Coset type of sigma_m^{-1} sigma_n, the relative type that keys the
/// orthogonal/symplectic Gram and Weingarten matrices.
CycleType relative_coset_type(const PairPartition& m, const PairPartition& n);

/// tr(P_sigma (A_1 x ... x A_k)) evaluated as a product of per-cycle matrix
/// products; never materializes the D^k-dimensional operator.
Complex permutation_trace(const std::vector<ComplexMatrix>& mats, const Permutation& sigma);

enum class PairFlavor { orthogonal, symplectic };

/// tr(Delta_m (A_1 x ... x A_k)) for the orthogonal flavor, or
/// tr(Delta'_m (A_1 x ... x A_k)) with J-weighted links for the symplectic
/// flavor. Evaluated over the unoriented loop decomposition of m against
/// the identity pairing.
Complex pair_partition_trace(const std::vector<ComplexMatrix>& mats, const PairPartition& m,
                             PairFlavor flavor, const ComplexMatrix* J = nullptr);

/// Exact counts at nontrivial length L: the number of permutations in S_k
/// whose nontrivial cycles cover L points, and the number of pairings of 2k
/// whose coset type has exactly k - L trivial parts.
std::pair<std::int64_t, std::int64_t> count_by_nontrivial_length(int k, int L);

std::int64_t factorial(int n);
std::int64_t double_factorial(int n);  // n!!, with (-1)!! = 0!! = 1

}  // namespace qualm
