#include "qualm/perms.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qualm {

int CycleType::total() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int CycleType::nontrivial_length() const {
    int s = 0;
    for (int p : parts)
        if (p > 1) s += p;
    return s;
}

std::string CycleType::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(parts[i]);
    }
    return out + ")";
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (int v : image_) {
        if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v])
            throw ValidationError("Permutation: image is not a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(int k) {
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), 0);
    return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(image_.size());
    for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& rhs) const {
    if (size() != rhs.size()) throw ShapeError("Permutation::compose: size mismatch");
    std::vector<int> v(image_.size());
    for (int i = 0; i < size(); ++i) v[i] = image_[rhs(i)];
    return Permutation(std::move(v));
}

std::vector<std::vector<int>> Permutation::cycles() const {
    std::vector<bool> seen(image_.size(), false);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < size(); ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        int j = i;
        while (!seen[j]) {
            seen[j] = true;
            cyc.push_back(j);
            j = image_[j];
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

CycleType Permutation::cycle_type() const {
    std::vector<int> parts;
    for (const auto& c : cycles()) parts.push_back(static_cast<int>(c.size()));
    std::sort(parts.rbegin(), parts.rend());
    return CycleType{std::move(parts)};
}

int Permutation::num_cycles() const { return static_cast<int>(cycles().size()); }

bool Permutation::is_identity() const {
    for (int i = 0; i < size(); ++i)
        if (image_[i] != i) return false;
    return true;
}

int Permutation::sign() const {
    int s = 1;
    for (const auto& c : cycles())
        if (c.size() % 2 == 0) s = -s;
    return s;
}

std::vector<Permutation> enumerate_permutations(int k) {
    if (k < 1 || k > 8) throw SizeError("enumerate_permutations: k must be in [1, 8]");
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), 0);
    std::vector<Permutation> out;
    out.reserve(static_cast<std::size_t>(factorial(k)));
    do {
        out.push_back(Permutation(v));
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

PairPartition::PairPartition(std::vector<std::pair<int, int>> pairs) : pairs_(std::move(pairs)) {
    const int n = 2 * k();
    std::vector<bool> seen(n, false);
    int prev_first = -1;
    for (auto& [a, b] : pairs_) {
        if (a < 0 || b < 0 || a >= n || b >= n || seen[a] || seen[b])
            throw ValidationError("PairPartition: not a partition into pairs");
        seen[a] = seen[b] = true;
        if (a >= b || a <= prev_first)
            throw ValidationError("PairPartition: pairs not in canonical order");
        prev_first = a;
    }
}

PairPartition PairPartition::identity(int k) {
    std::vector<std::pair<int, int>> p;
    for (int i = 0; i < k; ++i) p.emplace_back(2 * i, 2 * i + 1);
    return PairPartition(std::move(p));
}

int PairPartition::partner(int i) const {
    for (auto& [a, b] : pairs_) {
        if (a == i) return b;
        if (b == i) return a;
    }
    throw ShapeError("PairPartition::partner: element out of range");
}

Permutation PairPartition::to_permutation() const {
    std::vector<int> img;
    img.reserve(2 * k());
    for (auto& [a, b] : pairs_) {
        img.push_back(a);
        img.push_back(b);
    }
    return Permutation(std::move(img));
}

std::vector<PairPartition> enumerate_pair_partitions(int k) {
    if (k < 1 || k > 6) throw SizeError("enumerate_pair_partitions: k must be in [1, 6]");
    std::vector<PairPartition> out;
    std::vector<std::pair<int, int>> acc;
    std::vector<bool> used(2 * k, false);
    auto rec = [&](auto&& self) -> void {
        int a = -1;
        for (int i = 0; i < 2 * k; ++i)
            if (!used[i]) {
                a = i;
                break;
            }
        if (a < 0) {
            out.push_back(PairPartition(acc));
            return;
        }
        used[a] = true;
        for (int b = a + 1; b < 2 * k; ++b) {
            if (used[b]) continue;
            used[b] = true;
            acc.emplace_back(a, b);
            self(self);
            acc.pop_back();
            used[b] = false;
        }
        used[a] = false;
    };
    rec(rec);
    return out;
}

CycleType coset_type(const PairPartition& m) {
    const int k = m.k();
    const int n = 2 * k;
    std::vector<bool> seen(n, false);
    std::vector<int> parts;
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        int x = start, len = 0;
        // alternate m-links and identity-pairing links until the walk closes
        do {
            seen[x] = true;
            x = m.partner(x);
            ++len;
            seen[x] = true;
            x = (x % 2 == 0) ? x + 1 : x - 1;
            ++len;
        } while (x != start);
        parts.push_back(len / 2);
    }
    std::sort(parts.rbegin(), parts.rend());
    return CycleType{std::move(parts)};
}

CycleType relative_coset_type(const PairPartition& m, const PairPartition& n) {
    if (m.k() != n.k()) throw ShapeError("relative_coset_type: size mismatch");
    Permutation comp = m.to_permutation().inverse().compose(n.to_permutation());
    // relabel n through sigma_m^{-1} and take the coset type of the result
    const auto& img = comp.image();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m.k(); ++i) {
        int a = img[2 * i], b = img[2 * i + 1];
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());
    return coset_type(PairPartition(std::move(pairs)));
}

Complex permutation_trace(const std::vector<ComplexMatrix>& mats, const Permutation& sigma) {
    const int k = sigma.size();
    if (static_cast<int>(mats.size()) != k)
        throw ShapeError("permutation_trace: matrix count != permutation size");
    const Eigen::Index d = mats[0].rows();
    for (const auto& m : mats)
        if (m.rows() != d || m.cols() != d)
            throw ShapeError("permutation_trace: matrices must be square and same size");

    Complex result = 1.0;
    for (const auto& cyc : sigma.cycles()) {
        // one factor (A_t)_{i_{sigma(t)}, i_t} per cycle element; chaining the
        // indices yields the product in reverse cycle order
        ComplexMatrix prod = mats[cyc.back()];
        for (int idx = static_cast<int>(cyc.size()) - 2; idx >= 0; --idx) prod = prod * mats[cyc[idx]];
        result *= prod.trace();
    }
    return result;
}

Complex pair_partition_trace(const std::vector<ComplexMatrix>& mats, const PairPartition& m,
                             PairFlavor flavor, const ComplexMatrix* J) {
    const int k = m.k();
    if (static_cast<int>(mats.size()) != k)
        throw ShapeError("pair_partition_trace: matrix count != k");
    const Eigen::Index d = mats[0].rows();
    for (const auto& a : mats)
        if (a.rows() != d || a.cols() != d)
            throw ShapeError("pair_partition_trace: matrices must be square and same size");
    if (flavor == PairFlavor::symplectic && J == nullptr)
        throw ValidationError("pair_partition_trace: symplectic flavor requires J");
    if (J && (J->rows() != d || J->cols() != d))
        throw ShapeError("pair_partition_trace: J dimension mismatch");

    // Nodes 2t, 2t+1 carry factor (A_t)_{i_{2t+1}, i_{2t}}; m-links tie nodes
    // pairwise with delta (orthogonal) or J (symplectic) weights. Walking
    // the alternating closed loops and multiplying oriented transfer
    // matrices gives one trace factor per loop.
    std::vector<bool> seen(2 * k, false);
    Complex result = 1.0;
    for (int start = 0; start < 2 * k; ++start) {
        if (seen[start]) continue;
        ComplexMatrix acc = ComplexMatrix::Identity(d, d);
        int x = start;
        do {
            // traverse the matrix link of node x's site
            seen[x] = true;
            int t = x / 2;
            if (x % 2 == 0) {
                // A_t carries row index at node 2t+1 and column at node 2t
                acc = mats[t] * acc;
                x = 2 * t + 1;
            } else {
                acc = mats[t].transpose() * acc;
                x = 2 * t;
            }
            seen[x] = true;
            // traverse the m-link
            int y = m.partner(x);
            if (flavor == PairFlavor::symplectic) {
                // canonical pair (a, b) carries J_{i_a, i_b}
                bool forward = x < y;
                acc = (forward ? J->transpose() : *J) * acc;
            }
            x = y;
        } while (x != start);
        result *= acc.trace();
    }
    return result;
}

std::int64_t factorial(int n) {
    std::int64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

std::int64_t double_factorial(int n) {
    std::int64_t r = 1;
    for (int i = n; i > 1; i -= 2) r *= i;
    return r;
}

namespace {

std::int64_t binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    std::int64_t num = 1, den = 1;
    for (int i = 0; i < r; ++i) {
        num *= (n - i);
        den *= (i + 1);
    }
    return num / den;
}

std::int64_t derangements(int n) {
    if (n == 0) return 1;
    if (n == 1) return 0;
    std::int64_t a = 1, b = 0;  // d(0), d(1)
    for (int i = 2; i <= n; ++i) {
        std::int64_t c = (i - 1) * (a + b);
        a = b;
        b = c;
    }
    return b;
}

// pairings of 2L points with no link of the form {2i, 2i+1}, by
// inclusion-exclusion over the forbidden links
std::int64_t pairings_no_trivial_link(int L) {
    std::int64_t total = 0;
    for (int j = 0; j <= L; ++j) {
        std::int64_t term = binomial(L, j) * double_factorial(2 * (L - j) - 1);
        total += (j % 2 == 0) ? term : -term;
    }
    return total;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> count_by_nontrivial_length(int k, int L) {
    if (L < 0 || L > k) throw SizeError("count_by_nontrivial_length: need 0 <= L <= k");
    std::int64_t n_perm = binomial(k, L) * derangements(L);
    std::int64_t n_pair = binomial(k, L) * pairings_no_trivial_link(L);
    return {n_perm, n_pair};
}

}  // namespace qualm
