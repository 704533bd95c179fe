#include <filesystem>

#include "doctest.h"
#include "qualm/parallel.hpp"
#include "qualm/sampling.hpp"
#include "qualm/weingarten.hpp"

using namespace qualm;

namespace {

Rational rat(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

CycleType type_of(std::vector<int> parts) { return CycleType{std::move(parts)}; }

// Independent route: plain rational Gauss-Jordan on the class-collapsed
// unitary system, distinct from the library's fraction-free path.
std::map<CycleType, Rational> class_solve_unitary(int k, int D) {
    auto perms = enumerate_permutations(k);
    std::vector<CycleType> types;
    std::vector<Permutation> reps;
    for (const auto& p : perms) {
        CycleType t = p.cycle_type();
        bool seen = false;
        for (const auto& u : types) seen = seen || (u == t);
        if (!seen) {
            types.push_back(t);
            reps.push_back(p);
        }
    }
    const int n = static_cast<int>(types.size());
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> rhs(n, Rational(0));
    auto index_of = [&](const CycleType& t) {
        for (int i = 0; i < n; ++i)
            if (types[i] == t) return i;
        return -1;
    };
    for (int c = 0; c < n; ++c) {
        for (const auto& q : perms)
            m[c][index_of(reps[c].inverse().compose(q).cycle_type())] +=
                rational_pow(D, q.num_cycles());
        rhs[c] = Rational(reps[c].is_identity() ? 1 : 0);
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        while (m[piv][col] == 0) ++piv;
        std::swap(m[col], m[piv]);
        std::swap(rhs[col], rhs[piv]);
        Rational inv = 1 / m[col][col];
        for (auto& x : m[col]) x *= inv;
        rhs[col] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0) continue;
            Rational f = m[r][col];
            for (int cc = 0; cc < n; ++cc) m[r][cc] -= f * m[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::map<CycleType, Rational> out;
    for (int i = 0; i < n; ++i) out.emplace(types[i], rhs[i]);
    return out;
}

}  // namespace

TEST_CASE("unitary gram matrix") {
    auto g1 = gram_unitary(1, 7);
    CHECK(g1.size() == 1);
    CHECK(g1[0][0] == 7);
    auto g2 = gram_unitary(2, 5);
    CHECK(g2[0][0] == 25);
    CHECK(g2[0][1] == 5);
    CHECK(g2[1][0] == 5);
    CHECK(g2[1][1] == 25);
    for (int k : {3, 4})
        for (const auto& row : gram_unitary(k, 4))
            CHECK(row.size() == static_cast<std::size_t>(factorial(k)));
}

TEST_CASE("unitary Weingarten closed forms") {
    for (int D : {4, 8, 16}) {
        WgTable t1 = wg_unitary(1, D);
        CHECK(t1.at(type_of({1})) == rat(1, D));
        WgTable t2 = wg_unitary(2, D);
        CHECK(t2.at(type_of({1, 1})) == rat(1, static_cast<long>(D) * D - 1));
        CHECK(t2.at(type_of({2})) == rat(-1, D * (static_cast<long>(D) * D - 1)));
    }
    // k = 3 at D = 8 against the independent class-collapsed solve
    WgTable t3 = wg_unitary(3, 8);
    auto oracle = class_solve_unitary(3, 8);
    for (const auto& [type, value] : t3.values) CHECK(value == oracle.at(type));
    CHECK_THROWS_AS(wg_unitary(3, 2), RankError);
}

TEST_CASE("unitary inverse identity over rationals") {
    for (int k : {2, 3, 4})
        for (int D : {4, 8, 16}) {
            WgTable t = wg_unitary(k, D);
            auto perms = enumerate_permutations(k);
            auto g = gram_unitary(k, D);
            for (std::size_t i = 0; i < perms.size(); ++i)
                for (std::size_t j = 0; j < perms.size(); ++j) {
                    Rational acc(0);
                    for (std::size_t q = 0; q < perms.size(); ++q)
                        acc += wg_entry(t, perms[i], perms[q]) * Rational(g[q][j]);
                    CHECK(acc == Rational(i == j ? 1 : 0));
                }
        }
}

TEST_CASE("orthogonal and symplectic inverse identities over rationals") {
    for (int k : {2, 3})
        for (int D : {4, 8, 16}) {
            const bool sp_regular = D > 2 * (k - 1);  // D - 2j stays positive
            WgTable to = wg_orthogonal(k, D);
            auto ps = enumerate_pair_partitions(k);
            auto go = gram_orthogonal(k, D);
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = 0; j < ps.size(); ++j) {
                    Rational acc_o(0);
                    for (std::size_t q = 0; q < ps.size(); ++q)
                        acc_o += wg_entry(to, ps[i], ps[q]) * Rational(go[q][j]);
                    CHECK(acc_o == Rational(i == j ? 1 : 0));
                }
            if (!sp_regular) {
                CHECK_THROWS_AS(wg_symplectic(k, D / 2), RankError);
                continue;
            }
            WgTable ts = wg_symplectic(k, D / 2);
            auto gs = gram_symplectic_direct(k, D / 2);
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = 0; j < ps.size(); ++j) {
                    Rational acc_s(0);
                    for (std::size_t q = 0; q < ps.size(); ++q)
                        acc_s += wg_entry(ts, ps[i], ps[q]) * Rational(gs[q][j]);
                    CHECK(acc_s == Rational(i == j ? 1 : 0));
                }
        }
    // one larger case through the full fraction-free route
    {
        const int k = 4, D = 8;
        WgTable to = wg_orthogonal(k, D);
        auto ps = enumerate_pair_partitions(k);
        auto go = gram_orthogonal(k, D);
        std::size_t i = 17;  // arbitrary fixed row
        for (std::size_t j = 0; j < ps.size(); ++j) {
            Rational acc(0);
            for (std::size_t q = 0; q < ps.size(); ++q)
                acc += wg_entry(to, ps[i], ps[q]) * Rational(go[q][j]);
            CHECK(acc == Rational(i == j ? 1 : 0));
        }
    }
}

TEST_CASE("orthogonal Weingarten closed forms") {
    for (int D : {4, 8, 16}) {
        WgTable t1 = wg_orthogonal(1, D);
        CHECK(t1.at(type_of({1})) == rat(1, D));
        WgTable t2 = wg_orthogonal(2, D);
        long den = static_cast<long>(D) * (D - 1) * (D + 2);
        CHECK(t2.at(type_of({1, 1})) == rat(D + 1, den));
        CHECK(t2.at(type_of({2})) == rat(-1, den));
    }
}

TEST_CASE("symplectic Weingarten dual route and closed forms") {
    for (int halfD : {2, 4, 8}) {
        const long D = 2 * halfD;
        WgTable t = wg_symplectic(2, halfD);  // construction cross-checks the routes
        long den = D * (D + 1) * (D - 2);
        CHECK(t.at(type_of({1, 1})) == rat(D - 1, den));
        CHECK(abs(t.at(type_of({2}))) == rat(1, den));
    }
    // explicit direct-gram inverse identity at k = 3
    WgTable t3 = wg_symplectic(3, 4);
    auto ps = enumerate_pair_partitions(3);
    auto g = gram_symplectic_direct(3, 4);
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j) {
            Rational acc(0);
            for (std::size_t q = 0; q < ps.size(); ++q)
                acc += wg_entry(t3, ps[i], ps[q]) * Rational(g[q][j]);
            CHECK(acc == Rational(i == j ? 1 : 0));
        }
    // singular regime is reported, not silently inverted
    CHECK_THROWS_AS(wg_symplectic(2, 1), RankError);
}

TEST_CASE("sum of absolute Weingarten values") {
    // unitary: (D-k)!/D!, exact, k up to 5
    for (int D : {8, 16})
        for (int k = 1; k <= 5; ++k) {
            WgTable t = wg_unitary(k, D);
            Rational expect(1);
            for (int i = D - k + 1; i <= D; ++i) expect /= i;
            CHECK(sum_abs_wg(t) == expect);
        }
    // symplectic: prod_j 1/(D - 2j) exactly; the D + 2j variant sometimes
    // quoted for this sum does not match the exact tables or the
    // fourth-moment coefficients
    for (int halfD : {4, 8})
        for (int k = 1; k <= 4; ++k) {
            WgTable t = wg_symplectic(k, halfD);
            Rational minus(1), plus(1);
            for (int j = 0; j < k; ++j) {
                minus /= (2 * halfD - 2 * j);
                plus /= (2 * halfD + 2 * j);
            }
            CHECK(sum_abs_wg(t) == minus);
            if (k >= 2) CHECK(sum_abs_wg(t) != plus);
        }
    // orthogonal: matches neither stated closed form; the exact values are
    // frozen from an independent rational inversion
    CHECK(sum_abs_wg(wg_orthogonal(2, 8)) == rat(11, 560));
    CHECK(sum_abs_wg(wg_orthogonal(2, 16)) == rat(19, 4320));
    CHECK(sum_abs_wg(wg_orthogonal(3, 8)) == rat(9, 2240));
    CHECK(sum_abs_wg(wg_orthogonal(3, 16)) == rat(71, 201600));
    for (int k : {2, 3}) {
        Rational s = sum_abs_wg(wg_orthogonal(k, 8));
        Rational f1(1), f2(1);
        for (int i = 8 - 2 * k; i > 1; i -= 2) f1 *= i;
        for (int i = 8; i > 1; i -= 2) f1 /= i;
        for (int i = 8 - k; i > 1; i -= 2) f2 *= i;
        for (int i = 8; i > 1; i -= 2) f2 /= i;
        CHECK(s != f1);
        CHECK(s != f2);
    }
}

TEST_CASE("orthogonal sign pattern and the k = 5 quotient table") {
    for (int k = 1; k <= 4; ++k) {
        WgTable t = wg_orthogonal(k, 8);
        for (const auto& [type, value] : t.values) {
            int dist = k - static_cast<int>(type.parts.size());
            Rational signed_value = (dist % 2 == 0) ? value : Rational(-value);
            CHECK(signed_value > 0);
        }
    }
    // the 945-element table builds via the quotient, is verified against the
    // inverse identity, and keeps the sign pattern
    WgTable t5 = wg_orthogonal(5, 8);
    CHECK(t5.values.size() == 7);
    mpz_class total = 0;
    for (const auto& [type, value] : t5.values) {
        total += coset_type_class_size(type, 5);
        int dist = 5 - static_cast<int>(type.parts.size());
        Rational signed_value = (dist % 2 == 0) ? value : Rational(-value);
        CHECK(signed_value > 0);
    }
    CHECK(total == 945);
}

TEST_CASE("haar twirl properties") {
    SeededStream rng(31);
    const int D = 4;

    for (Group g : {Group::unitary, Group::orthogonal, Group::symplectic}) {
        WgTable t = (g == Group::unitary)      ? wg_unitary(1, D)
                    : (g == Group::orthogonal) ? wg_orthogonal(1, D)
                                               : wg_symplectic(1, D / 2);
        ComplexMatrix a = sample_haar_unitary(D, rng);
        ComplexMatrix tw = haar_twirl(t, a);
        CHECK(max_abs(tw - a.trace() * identity(D) / static_cast<double>(D)) < 1e-12);
    }

    WgTable tu = wg_unitary(2, D);
    WgTable to = wg_orthogonal(2, D);
    WgTable ts = wg_symplectic(2, D / 2);

    for (const WgTable* t : {&tu, &to, &ts})
        CHECK(max_abs(haar_twirl(*t, identity(D * D)) - identity(D * D)) < 1e-10);

    ComplexMatrix a(D * D, D * D);
    for (int i = 0; i < D * D; ++i)
        for (int j = 0; j < D * D; ++j) a(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);

    // twirled operators commute with V x V over the matching group
    for (int rep = 0; rep < 20; ++rep) {
        ComplexMatrix v = sample_haar_unitary(D, rng);
        ComplexMatrix vv = kron(v, v);
        ComplexMatrix tw = haar_twirl(tu, a);
        CHECK(max_abs(tw * vv - vv * tw) < 1e-9);
    }
    {
        ComplexMatrix v = sample_haar_orthogonal(D, rng);
        ComplexMatrix vv = kron(v, v);
        ComplexMatrix tw = haar_twirl(to, a);
        CHECK(max_abs(tw * vv - vv * tw) < 1e-9);
        ComplexMatrix s = sample_haar_symplectic(D / 2, rng);
        ComplexMatrix ss = kron(s, s);
        ComplexMatrix tws = haar_twirl(ts, a);
        CHECK(max_abs(tws * ss - ss * tws) < 1e-9);
    }

    CHECK(max_abs(haar_twirl(tu, haar_twirl(tu, a)) - haar_twirl(tu, a)) < 1e-9);

    // Monte Carlo agreement through a fixed linear functional
    ComplexMatrix probe(D * D, D * D);
    for (int i = 0; i < D * D; ++i)
        for (int j = 0; j < D * D; ++j)
            probe(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    struct Case {
        const WgTable* table;
        std::function<ComplexMatrix(SeededStream&)> draw;
    };
    std::vector<Case> cases = {
        {&tu, [&](SeededStream& s) { return sample_haar_unitary(D, s); }},
        {&to, [&](SeededStream& s) { return sample_haar_orthogonal(D, s); }},
        {&ts, [&](SeededStream& s) { return sample_haar_symplectic(D / 2, s); }}};
    const int trials = 100000;
    for (const auto& c : cases) {
        ComplexMatrix exact = haar_twirl(*c.table, a);
        double target = (probe * exact).trace().real();
        std::vector<double> xs(trials);
        for (int i = 0; i < trials; ++i) {
            SeededStream s = SeededStream(500).derive(i);
            ComplexMatrix m = c.draw(s);
            ComplexMatrix mm = kron(m, m);
            xs[i] = (probe * mm * a * mm.adjoint()).trace().real();
        }
        double mean = compensated_sum(xs) / trials;
        double var = 0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= (trials - 1);
        CHECK(std::abs(mean - target) <= 5.0 * std::sqrt(var / trials));
    }
}

TEST_CASE("weingarten bound checks") {
    WgBoundReport r1 = wg_bound_check(wg_unitary(2, 16));
    CHECK(r1.regime_ok);
    CHECK(r1.all_sandwich_ok);
    CHECK(r1.identity_dev_ok);
    WgBoundReport r2 = wg_bound_check(wg_unitary(3, 64));
    CHECK(r2.all_sandwich_ok);
    CHECK(r2.identity_dev_ok);
    WgBoundReport r3 = wg_bound_check(wg_orthogonal(2, 256));
    CHECK(r3.all_sandwich_ok);
    CHECK(r3.identity_dev_ok);
    // symplectic: the sandwich exactly as printed fails at the identity
    // class on exact values (its left side demands a (k-1)/(D/2)^2 deviation
    // where the true one is 2/D^2); the mixed form holds
    WgBoundReport r4 = wg_bound_check(wg_symplectic(2, 128));
    CHECK(!r4.all_sandwich_ok);
    CHECK(r4.all_mixed_ok);
    CHECK(r4.identity_dev_ok);
    WgBoundReport r5 = wg_bound_check(wg_symplectic(3, 512));
    CHECK(!r5.all_sandwich_ok);
    CHECK(r5.all_mixed_ok);
    CHECK(r5.identity_dev_ok);
    // outside the regime the check refuses rather than reporting a failure
    CHECK_THROWS_AS(wg_bound_check(wg_unitary(3, 8)), ValidationError);

    // the left inequality for the identity class holds down to D = k
    for (int k : {2, 3}) {
        WgTable t = wg_unitary(k, k);
        CycleType id;
        id.parts.assign(k, 1);
        Rational x = t.at(id) * rational_pow(k, k);
        Rational lhs = 1 / (1 - Rational(k - 1) / Rational(k * k));
        CHECK(x >= lhs);
    }
}

TEST_CASE("table cache round trip") {
    std::string dir = (std::filesystem::temp_directory_path() / "wg-cache-test").string();
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    WgTable built = wg_table_cached(Group::symplectic, 2, 4, dir);
    WgTable loaded = wg_table_cached(Group::symplectic, 2, 4, dir);  // hits the file
    CHECK(built.values.size() == loaded.values.size());
    for (const auto& [type, value] : built.values) CHECK(loaded.at(type) == value);
    CHECK(std::filesystem::exists(dir + "/symplectic-k2-D8.json"));
}
