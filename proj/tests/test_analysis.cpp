#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qualm/analysis.hpp"
#include "qualm/protocols.hpp"
#include "qualm/sampling.hpp"

using namespace qualm;

namespace {

// Q(s) = Pr(s_0) tr(twirl(A_s) B_s): an independent route through the dense
// twirl instead of the trace double sum.
OutcomeDistribution qk_via_twirl(const SmPolicy& policy, const WgTable& table) {
    OutcomeDistribution out;
    out.arity = policy.outcomes_per_round;
    out.rounds = policy.rounds;
    std::size_t cells = 1;
    for (int i = 0; i <= policy.rounds; ++i) cells *= policy.outcomes_per_round;
    out.probabilities.assign(cells, 0.0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
        std::vector<int> s = out.transcript_of(idx);
        auto povm0 = policy.povm_for(0, {});
        double pr0 = povm0.at(s[0]).weight * std::norm(povm0.at(s[0]).vector.amplitude(0));
        std::vector<ComplexMatrix> a, b;
        std::vector<int> history = {s[0]};
        for (int i = 1; i <= policy.rounds; ++i) {
            a.push_back(policy.prepare_for(i - 1, history).entries());
            auto povm = policy.povm_for(i, history);
            b.push_back(povm.at(s[i]).weight * povm.at(s[i]).vector.projector());
            history.push_back(s[i]);
        }
        ComplexMatrix twirled = haar_twirl(table, kron_all(a));
        out.probabilities[idx] = pr0 * (twirled * kron_all(b)).trace().real();
    }
    return out;
}

}  // namespace

TEST_CASE("exact Pk structure") {
    SmPolicy p = computational_sm_policy(2, 3);
    OutcomeDistribution pk = exact_pk(p);
    CHECK(std::abs(pk.total() - 1.0) < 1e-12);
    // projective policy: each transcript with s_0 = 0 has mass 1/D^k
    CHECK(pk.mass({0, 1, 2, 3}) == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
    CHECK(pk.mass({1, 1, 2, 3}) == 0.0);  // Pr(s_0 = 1) vanishes for |0>
}

TEST_CASE("exact Qk: unitary, k = 1 is a twirl to the uniform row") {
    SmPolicy p = computational_sm_policy(2, 1);
    WgTable t = wg_unitary(1, 4);
    OutcomeDistribution q = exact_qk_sm(p, t);
    for (int s1 = 0; s1 < 4; ++s1)
        CHECK(q.mass({0, s1}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(q.total() - 1.0) < 1e-12);
}

TEST_CASE("exact Qk matches the twirl route and the k = 2 closed form") {
    const int ell = 1, D = 2;
    SmPolicy p = computational_sm_policy(ell, 2);
    WgTable t = wg_unitary(2, D);
    OutcomeDistribution q = exact_qk_sm(p, t);
    OutcomeDistribution q_ref = qk_via_twirl(p, t);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(q.probabilities[i] == doctest::Approx(q_ref.probabilities[i]).epsilon(1e-10));

    // closed form for the computational policy:
    // Q(0, a, b) = int |<a|U|0>|^2 |<b|U|0>|^2 dU = (1 + delta_ab)/(D(D+1))
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
            double expect = (a == b ? 2.0 : 1.0) / (D * (D + 1.0));
            CHECK(q.mass({0, a, b}) == doctest::Approx(expect).epsilon(1e-12));
        }

    // and against Monte Carlo of the executor
    const int trials = 100000;
    OutcomeDistribution emp = empirical_distribution(
        [&](SeededStream& s) {
            LabOracle oracle(OracleKind::loq, ell, s.derive(1));
            SeededStream coin = s.derive(2);
            return execute_sm(p, oracle, coin);
        },
        trials, p.outcomes_per_round, p.rounds, SeededStream(12345), 1);
    for (std::size_t i = 0; i < q.size(); ++i) {
        double hw = wilson_halfwidth(emp.probabilities[i], trials, 5.0);
        CHECK(std::abs(emp.probabilities[i] - q.probabilities[i]) <= hw);
    }
}

TEST_CASE("exact Qk for orthogonal and symplectic ensembles, vs Monte Carlo") {
    const int ell = 2, D = 4, k = 2;
    SmPolicy p = computational_sm_policy(ell, k);
    const int trials = 100000;

    struct Case {
        Group group;
        OracleKind kind;
    };
    for (const auto& c : {Case{Group::orthogonal, OracleKind::lo_o},
                          Case{Group::symplectic, OracleKind::lo_sp}}) {
        WgTable t = (c.group == Group::orthogonal) ? wg_orthogonal(k, D)
                                                   : wg_symplectic(k, D / 2);
        OutcomeDistribution q = exact_qk_sm(p, t);
        CHECK(std::abs(q.total() - 1.0) < 1e-9);
        for (double mass : q.probabilities) CHECK(mass > -1e-12);
        OutcomeDistribution emp = empirical_distribution(
            [&](SeededStream& s) {
                LabOracle oracle(c.kind, ell, s.derive(1));
                SeededStream coin = s.derive(2);
                return execute_sm(p, oracle, coin);
            },
            trials, p.outcomes_per_round, p.rounds, SeededStream(777), 1);
        for (std::size_t i = 0; i < q.size(); ++i) {
            double hw = wilson_halfwidth(emp.probabilities[i], trials, 5.0);
            CHECK(std::abs(emp.probabilities[i] - q.probabilities[i]) <= hw);
        }
    }
}

TEST_CASE("flatness on no-collision transcripts") {
    for (int ell : {1, 2, 3})
        for (int k : {2, 3}) {
            const int D = 1 << ell;
            if (D < k) continue;
            SmPolicy p = computational_sm_policy(ell, k);
            WgTable t = wg_unitary(k, D);
            OutcomeDistribution q = exact_qk_sm(p, t);
            CHECK(std::abs(q.total() - 1.0) < 1e-9);
            double reference = -1.0;
            for (std::size_t idx = 0; idx < q.size(); ++idx) {
                std::vector<int> s = q.transcript_of(idx);
                if (s[0] != 0) continue;
                bool collision = false;
                for (int i = 1; i <= k; ++i)
                    for (int j = i + 1; j <= k; ++j) collision = collision || (s[i] == s[j]);
                if (collision) continue;
                if (reference < 0) reference = q.probabilities[idx];
                CHECK(std::abs(q.probabilities[idx] - reference) < 1e-12);
            }
        }
}

TEST_CASE("tvd and bias") {
    SmPolicy p = computational_sm_policy(2, 2);
    OutcomeDistribution pk = exact_pk(p);
    CHECK(tvd(pk, pk) == 0.0);

    OutcomeDistribution a = pk, b = pk;
    a.probabilities.assign(a.size(), 0.0);
    b.probabilities.assign(b.size(), 0.0);
    a.probabilities[0] = 1.0;
    b.probabilities[1] = 1.0;
    CHECK(tvd(a, b) == 2.0);  // disjoint point masses in the 1-norm convention

    DensityMatrix zero = DensityMatrix::pure(PureState::basis(2, 0));
    DensityMatrix one = DensityMatrix::pure(PureState::basis(2, 1));
    CHECK(bias(zero, zero) == 0.0);
    CHECK(bias(zero, one) == doctest::Approx(2.0));
    CHECK(bias(zero, DensityMatrix::maximally_mixed(2)) == doctest::Approx(1.0));
    DensityMatrix big = DensityMatrix::maximally_mixed(4);
    CHECK_THROWS_AS(bias(big, big), ShapeError);
}

TEST_CASE("tvd decreases under marginalization") {
    const int k = 2;
    for (int ell : {2, 3}) {
        SmPolicy p = computational_sm_policy(ell, k);
        WgTable t = wg_unitary(k, 1 << ell);
        OutcomeDistribution pk = exact_pk(p);
        OutcomeDistribution qk = exact_qk_sm(p, t);
        double joint = tvd(pk, qk);
        double marg = tvd(pk.marginal(1), qk.marginal(1));
        CHECK(marg <= joint + 1e-12);
    }
}

TEST_CASE("bound quantities and the key inequality") {
    // ell = 3 at k = 2 sits just outside the strict regime condition (the
    // report flags it); the inequalities themselves hold at both sizes
    for (int ell : {3, 4}) {
        SmPolicy p = computational_sm_policy(ell, 2);
        WgTable t = wg_unitary(2, 1 << ell);
        BoundReport rep = bound_quantities(p, t);
        CHECK(rep.regime_ok == (ell >= 4));
        CHECK(rep.per_tau_ok);
        CHECK(rep.t_closed_form_ok);
        CHECK(rep.bound_holds);
        CHECK(rep.lhs <= rep.rhs);
        // c2 = 1 + O(k^2/D): the envelope with constant 4
        CHECK(std::abs(rep.c2 - 1.0) < 4.0 * 4.0 / (1 << ell));
    }
    // adaptive policies run through the same machinery
    SmPolicy greedy = greedy_sm_policy(2, 2);
    WgTable t4 = wg_unitary(2, 4);
    BoundReport rep = bound_quantities(greedy, t4);
    CHECK(rep.per_tau_ok);
    CHECK(rep.bound_holds);
}

TEST_CASE("exact tvd decay across ell") {
    const int k = 2;
    // closed form for the computational policy: 2(D-1)/(D(D+1))
    double prev = -1;
    for (int ell = 2; ell <= 5; ++ell) {
        const int D = 1 << ell;
        SmPolicy p = computational_sm_policy(ell, k);
        WgTable t = wg_unitary(k, D);
        double val = tvd(exact_pk(p), exact_qk_sm(p, t));
        double closed = 2.0 * (D - 1.0) / (D * (D + 1.0));
        CHECK(val == doctest::Approx(closed).epsilon(1e-9));
        if (prev > 0) {
            double ratio = val / prev;
            CHECK(val < prev);
            CHECK(ratio >= 0.3);
            CHECK(ratio <= 0.7);
        }
        prev = val;
    }
}

TEST_CASE("three-way group distances at ell = 3") {
    const int ell = 3, D = 8, k = 2;
    SmPolicy p = computational_sm_policy(ell, k);
    OutcomeDistribution pk = exact_pk(p);
    OutcomeDistribution qu = exact_qk_sm(p, wg_unitary(k, D));
    OutcomeDistribution qo = exact_qk_sm(p, wg_orthogonal(k, D));
    OutcomeDistribution qs = exact_qk_sm(p, wg_symplectic(k, D / 2));
    double du = tvd(pk, qu), do_ = tvd(pk, qo), ds = tvd(pk, qs);
    double max_pair = std::max({tvd(qu, qo), tvd(qu, qs), tvd(qo, qs)});
    CHECK(max_pair <= du + do_ + ds + 1e-12);  // triangle via P_k
    CHECK(tvd(qu, qo) <= du + do_ + 1e-12);
    CHECK(tvd(qu, qs) <= du + ds + 1e-12);
    CHECK(tvd(qo, qs) <= do_ + ds + 1e-12);
    CHECK(max_pair <= 4.0 * du);  // the frozen comparison against the U value
}

TEST_CASE("exact Pk matches LOP Monte Carlo") {
    const int ell = 2, k = 2, trials = 100000;
    SmPolicy p = computational_sm_policy(ell, k);
    OutcomeDistribution pk = exact_pk(p);
    OutcomeDistribution emp = empirical_distribution(
        [&](SeededStream& s) {
            LabOracle oracle(OracleKind::lop, ell, s.derive(1));
            SeededStream coin = s.derive(2);
            return execute_sm(p, oracle, coin);
        },
        trials, p.outcomes_per_round, p.rounds, SeededStream(424242), 1);
    for (std::size_t i = 0; i < pk.size(); ++i)
        CHECK(std::abs(emp.probabilities[i] - pk.probabilities[i]) <=
              wilson_halfwidth(emp.probabilities[i], trials, 5.0));
}

TEST_CASE("LOD transcripts equal the product form exactly") {
    for (int ell : {1, 2})
        for (int k : {1, 2, 3}) {
            SmPolicy p = computational_sm_policy(ell, k);
            OutcomeDistribution lod = exact_lod(p);
            OutcomeDistribution pk = exact_pk(p);
            CHECK(tvd(lod, pk) == 0.0);
        }
}

TEST_CASE("collision statistics") {
    // k = 1 can have no collision
    CollisionStats one = collision_stats(3, 1, OracleKind::lop, 2000, SeededStream(1), 1);
    CHECK(one.empirical_rate == 0.0);

    // LOP at ell = 4, k = 2: rate is 1/2^ell within 5 sigma
    const int trials = 40000;
    CollisionStats st = collision_stats(4, 2, OracleKind::lop, trials, SeededStream(2), 1);
    double expect = 1.0 / 16.0;
    CHECK(std::abs(st.empirical_rate - expect) <=
          5.0 * std::sqrt(expect * (1 - expect) / trials));
    CHECK(st.analytic_eps_p == doctest::Approx(expect));

    // LOQ at ell = 5, k = 3 stays under the epsilon_Q bound
    CollisionStats q = collision_stats(5, 3, OracleKind::loq, 20000, SeededStream(3), 1);
    CHECK(q.empirical_rate <= q.q_bound);
}

TEST_CASE("levy concentration") {
    LevyReport rep = levy_check(6, 30000, SeededStream(4), 1);
    for (const auto& row : rep.rows) CHECK(row.empirical_tail <= row.bound + 1e-12);
    CHECK(std::abs(rep.mean_overlap - 1.0 / 64.0) <= 5.0 * rep.mean_sigma);
    // an overlap can never deviate by 1 or more
    const int D = 1 << 3;
    SeededStream s(5);
    for (int t = 0; t < 200; ++t) {
        ComplexMatrix u = sample_haar_unitary(D, s);
        CHECK(std::abs(std::norm(u(0, 0)) - 1.0 / D) < 1.0);
    }
}

TEST_CASE("distribution export round trip") {
    SmPolicy p = computational_sm_policy(1, 1);
    OutcomeDistribution d = exact_pk(p);
    auto dir = std::filesystem::temp_directory_path() / "qualm-dist-export";
    std::filesystem::create_directories(dir);
    save_distribution_csv(d, (dir / "d.csv").string());
    save_distribution_json(d, (dir / "d.json").string());
    std::ifstream csv(dir / "d.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "transcript,probability");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 4);
    std::ifstream js(dir / "d.json");
    std::string all((std::istreambuf_iterator<char>(js)), std::istreambuf_iterator<char>());
    CHECK(all.find("\"arity\"") != std::string::npos);
}

TEST_CASE("serial and OpenMP transcript maps agree bitwise") {
    SmPolicy p = computational_sm_policy(3, 2);
    WgTable t = wg_unitary(2, 8);
    OutcomeDistribution serial = exact_qk_sm(p, t, 1);
    OutcomeDistribution threaded = exact_qk_sm(p, t, 4);
    CHECK(serial.probabilities == threaded.probabilities);
    CHECK(exact_pk(p, 1).probabilities == exact_pk(p, 4).probabilities);
    BoundReport r1 = bound_quantities(p, t, 1);
    BoundReport r4 = bound_quantities(p, t, 4);
    CHECK(r1.T == r4.T);
    CHECK(r1.lhs == r4.lhs);
}

TEST_CASE("empirical distribution plumbing") {
    // a deterministic executor gives a point mass
    OutcomeDistribution point = empirical_distribution(
        [](SeededStream&) { return std::vector<int>{0, 1}; }, 500, 2, 1, SeededStream(6), 1);
    CHECK(point.mass({0, 1}) == doctest::Approx(1.0).epsilon(1e-12));

    // a fair coin lands near 1/2 per cell
    const int trials = 100000;
    OutcomeDistribution coin = empirical_distribution(
        [](SeededStream& s) {
            return std::vector<int>{0, s.uniform() < 0.5 ? 0 : 1};
        },
        trials, 2, 1, SeededStream(7), 1);
    CHECK(std::abs(coin.mass({0, 0}) - 0.5) < 5.0 * std::sqrt(0.25 / trials));

    // thread-count independence, bit exact
    auto exec = [](SeededStream& s) {
        return std::vector<int>{0, static_cast<int>(s.below(4))};
    };
    OutcomeDistribution serial = empirical_distribution(exec, 20000, 4, 1, SeededStream(8), 1);
    OutcomeDistribution threaded = empirical_distribution(exec, 20000, 4, 1, SeededStream(8), 4);
    CHECK(serial.probabilities == threaded.probabilities);
}
