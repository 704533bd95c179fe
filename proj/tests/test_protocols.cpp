#include "doctest.h"
#include "qualm/protocols.hpp"
#include "qualm/sampling.hpp"

using namespace qualm;

TEST_CASE("swap test program structure") {
    for (int ell : {1, 2, 4}) {
        QualmProgram p = swap_test_program(ell);
        p.validate();
        CHECK(p.query_complexity() == 2);
        CHECK(p.gate_complexity() == 2 * ell + 2);  // ell swaps, H, ell cswaps, H
    }
}

TEST_CASE("swap test executor matches the analytic probability") {
    SeededStream rng(10);
    // LOQ: the control reads 0 with certainty; check the exact reduced state
    for (int ell : {1, 2, 3}) {
        LabOracle oracle = make_oracle(OracleKind::loq, ell, 50 + ell);
        QualmProgram p = swap_test_program(ell);
        CoherentResult r = execute_coherent(p, oracle, rng);
        CHECK(std::abs(r.rho_out(0, 0).real() - 1.0) < 1e-9);
        CHECK(oracle.calls() == 2);
    }
    // a product state fed through the test gives (1 + |<b|a>|^2)/2: drive the
    // executor with a fresh-unitary oracle and compare per sample
    for (int t = 0; t < 30; ++t) {
        LabOracle lop = make_oracle(OracleKind::lop, 2, 400 + t);
        LabOracle replay = make_oracle(OracleKind::lop, 2, 400 + t);
        QualmProgram p = swap_test_program(2);
        SeededStream s(500 + t);
        CoherentResult r = execute_coherent(p, lop, s);
        ComplexMatrix u1 = replay.next_action().unitary;
        ComplexMatrix u2 = replay.next_action().unitary;
        CHECK(std::abs(r.rho_out(0, 0).real() - swap_test_pr0(u1, u2)) < 1e-10);
    }
    // the entangled-preparation variant has the same certainty on LOQ
    LabOracle oracle = make_oracle(OracleKind::loq, 2, 60);
    CoherentResult r = execute_coherent(swap_test_program_entangled(2), oracle, rng);
    CHECK(std::abs(r.rho_out(0, 0).real() - 1.0) < 1e-9);
}

TEST_CASE("swap test on LOP: empirical Pr0 = 1/2 + 1/(2D)") {
    const int ell = 4, D = 16;
    const int trials = 100000;
    std::vector<double> xs(trials);
    for (int t = 0; t < trials; ++t) {
        LabOracle lop = make_oracle(OracleKind::lop, ell, 100000 + t);
        CallAction a1 = lop.next_action();
        CallAction a2 = lop.next_action();
        xs[t] = swap_test_pr0(a1.unitary, a2.unitary);
    }
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= trials;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (trials - 1);
    CHECK(std::abs(mean - (0.5 + 0.5 / D)) <= 5.0 * std::sqrt(var / trials));
}

TEST_CASE("symmetry programs: executor vs analytic, on all three classes") {
    SeededStream rng(11);
    for (int ell : {1, 2}) {
        for (OracleKind kind : {OracleKind::lo_u, OracleKind::lo_o, OracleKind::lo_sp}) {
            LabOracle oracle = make_oracle(kind, ell, 70 + ell);
            QualmProgram s1 = symmetry_program_stage1(ell);
            s1.validate();
            CHECK(s1.query_complexity() == 2);
            CoherentResult r1 = execute_coherent(s1, oracle, rng);
            double expect1 = symmetry_stage1_pr_plus(oracle.fixed_matrix());
            CHECK(std::abs(r1.rho_out(0, 0).real() - expect1) < 1e-9);

            LabOracle oracle2 = make_oracle(kind, ell, 70 + ell);
            QualmProgram s2 = symmetry_program_stage2(ell);
            CoherentResult r2 = execute_coherent(s2, oracle2, rng);
            double expect2 = symmetry_stage2_pr_plus(oracle2.fixed_matrix());
            CHECK(std::abs(r2.rho_out(0, 0).real() - expect2) < 1e-9);
        }
    }
    // certainties: stage 1 on an orthogonal sample, stage 2 on a symplectic one
    for (int t = 0; t < 50; ++t) {
        LabOracle lo_o = make_oracle(OracleKind::lo_o, 3, 900 + t);
        CHECK(std::abs(symmetry_stage1_pr_plus(lo_o.fixed_matrix()) - 1.0) < 1e-9);
        LabOracle lo_sp = make_oracle(OracleKind::lo_sp, 3, 950 + t);
        CHECK(std::abs(symmetry_stage2_pr_plus(lo_sp.fixed_matrix()) - 1.0) < 1e-9);
    }
}

TEST_CASE("symmetry stage-1 Markov tail for unitary samples") {
    // Pr[|tr(U U^T)/D|^2 >= 1/D] <= 2/(D+1), checked empirically at ell = 5
    const int ell = 5, D = 32;
    const int trials = 10000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        LabOracle u = make_oracle(OracleKind::lo_u, ell, 20000 + t);
        Complex tr = (u.fixed_matrix() * u.fixed_matrix().transpose()).trace();
        if (std::norm(tr / static_cast<double>(D)) >= 1.0 / D) ++hits;
    }
    double rate = static_cast<double>(hits) / trials;
    double bound = 2.0 / (D + 1);
    CHECK(rate <= bound + 5.0 * std::sqrt(bound * (1 - bound) / trials));
}

TEST_CASE("symmetry distinguisher classifies the three classes") {
    const int ell = 3, reps = 20, trials = 300;
    struct Case {
        OracleKind kind;
        std::string label;
    };
    for (const Case& c : std::initializer_list<Case>{{OracleKind::lo_o, "O"},
                                                     {OracleKind::lo_sp, "Sp"},
                                                     {OracleKind::lo_u, "U"}}) {
        int correct = 0;
        for (int t = 0; t < trials; ++t) {
            LabOracle oracle = make_oracle(c.kind, ell, 31000 + t);
            SeededStream coin(32000 + t);
            DistinguisherVerdict v = symmetry_distinguish(ell, oracle, reps, coin);
            if (v.label == c.label) ++correct;
        }
        CHECK(static_cast<double>(correct) / trials >= 0.99);
    }
    // query accounting: 2 calls per repetition actually consumed
    LabOracle oracle = make_oracle(OracleKind::lo_o, ell, 44);
    SeededStream coin(45);
    DistinguisherVerdict v = symmetry_distinguish(ell, oracle, reps, coin);
    CHECK(v.label == "O");
    CHECK(oracle.calls() == 2 * reps);
}

TEST_CASE("symmetry distinguisher at the D = 2 edge runs without crashing") {
    // the smallest register: accuracy degrades but every path stays valid
    int labelled = 0;
    for (int t = 0; t < 50; ++t) {
        LabOracle oracle = make_oracle(OracleKind::lo_u, 1, 90000 + t);
        SeededStream coin(91000 + t);
        DistinguisherVerdict v = symmetry_distinguish(1, oracle, 5, coin);
        if (!v.label.empty()) ++labelled;
    }
    CHECK(labelled == 50);
}

TEST_CASE("swap distinguisher and determinism of the decision rule") {
    const int ell = 3;
    int correct = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        LabOracle loq = make_oracle(OracleKind::loq, ell, 51000 + t);
        SeededStream c1(52000 + t);
        if (swap_distinguish(ell, loq, 10, c1).label == "LOQ") ++correct;
        LabOracle lop = make_oracle(OracleKind::lop, ell, 53000 + t);
        SeededStream c2(54000 + t);
        if (swap_distinguish(ell, lop, 10, c2).label == "LOP") ++correct;
    }
    CHECK(static_cast<double>(correct) / (2 * trials) >= 0.99);

    // identical raw outcomes give identical labels
    LabOracle a = make_oracle(OracleKind::loq, ell, 61);
    LabOracle b = make_oracle(OracleKind::loq, ell, 61);
    SeededStream ca(62), cb(62);
    DistinguisherVerdict va = swap_distinguish(ell, a, 5, ca);
    DistinguisherVerdict vb = swap_distinguish(ell, b, 5, cb);
    CHECK(va.raw_outcomes == vb.raw_outcomes);
    CHECK(va.label == vb.label);
}

TEST_CASE("parallel SM policy realizes the rotated product form") {
    const int ell = 2, dim = 4;
    // identity rotations on a forced-identity LOQ: all-zero transcripts
    SmPolicy p = parallel_sm_policy(ell, 2, identity(dim), identity(dim));
    OracleOptions opts;
    opts.forced_matrix = identity(dim);
    LabOracle forced = make_oracle(OracleKind::loq, ell, 1, opts);
    SeededStream s(2);
    CHECK(execute_sm(p, forced, s) == std::vector<int>{0, 0, 0});

    // rotated preparations and bases still produce valid POVMs
    SeededStream vr(3);
    ComplexMatrix y = sample_haar_unitary(dim, vr);
    ComplexMatrix v = sample_haar_unitary(dim, vr);
    SmPolicy q = parallel_sm_policy(ell, 2, y, v);
    check_povm_complete(q.povm_for(1, {0}), dim);
    CHECK_THROWS_AS(parallel_sm_policy(ell, 2, identity(3), identity(3)), ShapeError);
}

TEST_CASE("amplification majority vote") {
    // a synthetic Bernoulli distinguisher with success 2/3 amplified to >= 0.95
    const int meta_trials = 10000, m = 15;
    int correct = 0;
    SeededStream meta(64);
    for (int t = 0; t < meta_trials; ++t) {
        SeededStream trial = meta.derive(t);
        auto run = [&](SeededStream& s) {
            DistinguisherVerdict v;
            v.repetitions = 1;
            v.label = (s.uniform() < 2.0 / 3.0) ? "right" : "wrong";
            v.raw_outcomes = {v.label == "right" ? 1 : 0};
            return v;
        };
        if (amplify(run, m, trial).label == "right") ++correct;
    }
    // binomial tail: P[majority of 15 at p = 2/3] = 0.9383... so demand a
    // 5-sigma band around it and the 0.95-style floor as a sanity margin
    double p_major = 0.0;
    {
        // sum_{j=8}^{15} C(15, j) (2/3)^j (1/3)^{15-j}
        double total = 0.0;
        for (int j = 8; j <= 15; ++j) {
            double c = 1.0;
            for (int i = 0; i < j; ++i) c = c * (15 - i) / (i + 1);
            total += c * std::pow(2.0 / 3.0, j) * std::pow(1.0 / 3.0, 15 - j);
        }
        p_major = total;
    }
    double rate = static_cast<double>(correct) / meta_trials;
    CHECK(std::abs(rate - p_major) <= 5.0 * std::sqrt(p_major * (1 - p_major) / meta_trials));
    CHECK(rate >= 0.9);

    // m = 1 is one run; a deterministic distinguisher is unchanged
    auto det = [](SeededStream&) {
        DistinguisherVerdict v;
        v.repetitions = 1;
        v.label = "fixed";
        return v;
    };
    SeededStream s1(65);
    CHECK(amplify(det, 1, s1).label == "fixed");
    CHECK(amplify(det, 15, s1).label == "fixed");
    CHECK_THROWS_AS(amplify(det, 4, s1), ValidationError);
}
