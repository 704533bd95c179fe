#include "qualm/analysis.hpp"

#include <cmath>

#include "json.hpp"
#include "qualm/io.hpp"
#include "qualm/parallel.hpp"
#include "qualm/sampling.hpp"

#include <fstream>

namespace qualm {

std::size_t OutcomeDistribution::index_of(const std::vector<int>& s) const {
    if (static_cast<int>(s.size()) != rounds + 1)
        throw ShapeError("OutcomeDistribution: transcript length mismatch");
    std::size_t idx = 0;
    for (int v : s) {
        if (v < 0 || v >= arity) throw ShapeError("OutcomeDistribution: outcome out of range");
        idx = idx * arity + static_cast<std::size_t>(v);
    }
    return idx;
}

std::vector<int> OutcomeDistribution::transcript_of(std::size_t index) const {
    std::vector<int> s(rounds + 1);
    for (int i = rounds; i >= 0; --i) {
        s[i] = static_cast<int>(index % arity);
        index /= arity;
    }
    return s;
}

double OutcomeDistribution::total() const { return compensated_sum(probabilities); }

OutcomeDistribution OutcomeDistribution::marginal(int rounds_kept) const {
    if (rounds_kept < 0 || rounds_kept > rounds)
        throw ShapeError("OutcomeDistribution: bad marginal size");
    OutcomeDistribution out;
    out.arity = arity;
    out.rounds = rounds_kept;
    std::size_t kept = 1;
    for (int i = 0; i <= rounds_kept; ++i) kept *= arity;
    std::size_t rest = probabilities.size() / kept;
    out.probabilities.assign(kept, 0.0);
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        out.probabilities[i / rest] += probabilities[i];
    return out;
}

namespace {

constexpr std::size_t kMaxTranscripts = 1000000;

std::size_t transcript_count(const SmPolicy& policy) {
    std::size_t n = 1;
    for (int i = 0; i <= policy.rounds; ++i) {
        n *= static_cast<std::size_t>(policy.outcomes_per_round);
        if (n > kMaxTranscripts)
            throw SizeError("exact analysis: transcript space exceeds the dense cap");
    }
    return n;
}

double pr_s0(const SmPolicy& policy, int s0) {
    auto povm = policy.povm_for(0, {});
    const auto& e = povm.at(s0);
    return e.weight * std::norm(e.vector.amplitude(0));
}

struct TranscriptFactors {
    double pr0 = 0;
    std::vector<ComplexMatrix> a;  // preparations sigma^0 .. sigma^{k-1}
    std::vector<ComplexMatrix> b;  // lambda |y><y| per round 1..k
    double lambda_product = 1;     // prod_i lambda^i
};

TranscriptFactors factors_for(const SmPolicy& policy, const std::vector<int>& s) {
    TranscriptFactors f;
    f.pr0 = pr_s0(policy, s[0]);
    std::vector<int> history(s.begin(), s.begin() + 1);
    for (int i = 1; i <= policy.rounds; ++i) {
        f.a.push_back(policy.prepare_for(i - 1, history).entries());
        auto povm = policy.povm_for(i, history);
        const auto& e = povm.at(s[i]);
        f.b.push_back(e.weight * e.vector.projector());
        f.lambda_product *= e.weight;
        history.push_back(s[i]);
    }
    return f;
}

}  // namespace

OutcomeDistribution exact_pk(const SmPolicy& policy, int threads) {
    OutcomeDistribution out;
    out.arity = policy.outcomes_per_round;
    out.rounds = policy.rounds;
    const std::size_t cells = transcript_count(policy);
    const double dinv = 1.0 / static_cast<double>(std::int64_t(1) << policy.ell);
    parallel_map<double>(
        cells, out.probabilities,
        [&](std::size_t idx) {
            std::vector<int> s = out.transcript_of(idx);
            double pr = pr_s0(policy, s[0]);
            std::vector<int> history(s.begin(), s.begin() + 1);
            for (int i = 1; i <= policy.rounds; ++i) {
                auto povm = policy.povm_for(i, history);
                pr *= povm.at(s[i]).weight * dinv;
                history.push_back(s[i]);
            }
            return pr;
        },
        threads);
    return out;
}

OutcomeDistribution exact_lod(const SmPolicy& policy) {
    // the depolarizing oracle outputs I/D every round, so the transcript
    // distribution coincides with the product form
    return exact_pk(policy);
}

OutcomeDistribution exact_qk_sm(const SmPolicy& policy, const WgTable& table, int threads) {
    const int k = policy.rounds;
    const int D = 1 << policy.ell;
    if (table.k != k) throw ShapeError("exact_qk_sm: table k mismatch");
    if (table.D != D) throw ShapeError("exact_qk_sm: table D mismatch");

    OutcomeDistribution out;
    out.arity = policy.outcomes_per_round;
    out.rounds = k;
    const std::size_t cells = transcript_count(policy);

    if (table.group == Group::unitary) {
        auto perms = enumerate_permutations(k);
        // the Weingarten weights collapse to a class matrix; precompute as doubles
        std::vector<std::vector<double>> w(perms.size(), std::vector<double>(perms.size()));
        for (std::size_t i = 0; i < perms.size(); ++i)
            for (std::size_t j = 0; j < perms.size(); ++j)
                w[i][j] = wg_entry(table, perms[j], perms[i]).get_d();
        parallel_map<double>(
            cells, out.probabilities,
            [&](std::size_t idx) {
                TranscriptFactors f = factors_for(policy, out.transcript_of(idx));
                Complex q = 0.0;
                for (std::size_t si = 0; si < perms.size(); ++si) {
                    Complex ta = permutation_trace(f.a, perms[si]);
                    for (std::size_t ti = 0; ti < perms.size(); ++ti) {
                        Complex tb = permutation_trace(f.b, perms[ti].inverse());
                        q += ta * tb * w[si][ti];
                    }
                }
                return f.pr0 * q.real();
            },
            threads);
        return out;
    }

    auto ps = enumerate_pair_partitions(k);
    const bool symplectic = (table.group == Group::symplectic);
    ComplexMatrix J;
    if (symplectic) J = canonical_J(D / 2);
    std::vector<std::vector<double>> w(ps.size(), std::vector<double>(ps.size()));
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j) w[i][j] = wg_entry(table, ps[i], ps[j]).get_d();
    parallel_map<double>(
        cells, out.probabilities,
        [&](std::size_t idx) {
            TranscriptFactors f = factors_for(policy, out.transcript_of(idx));
            std::vector<ComplexMatrix> am = f.a, bm = f.b;
            if (symplectic) {
                for (auto& m : am) m = m * J;
                for (auto& m : bm) m = J.transpose() * m;
            }
            PairFlavor flavor = symplectic ? PairFlavor::symplectic : PairFlavor::orthogonal;
            Complex q = 0.0;
            for (std::size_t mi = 0; mi < ps.size(); ++mi) {
                Complex ta = pair_partition_trace(am, ps[mi], flavor, symplectic ? &J : nullptr);
                for (std::size_t ni = 0; ni < ps.size(); ++ni) {
                    Complex tb =
                        pair_partition_trace(bm, ps[ni], flavor, symplectic ? &J : nullptr);
                    q += ta * tb * w[mi][ni];
                }
            }
            return f.pr0 * q.real();
        },
        threads);
    return out;
}

double tvd(const OutcomeDistribution& p, const OutcomeDistribution& q) {
    if (p.arity != q.arity || p.rounds != q.rounds)
        throw ShapeError("tvd: distributions have different supports");
    std::vector<double> diff(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        diff[i] = std::abs(p.probabilities[i] - q.probabilities[i]);
    return compensated_sum(diff);
}

double bias(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    if (rho0.dim() != 2 || rho1.dim() != 2) throw ShapeError("bias: states must be single-qubit");
    return trace_norm_hermitian(rho0.entries() - rho1.entries());
}

BoundReport bound_quantities(const SmPolicy& policy, const WgTable& table, int threads) {
    if (table.group != Group::unitary)
        throw ShapeError("bound_quantities: unitary-group analysis only");
    const int k = policy.rounds;
    const int D = 1 << policy.ell;
    BoundReport rep;

    // regime k < (2^ell / sqrt 6)^{4/7}  <=>  6 k^{7/2} < D^2  <=>  36 k^7 < D^4
    {
        mpz_class lhs = 36;
        for (int i = 0; i < 7; ++i) lhs *= k;
        mpz_class rhs = 1;
        for (int i = 0; i < 4; ++i) rhs *= D;
        rep.regime_ok = lhs < rhs;
    }

    // c1 and c2 from the exact table
    CycleType id_type;
    id_type.parts.assign(k, 1);
    Rational dk = rational_pow(D, k);
    Rational c1 = abs(table.at(id_type) - 1 / dk);
    Rational c2(0);
    for (const auto& [type, value] : table.values) {
        Rational contribution = Rational(cycle_type_class_size(type, k)) * abs(value);
        c2 += contribution;
        if (!(type == id_type)) c1 += contribution;
    }
    rep.c1 = Rational(c1 * dk).get_d();
    rep.c2 = Rational(c2 * dk).get_d();

    // T by transcript enumeration, grouped per permutation
    auto perms = enumerate_permutations(k);
    const std::size_t n = transcript_count(policy);
    rep.per_tau_ok = true;
    double T = 0.0;
    OutcomeDistribution shape;
    shape.arity = policy.outcomes_per_round;
    shape.rounds = k;
    shape.probabilities.assign(n, 0.0);
    std::vector<double> t_by_L(k + 1, 0.0);
    for (const auto& tau : perms) {
        if (tau.is_identity()) continue;
        std::vector<double> terms;
        Permutation tau_inv = tau.inverse();
        parallel_map<double>(
            n, terms,
            [&](std::size_t idx) {
                TranscriptFactors f = factors_for(policy, shape.transcript_of(idx));
                // the Pr(s_0) weight is what makes sum_s tr(B_s) equal D^k
                return f.pr0 * std::abs(permutation_trace(f.b, tau_inv));
            },
            threads);
        double sum_tau = compensated_sum(terms);
        int L = tau.cycle_type().nontrivial_length();
        double cap = std::pow(static_cast<double>(D), k - L / 2);
        if (sum_tau > cap * (1.0 + 1e-9)) rep.per_tau_ok = false;
        t_by_L[L] += sum_tau;
        T += sum_tau;
    }
    rep.T = T / std::pow(static_cast<double>(D), k);
    rep.rhs = rep.c1 + rep.c2 * rep.T;

    // closed-form cap on T from the exact permutation counts
    double cap_total = 0.0;
    for (int L = 2; L <= k; ++L) {
        auto [n_perm, n_pair] = count_by_nontrivial_length(k, L);
        (void)n_pair;
        cap_total += static_cast<double>(n_perm) * std::pow(static_cast<double>(D), -(L / 2));
    }
    rep.t_closed_form_ok = rep.T <= cap_total * (1.0 + 1e-9);

    OutcomeDistribution pk = exact_pk(policy, threads);
    OutcomeDistribution qk = exact_qk_sm(policy, table, threads);
    rep.lhs = tvd(pk, qk);
    rep.bound_holds = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-12;
    return rep;
}

CollisionStats collision_stats(int ell, int k, OracleKind kind, int trials, SeededStream rng,
                               int threads) {
    CollisionStats st;
    st.trials = trials;
    const double D = static_cast<double>(std::int64_t(1) << ell);
    st.analytic_eps_p = (k * (k - 1) / 2.0) / D;
    st.q_bound = 2.0 * k * k * std::pow(2.0, -ell / 4.0);

    std::vector<double> hits;
    parallel_map<double>(
        static_cast<std::size_t>(trials), hits,
        [&](std::size_t trial) {
            SeededStream s = rng.derive(trial);
            LabOracle oracle(kind, ell, s.derive(1));
            SeededStream exec_rng = s.derive(2);
            SmPolicy policy = computational_sm_policy(ell, k);
            std::vector<int> tr = execute_sm(policy, oracle, exec_rng);
            for (int i = 1; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j)
                    if (tr[i] == tr[j]) return 1.0;
            return 0.0;
        },
        threads);
    st.empirical_rate = compensated_sum(hits) / trials;
    return st;
}

LevyReport levy_check(int ell, int trials, SeededStream rng, int threads) {
    LevyReport rep;
    rep.trials = trials;
    const int D = 1 << ell;
    std::vector<double> overlaps;
    parallel_map<double>(
        static_cast<std::size_t>(trials), overlaps,
        [&](std::size_t trial) {
            SeededStream s = rng.derive(trial);
            ComplexMatrix u = sample_haar_unitary(D, s);
            return std::norm(u(0, 0));  // |<0|U|0>|^2
        },
        threads);
    double mean = compensated_sum(overlaps) / trials;
    double var = 0.0;
    for (double o : overlaps) var += (o - mean) * (o - mean);
    var /= std::max(1, trials - 1);
    rep.mean_overlap = mean;
    rep.mean_sigma = std::sqrt(var / trials);

    const double pi = 3.14159265358979323846;
    for (double eps : {std::pow(static_cast<double>(D), -0.25), 0.1, 0.3}) {
        LevyRow row;
        row.epsilon = eps;
        std::int64_t tail = 0;
        for (double o : overlaps)
            if (std::abs(o - 1.0 / D) >= eps) ++tail;
        row.empirical_tail = static_cast<double>(tail) / trials;
        row.bound = 4.0 * std::exp(-D * eps * eps / (18.0 * pi * pi));
        rep.rows.push_back(row);
    }
    return rep;
}

OutcomeDistribution empirical_distribution(
    const std::function<std::vector<int>(SeededStream&)>& executor, int trials, int arity,
    int rounds, SeededStream rng, int threads) {
    if (trials < 1) throw ValidationError("empirical_distribution: trials must be >= 1");
    OutcomeDistribution out;
    out.arity = arity;
    out.rounds = rounds;
    std::size_t cells = 1;
    for (int i = 0; i <= rounds; ++i) cells *= static_cast<std::size_t>(arity);
    out.probabilities.assign(cells, 0.0);

    std::vector<std::size_t> indices;
    parallel_map<std::size_t>(
        static_cast<std::size_t>(trials), indices,
        [&](std::size_t trial) {
            SeededStream s = rng.derive(trial);
            return out.index_of(executor(s));
        },
        threads);
    for (std::size_t idx : indices) out.probabilities[idx] += 1.0 / trials;
    return out;
}

void save_distribution_csv(const OutcomeDistribution& d, const std::string& path) {
    CsvWriter csv(path, {"transcript", "probability"});
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<int> s = d.transcript_of(i);
        std::string key;
        for (std::size_t j = 0; j < s.size(); ++j) key += (j ? "-" : "") + std::to_string(s[j]);
        csv.row({key, format_double(d.probabilities[i])});
    }
}

void save_distribution_json(const OutcomeDistribution& d, const std::string& path) {
    nlohmann::json j;
    j["arity"] = d.arity;
    j["rounds"] = d.rounds;
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        nlohmann::json c;
        c["transcript"] = d.transcript_of(i);
        c["probability"] = d.probabilities[i];
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(1) << "\n";
}

double wilson_halfwidth(double p_hat, std::int64_t n, double z) {
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double rad = std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * (double)n)));
    return (z * rad) / denom + std::abs(p_hat - (p_hat + z2 / (2 * n)) / denom);
}

}  // namespace qualm
