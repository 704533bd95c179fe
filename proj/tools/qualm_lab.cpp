#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qualm/commands.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> ell, k, trials, threads, reps;
    std::optional<std::string> out, group, experiment, oracle;
};

void add_common(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "experiment config JSON");
    cmd->add_option("--seed", ov.seed, "override seed");
    cmd->add_option("--ell", ov.ell, "override lab register size");
    cmd->add_option("--k", ov.k, "override round count");
    cmd->add_option("--trials", ov.trials, "override trial count");
    cmd->add_option("--threads", ov.threads, "override worker threads");
    cmd->add_option("--reps", ov.reps, "override distinguisher repetitions");
    cmd->add_option("--out", ov.out, "override output directory");
    cmd->add_option("--group", ov.group, "override matrix group (U, O, Sp, all)");
    cmd->add_option("--experiment", ov.experiment, "override experiment name");
    cmd->add_option("--oracle", ov.oracle, "override oracle kind");
}

qualm::ExperimentConfig resolve(const Overrides& ov) {
    qualm::ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = qualm::ExperimentConfig::from_json_file(ov.config_path);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.ell) cfg.ell = *ov.ell;
    if (ov.k) cfg.k = *ov.k;
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.reps) cfg.reps = *ov.reps;
    if (ov.out) cfg.output_dir = *ov.out;
    if (ov.group) cfg.group = *ov.group;
    if (ov.experiment) cfg.experiment = *ov.experiment;
    if (ov.oracle) cfg.oracle_kind = *ov.oracle;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qualm-lab: lab-oracle distinguishing experiments and Weingarten tables"};
    app.require_subcommand(1);

    Overrides ov;
    int (*runner)(const qualm::ExperimentConfig&) = nullptr;

    auto* moments = app.add_subcommand("moments", "Monte Carlo vs closed-form Haar moments");
    add_common(moments, ov);
    moments->callback([&] { runner = qualm::cmd_moments; });

    auto* wg = app.add_subcommand("wg", "build and verify Weingarten tables");
    add_common(wg, ov);
    wg->callback([&] { runner = qualm::cmd_wg; });

    auto* dist = app.add_subcommand("distinguish", "coherent distinguishers with resampling");
    add_common(dist, ov);
    dist->callback([&] { runner = qualm::cmd_distinguish; });

    auto* tvd = app.add_subcommand("tvd_scan", "exact P_k/Q_k distances across ell");
    add_common(tvd, ov);
    tvd->callback([&] { runner = qualm::cmd_tvd_scan; });

    auto* sep = app.add_subcommand("incoherent_vs_coherent",
                                   "coherent bias vs best incoherent bias across ell");
    add_common(sep, ov);
    sep->callback([&] { runner = qualm::cmd_incoherent_vs_coherent; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return runner(resolve(ov));
    } catch (const qualm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
