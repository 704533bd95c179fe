#include "qualm/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace qualm {

namespace {

ExperimentConfig parse(const nlohmann::json& j) {
    static const std::set<std::string> known = {"experiment", "ell",    "k",       "trials",
                                                "seed",       "oracle", "output_dir", "group",
                                                "threads",    "reps"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown config field: " + it.key());

    ExperimentConfig c;
    if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("ell")) c.ell = j.at("ell").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        if (o.is_string())
            c.oracle_kind = o.get<std::string>();
        else if (o.is_object()) {
            for (auto it = o.begin(); it != o.end(); ++it)
                if (it.key() != "kind") throw ConfigError("unknown oracle field: " + it.key());
            c.oracle_kind = o.at("kind").get<std::string>();
        } else
            throw ConfigError("oracle must be a string or an object with a kind");
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("group")) c.group = j.at("group").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("reps")) c.reps = j.at("reps").get<int>();
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (c.ell < 1) throw ConfigError("ell must be >= 1");
    return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse(j);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse(j);
}

}  // namespace qualm
