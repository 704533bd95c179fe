#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qualm/errors.hpp"

namespace qualm {

/// One experiment manifest. Parsed from a JSON document; unknown fields are
/// rejected. Command-line flags override individual fields after parsing.
struct ExperimentConfig {
    std::string experiment;
    int ell = 3;
    int k = 2;
    int trials = 10000;
    std::uint64_t seed = 1;
    std::string oracle_kind = "loq";
    std::string output_dir = "out";
    std::string group;  // "U", "O", "Sp", "all" or empty
    int threads = 0;    // 0 = hardware default
    int reps = 20;      // distinguisher repetitions

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
};

}  // namespace qualm
