#pragma once

#include "qualm/config.hpp"

namespace qualm {

// Exit codes: 0 = all checks pass, 1 = a scientific check failed,
// 2 = usage/config error (callers map ConfigError to 2).
int cmd_moments(const ExperimentConfig& cfg);
int cmd_wg(const ExperimentConfig& cfg);
int cmd_distinguish(const ExperimentConfig& cfg);
int cmd_tvd_scan(const ExperimentConfig& cfg);
int cmd_incoherent_vs_coherent(const ExperimentConfig& cfg);

}  // namespace qualm
