#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "igb/config.hpp"

namespace igb {

struct ExperimentResult {
  std::filesystem::path dir;
  /// Files written, relative to dir, in write order.
  std::vector<std::string> files;
  /// Key numbers of the run as a JSON object (also saved as summary.json).
  std::string summary;
};

/// Runs one experiment and writes its artifacts (CSVs, summary.json,
/// manifest.json, model dumps) under cfg.out_dir. Throws igb::Error.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// run_experiment with error reporting: on failure writes error.json into
/// cfg.out_dir and returns 1 for a numerical blow-up, 2 for configuration or
/// input errors; 0 on success.
int run_experiment_reported(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace igb
