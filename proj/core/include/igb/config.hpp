#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "igb/flow.hpp"
#include "igb/generators.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/losses.hpp"

namespace igb {

const char* version();

/// Experiment kinds accepted by run_experiment.
const std::vector<std::string>& experiment_kinds();

struct SweepParams {
  std::vector<std::size_t> sizes = {100, 1000, 10000};
  std::size_t reference_n = 100000;
  std::size_t replicates = 10;
};

struct PopulationParams {
  std::size_t schemes = 100000;
  std::size_t draws = 1000000;
  std::vector<std::size_t> tail_depths = {1, 2, 3};
  std::vector<double> eps = {0.5, 0.1, 0.01};
  /// Slice widths 2^-k for k in [min, max].
  std::size_t slice_min_power = 2;
  std::size_t slice_max_power = 7;
  std::size_t family_resolution = 16;
  /// Interaction order of the rectangle family and projections; 0 means the
  /// tree depth.
  std::size_t order = 0;
};

/// Full experiment description. File layout (TOML subset or JSON):
///   kind, loss, seed            top level
///   [tree]        depth, proposals, beta
///   [flow]        step, horizon, trees_per_step, grid_resolution,
///                 checkpoint_every, checkpoint_times, max_total_trees,
///                 init_const
///   [data]        generator, p, n, test_n, noise, probability, path
///   [sweep]       sizes, reference_n, replicates
///   [population]  schemes, draws, tail_depths, eps, slice_min_power,
///                 slice_max_power, family_resolution, order
///   [output]      dir, timing, save_model
struct ExperimentConfig {
  std::string kind = "flow";
  LossKind loss = LossKind::SquaredError;
  std::uint64_t seed = 1;
  TreeParams tree;
  FlowParams flow;
  GeneratorSpec data;
  std::size_t n = 500;
  std::size_t test_n = 10000;
  std::optional<std::string> data_path;
  SweepParams sweep;
  PopulationParams population;
  std::string out_dir = "igb-out";
  bool save_model = true;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  std::size_t order() const { return population.order == 0 ? tree.depth : population.order; }
};

/// Parses the TOML subset used by config files: [section] headers,
/// key = value with numbers, booleans, double-quoted strings and one-line
/// arrays, and # comments.
ExperimentConfig parse_config_toml(const std::string& text, ExperimentConfig base = {});
ExperimentConfig parse_config_json(const std::string& text, ExperimentConfig base = {});
/// Dispatches on extension: .json is JSON, anything else TOML.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Sets "section.key" (or a top-level "key") from a TOML value literal; bare
/// words are taken as strings.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// JSON document in the file layout above; parse_config_json round-trips it.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

}  // namespace igb
