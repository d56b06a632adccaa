#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "igb/config.hpp"
#include "igb/error.hpp"
#include "igb/experiment.hpp"
#include "igb/parallel.hpp"

namespace {

// Flag name -> config key. Values go through the config parser so that file
// and command line share one validation path.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"loss", "loss"},
    {"seed", "seed"},
    {"depth", "tree.depth"},
    {"proposals", "tree.proposals"},
    {"beta", "tree.beta"},
    {"step", "flow.step"},
    {"horizon", "flow.horizon"},
    {"mc-trees", "flow.trees_per_step"},
    {"grid", "flow.grid_resolution"},
    {"checkpoint-every", "flow.checkpoint_every"},
    {"checkpoint-times", "flow.checkpoint_times"},
    {"max-trees", "flow.max_total_trees"},
    {"init-const", "flow.init_const"},
    {"generator", "data.generator"},
    {"p", "data.p"},
    {"n", "data.n"},
    {"test-n", "data.test_n"},
    {"noise", "data.noise"},
    {"probability", "data.probability"},
    {"data", "data.path"},
    {"sizes", "sweep.sizes"},
    {"reference-n", "sweep.reference_n"},
    {"replicates", "sweep.replicates"},
    {"schemes", "population.schemes"},
    {"draws", "population.draws"},
    {"order", "population.order"},
    {"out", "output.dir"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinitesimal gradient boosting experiments"};
  app.set_version_flag("--version", std::string(igb::version()));

  std::string kind;
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::size_t> workers;
  bool timing = false;
  bool no_model = false;
  bool print_config = false;

  std::string kinds_help = "one of:";
  for (const auto& k : igb::experiment_kinds()) kinds_help += " " + k;
  app.add_option("kind", kind, kinds_help)->required();
  app.add_option("-c,--config", config_path, "TOML (or JSON/manifest) config file");
  std::vector<std::optional<std::string>> values(kFlags.size());
  for (std::size_t i = 0; i < kFlags.size(); ++i) {
    app.add_option("--" + kFlags[i].first, values[i], "sets " + kFlags[i].second);
  }
  app.add_option("--set", sets, "generic override section.key=value (repeatable)");
  app.add_option("--workers", workers, "worker threads (default: IGB_WORKERS or all cores)");
  app.add_flag("--timing", timing, "record wall-clock milliseconds in metrics.csv");
  app.add_flag("--no-model", no_model, "do not write model.json");
  app.add_flag("--print-config", print_config, "print the resolved config as JSON and exit");

  CLI11_PARSE(app, argc, argv);

  igb::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = igb::load_config(config_path);
    cfg.kind = kind;
    for (std::size_t i = 0; i < kFlags.size(); ++i) {
      if (!values[i]) continue;
      std::string v = *values[i];
      // List flags also take bare comma-separated values.
      if ((kFlags[i].first == "sizes" || kFlags[i].first == "checkpoint-times") &&
          (v.empty() || v.front() != '[')) {
        v = "[" + v + "]";
      }
      igb::apply_override(cfg, kFlags[i].second, v);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw igb::ConfigError("--set expects section.key=value, got '" + s + "'");
      igb::apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (timing) cfg.flow.record_wall_time = true;
    if (no_model) cfg.save_model = false;
    if (workers) igb::set_workers(*workers);
    if (print_config) {
      std::cout << igb::config_to_json(cfg) << '\n';
      return 0;
    }
  } catch (const igb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return igb::run_experiment_reported(cfg, std::cerr);
}
