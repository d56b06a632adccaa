#include "igb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "igb/beta0_operator.hpp"
#include "igb/boosting_operator.hpp"
#include "igb/error.hpp"
#include "igb/flow.hpp"
#include "igb/format.hpp"
#include "igb/generators.hpp"
#include "igb/lattice.hpp"
#include "igb/population.hpp"
#include "igb/random.hpp"
#include "igb/serialization.hpp"

namespace igb {

using nlohmann::json;

namespace {

// Seed streams derived from the master seed.
enum Stream : std::uint64_t {
  kTrain = 1,
  kTest = 2,
  kFlowTrees = 3,
  kPi0 = 4,
  kSweepTrees = 5,
  kTail = 6,
  kBeta0 = 7,
  kReference = 10,
  kSweepData = 20,
};

json seed_streams(std::uint64_t master) {
  return {{"master", master},
          {"train", derive_seed(master, kTrain)},
          {"test", derive_seed(master, kTest)},
          {"flow_trees", derive_seed(master, kFlowTrees)},
          {"pi0", derive_seed(master, kPi0)},
          {"beta0", derive_seed(master, kBeta0)},
          {"rule",
           "stream seeds are derive_seed(master, id) or derive_seed(master, id, replicate): "
           "train=1 test=2 flow_trees=3 pi0=4 sweep_trees=5 tail=6 beta0=7 reference=10 "
           "sweep_data=20+size_index"}};
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw InputError("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ofstream out_;
};

std::string coord_header(std::size_t p) {
  std::string h;
  for (std::size_t j = 0; j < p; ++j) h += (j ? ",x" : "x") + std::to_string(j + 1);
  return h;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

class Run {
 public:
  explicit Run(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    result_.dir = cfg_.out_dir;
    std::filesystem::create_directories(result_.dir);
  }

  std::filesystem::path file(const std::string& name) {
    result_.files.push_back(name);
    return result_.dir / name;
  }

  ExperimentConfig& cfg() { return cfg_; }
  json& summary() { return summary_; }

  GeneratedData generate(std::size_t n, std::uint64_t seed) const {
    return generate_dataset(cfg_.data, cfg_.loss, n, seed);
  }

  ExperimentResult finish() {
    result_.summary = summary_.dump(2);
    {
      std::ofstream out(file("summary.json"));
      out << result_.summary << '\n';
    }
    json manifest = {{"tool", "igb"},
                     {"version", version()},
                     {"kind", cfg_.kind},
                     {"config", json::parse(config_to_json(cfg_))},
                     {"seeds", seed_streams(cfg_.seed)}};
    manifest["outputs"] = result_.files;
    manifest["outputs"].push_back("manifest.json");
    std::ofstream out(result_.dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    result_.files.push_back("manifest.json");
    return result_;
  }

 private:
  ExperimentConfig cfg_;
  ExperimentResult result_;
  json summary_ = json::object();
};

// Three fixed predictors used by the sweep experiments.
std::vector<Predictor> model_set(const Predictor& truth) {
  return {
      [](Point) { return 0.0; },
      [truth](Point x) { return 0.5 * truth(x); },
      [truth](Point x) { return truth(x) + 0.5 * (x[0] - 0.5); },
  };
}

void write_plot_row(Csv& plot, const std::string& series, double x, double y) {
  plot.row(series, x, y);
}

void write_trace_files(Run& run, const FlowTrace& trace) {
  write_metrics_csv(trace, run.file("metrics.csv").string());
  Csv cp(run.file("checkpoints.csv"),
         "t,step,train_loss,train_loss_se,test_loss,test_loss_se,mean_residual,l2_to_target");
  Csv plot(run.file("plot.csv"), "series,x,y");
  for (const auto& r : trace.records) {
    cp.row(r.t, r.step, r.train_loss, r.train_loss_se, r.test_loss, r.test_loss_se, r.mean_residual,
           r.l2_to_target);
    write_plot_row(plot, "train_loss", r.t, r.train_loss);
    write_plot_row(plot, "test_loss", r.t, r.test_loss);
    write_plot_row(plot, "mean_residual", r.t, r.mean_residual);
    if (!std::isnan(r.l2_to_target)) write_plot_row(plot, "l2_to_target", r.t, r.l2_to_target);
  }
}

void run_flow(Run& run) {
  auto& cfg = run.cfg();
  EmpiricalDistribution train, test;
  Predictor target;
  if (cfg.data_path) {
    train = read_dataset_csv(*cfg.data_path);
    test = train;
  } else {
    auto gen = run.generate(cfg.n, derive_seed(cfg.seed, kTrain));
    train = std::move(gen.data);
    test = run.generate(cfg.test_n, derive_seed(cfg.seed, kTest)).data;
    target = gen.truth;
  }
  cfg.tree.features = train.dim();
  FlowParams flow = cfg.flow;
  flow.keep_model = cfg.save_model;

  FlowTrace trace;
  try {
    trace = integrate_flow(train, test, cfg.loss, cfg.tree, flow, derive_seed(cfg.seed, kFlowTrees),
                           target);
  } catch (const FlowBlowup& e) {
    write_trace_files(run, e.partial());
    throw;
  }
  write_trace_files(run, trace);

  const auto& last = trace.records.back();
  Csv grid(run.file("grid.csv"), coord_header(train.dim()) + ",value,target");
  for (std::size_t i = 0; i < trace.lattice.size(); ++i) {
    const auto x = trace.lattice.point(i);
    std::string row;
    for (double v : x) row += format_double(v) + ",";
    grid.row(row + format_double(last.grid_values[i]), target ? target(x) : std::nan(""));
  }
  if (trace.model) save_model(*trace.model, run.file("model.json"));

  auto& s = run.summary();
  s["initial_constant"] = trace.initial_constant;
  s["final_t"] = last.t;
  s["final_train_loss"] = last.train_loss;
  s["final_test_loss"] = last.test_loss;
  s["final_mean_residual"] = last.mean_residual;
  if (target) s["final_l2_to_target"] = last.l2_to_target;
  s["checkpoints"] = trace.records.size();
}

void write_sweep_summary(Run& run, const std::string& name,
                         const std::vector<std::vector<double>>& values) {
  const auto& cfg = run.cfg();
  Csv sum(run.file(name + "_summary.csv"), "n,median");
  Csv plot(run.file("plot.csv"), "series,x,y");
  json medians = json::array();
  for (std::size_t k = 0; k < cfg.sweep.sizes.size(); ++k) {
    const double m = median(values[k]);
    sum.row(cfg.sweep.sizes[k], m);
    write_plot_row(plot, "median_" + name, static_cast<double>(cfg.sweep.sizes[k]), m);
    medians.push_back(m);
  }
  run.summary()["sizes"] = cfg.sweep.sizes;
  run.summary()["median_" + name] = medians;
}

void run_operator_convergence(Run& run) {
  auto& cfg = run.cfg();
  cfg.tree.features = cfg.data.p;
  const auto truth = generator_functions(cfg.data, cfg.loss).truth;
  const auto models = model_set(truth);
  const PointSet grid = Lattice(cfg.data.p, cfg.flow.grid_resolution).points();
  std::vector<std::vector<double>> values(cfg.sweep.sizes.size());
  Csv csv(run.file("operator_convergence.csv"), "n,replicate,discrepancy,stderr");
  for (std::size_t r = 0; r < cfg.sweep.replicates; ++r) {
    const auto ref = run.generate(cfg.sweep.reference_n, derive_seed(cfg.seed, kReference, r)).data;
    for (std::size_t k = 0; k < cfg.sweep.sizes.size(); ++k) {
      const auto mu = run.generate(cfg.sweep.sizes[k], derive_seed(cfg.seed, kSweepData + k, r)).data;
      const auto d = operator_discrepancy(mu, ref, cfg.loss, models, cfg.tree, cfg.flow.trees_per_step,
                                          grid, derive_seed(cfg.seed, kSweepTrees, r));
      values[k].push_back(d.value);
      csv.row(cfg.sweep.sizes[k], r, d.value, d.standard_error);
    }
  }
  write_sweep_summary(run, "operator_discrepancy", values);
}

void run_trajectory_convergence(Run& run) {
  auto& cfg = run.cfg();
  cfg.tree.features = cfg.data.p;
  FlowParams flow = cfg.flow;
  flow.keep_model = false;
  const Lattice lattice(cfg.data.p, flow.grid_resolution);
  std::vector<std::vector<double>> values(cfg.sweep.sizes.size());
  Csv csv(run.file("trajectory_convergence.csv"), "n,replicate,discrepancy");
  for (std::size_t r = 0; r < cfg.sweep.replicates; ++r) {
    const std::uint64_t tree_seed = derive_seed(cfg.seed, kSweepTrees, r);
    const auto ref = run.generate(cfg.sweep.reference_n, derive_seed(cfg.seed, kReference, r)).data;
    const auto ref_trace = integrate_flow(ref, ref, cfg.loss, cfg.tree, flow, tree_seed);
    for (std::size_t k = 0; k < cfg.sweep.sizes.size(); ++k) {
      const auto mu = run.generate(cfg.sweep.sizes[k], derive_seed(cfg.seed, kSweepData + k, r)).data;
      const auto trace = integrate_flow(mu, mu, cfg.loss, cfg.tree, flow, tree_seed);
      const double d = trajectory_discrepancy(trace, ref_trace, lattice);
      values[k].push_back(d);
      csv.row(cfg.sweep.sizes[k], r, d);
    }
  }
  write_sweep_summary(run, "trajectory_discrepancy", values);
}

void run_pi0(Run& run) {
  auto& cfg = run.cfg();
  const auto& pp = cfg.population;
  const std::size_t p = cfg.data.p;
  const auto pi0 = estimate_pi0(cfg.tree.depth, p, pp.schemes, derive_seed(cfg.seed, kPi0));

  {
    // The full cloud can be large; the first atoms suffice for plotting.
    Csv atoms(run.file("pi0_atoms.csv"), coord_header(p));
    const std::size_t shown = std::min<std::size_t>(pi0.size(), 100000);
    for (std::size_t i = 0; i < shown; ++i) {
      std::string row;
      for (std::size_t j = 0; j < p; ++j) row += (j ? "," : "") + format_double(pi0.atom(i)[j]);
      atoms.row(row);
    }
  }
  Csv hist(run.file("pi0_histogram.csv"), "bin_lower,bin_upper,mass");
  constexpr std::size_t kBins = 64;
  hist.row(0.0, 0.0, pi0.mass([](Point x) { return x[0] == 0.0; }));
  for (std::size_t b = 0; b < kBins; ++b) {
    const double lo = static_cast<double>(b) / kBins;
    const double hi = static_cast<double>(b + 1) / kBins;
    hist.row(lo, hi, pi0.slice_mass(0, lo, hi));
  }

  Csv plot(run.file("plot.csv"), "series,x,y");
  Csv tail(run.file("tail.csv"), "d,eps,closed_form,monte_carlo,stderr,z");
  json tails = json::array();
  std::size_t idx = 0;
  for (std::size_t d : pp.tail_depths) {
    for (double eps : pp.eps) {
      const double exact = uniform_product_tail(d, eps);
      const auto mc = monte_carlo_product_tail(d, eps, pp.draws, derive_seed(cfg.seed, kTail, idx++));
      const double z = mc.standard_error > 0.0 ? (mc.value - exact) / mc.standard_error : 0.0;
      tail.row(d, eps, exact, mc.value, mc.standard_error, z);
      write_plot_row(plot, "tail_closed_d" + std::to_string(d), eps, exact);
      write_plot_row(plot, "tail_mc_d" + std::to_string(d), eps, mc.value);
      tails.push_back({{"d", d}, {"eps", eps}, {"z", z}});
    }
  }

  std::vector<double> widths;
  for (std::size_t k = pp.slice_min_power; k <= pp.slice_max_power; ++k) {
    widths.push_back(std::ldexp(1.0, -static_cast<int>(k)));
  }
  const auto fit = fit_slice_envelope(pi0, cfg.tree.depth, widths);
  Csv slice(run.file("slice.csv"), "width,mass,envelope,ratio");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    slice.row(fit.widths[i], fit.masses[i], slice_envelope(cfg.tree.depth, fit.widths[i]),
              fit.ratios[i]);
    write_plot_row(plot, "slice_mass", fit.widths[i], fit.masses[i]);
    write_plot_row(plot, "slice_envelope", fit.widths[i], fit.constant * slice_envelope(cfg.tree.depth, fit.widths[i]));
  }
  auto& s = run.summary();
  s["atoms"] = pi0.size();
  s["mass_at_origin"] = pi0.mass([](Point x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
  });
  s["tail"] = tails;
  s["slice_constant"] = fit.constant;
  s["slice_log_spread"] = fit.log_spread;
}

void run_project(Run& run) {
  auto& cfg = run.cfg();
  const auto truth = generator_functions(cfg.data, cfg.loss).truth;
  const Lattice lattice(cfg.data.p, cfg.flow.grid_resolution);
  const auto target = GridFunction::sample(lattice, truth);
  const auto proj = anova_projection(target, cfg.order());
  Csv csv(run.file("projection.csv"), coord_header(cfg.data.p) + ",target,projection");
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    std::string row;
    for (double v : lattice.point(i)) row += format_double(v) + ",";
    csv.row(row + format_double(target.values[i]), proj.values[i]);
  }
  GridFunction diff = target;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= proj.values[i];
  run.summary()["order"] = cfg.order();
  run.summary()["residual_l2"] = diff.l2_norm();
  run.summary()["target_l2"] = target.l2_norm();
}

void run_critical(Run& run) {
  auto& cfg = run.cfg();
  const auto family = RectangleFamily::lattice(cfg.data.p, cfg.order(), cfg.population.family_resolution);
  Csv csv(run.file("critical.csv"), "replicate,n,residual");
  std::vector<double> values;
  for (std::size_t r = 0; r < cfg.sweep.replicates; ++r) {
    const auto gen = run.generate(cfg.n, derive_seed(cfg.seed, kSweepData, r));
    const double v = critical_point_residual(gen.data, gen.truth, cfg.loss, family);
    values.push_back(v);
    csv.row(r, cfg.n, v);
  }
  run.summary()["family_size"] = family.size();
  run.summary()["median_residual"] = median(values);
}

void run_gc(Run& run) {
  auto& cfg = run.cfg();
  const auto truth = generator_functions(cfg.data, cfg.loss).truth;
  const auto models = model_set(truth);
  const auto family = RectangleFamily::lattice(cfg.data.p, cfg.order(), cfg.population.family_resolution);
  Csv csv(run.file("gc.csv"), "n,replicate,gradient,hessian");
  std::vector<std::vector<double>> values(cfg.sweep.sizes.size());
  for (std::size_t r = 0; r < cfg.sweep.replicates; ++r) {
    const auto ref = run.generate(cfg.sweep.reference_n, derive_seed(cfg.seed, kReference, r)).data;
    for (std::size_t k = 0; k < cfg.sweep.sizes.size(); ++k) {
      const auto mu = run.generate(cfg.sweep.sizes[k], derive_seed(cfg.seed, kSweepData + k, r)).data;
      const double g = gc_sup_discrepancy(mu, ref, cfg.loss, models, family, MomentKind::Gradient);
      const double h = gc_sup_discrepancy(mu, ref, cfg.loss, models, family, MomentKind::Hessian);
      values[k].push_back(g);
      csv.row(cfg.sweep.sizes[k], r, g, h);
    }
  }
  write_sweep_summary(run, "gc_discrepancy", values);
}

void run_beta0(Run& run) {
  auto& cfg = run.cfg();
  if (cfg.tree.beta != 0.0) throw ConfigError("beta0-operator requires tree.beta = 0");
  const std::size_t p = cfg.data.p;
  cfg.tree.features = p;
  const Lattice lattice(p, cfg.flow.grid_resolution);
  const auto op = beta0_operator_matrix(cfg.tree.depth, lattice, cfg.population.schemes,
                                        derive_seed(cfg.seed, kBeta0));
  const auto spec = beta0_spectrum(op);
  const auto mode = constant_mode(op);
  const auto family = RectangleFamily::lattice(p, cfg.order(), cfg.flow.grid_resolution);
  const double tol = 1e-9;
  const double overlap = kernel_family_overlap(op, spec, family, tol);

  {
    Csv m(run.file("operator_matrix.csv"), "row,col,value,stderr");
    for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
        m.row(static_cast<std::size_t>(i), static_cast<std::size_t>(j), op.matrix(i, j),
              op.standard_error(i, j));
      }
    }
  }
  Csv plot(run.file("plot.csv"), "series,x,y");
  {
    Csv sp(run.file("spectrum.csv"), "index,eigenvalue");
    for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
      sp.row(static_cast<std::size_t>(k), spec.values[k]);
      write_plot_row(plot, "eigenvalue", static_cast<double>(k), spec.values[k]);
    }
  }

  auto& s = run.summary();
  s["constant_eigenvalue"] = mode.eigenvalue;
  s["constant_residual"] = mode.residual;
  s["min_eigenvalue"] = spec.values.minCoeff();
  s["max_stderr"] = op.max_standard_error();
  s["asymmetry"] = op.asymmetry();
  s["kernel_dimension"] = (spec.values.array().abs() <= tol).count();
  s["kernel_family_overlap"] = overlap;

  if (cfg.data_path || cfg.data.is_classification() || cfg.loss != LossKind::SquaredError) return;
  // Compare e^{-tL} (c - F*) with a beta = 0 flow on a large sample.
  auto gen = run.generate(cfg.n, derive_seed(cfg.seed, kTrain));
  const auto trace = integrate_flow(gen.data, gen.data, cfg.loss, cfg.tree, cfg.flow,
                                    derive_seed(cfg.seed, kFlowTrees), gen.truth);
  Eigen::VectorXd target(static_cast<Eigen::Index>(lattice.size()));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    target[static_cast<Eigen::Index>(i)] = gen.truth(lattice.point(i));
  }
  const Eigen::VectorXd g0 = Eigen::VectorXd::Constant(target.size(), trace.initial_constant) - target;
  Csv decay(run.file("decay.csv"), "t,flow_l2_to_target,predicted_l2_to_target,l2_gap");
  double worst = 0.0;
  for (const auto& r : trace.records) {
    const Eigen::VectorXd predicted = target + spec.evolve(g0, r.t);
    const Eigen::VectorXd flow_values =
        Eigen::Map<const Eigen::VectorXd>(r.grid_values.data(), target.size());
    const double n = static_cast<double>(target.size());
    const double gap = std::sqrt((flow_values - predicted).squaredNorm() / n);
    decay.row(r.t, r.l2_to_target, std::sqrt((predicted - target).squaredNorm() / n), gap);
    write_plot_row(plot, "flow_l2_to_target", r.t, r.l2_to_target);
    write_plot_row(plot, "predicted_l2_to_target", r.t, std::sqrt((predicted - target).squaredNorm() / n));
    worst = std::max(worst, gap);
  }
  s["decay_max_gap"] = worst;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  Run run(config);
  const std::string& kind = config.kind;
  if (kind == "flow") {
    run_flow(run);
  } else if (kind == "operator-convergence") {
    run_operator_convergence(run);
  } else if (kind == "trajectory-convergence") {
    run_trajectory_convergence(run);
  } else if (kind == "pi0") {
    run_pi0(run);
  } else if (kind == "project") {
    run_project(run);
  } else if (kind == "critical") {
    run_critical(run);
  } else if (kind == "gc") {
    run_gc(run);
  } else if (kind == "beta0-operator") {
    run_beta0(run);
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  return run.finish();
}

int run_experiment_reported(const ExperimentConfig& cfg, std::ostream& log) {
  json err;
  int code = 0;
  try {
    const auto result = run_experiment(cfg);
    log << "wrote " << result.files.size() << " files to " << result.dir.string() << '\n';
    return 0;
  } catch (const NumericalBlowup& e) {
    code = 1;
    err = {{"error", to_string(e.kind())}, {"message", e.what()}, {"t", e.time()}};
  } catch (const Error& e) {
    code = 2;
    err = {{"error", to_string(e.kind())}, {"message", e.what()}};
  } catch (const std::filesystem::filesystem_error& e) {
    code = 2;
    err = {{"error", "io"}, {"message", e.what()}};
  }
  err["exit_code"] = code;
  err["kind"] = cfg.kind;
  log << "error: " << err["message"].get<std::string>() << '\n';
  try {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "error.json");
    out << err.dump(2) << '\n';
  } catch (const std::exception&) {
    // Reporting is best effort; the exit code still carries the failure.
  }
  return code;
}

}  // namespace igb
