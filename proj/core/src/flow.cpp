#include "igb/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "igb/boosting_operator.hpp"
#include "igb/format.hpp"
#include "igb/random.hpp"
#include "igb/residual_field.hpp"

namespace igb {

namespace {

void check_leaves(const std::vector<TreeFunction>& trees, double t) {
  for (const auto& tree : trees) {
    for (double v : tree.leaf_values()) {
      if (!std::isfinite(v)) throw NumericalBlowup(t, "non-finite leaf value at t=" + format_double(t));
    }
  }
}

// Standard error of step * mean_m c_m, with c_m = mu[g T_m].
double increment_se(const PointSet& points, const std::vector<TreeFunction>& trees,
                    std::span<const double> grad, double step) {
  const std::size_t m = trees.size();
  if (m < 2) return 0.0;
  std::vector<double> w(grad.begin(), grad.end());
  const double inv_n = 1.0 / static_cast<double>(w.size());
  for (double& v : w) v *= inv_n;
  const PrefixSums prefix(points, w);
  std::vector<double> c(m);
  for (std::size_t k = 0; k < m; ++k) c[k] = weighted_tree_sum(points, trees[k], w, &prefix);
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : c) ss += (v - mean) * (v - mean);
  return step * std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
}

std::vector<double> loss_gradients(LossKind loss, const EmpiricalDistribution& mu,
                                   std::span<const double> pred) {
  std::vector<double> g(mu.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = loss_grad(loss, mu.y(i), pred[i]);
  return g;
}

}  // namespace

void FlowParams::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("flow step must be finite and > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("flow horizon must be finite and > 0");
  if (trees_per_step < 1) throw ConfigError("trees per step must be >= 1");
  if (grid_resolution < 1) throw ConfigError("grid resolution must be >= 1");
  if (checkpoint_every < 1) throw ConfigError("checkpoint cadence must be >= 1");
  for (double t : checkpoint_times) {
    if (!(t >= 0.0) || t > horizon + step) throw ConfigError("checkpoint time outside [0, horizon]");
  }
  const double steps = static_cast<double>(step_count());
  if (steps * static_cast<double>(trees_per_step) > static_cast<double>(max_total_trees)) {
    throw ConfigError("flow needs " + format_double(steps * static_cast<double>(trees_per_step)) +
                      " trees, over the budget of " + std::to_string(max_total_trees));
  }
  if (init_const && !std::isfinite(*init_const)) throw ConfigError("init_const must be finite");
}

std::size_t FlowParams::step_count() const {
  // Guard against 5 / 0.01 landing a hair above 500.
  return static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
}

EnsembleModel euler_step(const EnsembleModel& f, const EmpiricalDistribution& mu, LossKind loss,
                         const TreeParams& params, const FlowParams& flow, std::uint64_t seed,
                         double t) {
  if (flow.step == 0.0) return f;
  if (!(flow.step > 0.0)) throw ConfigError("flow step must be >= 0");
  if (flow.trees_per_step < 1) throw ConfigError("trees per step must be >= 1");
  const ResidualField field(mu, loss, [&f](Point x) { return f(x); });
  auto trees = sample_trees(field, params, flow.trees_per_step, seed);
  check_leaves(trees, t);
  EnsembleModel out = f;
  out.append(flow.step, std::move(trees));
  return out;
}

FlowTrace integrate_flow(const EmpiricalDistribution& train, const EmpiricalDistribution& test,
                         LossKind loss, const TreeParams& params, const FlowParams& flow,
                         std::uint64_t seed, const Predictor& target) {
  flow.validate();
  params.validate();
  if (train.size() == 0 || test.size() == 0) throw InputError("integrate_flow: empty distribution");
  if (train.dim() != params.features || test.dim() != params.features) {
    throw InputError("integrate_flow: data dimension does not match tree parameters");
  }
  for (double y : train.labels()) check_label(loss, y);
  for (double y : test.labels()) check_label(loss, y);

  const auto clock_start = std::chrono::steady_clock::now();
  const std::size_t steps = flow.step_count();

  std::set<std::size_t> checkpoints{0, steps};
  for (std::size_t k = 0; k <= steps; k += flow.checkpoint_every) checkpoints.insert(k);
  for (double t : flow.checkpoint_times) {
    checkpoints.insert(std::min(steps, static_cast<std::size_t>(std::llround(t / flow.step))));
  }

  FlowTrace trace;
  trace.loss = loss;
  trace.initial_constant = flow.init_const ? *flow.init_const : initial_constant(loss, train);
  trace.lattice = Lattice(params.features, flow.grid_resolution);
  const PointSet grid = trace.lattice.points();

  std::vector<double> pred_train(train.size(), trace.initial_constant);
  std::vector<double> pred_test(test.size(), trace.initial_constant);
  std::vector<double> pred_grid(grid.size(), trace.initial_constant);
  std::vector<double> target_grid;
  if (target) {
    target_grid.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) target_grid[i] = target(grid.point(i));
  }
  auto model = std::make_shared<EnsembleModel>(trace.initial_constant);

  double train_var = 0.0;
  double test_var = 0.0;
  auto record = [&](std::size_t k) {
    FlowRecord r;
    r.step = k;
    r.t = static_cast<double>(k) * flow.step;
    r.train_loss = mean_loss(loss, train, pred_train);
    r.test_loss = mean_loss(loss, test, pred_test);
    r.mean_residual = mean_gradient(loss, train, pred_train);
    r.l2_to_target = target ? grid_l2_distance(pred_grid, target_grid)
                            : std::numeric_limits<double>::quiet_NaN();
    if (flow.record_wall_time) {
      r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            clock_start)
                      .count();
    }
    r.train_loss_se = std::sqrt(train_var);
    r.test_loss_se = std::sqrt(test_var);
    r.grid_values = pred_grid;
    train_var = test_var = 0.0;
    if (!std::isfinite(r.train_loss) || !std::isfinite(r.test_loss)) {
      throw NumericalBlowup(r.t, "non-finite loss at t=" + format_double(r.t));
    }
    trace.records.push_back(std::move(r));
  };

  auto finish = [&]() {
    if (flow.keep_model) trace.model = model;
  };

  try {
    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * flow.step;
      const ResidualField field(train, loss, pred_train);
      auto trees = sample_trees(field, params, flow.trees_per_step, derive_seed(seed, k));
      check_leaves(trees, t);

      const double se_train = increment_se(train.points(), trees, field.grad(), flow.step);
      const auto g_test = loss_gradients(loss, test, pred_test);
      const double se_test = increment_se(test.points(), trees, g_test, flow.step);
      train_var += se_train * se_train;
      test_var += se_test * se_test;

      accumulate_mean(train.points(), trees, flow.step, pred_train);
      accumulate_mean(test.points(), trees, flow.step, pred_test);
      accumulate_mean(grid, trees, flow.step, pred_grid);
      for (double v : pred_train) {
        if (!std::isfinite(v)) {
          throw NumericalBlowup(t + flow.step, "non-finite prediction at t=" + format_double(t + flow.step));
        }
      }
      if (flow.keep_model) model->append(flow.step, std::move(trees));
      if (checkpoints.count(k + 1) != 0) record(k + 1);
    }
  } catch (const NumericalBlowup& e) {
    finish();
    throw FlowBlowup(e.time(), e.what(), std::move(trace));
  }
  finish();
  return trace;
}

double trajectory_discrepancy(const FlowTrace& a, const FlowTrace& b, const Lattice& grid) {
  if (a.records.size() != b.records.size() || a.records.empty()) {
    throw InputError("trajectory_discrepancy: checkpoint schedules differ");
  }
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    if (std::abs(a.records[k].t - b.records[k].t) > 1e-9) {
      throw InputError("trajectory_discrepancy: checkpoint times differ");
    }
  }

  auto values = [&grid](const FlowTrace& tr, const FlowRecord& r) {
    if (tr.lattice == grid) return r.grid_values;
    if (!tr.model) throw InputError("trajectory_discrepancy: trace has no model for this grid");
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      v[i] = tr.model->evaluate_prefix(grid.point(i), r.step);
    }
    return v;
  };

  double sup = 0.0;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    sup = std::max(sup, grid_l2_distance(values(a, a.records[k]), values(b, b.records[k])));
  }
  return sup;
}

void write_metrics_csv(const FlowTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "t,train_loss,test_loss,mean_residual,l2_to_target,wall_ms\n";
  for (const auto& r : trace.records) {
    out << format_double(r.t) << ',' << format_double(r.train_loss) << ','
        << format_double(r.test_loss) << ',' << format_double(r.mean_residual) << ','
        << format_double(r.l2_to_target) << ',' << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace igb
