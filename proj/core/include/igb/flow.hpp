#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "igb/data.hpp"
#include "igb/error.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/lattice.hpp"
#include "igb/losses.hpp"
#include "igb/model.hpp"

namespace igb {

struct FlowParams {
  double step = 0.02;
  double horizon = 1.0;
  std::size_t trees_per_step = 1000;
  /// Metric lattice resolution per axis.
  std::size_t grid_resolution = 16;
  /// Record a checkpoint every this many Euler steps (t = 0 and the final
  /// step are always recorded).
  std::size_t checkpoint_every = 1;
  /// Extra checkpoint times, snapped to the nearest step.
  std::vector<double> checkpoint_times;
  std::size_t max_total_trees = 50'000'000;
  std::optional<double> init_const;
  bool record_wall_time = false;
  /// Keep the full ensemble in the trace. Grid snapshots are kept either way.
  bool keep_model = true;

  void validate() const;
  std::size_t step_count() const;
};

struct FlowRecord {
  double t = 0.0;
  std::size_t step = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double mean_residual = 0.0;
  /// Grid L2 distance to the target, NaN without a target.
  double l2_to_target = 0.0;
  double wall_ms = 0.0;
  /// Monte Carlo standard errors of the loss change since the previous
  /// checkpoint, from per-tree first-order contributions.
  double train_loss_se = 0.0;
  double test_loss_se = 0.0;
  /// Model values on the metric lattice.
  std::vector<double> grid_values;
};

struct FlowTrace {
  LossKind loss = LossKind::SquaredError;
  double initial_constant = 0.0;
  Lattice lattice;
  std::vector<FlowRecord> records;
  /// Final model, or null when FlowParams::keep_model is false. Record k's
  /// model is the prefix with records[k].step increments.
  std::shared_ptr<const EnsembleModel> model;
};

/// Blow-up during integrate_flow; carries the trace recorded so far.
class FlowBlowup : public NumericalBlowup {
 public:
  FlowBlowup(double t, const std::string& what, FlowTrace partial)
      : NumericalBlowup(t, what), partial_(std::move(partial)) {}
  const FlowTrace& partial() const { return partial_; }

 private:
  FlowTrace partial_;
};

/// One explicit Euler step F' = F + step * mean of M gradient trees.
EnsembleModel euler_step(const EnsembleModel& f, const EmpiricalDistribution& mu, LossKind loss,
                         const TreeParams& params, const FlowParams& flow, std::uint64_t seed,
                         double t = 0.0);

/// Integrates dF/dt = T_n(F) from the constant minimizer over mu_train.
/// Step k draws its trees from derive_seed(seed, k).
FlowTrace integrate_flow(const EmpiricalDistribution& train, const EmpiricalDistribution& test,
                         LossKind loss, const TreeParams& params, const FlowParams& flow,
                         std::uint64_t seed, const Predictor& target = nullptr);

/// sup over checkpoints of the lattice L2 distance between the two traces.
double trajectory_discrepancy(const FlowTrace& a, const FlowTrace& b, const Lattice& grid);

/// Writes t,train_loss,test_loss,mean_residual,l2_to_target,wall_ms.
void write_metrics_csv(const FlowTrace& trace, const std::string& path);

}  // namespace igb
