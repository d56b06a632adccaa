#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "igb/region.hpp"
#include "igb/tree.hpp"

namespace igb {

/// Predictor F: [0,1]^p -> R.
using Predictor = std::function<double(Point)>;

/// One Euler increment: step * (1/M) sum_m trees[m].
struct Increment {
  double step = 0.0;
  std::vector<TreeFunction> trees;

  double operator()(Point x) const;
};

/// Constant base plus a time-ordered list of increments. Evaluation is exact
/// and sums in storage order, so repeated evaluation is bitwise stable.
class EnsembleModel {
 public:
  EnsembleModel() = default;
  explicit EnsembleModel(double base) : base_(base) {}

  double base() const { return base_; }
  const std::vector<Increment>& increments() const { return increments_; }
  std::size_t tree_count() const;

  double operator()(Point x) const { return evaluate_prefix(x, increments_.size()); }
  /// Value of the model truncated to its first `count` increments.
  double evaluate_prefix(Point x, std::size_t count) const;

  void append(double step, std::vector<TreeFunction> trees);
  void append(double step, TreeFunction tree);

 private:
  double base_ = 0.0;
  std::vector<Increment> increments_;
};

double evaluate_model(const EnsembleModel& model, Point x);

}  // namespace igb
