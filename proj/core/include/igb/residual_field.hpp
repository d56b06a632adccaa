#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "igb/data.hpp"
#include "igb/losses.hpp"
#include "igb/model.hpp"
#include "igb/tree.hpp"

namespace igb {

/// Unnormalized sums of loss derivatives over a set of samples.
struct NodeSums {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;

  NodeSums operator-(const NodeSums& o) const {
    return {grad - o.grad, hess - o.hess, count - o.count};
  }
};

/// Prefix sums of a per-point weight along each coordinate's sorted order.
class PrefixSums {
 public:
  PrefixSums() = default;
  PrefixSums(const PointSet& points, std::span<const double> weights);

  /// Sum of weights over points with x_j <= t.
  double at_most(std::size_t j, double t) const;
  double total(std::size_t j) const { return data_[j * (n_ + 1) + n_]; }
  /// Sum of weights over the first `count` points in coordinate j's order.
  double first(std::size_t j, std::size_t count) const { return data_[j * (n_ + 1) + count]; }

 private:
  const PointSet* points_ = nullptr;
  std::size_t n_ = 0;
  std::vector<double> data_;  // p blocks of n+1 running sums
};

/// Loss gradients and hessians of (mu, F) at every sample. This is the only
/// view of (mu, F) that softmax gradient trees need.
class ResidualField {
 public:
  ResidualField(const EmpiricalDistribution& mu, LossKind loss, std::span<const double> predictions);
  ResidualField(const EmpiricalDistribution& mu, LossKind loss, const Predictor& f);

  const EmpiricalDistribution& distribution() const { return *mu_; }
  LossKind loss() const { return loss_; }
  std::size_t size() const { return grad_.size(); }
  std::span<const double> grad() const { return grad_; }
  std::span<const double> hess() const { return hess_; }

  /// Sums over all samples with x_j <= t (binary search plus prefix sums).
  NodeSums at_most(std::size_t j, double t) const;
  /// Sums over all samples, accumulated in coordinate j's sorted order so
  /// that total(j) - at_most(j, t) matches the complementary side exactly.
  NodeSums total(std::size_t j) const;
  /// Sums over an explicit list of sample indices.
  NodeSums sum_over(std::span<const std::uint32_t> members) const;
  /// Sums over samples inside a region.
  NodeSums sum_in(const Region& a) const;

 private:
  void build();

  const EmpiricalDistribution* mu_;
  LossKind loss_;
  std::vector<double> grad_;
  std::vector<double> hess_;
  PrefixSums grad_prefix_;
  PrefixSums hess_prefix_;
};

/// values[i] += scale * (1/M) sum_m trees[m](x_i), trees summed in index
/// order. Depth-1 trees use a difference-array pass over the sorted index.
void accumulate_mean(const PointSet& points, std::span<const TreeFunction> trees, double scale,
                     std::span<double> values);

/// sum_i w_i tree(x_i). When `prefix` holds prefix sums of w and the tree has
/// depth 1, this is O(log n).
double weighted_tree_sum(const PointSet& points, const TreeFunction& tree,
                         std::span<const double> w, const PrefixSums* prefix = nullptr);

}  // namespace igb
