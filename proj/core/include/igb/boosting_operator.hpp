#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "igb/data.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/losses.hpp"
#include "igb/model.hpp"

namespace igb {

/// Samples `count` iid softmax gradient trees for the field; tree m uses the
/// stream derive_seed(seed, m), so the result does not depend on the number
/// of workers.
std::vector<TreeFunction> sample_trees(const ResidualField& field, const TreeParams& params,
                                       std::size_t count, std::uint64_t seed);

/// Monte Carlo estimate of the infinitesimal boosting operator
/// T_mu(F)(x) = E[T(x; mu, F)] from M iid gradient trees.
class OperatorEstimate {
 public:
  explicit OperatorEstimate(std::vector<TreeFunction> trees);

  std::size_t size() const { return trees_.size(); }
  const std::vector<TreeFunction>& trees() const { return trees_; }

  /// (1/M) sum_m T_m(x), summed in tree-index order.
  double mean(Point x) const;
  /// Sample standard deviation over trees divided by sqrt(M); 0 when M = 1.
  double standard_error(Point x) const;

 private:
  std::vector<TreeFunction> trees_;
};

OperatorEstimate estimate_operator(const EmpiricalDistribution& mu, LossKind loss,
                                   const Predictor& f, const TreeParams& params, std::size_t m,
                                   std::uint64_t seed);

struct GridValue {
  std::vector<double> point;
  double mean = 0.0;
  double standard_error = 0.0;
};

std::vector<GridValue> operator_on_grid(const OperatorEstimate& est, const PointSet& grid);

/// Writes `x1,...,xp,mean,stderr` rows.
void write_grid_csv(const std::vector<GridValue>& rows, std::size_t p, const std::string& path);

struct Discrepancy {
  double value = 0.0;
  /// Pooled standard error sqrt(se_n^2 + se_ref^2) at the maximizing point.
  double standard_error = 0.0;
};

/// sup over F in `models` of the grid sup-norm of the difference between
/// operator estimates on mu_n and mu_ref. Both estimates share `seed`
/// (common random numbers), so identical inputs give exactly zero.
Discrepancy operator_discrepancy(const EmpiricalDistribution& mu_n,
                                 const EmpiricalDistribution& mu_ref, LossKind loss,
                                 const std::vector<Predictor>& models, const TreeParams& params,
                                 std::size_t m, const PointSet& grid, std::uint64_t seed);

}  // namespace igb
