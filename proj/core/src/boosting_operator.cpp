#include "igb/boosting_operator.hpp"

#include <cmath>
#include <fstream>

#include "igb/error.hpp"
#include "igb/format.hpp"
#include "igb/parallel.hpp"
#include "igb/random.hpp"

namespace igb {

std::vector<TreeFunction> sample_trees(const ResidualField& field, const TreeParams& params,
                                       std::size_t count, std::uint64_t seed) {
  std::vector<TreeFunction> trees(count);
  parallel_for(count, [&](std::size_t m) {
    Rng rng(derive_seed(seed, m));
    trees[m] = sample_gradient_tree(field, params, rng);
  });
  return trees;
}

OperatorEstimate::OperatorEstimate(std::vector<TreeFunction> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw InputError("OperatorEstimate: need at least one tree");
}

double OperatorEstimate::mean(Point x) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t(x);
  return s / static_cast<double>(trees_.size());
}

double OperatorEstimate::standard_error(Point x) const {
  const std::size_t m = trees_.size();
  if (m < 2) return 0.0;
  const double avg = mean(x);
  double ss = 0.0;
  for (const auto& t : trees_) {
    const double d = t(x) - avg;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(m - 1);
  return std::sqrt(var / static_cast<double>(m));
}

OperatorEstimate estimate_operator(const EmpiricalDistribution& mu, LossKind loss,
                                   const Predictor& f, const TreeParams& params, std::size_t m,
                                   std::uint64_t seed) {
  if (m < 1) throw InputError("estimate_operator: M must be >= 1");
  const ResidualField field(mu, loss, f);
  return OperatorEstimate(sample_trees(field, params, m, seed));
}

std::vector<GridValue> operator_on_grid(const OperatorEstimate& est, const PointSet& grid) {
  if (grid.size() == 0) throw InputError("operator_on_grid: empty grid");
  std::vector<GridValue> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Point x = grid.point(i);
    rows[i].point.assign(x.begin(), x.end());
    rows[i].mean = est.mean(x);
    rows[i].standard_error = est.standard_error(x);
  });
  return rows;
}

void write_grid_csv(const std::vector<GridValue>& rows, std::size_t p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (std::size_t j = 0; j < p; ++j) out << 'x' << j + 1 << ',';
  out << "mean,stderr\n";
  for (const auto& r : rows) {
    for (double v : r.point) out << format_double(v) << ',';
    out << format_double(r.mean) << ',' << format_double(r.standard_error) << '\n';
  }
}

Discrepancy operator_discrepancy(const EmpiricalDistribution& mu_n,
                                 const EmpiricalDistribution& mu_ref, LossKind loss,
                                 const std::vector<Predictor>& models, const TreeParams& params,
                                 std::size_t m, const PointSet& grid, std::uint64_t seed) {
  if (grid.size() == 0) throw InputError("operator_discrepancy: empty grid");
  Discrepancy out;
  for (std::size_t f = 0; f < models.size(); ++f) {
    const std::uint64_t s = derive_seed(seed, f);
    const auto est_n = estimate_operator(mu_n, loss, models[f], params, m, s);
    const auto est_ref = estimate_operator(mu_ref, loss, models[f], params, m, s);
    const auto rows_n = operator_on_grid(est_n, grid);
    const auto rows_ref = operator_on_grid(est_ref, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double diff = std::abs(rows_n[i].mean - rows_ref[i].mean);
      if (diff > out.value || (f == 0 && i == 0)) {
        out.value = diff;
        out.standard_error = std::hypot(rows_n[i].standard_error, rows_ref[i].standard_error);
      }
    }
  }
  return out;
}

}  // namespace igb
