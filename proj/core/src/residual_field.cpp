#include "igb/residual_field.hpp"

#include <algorithm>

#include "igb/error.hpp"
#include "igb/parallel.hpp"

namespace igb {

PrefixSums::PrefixSums(const PointSet& points, std::span<const double> weights)
    : points_(&points), n_(points.size()) {
  if (weights.size() != n_) throw InputError("PrefixSums: weight count mismatch");
  const std::size_t p = points.dim();
  data_.assign(p * (n_ + 1), 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto order = points.order(j);
    double* block = data_.data() + j * (n_ + 1);
    double run = 0.0;
    for (std::size_t r = 0; r < n_; ++r) {
      block[r] = run;
      run += weights[order[r]];
    }
    block[n_] = run;
  }
}

double PrefixSums::at_most(std::size_t j, double t) const {
  return data_[j * (n_ + 1) + points_->count_at_most(j, t)];
}

ResidualField::ResidualField(const EmpiricalDistribution& mu, LossKind loss,
                             std::span<const double> predictions)
    : mu_(&mu), loss_(loss) {
  if (predictions.size() != mu.size()) throw InputError("ResidualField: prediction count mismatch");
  grad_.resize(mu.size());
  hess_.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    grad_[i] = loss_grad(loss, mu.y(i), predictions[i]);
    hess_[i] = loss_hess(loss, mu.y(i), predictions[i]);
  }
  build();
}

ResidualField::ResidualField(const EmpiricalDistribution& mu, LossKind loss, const Predictor& f)
    : mu_(&mu), loss_(loss) {
  grad_.resize(mu.size());
  hess_.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double z = f(mu.x(i));
    grad_[i] = loss_grad(loss, mu.y(i), z);
    hess_[i] = loss_hess(loss, mu.y(i), z);
  }
  build();
}

void ResidualField::build() {
  grad_prefix_ = PrefixSums(mu_->points(), grad_);
  hess_prefix_ = PrefixSums(mu_->points(), hess_);
}

NodeSums ResidualField::at_most(std::size_t j, double t) const {
  const std::size_t c = mu_->points().count_at_most(j, t);
  return {grad_prefix_.first(j, c), hess_prefix_.first(j, c), c};
}

NodeSums ResidualField::total(std::size_t j) const {
  return {grad_prefix_.total(j), hess_prefix_.total(j), size()};
}

NodeSums ResidualField::sum_over(std::span<const std::uint32_t> members) const {
  NodeSums s;
  for (const std::uint32_t i : members) {
    s.grad += grad_[i];
    s.hess += hess_[i];
  }
  s.count = members.size();
  return s;
}

NodeSums ResidualField::sum_in(const Region& a) const {
  NodeSums s;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!a.contains(mu_->x(i))) continue;
    s.grad += grad_[i];
    s.hess += hess_[i];
    ++s.count;
  }
  return s;
}

void accumulate_mean(const PointSet& points, std::span<const TreeFunction> trees, double scale,
                     std::span<double> values) {
  if (trees.empty()) return;
  if (values.size() != points.size()) throw InputError("accumulate_mean: size mismatch");
  const std::size_t n = points.size();
  const std::size_t p = points.dim();
  const double factor = scale / static_cast<double>(trees.size());

  const bool stumps = std::all_of(trees.begin(), trees.end(),
                                  [](const TreeFunction& t) { return t.depth() == 1; });
  if (stumps) {
    // tree(x) = v0 + (v1 - v0) [x_j > t]; points above the cut are a suffix of
    // the sorted order, so each stump is one difference-array update.
    double base = 0.0;
    std::vector<double> diff(p * (n + 1), 0.0);
    for (const auto& tree : trees) {
      const auto v = tree.leaf_values();
      const std::size_t j = tree.scheme().node(0).feature;
      base += v[0];
      diff[j * (n + 1) + points.count_at_most(j, tree.threshold(0))] += v[1] - v[0];
    }
    for (std::size_t j = 0; j < p; ++j) {
      double run = 0.0;
      for (std::size_t r = 0; r <= n; ++r) {
        run += diff[j * (n + 1) + r];
        diff[j * (n + 1) + r] = run;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double total = base;
      for (std::size_t j = 0; j < p; ++j) total += diff[j * (n + 1) + points.rank(j, i)];
      values[i] += factor * total;
    }
    return;
  }

  parallel_for(n, [&](std::size_t i) {
    const Point x = points.point(i);
    double total = 0.0;
    for (const auto& tree : trees) total += tree(x);
    values[i] += factor * total;
  });
}

double weighted_tree_sum(const PointSet& points, const TreeFunction& tree,
                         std::span<const double> w, const PrefixSums* prefix) {
  if (prefix != nullptr && tree.depth() == 1) {
    const std::size_t j = tree.scheme().node(0).feature;
    const double below = prefix->at_most(j, tree.threshold(0));
    const double above = prefix->total(j) - below;
    const auto v = tree.leaf_values();
    return v[0] * below + v[1] * above;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += w[i] * tree(points.point(i));
  return s;
}

}  // namespace igb
