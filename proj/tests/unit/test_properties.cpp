#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "igb/boosting_operator.hpp"
#include "igb/flow.hpp"
#include "igb/generators.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/lattice.hpp"
#include "igb/random.hpp"

using namespace igb;

namespace {

Region random_region(std::size_t p, Rng& rng) {
  std::vector<double> lo(p), hi(p);
  for (std::size_t j = 0; j < p; ++j) {
    double a = rng.uniform_open(), b = rng.uniform_open();
    if (a > b) std::swap(a, b);
    lo[j] = a;
    hi[j] = b;
  }
  return Region::closed(lo, hi);
}

}  // namespace

TEST_CASE("split children reassemble the parent's samples") {
  Rng rng(1);
  std::vector<double> coords(3 * 500);
  for (auto& v : coords) v = rng.uniform_open();
  const PointSet points(3, coords);
  for (int rep = 0; rep < 300; ++rep) {
    const Region parent = rep % 3 == 0 ? Region::unit(3) : random_region(3, rng);
    const auto [lower, upper] = region_split(parent, rng.uniform_index(3), rng.uniform_open());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const bool in_lower = lower.contains(points.point(i));
      const bool in_upper = upper.contains(points.point(i));
      CHECK_FALSE((in_lower && in_upper));
      CHECK((in_lower || in_upper) == parent.contains(points.point(i)));
    }
  }
}

TEST_CASE("same seed gives the same tree") {
  const auto data = generate_dataset(GeneratorSpec{"additive-sine", 3, 0.2, "logistic"}, LossKind::SquaredError, 300, 2);
  const ResidualField field(data.data, LossKind::SquaredError, [](Point) { return 0.0; });
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng a(s), b(s);
    const auto ta = sample_gradient_tree(field, TreeParams{3, 4, 5.0, 3}, a);
    const auto tb = sample_gradient_tree(field, TreeParams{3, 4, 5.0, 3}, b);
    CHECK(ta == tb);
    CHECK(ta.leaf_regions() == tb.leaf_regions());
  }
}

TEST_CASE("uniform splits pick each coordinate half the time") {
  const auto data = generate_dataset(GeneratorSpec{"linear", 2, 0.1, "logistic"}, LossKind::SquaredError, 200, 3);
  const ResidualField field(data.data, LossKind::SquaredError, [](Point) { return 0.0; });
  const std::size_t m = 100000;
  const auto trees = sample_trees(field, TreeParams{1, 1, 0.0, 2}, m, 4);
  std::size_t first = 0;
  for (const auto& t : trees) first += t.scheme().node(0).feature == 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(first) - m / 2.0) <= 3.0 * std::sqrt(m * 0.25));
}

TEST_CASE("leaf values are hessian-weighted averages of per-sample Newton steps") {
  for (auto kind : {LossKind::SquaredError, LossKind::CrossEntropy, LossKind::Exponential}) {
    const GeneratorSpec spec = kind == LossKind::SquaredError ? GeneratorSpec{"additive-sine", 2, 0.3, "logistic"}
                                                              : GeneratorSpec{"bernoulli-logit", 2, 0.0, "logistic"};
    const auto data = generate_dataset(spec, kind, 300, 5);
    const ResidualField field(data.data, kind, [](Point x) { return x[0] - x[1]; });
    const auto trees = sample_trees(field, TreeParams{2, 3, 4.0, 2}, 200, 6);
    for (const auto& tree : trees) {
      std::vector<double> lo(tree.leaf_values().size(), 1e300), hi(tree.leaf_values().size(), -1e300);
      for (std::size_t i = 0; i < data.data.size(); ++i) {
        const auto v = tree.leaf_index(data.data.x(i));
        const double step = -field.grad()[i] / field.hess()[i];
        lo[v] = std::min(lo[v], step);
        hi[v] = std::max(hi[v], step);
      }
      for (std::size_t v = 0; v < lo.size(); ++v) {
        const double value = tree.leaf_values()[v];
        if (lo[v] > hi[v]) {
          CHECK(value == 0.0);
          continue;
        }
        CHECK(value >= lo[v] - 1e-12);
        CHECK(value <= hi[v] + 1e-12);
        if (kind == LossKind::Exponential) CHECK(std::abs(value) <= 1.0);
      }
    }
  }
}

TEST_CASE("independent operator estimates agree within their errors") {
  const auto data = generate_dataset(GeneratorSpec{"additive-sine", 1, 0.2, "logistic"}, LossKind::SquaredError, 50, 7);
  const Predictor f = [](Point x) { return 0.3 * x[0]; };
  const TreeParams params{2, 3, 2.0, 1};
  const auto a = estimate_operator(data.data, LossKind::SquaredError, f, params, 10000, 8);
  const auto b = estimate_operator(data.data, LossKind::SquaredError, f, params, 10000, 9);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> x{(k + 0.5) / 10.0};
    const double se = std::hypot(a.standard_error(x), b.standard_error(x));
    CHECK(std::abs(a.mean(x) - b.mean(x)) <= 4.0 * se);
  }
}

TEST_CASE("operator norm bounds") {
  const std::size_t depth = 2, k = 3;
  const double factor = std::pow(2.0, depth) * std::pow(static_cast<double>(k), std::pow(2.0, depth) - 1.0);
  const Lattice lattice(2, 16);
  const auto grid = lattice.points();
  {
    const auto data = generate_dataset(GeneratorSpec{"additive-sine", 2, 0.0, "logistic"}, LossKind::SquaredError, 2000, 10);
    const Predictor f = [](Point x) { return x[0] * x[1]; };
    const auto est = estimate_operator(data.data, LossKind::SquaredError, f, TreeParams{depth, k, 3.0, 2}, 2000, 11);
    double t2 = 0.0;
    for (const auto& row : operator_on_grid(est, grid)) t2 += row.mean * row.mean;
    const double op_norm = std::sqrt(t2 / static_cast<double>(grid.size()));
    const double dist = grid_l2_distance(grid, f, data.truth);
    CHECK(op_norm <= factor * dist + 0.05);
  }
  {
    const auto data = generate_dataset(GeneratorSpec{"bernoulli-logit", 2, 0.0, "logistic"}, LossKind::Exponential, 2000, 12);
    const auto est = estimate_operator(data.data, LossKind::Exponential, [](Point x) { return 2.0 * x[0] - 1.0; },
                                       TreeParams{depth, k, 3.0, 2}, 2000, 13);
    double sup = 0.0;
    for (const auto& row : operator_on_grid(est, grid)) sup = std::max(sup, std::abs(row.mean));
    CHECK(sup <= factor);
    CHECK(sup <= 1.0);
  }
}

TEST_CASE("flows stay finite up to t = 20") {
  FlowParams flow;
  flow.step = 0.1;
  flow.horizon = 20.0;
  flow.trees_per_step = 20;
  flow.grid_resolution = 8;
  flow.checkpoint_every = 20;
  flow.keep_model = false;
  {
    const auto data = generate_dataset(GeneratorSpec{"step", 2, 0.3, "logistic"}, LossKind::SquaredError, 200, 14);
    const auto trace = integrate_flow(data.data, data.data, LossKind::SquaredError, TreeParams{2, 3, 2.0, 2}, flow, 15);
    CHECK(trace.records.back().t == doctest::Approx(20.0));
    for (double v : trace.records.back().grid_values) CHECK(std::isfinite(v));
  }
  {
    const auto data = generate_dataset(GeneratorSpec{"bernoulli-logit", 2, 0.0, "logistic"}, LossKind::Exponential, 200, 16);
    const auto trace = integrate_flow(data.data, data.data, LossKind::Exponential, TreeParams{2, 3, 2.0, 2}, flow, 17);
    // Leaves lie in [-1, 1], so |F_t| grows at most linearly.
    for (const auto& rec : trace.records) {
      for (double v : rec.grid_values) CHECK(std::abs(v - trace.initial_constant) <= rec.t + 1e-9);
    }
  }
}
