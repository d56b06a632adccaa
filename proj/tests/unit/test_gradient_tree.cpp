#include <doctest.h>

#include <cmath>
#include <vector>

#include "igb/boosting_operator.hpp"
#include "igb/error.hpp"
#include "igb/gradient_tree.hpp"
#include "igb/parallel.hpp"
#include "igb/random.hpp"
#include "igb/residual_field.hpp"

using namespace igb;

namespace {

EmpiricalDistribution sample_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n * p), y(n);
  for (auto& v : x) v = rng.uniform_open();
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(6.0 * x[i * p]) + 0.3 * rng.normal();
  return EmpiricalDistribution(p, std::move(x), std::move(y));
}

const Predictor kZero = [](Point) { return 0.0; };

}  // namespace

TEST_CASE("split score with two samples") {
  const EmpiricalDistribution mu(1, {0.2, 0.8}, {1.0, 3.0});
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  CHECK(split_score(field, Region::unit(1), 0, 0.5) == doctest::Approx(5.0));
}

TEST_CASE("split score is zero without samples or residuals") {
  const EmpiricalDistribution mu(1, {0.2, 0.8}, {1.0, 3.0});
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  CHECK(split_score(field, Region::closed({0.3}, {0.7}), 0, 0.5) == 0.0);
  const ResidualField exact(mu, LossKind::SquaredError, [](Point x) { return x[0] < 0.5 ? 1.0 : 3.0; });
  CHECK(split_score(exact, Region::unit(1), 0, 0.5) == 0.0);
}

TEST_CASE("prefix sums agree with direct sums") {
  const auto mu = sample_data(400, 3, 5);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t j = rng.uniform_index(3);
    const double t = rng.uniform_open();
    const auto fast = field.at_most(j, t);
    double g = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.x(i)[j] <= t) {
        g += field.grad()[i];
        ++c;
      }
    }
    CHECK(fast.count == c);
    CHECK(fast.grad == doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("softmax at zero temperature is uniform") {
  const std::vector<double> scores{0.1, 5.0, -2.0, 0.3};
  std::vector<double> probs;
  softmax_select(scores, 0.0, 0.5, &probs);
  for (double q : probs) CHECK(q == doctest::Approx(0.25));
  const std::vector<double> equal{1.0, 1.0, 1.0};
  softmax_select(equal, 7.0, 0.5, &probs);
  for (double q : probs) CHECK(q == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("softmax at very large temperature picks the best proposal") {
  const std::vector<double> scores{0.1, 0.2, 0.15};
  Rng rng(1);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += softmax_select(scores, 1e6, rng.uniform_open()) == 1 ? 1 : 0;
  CHECK(hits >= 9990);
}

TEST_CASE("softmax selection frequencies follow the weights") {
  const std::vector<double> scores{0.0, std::log(3.0)};
  Rng rng(4);
  const int draws = 40000;
  int second = 0;
  for (int i = 0; i < draws; ++i) second += softmax_select(scores, 1.0, rng.uniform_open()) == 1 ? 1 : 0;
  const double q = 0.75;
  const double se = std::sqrt(q * (1 - q) / draws);
  CHECK(std::abs(second / static_cast<double>(draws) - q) <= 4 * se);
}

TEST_CASE("leaf values") {
  const EmpiricalDistribution mu(1, {0.2, 0.3, 0.8}, {1.0, 3.0, 10.0});
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  CHECK(leaf_value(field, Region::closed({0.0}, {0.5})) == doctest::Approx(2.0));
  CHECK(leaf_value(field, Region::closed({0.4}, {0.6})) == 0.0);
  const ResidualField fit(mu, LossKind::SquaredError, [](Point x) { return x[0] < 0.25 ? 1.0 : 3.0; });
  CHECK(leaf_value(fit, Region::closed({0.0}, {0.5})) == 0.0);
}

TEST_CASE("single-sample tree puts the residual in the sample's leaf") {
  const EmpiricalDistribution mu(2, {0.3, 0.6}, {2.5});
  const ResidualField field(mu, LossKind::SquaredError, [](Point) { return 1.0; });
  const TreeParams params{3, 4, 1.5, 2};
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto tree = sample_gradient_tree(field, params, rng);
    const auto own = tree.leaf_index(mu.x(0));
    for (std::size_t v = 0; v < tree.leaf_values().size(); ++v) {
      CHECK(tree.leaf_values()[v] == doctest::Approx(v == own ? 1.5 : 0.0));
    }
  }
}

TEST_CASE("zero residuals give the zero tree") {
  const auto mu = sample_data(50, 2, 3);
  std::vector<double> pred(mu.labels().begin(), mu.labels().end());
  const ResidualField field(mu, LossKind::SquaredError, pred);
  Rng rng(2);
  const auto tree = sample_gradient_tree(field, TreeParams{2, 3, 5.0, 2}, rng);
  for (double v : tree.leaf_values()) CHECK(v == 0.0);
}

TEST_CASE("with one proposal the scheme ignores beta") {
  const auto mu = sample_data(200, 2, 8);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng a(s), b(s);
    const auto t0 = sample_gradient_tree(field, TreeParams{2, 1, 0.0, 2}, a);
    const auto t1 = sample_gradient_tree(field, TreeParams{2, 1, 50.0, 2}, b);
    CHECK(t0.scheme() == t1.scheme());
  }
}

TEST_CASE("fast tree sampling matches the region-based definition") {
  const auto mu = sample_data(300, 3, 13);
  const ResidualField field(mu, LossKind::SquaredError, [](Point x) { return 0.2 * x[1]; });
  for (std::size_t depth : {1, 2, 3}) {
    const TreeParams params{depth, 4, 20.0, 3};
    for (std::uint64_t s = 0; s < 30; ++s) {
      Rng rng(s);
      TreeTrace trace;
      const auto tree = sample_gradient_tree(field, params, rng, &trace);
      const auto regions = tree.scheme().node_regions();
      REQUIRE(trace.nodes.size() == tree.scheme().internal_count());
      for (const auto& node : trace.nodes) {
        for (const auto& prop : node.proposals) {
          CHECK(prop.score == doctest::Approx(split_score(field, regions[node.node], prop.feature, prop.u)).epsilon(1e-9));
        }
        double total = 0.0;
        for (double q : node.probabilities) total += q;
        CHECK(total == doctest::Approx(1.0));
      }
      const auto leaves = tree.leaf_regions();
      for (std::size_t v = 0; v < leaves.size(); ++v) {
        CHECK(tree.leaf_values()[v] == doctest::Approx(leaf_value(field, leaves[v])).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("softmax split follows its proposals") {
  const auto mu = sample_data(100, 2, 17);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  Rng rng(5);
  const auto split = softmax_split(field, Region::unit(2), TreeParams{1, 5, 3.0, 2}, rng);
  REQUIRE(split.proposals.size() == 5);
  CHECK(split.feature == split.proposals[split.selected].feature);
  CHECK(split.lower.volume() + split.upper.volume() == doctest::Approx(1.0));
}

TEST_CASE("tree sampling rejects mismatched dimensions") {
  const auto mu = sample_data(10, 2, 1);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  Rng rng(1);
  CHECK_THROWS_AS(sample_gradient_tree(field, TreeParams{1, 1, 0.0, 3}, rng), InputError);
  CHECK_THROWS_AS(sample_gradient_tree(field, TreeParams{0, 1, 0.0, 2}, rng), ConfigError);
  CHECK_THROWS_AS(sample_gradient_tree(field, TreeParams{1, 1, -1.0, 2}, rng), ConfigError);
}

TEST_CASE("likelihood ratio weights") {
  const auto mu = sample_data(200, 2, 23);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto scheme = sample_random_scheme(2, 2, rng);
    CHECK(rn_weight(field, scheme, TreeParams{2, 4, 0.0, 2}, rng, 10) == 1.0);
    CHECK(rn_weight(field, scheme, TreeParams{2, 1, 9.0, 2}, rng, 10) == 1.0);
    const double w = rn_weight(field, scheme, TreeParams{2, 4, 200.0, 2}, rng, 10);
    CHECK(w >= 0.0);
    CHECK(w <= std::pow(4.0, 3.0));
  }
}

TEST_CASE("likelihood ratio weights average to one under the reference law") {
  const auto mu = sample_data(200, 1, 29);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  const TreeParams params{1, 3, 30.0, 1};
  Rng rng(6);
  const int draws = 4000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto scheme = sample_random_scheme(1, 1, rng);
    const double w = rn_weight(field, scheme, params, rng, 1);
    sum += w;
    sq += w * w;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0) <= 4 * se);
}

TEST_CASE("operator estimate at a single sample is the residual") {
  const EmpiricalDistribution mu(1, {0.4}, {2.0});
  for (std::size_t m : {1, 7, 64}) {
    const auto est = estimate_operator(mu, LossKind::SquaredError, [](Point) { return 0.5; },
                                       TreeParams{2, 3, 1.0, 1}, m, 99);
    CHECK(est.mean(mu.x(0)) == doctest::Approx(1.5));
  }
}

TEST_CASE("operator standard error scales like one over root M") {
  const auto mu = sample_data(500, 1, 31);
  const std::vector<double> x{0.37};
  const auto small = estimate_operator(mu, LossKind::SquaredError, kZero, TreeParams{1, 1, 0.0, 1}, 2000, 1);
  const auto large = estimate_operator(mu, LossKind::SquaredError, kZero, TreeParams{1, 1, 0.0, 1}, 8000, 2);
  const double ratio = small.standard_error(x) / large.standard_error(x);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("operator on a grid of leaf centers returns leaf values") {
  const auto mu = sample_data(100, 1, 37);
  const auto est = estimate_operator(mu, LossKind::SquaredError, kZero, TreeParams{2, 1, 0.0, 1}, 1, 4);
  const auto& tree = est.trees().front();
  std::vector<double> centers;
  for (const auto& leaf : tree.leaf_regions()) centers.push_back(0.5 * (leaf.lower(0) + leaf.upper(0)));
  const auto rows = operator_on_grid(est, PointSet(1, centers));
  for (std::size_t v = 0; v < rows.size(); ++v) CHECK(rows[v].mean == tree.leaf_values()[v]);
}

TEST_CASE("operator discrepancy of identical inputs is zero") {
  const auto mu = sample_data(300, 2, 41);
  const auto copy = mu;
  const std::vector<Predictor> models{kZero, [](Point x) { return x[0]; }};
  const PointSet grid(2, {0.25, 0.25, 0.75, 0.25, 0.25, 0.75, 0.75, 0.75});
  const auto d = operator_discrepancy(mu, copy, LossKind::SquaredError, models, TreeParams{2, 3, 2.0, 2},
                                      200, grid, 7);
  CHECK(d.value == 0.0);
}

TEST_CASE("tree sampling does not depend on the worker count") {
  const auto mu = sample_data(500, 2, 43);
  const ResidualField field(mu, LossKind::SquaredError, kZero);
  set_workers(1);
  const auto a = sample_trees(field, TreeParams{2, 3, 4.0, 2}, 64, 5);
  set_workers(4);
  const auto b = sample_trees(field, TreeParams{2, 3, 4.0, 2}, 64, 5);
  set_workers(default_workers());
  REQUIRE(a.size() == b.size());
  for (std::size_t m = 0; m < a.size(); ++m) CHECK(a[m] == b[m]);
}
