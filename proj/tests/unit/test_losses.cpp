#include <doctest.h>

#include <cmath>
#include <vector>

#include "igb/data.hpp"
#include "igb/error.hpp"
#include "igb/losses.hpp"

using namespace igb;

namespace {

std::vector<double> labels_for(LossKind k) {
  if (k == LossKind::SquaredError) return {-2.0, 0.0, 0.5, 3.0};
  if (k == LossKind::CrossEntropy) return {0.0, 1.0};
  return {-1.0, 1.0};
}

const LossKind kAll[] = {LossKind::SquaredError, LossKind::CrossEntropy, LossKind::Exponential};

}  // namespace

TEST_CASE("loss formulas at reference points") {
  CHECK(loss_grad(LossKind::SquaredError, 3.0, 1.0) == -2.0);
  CHECK(loss_value(LossKind::SquaredError, 3.0, 1.0) == 2.0);
  CHECK(loss_value(LossKind::CrossEntropy, 1.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(loss_grad(LossKind::CrossEntropy, 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(loss_hess(LossKind::Exponential, 1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("central differences match the derivatives") {
  const double h = 1e-5;
  for (auto k : kAll) {
    for (double y : labels_for(k)) {
      for (double z = -3.0; z <= 3.0; z += 0.25) {
        const double fd1 = (loss_value(k, y, z + h) - loss_value(k, y, z - h)) / (2 * h);
        const double fd2 = (loss_grad(k, y, z + h) - loss_grad(k, y, z - h)) / (2 * h);
        CHECK(std::abs(loss_grad(k, y, z) - fd1) <= 1e-6);
        CHECK(std::abs(loss_hess(k, y, z) - fd2) <= 1e-6);
        CHECK(loss_hess(k, y, z) > 0.0);
      }
    }
  }
}

TEST_CASE("cross-entropy stays finite for large margins") {
  for (double z : {-40.0, -20.0, 20.0, 40.0}) {
    for (double y : {0.0, 1.0}) {
      CHECK(std::isfinite(loss_value(LossKind::CrossEntropy, y, z)));
      CHECK(std::isfinite(loss_grad(LossKind::CrossEntropy, y, z)));
      CHECK(loss_hess(LossKind::CrossEntropy, y, z) > 0.0);
    }
  }
  CHECK(loss_value(LossKind::CrossEntropy, 1.0, 40.0) < 1e-15);
  CHECK(loss_value(LossKind::CrossEntropy, 0.0, 40.0) == doctest::Approx(40.0));
}

TEST_CASE("labels are checked per loss") {
  CHECK_THROWS_AS(loss_value(LossKind::Exponential, 0.0, 0.0), InputError);
  CHECK_THROWS_AS(loss_grad(LossKind::CrossEntropy, -1.0, 0.0), InputError);
  CHECK_NOTHROW(loss_value(LossKind::SquaredError, -7.0, 0.0));
}

TEST_CASE("loss names") {
  CHECK(parse_loss("l2") == LossKind::SquaredError);
  CHECK(parse_loss("logloss") == LossKind::CrossEntropy);
  CHECK(parse_loss("exp") == LossKind::Exponential);
  CHECK_THROWS_AS(parse_loss("hinge"), ConfigError);
  for (auto k : kAll) CHECK(parse_loss(loss_name(k)) == k);
}

TEST_CASE("initial constant for squared error is the mean") {
  const EmpiricalDistribution mu(1, {0.1, 0.5, 0.9}, {1.0, 2.0, 6.0});
  CHECK(initial_constant(LossKind::SquaredError, mu) == doctest::Approx(3.0));
}

TEST_CASE("initial constant for cross-entropy is the logit of the label mean") {
  const EmpiricalDistribution mu(1, {0.1, 0.3, 0.5, 0.7, 0.9}, {1, 1, 1, 0, 0});
  const double c = initial_constant(LossKind::CrossEntropy, mu);
  CHECK(c == doctest::Approx(std::log(0.6 / 0.4)));
  std::vector<double> pred(mu.size(), c);
  CHECK(std::abs(mean_gradient(LossKind::CrossEntropy, mu, pred)) <= 1e-10);
}

TEST_CASE("initial constant for exponential loss is half the log odds") {
  const EmpiricalDistribution mu(1, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}, {1, 1, 1, 1, 1, -1, -1});
  const double c = initial_constant(LossKind::Exponential, mu);
  CHECK(c == doctest::Approx(0.5 * std::log(5.0 / 2.0)));
  std::vector<double> pred(mu.size(), c);
  CHECK(std::abs(mean_gradient(LossKind::Exponential, mu, pred)) <= 1e-10);
}

TEST_CASE("skewed classification data still converges") {
  std::vector<double> x, y;
  for (int i = 0; i < 1000; ++i) {
    x.push_back(i / 1000.0);
    y.push_back(i == 0 ? 1.0 : 0.0);
  }
  const EmpiricalDistribution mu(1, x, y);
  const double c = initial_constant(LossKind::CrossEntropy, mu);
  std::vector<double> pred(mu.size(), c);
  CHECK(std::abs(mean_gradient(LossKind::CrossEntropy, mu, pred)) <= 1e-10);
}

TEST_CASE("single-class classification has no minimizer") {
  const EmpiricalDistribution ones(1, {0.1, 0.2}, {1.0, 1.0});
  CHECK_THROWS_AS(initial_constant(LossKind::CrossEntropy, ones), ConvergenceError);
  const EmpiricalDistribution neg(1, {0.1, 0.2}, {-1.0, -1.0});
  CHECK_THROWS_AS(initial_constant(LossKind::Exponential, neg), ConvergenceError);
}

TEST_CASE("Bayes predictors") {
  const std::vector<double> x{0.3, 0.9};
  const auto f = bayes_predictor(LossKind::SquaredError, [](Point p) { return p[0]; });
  CHECK(f(x) == 0.3);
  const auto g = bayes_predictor(LossKind::CrossEntropy, [](Point) { return 0.5; });
  CHECK(g(x) == doctest::Approx(0.0));
  const auto h = bayes_predictor(LossKind::Exponential, [](Point) { return 0.8; });
  CHECK(h(x) == doctest::Approx(0.5 * std::log(4.0)));
  const auto bad = bayes_predictor(LossKind::CrossEntropy, [](Point) { return 1.0; });
  CHECK_THROWS_AS(bad(x), InputError);
}
