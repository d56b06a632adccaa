#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "igb/error.hpp"
#include "igb/generators.hpp"
#include "igb/lattice.hpp"
#include "igb/population.hpp"
#include "igb/random.hpp"

using namespace igb;

namespace {

// Weighted least-squares projection onto functions of at most d lattice
// coordinates, built from one-hot columns for every subset |K| <= d.
std::vector<double> brute_force_projection(const GridFunction& g, std::size_t d) {
  const Lattice& lat = g.lattice;
  const std::size_t p = lat.dim(), r = lat.resolution(), n = lat.size();
  std::vector<std::vector<std::size_t>> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = lat.multi_index(i);
  std::vector<std::vector<std::size_t>> columns;  // subset per column block
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    std::vector<std::size_t> k;
    for (std::size_t j = 0; j < p; ++j) if ((mask >> j) & 1U) k.push_back(j);
    if (k.size() <= d) columns.push_back(k);
  }
  std::size_t width = 0;
  for (const auto& k : columns) width += static_cast<std::size_t>(std::pow(r, k.size()));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, width);
  std::size_t offset = 0;
  for (const auto& k : columns) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t code = 0;
      for (auto it = k.rbegin(); it != k.rend(); ++it) code = code * r + idx[i][*it];
      a(i, offset + code) = 1.0;
    }
    offset += static_cast<std::size_t>(std::pow(r, k.size()));
  }
  Eigen::VectorXd w(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    w(i) = g.weights.empty() ? 1.0 / n : g.weights[i];
    y(i) = g.values[i];
  }
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd wa = sw.asDiagonal() * a;
  const Eigen::VectorXd coef = wa.completeOrthogonalDecomposition().solve(sw.cwiseProduct(y));
  const Eigen::VectorXd fit = a * coef;
  return {fit.data(), fit.data() + n};
}

GridFunction random_grid(std::size_t p, std::size_t r, bool weighted, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction g;
  g.lattice = Lattice(p, r);
  for (std::size_t i = 0; i < g.lattice.size(); ++i) g.values.push_back(rng.normal());
  if (weighted) {
    std::vector<std::vector<double>> marg(p, std::vector<double>(r));
    for (auto& m : marg) {
      double s = 0.0;
      for (auto& v : m) s += v = 0.2 + rng.uniform_open();
      for (auto& v : m) v /= s;
    }
    for (std::size_t i = 0; i < g.lattice.size(); ++i) {
      const auto idx = g.lattice.multi_index(i);
      double w = 1.0;
      for (std::size_t j = 0; j < p; ++j) w *= marg[j][idx[j]];
      g.weights.push_back(w);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("depth-one corner measure puts a third of its mass at zero") {
  const auto pi0 = estimate_pi0(1, 1, 20000, 3);
  CHECK(pi0.size() == 60000);
  CHECK(pi0.mass([](Point x) { return x[0] == 0.0; }) == doctest::Approx(1.0 / 3.0));
  for (std::size_t i = 0; i < pi0.size(); ++i) {
    CHECK(pi0.atom(i)[0] >= 0.0);
    CHECK(pi0.atom(i)[0] < 1.0);
  }
}

TEST_CASE("corner measure slices") {
  const CornerMeasureEstimate pi0(1, 1, {0.0, 0.25, 0.5, 0.5});
  CHECK(pi0.slice_mass(0, 0.0, 0.5) == doctest::Approx(0.75));
  CHECK(pi0.slice_mass(0, -1.0, 0.0) == doctest::Approx(0.25));
  CHECK(pi0.slice_mass(0, 0.25, 0.4) == 0.0);
  const CornerMeasureEstimate two(2, 1, {0.0, 0.9, 0.3, 0.1});
  CHECK(two.slice_mass(1, 0.5, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("corner measure in two dimensions stays in the half-open cube") {
  const auto pi0 = estimate_pi0(2, 2, 2000, 5);
  for (std::size_t i = 0; i < pi0.size(); ++i) {
    for (double v : pi0.atom(i)) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }
  CHECK(pi0.mass([](Point) { return true; }) == doctest::Approx(1.0));
}

TEST_CASE("uniform product tail closed form") {
  CHECK(uniform_product_tail(1, 0.3) == doctest::Approx(0.3));
  CHECK(uniform_product_tail(2, 0.1) == doctest::Approx(0.1 * (1.0 - std::log(0.1))));
  const double l = -std::log(0.01);
  CHECK(uniform_product_tail(3, 0.01) == doctest::Approx(0.01 * (1.0 + l + l * l / 2.0)));
  CHECK(uniform_product_tail(4, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_product_tail(0, 0.1), InputError);
  CHECK_THROWS_AS(uniform_product_tail(1, 0.0), InputError);
}

TEST_CASE("Monte Carlo product tail agrees with the closed form") {
  for (std::size_t d : {1, 2, 3}) {
    for (double eps : {0.5, 0.1, 0.01}) {
      const auto mc = monte_carlo_product_tail(d, eps, 200000, d * 100 + 7);
      CHECK(std::abs(mc.value - uniform_product_tail(d, eps)) <= 4.0 * mc.standard_error);
    }
  }
}

TEST_CASE("slice envelope") {
  CHECK(slice_envelope(1, 0.25) == doctest::Approx(0.25));
  CHECK(slice_envelope(3, 0.5) == doctest::Approx(0.5 * std::pow(1.0 - std::log(0.5), 2)));
  const auto pi0 = estimate_pi0(2, 1, 5000, 8);
  const std::vector<double> widths{0.25, 0.125, 0.0625};
  const auto fit = fit_slice_envelope(pi0, 2, widths);
  REQUIRE(fit.ratios.size() == 3);
  double mx = 0.0, mn = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(fit.ratios[k] == doctest::Approx(fit.masses[k] / slice_envelope(2, widths[k])));
    mx = std::max(mx, fit.ratios[k]);
    mn = std::min(mn, fit.ratios[k]);
  }
  CHECK(fit.constant == doctest::Approx(mx));
  CHECK(fit.log_spread == doctest::Approx(std::log(mx / mn)));
}

TEST_CASE("ANOVA truncation matches least squares") {
  for (bool weighted : {false, true}) {
    for (std::size_t d : {1, 2}) {
      const auto g = random_grid(3, 4, weighted, 10 + d);
      const auto fast = anova_projection(g, d);
      const auto slow = brute_force_projection(g, d);
      for (std::size_t i = 0; i < slow.size(); ++i) CHECK(fast.values[i] == doctest::Approx(slow[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("ANOVA truncation of a product") {
  const Lattice lat(2, 8);
  const auto g = GridFunction::sample(lat, [](Point x) { return x[0] * x[1]; });
  const auto h = anova_projection(g, 1);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto x = lat.point(i);
    CHECK(h.values[i] == doctest::Approx(x[0] / 2 + x[1] / 2 - 0.25).epsilon(1e-12));
  }
}

TEST_CASE("ANOVA truncation is an orthogonal projection") {
  const auto g = random_grid(3, 3, true, 21);
  auto h = random_grid(3, 3, true, 22);
  h.weights = g.weights;
  for (std::size_t d : {0, 1, 2}) {
    const auto pg = anova_projection(g, d);
    const auto ppg = anova_projection(pg, d);
    for (std::size_t i = 0; i < g.values.size(); ++i) CHECK(std::abs(ppg.values[i] - pg.values[i]) <= 1e-10);
    const auto ph = anova_projection(h, d);
    CHECK(std::abs(pg.inner(h) - g.inner(ph)) <= 1e-10);
  }
  const auto same = anova_projection(g, 3);
  CHECK(same.values == g.values);
}

TEST_CASE("ANOVA truncation rejects dependent coordinates") {
  auto g = random_grid(2, 2, false, 3);
  g.weights = {0.4, 0.1, 0.1, 0.4};
  CHECK_THROWS_AS(anova_projection(g, 1), UnsupportedError);
}

TEST_CASE("rectangle family size") {
  CHECK(RectangleFamily::lattice(2, 1, 4).size() == 19);
  CHECK(RectangleFamily::lattice(2, 2, 4).size() == 100);
  CHECK(RectangleFamily::lattice(3, 0, 4).size() == 1);
  const auto fam = RectangleFamily::lattice(1, 1, 2);
  CHECK(fam.size() == 3);
}

TEST_CASE("family sums match direct sums") {
  Rng rng(4);
  std::vector<double> coords(600), w(300);
  for (auto& v : coords) v = rng.uniform_open();
  for (auto& v : w) v = rng.normal();
  const PointSet points(2, coords);
  const auto fam = RectangleFamily::lattice(2, 2, 4);
  const auto sums = family_sums(points, w, fam);
  for (std::size_t m = 0; m < fam.size(); ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (fam.members[m].contains(points.point(i))) s += w[i];
    }
    CHECK(sums[m] == doctest::Approx(s).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("critical point residual") {
  const auto data = generate_dataset(GeneratorSpec{"linear", 2, 0.3, "logistic"}, LossKind::SquaredError, 200, 9);
  const auto fam = RectangleFamily::lattice(2, 1, 8);
  std::vector<double> shifted(data.data.labels().begin(), data.data.labels().end());
  for (auto& v : shifted) v += 0.7;
  CHECK(critical_point_residual(data.data, shifted, LossKind::SquaredError, fam) == doctest::Approx(0.7));
  CHECK(critical_point_residual(data.data, shifted, LossKind::SquaredError, RectangleFamily{}) == 0.0);
}

TEST_CASE("uniform discrepancy of identical samples is zero") {
  const auto data = generate_dataset(GeneratorSpec{"bernoulli-logit", 2, 0.0, "logistic"}, LossKind::CrossEntropy, 200, 10);
  const auto copy = data.data;
  const std::vector<Predictor> models{[](Point) { return 0.0; }, [](Point x) { return x[0] - x[1]; }};
  const auto fam = RectangleFamily::lattice(2, 2, 4);
  CHECK(gc_sup_discrepancy(data.data, copy, LossKind::CrossEntropy, models, fam) == 0.0);
  CHECK(gc_sup_discrepancy(data.data, copy, LossKind::CrossEntropy, models, fam, MomentKind::Hessian) == 0.0);
  const auto other = generate_dataset(GeneratorSpec{"bernoulli-logit", 2, 0.0, "logistic"}, LossKind::CrossEntropy, 200, 11);
  CHECK(gc_sup_discrepancy(data.data, other.data, LossKind::CrossEntropy, models, fam) > 0.0);
}
