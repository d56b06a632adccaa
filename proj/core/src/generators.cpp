#include "igb/generators.hpp"

#include <cmath>
#include <numbers>

#include "igb/error.hpp"
#include "igb/random.hpp"

namespace igb {

namespace {

Predictor regression_function(const GeneratorSpec& spec) {
  if (spec.name == "linear") {
    return [](Point x) {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    };
  }
  if (spec.name == "product") return [](Point x) { return x[0] * x[1]; };
  if (spec.name == "additive-sine") {
    return [](Point x) {
      double s = 0.0;
      for (double v : x) s += std::sin(2.0 * std::numbers::pi * v) / 2.0 + v;
      return s;
    };
  }
  if (spec.name == "step") return [](Point x) { return x[0] > 0.5 ? 1.0 : 0.0; };
  if (spec.probability == "half") return [](Point) { return 0.5; };
  return [](Point x) { return 1.0 / (1.0 + std::exp(2.0 - 4.0 * x[0])); };
}

}  // namespace

void GeneratorSpec::validate(LossKind loss) const {
  static const char* const kNames[] = {"linear", "product", "additive-sine", "step",
                                       "bernoulli-logit"};
  bool known = false;
  for (const char* k : kNames) known = known || name == k;
  if (!known) throw ConfigError("unknown generator '" + name + "'");
  if (p < 1) throw ConfigError("generator needs p >= 1");
  if (name == "product" && p < 2) throw ConfigError("product generator needs p >= 2");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be finite and >= 0");
  if (is_classification()) {
    if (probability != "half" && probability != "logistic") {
      throw ConfigError("unknown success probability '" + probability + "'");
    }
  } else if (loss != LossKind::SquaredError) {
    throw ConfigError("generator '" + name + "' is a regression law; use loss l2");
  }
}

GeneratedData generator_functions(const GeneratorSpec& spec, LossKind loss) {
  spec.validate(loss);
  GeneratedData out;
  out.conditional = regression_function(spec);
  out.truth = bayes_predictor(loss, out.conditional);
  return out;
}

GeneratedData generate_dataset(const GeneratorSpec& spec, LossKind loss, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) throw ConfigError("generate_dataset: n must be >= 1");
  GeneratedData out = generator_functions(spec, loss);
  Rng rng(seed);
  std::vector<double> features(n * spec.p);
  std::vector<double> y(n);
  const double negative = loss == LossKind::Exponential ? -1.0 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < spec.p; ++j) features[i * spec.p + j] = rng.uniform_open();
    const Point x{features.data() + i * spec.p, spec.p};
    const double m = out.conditional(x);
    if (spec.is_classification()) {
      y[i] = rng.uniform_open() < m ? 1.0 : negative;
    } else {
      y[i] = spec.noise > 0.0 ? m + spec.noise * rng.normal() : m;
    }
  }
  out.data = EmpiricalDistribution(spec.p, std::move(features), std::move(y));
  return out;
}

}  // namespace igb
