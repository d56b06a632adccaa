#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "igb/data.hpp"
#include "igb/losses.hpp"
#include "igb/model.hpp"

namespace igb {

/// Synthetic law of (X, Y) with X uniform on [0,1]^p.
///   linear          F*(x) = sum_j x_j
///   product         F*(x) = x_1 x_2 (p >= 2)
///   additive-sine   F*(x) = sum_j sin(2 pi x_j)/2 + x_j
///   step            F*(x) = 1[x_1 > 1/2]
///   bernoulli-logit Y ~ Bernoulli(q(x)), q = "half" (1/2) or
///                   "logistic" (1 / (1 + exp(2 - 4 x_1)))
/// Regression laws add noise * N(0,1).
struct GeneratorSpec {
  std::string name = "linear";
  std::size_t p = 1;
  double noise = 0.0;
  std::string probability = "logistic";

  bool is_classification() const { return name == "bernoulli-logit"; }
  /// Throws ConfigError for unknown names or bad parameters, or when the law
  /// cannot be paired with the loss.
  void validate(LossKind loss) const;
};

struct GeneratedData {
  EmpiricalDistribution data;
  /// E[Y | X = x]: the regression function or the success probability.
  Predictor conditional;
  /// Bayes predictor for the loss.
  Predictor truth;
};

/// Success labels are {0,1}, or {-1,1} under exponential loss.
GeneratedData generate_dataset(const GeneratorSpec& spec, LossKind loss, std::size_t n,
                               std::uint64_t seed);

/// The truth/conditional pair without sampling.
GeneratedData generator_functions(const GeneratorSpec& spec, LossKind loss);

}  // namespace igb
