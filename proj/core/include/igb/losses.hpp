#pragma once

#include <string>
#include <string_view>

#include "igb/data.hpp"
#include "igb/model.hpp"

namespace igb {

enum class LossKind {
  SquaredError,   // L = (y - z)^2 / 2, y in R
  CrossEntropy,   // L = -y z + log(1 + e^z), y in {0, 1}
  Exponential,    // L = exp(-y z), y in {-1, 1}
};

/// Parses the CLI spelling: "l2", "logloss" or "exp".
LossKind parse_loss(std::string_view name);
std::string loss_name(LossKind kind);

/// Throws InputError if y is outside the label space of the loss.
void check_label(LossKind kind, double y);

double loss_value(LossKind kind, double y, double z);
/// First derivative in z.
double loss_grad(LossKind kind, double y, double z);
/// Second derivative in z; strictly positive.
double loss_hess(LossKind kind, double y, double z);

/// argmin_z mu[L(y, z)] by safeguarded Newton on z -> mu[dL(y, z)], stopping
/// once |mu[dL]| <= 1e-12 (at most 100 iterations). Single-class
/// classification data has no minimizer and raises ConvergenceError.
double initial_constant(LossKind kind, const EmpiricalDistribution& mu);

/// Bayes predictor for the loss given the regression function (squared
/// error) or the success probability p(x) (classification): identity, logit,
/// or half-logit. Evaluating at a point with p(x) in {0, 1} throws.
Predictor bayes_predictor(LossKind kind, Predictor conditional);

/// mu[L(y, F(x))] with predictions F(x_i) supplied per sample.
double mean_loss(LossKind kind, const EmpiricalDistribution& mu, std::span<const double> pred);
/// mu[dL(y, F(x))].
double mean_gradient(LossKind kind, const EmpiricalDistribution& mu, std::span<const double> pred);

}  // namespace igb
