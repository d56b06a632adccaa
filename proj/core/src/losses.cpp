#include "igb/losses.hpp"

#include <cmath>
#include <limits>

#include "igb/error.hpp"
#include "igb/format.hpp"

namespace igb {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LossKind parse_loss(std::string_view name) {
  if (name == "l2") return LossKind::SquaredError;
  if (name == "logloss") return LossKind::CrossEntropy;
  if (name == "exp") return LossKind::Exponential;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected l2, logloss or exp)");
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::SquaredError: return "l2";
    case LossKind::CrossEntropy: return "logloss";
    case LossKind::Exponential: return "exp";
  }
  return "unknown";
}

void check_label(LossKind kind, double y) {
  switch (kind) {
    case LossKind::SquaredError:
      if (!std::isfinite(y)) throw InputError("squared error: non-finite response");
      return;
    case LossKind::CrossEntropy:
      if (y != 0.0 && y != 1.0) {
        throw InputError("cross-entropy: label " + format_double(y) + " not in {0,1}");
      }
      return;
    case LossKind::Exponential:
      if (y != -1.0 && y != 1.0) {
        throw InputError("exponential loss: label " + format_double(y) + " not in {-1,1}");
      }
      return;
  }
}

double loss_value(LossKind kind, double y, double z) {
  check_label(kind, y);
  switch (kind) {
    case LossKind::SquaredError: return 0.5 * (y - z) * (y - z);
    case LossKind::CrossEntropy: return -y * z + softplus(z);
    case LossKind::Exponential: return std::exp(-y * z);
  }
  return 0.0;
}

double loss_grad(LossKind kind, double y, double z) {
  check_label(kind, y);
  switch (kind) {
    case LossKind::SquaredError: return z - y;
    case LossKind::CrossEntropy: return -y + sigmoid(z);
    case LossKind::Exponential: return -y * std::exp(-y * z);
  }
  return 0.0;
}

double loss_hess(LossKind kind, double y, double z) {
  check_label(kind, y);
  switch (kind) {
    case LossKind::SquaredError: return 1.0;
    case LossKind::CrossEntropy: {
      // p(1-p) = e^{-|z|} / (1 + e^{-|z|})^2 keeps precision in both tails.
      const double e = std::exp(-std::abs(z));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case LossKind::Exponential: return std::exp(-y * z);
  }
  return 0.0;
}

double mean_loss(LossKind kind, const EmpiricalDistribution& mu, std::span<const double> pred) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += loss_value(kind, mu.y(i), pred[i]);
  return s / static_cast<double>(mu.size());
}

double mean_gradient(LossKind kind, const EmpiricalDistribution& mu,
                     std::span<const double> pred) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += loss_grad(kind, mu.y(i), pred[i]);
  return s / static_cast<double>(mu.size());
}

double initial_constant(LossKind kind, const EmpiricalDistribution& mu) {
  const std::size_t n = mu.size();
  for (std::size_t i = 0; i < n; ++i) check_label(kind, mu.y(i));

  if (kind != LossKind::SquaredError) {
    const double first = mu.y(0);
    bool single_class = true;
    for (std::size_t i = 1; i < n && single_class; ++i) single_class = mu.y(i) == first;
    if (single_class) {
      throw ConvergenceError("initial_constant: single-class labels, objective has no minimizer");
    }
  }

  auto grad = [&](double z) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += loss_grad(kind, mu.y(i), z);
    return s / static_cast<double>(n);
  };
  auto hess = [&](double z) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += loss_hess(kind, mu.y(i), z);
    return s / static_cast<double>(n);
  };

  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 100;

  // The mean gradient is increasing in z; bracket its root by doubling.
  double lo = -1.0, hi = 1.0;
  double g_lo = grad(lo), g_hi = grad(hi);
  for (int k = 0; k < 60 && g_lo > 0.0; ++k) {
    hi = lo;
    g_hi = g_lo;
    lo *= 2.0;
    g_lo = grad(lo);
  }
  for (int k = 0; k < 60 && g_hi < 0.0; ++k) {
    lo = hi;
    g_lo = g_hi;
    hi *= 2.0;
    g_hi = grad(hi);
  }
  if (g_lo > 0.0 || g_hi < 0.0) {
    throw ConvergenceError("initial_constant: could not bracket the minimizer");
  }

  double z = 0.0;
  if (z < lo || z > hi) z = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIter; ++it) {
    const double g = grad(z);
    if (std::abs(g) <= kTol) return z;
    if (g < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    double next = z - g / hess(z);
    // Newton can overshoot (exponential loss); fall back to bisection.
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == z) return z;
    z = next;
  }
  throw ConvergenceError("initial_constant: Newton did not converge in 100 iterations");
}

Predictor bayes_predictor(LossKind kind, Predictor conditional) {
  switch (kind) {
    case LossKind::SquaredError:
      return conditional;
    case LossKind::CrossEntropy:
    case LossKind::Exponential: {
      const double scale = kind == LossKind::CrossEntropy ? 1.0 : 0.5;
      return [conditional = std::move(conditional), scale](Point x) {
        const double p = conditional(x);
        if (!(p > 0.0 && p < 1.0)) {
          throw InputError("bayes_predictor: success probability " + format_double(p) +
                           " has an infinite logit");
        }
        return scale * std::log(p / (1.0 - p));
      };
    }
  }
  return conditional;
}

}  // namespace igb
