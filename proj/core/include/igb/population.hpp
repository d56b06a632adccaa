#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "igb/data.hpp"
#include "igb/lattice.hpp"
#include "igb/losses.hpp"
#include "igb/model.hpp"
#include "igb/region.hpp"

namespace igb {

/// Normalized point cloud of leaf corners of completely random trees. Every
/// corner in [0,1)^p of every leaf counts once, so a corner shared by several
/// leaves of the same tree carries proportional weight.
class CornerMeasureEstimate {
 public:
  CornerMeasureEstimate(std::size_t dim, std::size_t schemes, std::vector<double> atoms);

  std::size_t dim() const { return dim_; }
  std::size_t schemes() const { return schemes_; }
  std::size_t size() const { return atoms_.size() / dim_; }
  Point atom(std::size_t i) const { return {atoms_.data() + i * dim_, dim_}; }
  double atom_weight() const { return 1.0 / static_cast<double>(size()); }

  double mass(const std::function<bool(Point)>& in) const;
  /// pi0({x : a < x_j <= b}).
  double slice_mass(std::size_t j, double a, double b) const;

 private:
  std::size_t dim_;
  std::size_t schemes_;
  std::vector<double> atoms_;
  std::vector<double> sorted_first_;  // sorted coordinate-0 values
};

CornerMeasureEstimate estimate_pi0(std::size_t depth, std::size_t features, std::size_t schemes,
                                   std::uint64_t seed);

/// P(U_1 ... U_d <= eps) = eps sum_{k<d} (-log eps)^k / k!.
double uniform_product_tail(std::size_t d, double eps);

struct TailEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of P(U_1 ... U_d <= eps) with binomial standard error.
TailEstimate monte_carlo_product_tail(std::size_t d, double eps, std::size_t draws,
                                      std::uint64_t seed);

/// (b-a)(1 - log(b-a))^{d-1}.
double slice_envelope(std::size_t d, double width);

struct SliceEnvelopeFit {
  std::vector<double> widths;
  /// Largest slice mass over slice positions a = k w / 2.
  std::vector<double> masses;
  std::vector<double> ratios;  // mass / envelope
  double constant = 0.0;       // max ratio
  double log_spread = 0.0;     // log(max ratio / min ratio)
};

SliceEnvelopeFit fit_slice_envelope(const CornerMeasureEstimate& pi0, std::size_t depth,
                                    std::span<const double> widths, std::size_t coordinate = 0);

/// Truncation of the ANOVA decomposition at interaction order d. Lattice
/// weights must factor as a product of marginals.
GridFunction anova_projection(const GridFunction& target, std::size_t d);

/// Closed rectangles with at most d constrained coordinates.
struct RectangleFamily {
  std::vector<Region> members;

  /// All rectangles with endpoints on a 1/resolution grid whose constrained
  /// coordinates J (|J| <= d) are strict sub-intervals of [0,1]; includes
  /// the full cube.
  static RectangleFamily lattice(std::size_t p, std::size_t d, std::size_t resolution = 16);

  std::size_t size() const { return members.size(); }
};

/// Sums of w_i over the points inside each family member.
std::vector<double> family_sums(const PointSet& points, std::span<const double> w,
                                const RectangleFamily& family);

/// max_A |mu[dL(y, F(x)) 1_A(x)]|; 0 for an empty family.
double critical_point_residual(const EmpiricalDistribution& mu, const Predictor& f, LossKind loss,
                               const RectangleFamily& family);
double critical_point_residual(const EmpiricalDistribution& mu, std::span<const double> pred,
                               LossKind loss, const RectangleFamily& family);

enum class MomentKind { Gradient, Hessian };

/// max over F and A of |mu_n[d^k L 1_A] - mu_ref[d^k L 1_A]|.
double gc_sup_discrepancy(const EmpiricalDistribution& mu_n, const EmpiricalDistribution& mu_ref,
                          LossKind loss, const std::vector<Predictor>& models,
                          const RectangleFamily& family,
                          MomentKind kind = MomentKind::Gradient);

}  // namespace igb
