#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace igb {

using Point = std::span<const double>;

/// Axis-aligned box in [0,1]^p. Each coordinate interval is (lo, hi], or
/// [lo, hi] when the lower end is flagged closed. The unit cube has every
/// lower end closed, and a split at threshold t sends x_j <= t to the lower
/// child and x_j > t to the upper child, so the leaves of any splitting
/// scheme partition [0,1]^p exactly.
class Region {
 public:
  Region() = default;
  Region(std::vector<double> lower, std::vector<double> upper,
         std::vector<bool> lower_closed);

  static Region unit(std::size_t p);
  /// Closed box [lower, upper].
  static Region closed(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }
  bool lower_closed(std::size_t j) const { return lower_closed_[j]; }

  bool contains(Point x) const;
  double volume() const;
  double overlap_volume(const Region& other) const;

  /// Interpolated cut point (1-u) a_j + u b_j.
  double threshold(std::size_t j, double u) const {
    return (1.0 - u) * lower_[j] + u * upper_[j];
  }

  /// The 2^p vertices of the box, each as a p-vector, coordinate 0 varying fastest.
  std::vector<std::vector<double>> corners() const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<bool> lower_closed_;
};

/// Splits A at coordinate j with interpolation weight u: returns
/// (A ∩ {x_j <= t}, A ∩ {x_j > t}) with t = (1-u) a_j + u b_j.
std::pair<Region, Region> region_split(const Region& a, std::size_t j, double u);

}  // namespace igb
