#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "igb/region.hpp"

namespace igb {

struct Sample {
  std::vector<double> x;
  double y = 0.0;
};

/// Points in [0,1]^p stored row-major, with a per-coordinate sorted index so
/// that "how many points have x_j <= t" is a binary search.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t p, std::vector<double> coords);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return p_; }
  Point point(std::size_t i) const { return {coords_.data() + i * p_, p_}; }
  std::span<const double> coords() const { return coords_; }

  /// Point indices sorted by coordinate j (stable).
  std::span<const std::uint32_t> order(std::size_t j) const {
    return {order_.data() + j * n_, n_};
  }
  std::span<const double> sorted(std::size_t j) const { return {sorted_.data() + j * n_, n_}; }
  /// Position of point i in order(j).
  std::uint32_t rank(std::size_t j, std::size_t i) const { return rank_[j * n_ + i]; }

  /// Number of points with x_j <= t.
  std::size_t count_at_most(std::size_t j, double t) const;

 private:
  std::size_t p_ = 0;
  std::size_t n_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<double> sorted_;
  std::vector<std::uint32_t> rank_;
};

/// Normalized empirical measure (1/n) sum_i delta_{(x_i, y_i)}.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  EmpiricalDistribution(std::size_t p, std::vector<double> features, std::vector<double> y);
  static EmpiricalDistribution from_samples(std::span<const Sample> samples);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.dim(); }
  double weight() const { return 1.0 / static_cast<double>(size()); }
  Point x(std::size_t i) const { return points_.point(i); }
  double y(std::size_t i) const { return y_[i]; }
  std::span<const double> labels() const { return y_; }
  const PointSet& points() const { return points_; }

 private:
  PointSet points_;
  std::vector<double> y_;
};

using SampleFunction = std::function<double(Point, double)>;

/// (1/n) sum_i g(x_i, y_i) 1_A(x_i).
double restricted_moment(const EmpiricalDistribution& mu, const SampleFunction& g,
                         const Region& a);

/// Reads a CSV with header x1,...,xp,y. Features must lie in [0,1].
EmpiricalDistribution read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const EmpiricalDistribution& mu, const std::filesystem::path& path);

}  // namespace igb
