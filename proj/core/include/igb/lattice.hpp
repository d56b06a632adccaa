#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "igb/data.hpp"
#include "igb/model.hpp"
#include "igb/region.hpp"

namespace igb {

/// Regular lattice of cell centers (i + 1/2) / r on [0,1]^p; coordinate 0
/// varies fastest in the flat index.
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::size_t dim, std::size_t resolution);

  std::size_t dim() const { return dim_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return size_; }

  double center(std::size_t k) const {
    return (static_cast<double>(k) + 0.5) / static_cast<double>(resolution_);
  }
  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::vector<double> point(std::size_t flat) const;
  /// The lattice cell around a point, as a region.
  Region cell(std::size_t flat) const;
  PointSet points() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t resolution_ = 0;
  std::size_t size_ = 0;
};

/// Function values on a lattice. `weights` is empty for the uniform
/// distribution of X, else one probability per lattice point.
struct GridFunction {
  Lattice lattice;
  std::vector<double> values;
  std::vector<double> weights;

  static GridFunction sample(const Lattice& lattice, const Predictor& f);

  /// sum_i w_i f_i g_i with uniform or supplied weights.
  double inner(const GridFunction& other) const;
  double l2_norm() const;
  double sup_norm() const;
};

/// Lattice L2 distance sqrt(mean_i (f(x_i) - g(x_i))^2) under uniform X.
double grid_l2_distance(const PointSet& grid, const Predictor& f, const Predictor& g);
double grid_l2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace igb
