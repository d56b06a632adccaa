#include "igb/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "igb/error.hpp"

namespace igb {

Lattice::Lattice(std::size_t dim, std::size_t resolution) : dim_(dim), resolution_(resolution) {
  if (dim_ < 1) throw InputError("Lattice: dimension must be >= 1");
  if (resolution_ < 1) throw InputError("Lattice: resolution must be >= 1");
  size_ = 1;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (size_ > (std::size_t{1} << 26) / resolution_) throw InputError("Lattice: too many points");
    size_ *= resolution_;
  }
}

std::vector<std::size_t> Lattice::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    idx[j] = flat % resolution_;
    flat /= resolution_;
  }
  return idx;
}

std::vector<double> Lattice::point(std::size_t flat) const {
  std::vector<double> x(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    x[j] = center(flat % resolution_);
    flat /= resolution_;
  }
  return x;
}

Region Lattice::cell(std::size_t flat) const {
  const auto idx = multi_index(flat);
  std::vector<double> lo(dim_), hi(dim_);
  const double r = static_cast<double>(resolution_);
  for (std::size_t j = 0; j < dim_; ++j) {
    lo[j] = static_cast<double>(idx[j]) / r;
    hi[j] = static_cast<double>(idx[j] + 1) / r;
  }
  return Region::closed(std::move(lo), std::move(hi));
}

PointSet Lattice::points() const {
  std::vector<double> coords;
  coords.reserve(size_ * dim_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto x = point(i);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointSet(dim_, std::move(coords));
}

GridFunction GridFunction::sample(const Lattice& lattice, const Predictor& f) {
  GridFunction g;
  g.lattice = lattice;
  g.values.resize(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto x = lattice.point(i);
    g.values[i] = f(x);
  }
  return g;
}

double GridFunction::inner(const GridFunction& other) const {
  if (!(lattice == other.lattice)) throw InputError("GridFunction: lattices differ");
  double s = 0.0;
  const double uniform = 1.0 / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? uniform : weights[i];
    s += w * values[i] * other.values[i];
  }
  return s;
}

double GridFunction::l2_norm() const { return std::sqrt(inner(*this)); }

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double grid_l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InputError("grid_l2_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

double grid_l2_distance(const PointSet& grid, const Predictor& f, const Predictor& g) {
  std::vector<double> a(grid.size()), b(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a[i] = f(grid.point(i));
    b[i] = g(grid.point(i));
  }
  return grid_l2_distance(a, b);
}

}  // namespace igb
