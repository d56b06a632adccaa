#include "igb/region.hpp"

#include <algorithm>
#include <string>

#include "igb/error.hpp"

namespace igb {

Region::Region(std::vector<double> lower, std::vector<double> upper,
               std::vector<bool> lower_closed)
    : lower_(std::move(lower)), upper_(std::move(upper)),
      lower_closed_(std::move(lower_closed)) {
  if (lower_.size() != upper_.size() || lower_.size() != lower_closed_.size()) {
    throw InputError("Region: bound vectors have mismatched dimensions");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] >= 0.0 && upper_[j] <= 1.0 && lower_[j] <= upper_[j])) {
      throw InputError("Region: invalid bounds on coordinate " + std::to_string(j + 1));
    }
  }
}

Region Region::unit(std::size_t p) {
  return Region(std::vector<double>(p, 0.0), std::vector<double>(p, 1.0),
                std::vector<bool>(p, true));
}

Region Region::closed(std::vector<double> lower, std::vector<double> upper) {
  const std::size_t p = lower.size();
  return Region(std::move(lower), std::move(upper), std::vector<bool>(p, true));
}

bool Region::contains(Point x) const {
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    const double v = x[j];
    if (v > upper_[j]) return false;
    if (lower_closed_[j] ? v < lower_[j] : v <= lower_[j]) return false;
  }
  return true;
}

double Region::volume() const {
  double v = 1.0;
  for (std::size_t j = 0; j < lower_.size(); ++j) v *= upper_[j] - lower_[j];
  return v;
}

double Region::overlap_volume(const Region& other) const {
  double v = 1.0;
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    const double lo = std::max(lower_[j], other.lower_[j]);
    const double hi = std::min(upper_[j], other.upper_[j]);
    if (hi <= lo) return 0.0;
    v *= hi - lo;
  }
  return v;
}

std::vector<std::vector<double>> Region::corners() const {
  const std::size_t p = dim();
  std::vector<std::vector<double>> out;
  out.reserve(std::size_t{1} << p);
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    std::vector<double> c(p);
    for (std::size_t j = 0; j < p; ++j) c[j] = (mask >> j) & 1U ? upper_[j] : lower_[j];
    out.push_back(std::move(c));
  }
  return out;
}

std::pair<Region, Region> region_split(const Region& a, std::size_t j, double u) {
  if (j >= a.dim()) throw InputError("region_split: coordinate out of range");
  const double t = a.threshold(j, u);

  std::vector<double> lo(a.dim()), hi(a.dim());
  std::vector<bool> closed(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    lo[k] = a.lower(k);
    hi[k] = a.upper(k);
    closed[k] = a.lower_closed(k);
  }

  auto hi0 = hi;
  hi0[j] = t;
  Region left(lo, std::move(hi0), closed);

  lo[j] = t;
  closed[j] = false;
  Region right(std::move(lo), std::move(hi), std::move(closed));
  return {std::move(left), std::move(right)};
}

}  // namespace igb
