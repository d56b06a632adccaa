#include "igb/tree.hpp"

#include <algorithm>
#include <cmath>

#include "igb/error.hpp"

namespace igb {

SplittingScheme::SplittingScheme(std::size_t depth, std::size_t features,
                                 std::vector<SplitRule> nodes)
    : depth_(depth), features_(features), nodes_(std::move(nodes)) {
  if (depth_ < 1 || depth_ > 20) throw InputError("SplittingScheme: depth must be in [1, 20]");
  if (features_ < 1) throw InputError("SplittingScheme: need at least one feature");
  if (nodes_.size() != (std::size_t{1} << depth_) - 1) {
    throw InputError("SplittingScheme: expected 2^d - 1 internal nodes");
  }
  for (const auto& n : nodes_) {
    if (n.feature >= features_) throw InputError("SplittingScheme: feature index out of range");
    if (!(n.u > 0.0 && n.u < 1.0)) throw InputError("SplittingScheme: thresholds must lie in (0,1)");
  }
}

std::vector<Region> SplittingScheme::node_regions() const {
  const std::size_t total = 2 * nodes_.size() + 1;
  std::vector<Region> regions(total);
  regions[0] = Region::unit(features_);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    auto [lo, hi] = region_split(regions[k], nodes_[k].feature, nodes_[k].u);
    regions[2 * k + 1] = std::move(lo);
    regions[2 * k + 2] = std::move(hi);
  }
  return regions;
}

std::vector<Region> scheme_to_partition(const SplittingScheme& scheme) {
  auto all = scheme.node_regions();
  const std::size_t first_leaf = scheme.internal_count();
  return {std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(first_leaf)),
          std::make_move_iterator(all.end())};
}

SplittingScheme sample_random_scheme(std::size_t depth, std::size_t features, Rng& rng) {
  std::vector<SplitRule> nodes((std::size_t{1} << depth) - 1);
  for (auto& n : nodes) {
    n.feature = rng.uniform_index(features);
    n.u = rng.uniform_open();
  }
  return SplittingScheme(depth, features, std::move(nodes));
}

TreeFunction::TreeFunction(SplittingScheme scheme, std::vector<double> leaf_values)
    : scheme_(std::move(scheme)), values_(std::move(leaf_values)) {
  if (values_.size() != scheme_.leaf_count()) {
    throw InputError("TreeFunction: expected one value per leaf");
  }
  // Per-node bounds along every feature, filled top-down in heap order; the
  // arithmetic matches Region::threshold so routing agrees with the regions.
  const std::size_t m = scheme_.internal_count();
  const std::size_t p = scheme_.features();
  thresholds_.resize(m);
  std::vector<double> lo(m * p, 0.0), hi(m * p, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& n = scheme_.node(k);
    const double a = lo[k * p + n.feature];
    const double b = hi[k * p + n.feature];
    const double t = (1.0 - n.u) * a + n.u * b;
    thresholds_[k] = t;
    for (std::size_t child : {2 * k + 1, 2 * k + 2}) {
      if (child >= m) continue;
      std::copy_n(lo.begin() + static_cast<std::ptrdiff_t>(k * p), p,
                  lo.begin() + static_cast<std::ptrdiff_t>(child * p));
      std::copy_n(hi.begin() + static_cast<std::ptrdiff_t>(k * p), p,
                  hi.begin() + static_cast<std::ptrdiff_t>(child * p));
      if (child == 2 * k + 1) {
        hi[child * p + n.feature] = t;
      } else {
        lo[child * p + n.feature] = t;
      }
    }
  }
}

std::size_t TreeFunction::leaf_index(Point x) const {
  const auto nodes = scheme_.nodes();
  std::size_t k = 0;
  const std::size_t m = nodes.size();
  while (k < m) {
    k = 2 * k + (x[nodes[k].feature] <= thresholds_[k] ? 1 : 2);
  }
  return k - m;
}

}  // namespace igb
