#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "igb/random.hpp"
#include "igb/region.hpp"

namespace igb {

/// Split at one internal node: covariate index (0-based) and interpolation
/// weight u in (0,1) relative to the node's region.
struct SplitRule {
  std::size_t feature = 0;
  double u = 0.5;

  friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

/// Complete binary splitting scheme of depth d. Internal nodes are stored in
/// heap order: node k has children 2k+1 (lower side) and 2k+2 (upper side).
/// A node at level l with binary address v (first split is the most
/// significant bit) sits at index 2^l - 1 + v; leaf v sits at 2^d - 1 + v.
class SplittingScheme {
 public:
  SplittingScheme() = default;
  SplittingScheme(std::size_t depth, std::size_t features, std::vector<SplitRule> nodes);

  std::size_t depth() const { return depth_; }
  std::size_t features() const { return features_; }
  std::size_t internal_count() const { return nodes_.size(); }
  std::size_t leaf_count() const { return nodes_.size() + 1; }
  const SplitRule& node(std::size_t k) const { return nodes_[k]; }
  std::span<const SplitRule> nodes() const { return nodes_; }

  /// Regions of every node of the complete tree in heap order
  /// (2^{d+1} - 1 entries; the last 2^d are the leaves).
  std::vector<Region> node_regions() const;

  friend bool operator==(const SplittingScheme&, const SplittingScheme&) = default;

 private:
  std::size_t depth_ = 0;
  std::size_t features_ = 0;
  std::vector<SplitRule> nodes_;
};

/// Leaves A_v, v in {0,1}^d, obtained by splitting [0,1]^p along the scheme.
std::vector<Region> scheme_to_partition(const SplittingScheme& scheme);

/// Draws a completely random scheme: every node split is uniform on
/// {0..p-1} x (0,1), independently.
SplittingScheme sample_random_scheme(std::size_t depth, std::size_t features, Rng& rng);

/// Piecewise-constant function sum_v value_v 1_{A_v}(x).
class TreeFunction {
 public:
  TreeFunction() = default;
  TreeFunction(SplittingScheme scheme, std::vector<double> leaf_values);

  const SplittingScheme& scheme() const { return scheme_; }
  std::size_t depth() const { return scheme_.depth(); }
  std::span<const double> leaf_values() const { return values_; }
  /// Absolute cut point of internal node k.
  double threshold(std::size_t k) const { return thresholds_[k]; }

  std::size_t leaf_index(Point x) const;
  double operator()(Point x) const { return values_[leaf_index(x)]; }

  std::vector<Region> leaf_regions() const { return scheme_to_partition(scheme_); }

  friend bool operator==(const TreeFunction& a, const TreeFunction& b) {
    return a.scheme_ == b.scheme_ && a.values_ == b.values_;
  }

 private:
  SplittingScheme scheme_;
  std::vector<double> thresholds_;
  std::vector<double> values_;
};

}  // namespace igb
