#include "igb/gradient_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "igb/error.hpp"

namespace igb {

namespace {

constexpr double kMinExponent = -700.0;

double score_term(const NodeSums& s) {
  return s.count > 0 ? s.grad * s.grad / static_cast<double>(s.count) : 0.0;
}

void check_dimensions(const ResidualField& field, const TreeParams& params) {
  params.validate();
  if (field.distribution().dim() != params.features) {
    throw InputError("tree parameters expect p=" + std::to_string(params.features) +
                     " but the data has p=" + std::to_string(field.distribution().dim()));
  }
}

}  // namespace

void TreeParams::validate() const {
  if (depth < 1 || depth > 16) throw ConfigError("tree depth must be in [1, 16]");
  if (proposals < 1) throw ConfigError("proposal count K must be >= 1");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (features < 1) throw ConfigError("feature count p must be >= 1");
}

double split_score(const NodeSums& lower, const NodeSums& upper, std::size_t n) {
  return (score_term(lower) + score_term(upper)) / static_cast<double>(n);
}

double split_score(const ResidualField& field, const Region& a, std::size_t j, double u) {
  const auto& mu = field.distribution();
  const double t = a.threshold(j, u);
  NodeSums lower, upper;
  const auto g = field.grad();
  const auto h = field.hess();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point x = mu.x(i);
    if (!a.contains(x)) continue;
    NodeSums& side = x[j] <= t ? lower : upper;
    side.grad += g[i];
    side.hess += h[i];
    ++side.count;
  }
  return split_score(lower, upper, mu.size());
}

std::size_t softmax_select(std::span<const double> scores, double beta, double uniform,
                           std::vector<double>* probabilities) {
  const std::size_t k = scores.size();
  if (k == 0) throw InputError("softmax_select: no proposals");
  const double top = *std::max_element(scores.begin(), scores.end());

  std::vector<double> w(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = beta == 0.0 ? 0.0 : std::max(beta * (scores[i] - top), kMinExponent);
    w[i] = std::exp(e);
    total += w[i];
  }
  if (probabilities != nullptr) {
    probabilities->resize(k);
    for (std::size_t i = 0; i < k; ++i) (*probabilities)[i] = w[i] / total;
  }

  const double target = uniform * total;
  double run = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    run += w[i];
    if (target < run) return i;
  }
  return k - 1;
}

SoftmaxSplit softmax_split(const ResidualField& field, const Region& a, const TreeParams& params,
                           Rng& rng) {
  check_dimensions(field, params);
  SoftmaxSplit out;
  out.proposals.resize(params.proposals);
  for (auto& prop : out.proposals) {
    prop.feature = rng.uniform_index(params.features);
    prop.u = rng.uniform_open();
  }
  std::vector<double> scores(params.proposals);
  for (std::size_t k = 0; k < params.proposals; ++k) {
    auto& prop = out.proposals[k];
    prop.score = split_score(field, a, prop.feature, prop.u);
    scores[k] = prop.score;
  }
  out.selected = softmax_select(scores, params.beta, rng.uniform_open(), &out.probabilities);
  out.feature = out.proposals[out.selected].feature;
  out.u = out.proposals[out.selected].u;
  std::tie(out.lower, out.upper) = region_split(a, out.feature, out.u);
  return out;
}

double leaf_value(const NodeSums& sums) {
  if (sums.count == 0 || sums.hess == 0.0) return 0.0;
  return -sums.grad / sums.hess;
}

double leaf_value(const ResidualField& field, const Region& a) { return leaf_value(field.sum_in(a)); }

TreeFunction sample_gradient_tree(const ResidualField& field, const TreeParams& params, Rng& rng,
                                  TreeTrace* trace) {
  check_dimensions(field, params);
  const auto& mu = field.distribution();
  const std::size_t n = mu.size();
  const std::size_t p = params.features;
  const std::size_t kprop = params.proposals;
  const std::size_t internal = (std::size_t{1} << params.depth) - 1;
  const std::size_t total_nodes = 2 * internal + 1;
  // Scores only change the selection law when beta > 0 and K > 1.
  const bool need_scores = (params.beta > 0.0 && kprop > 1) || trace != nullptr;

  // Node bounds per feature; node 0 is [0,1]^p and implicitly holds every
  // sample, other nodes hold explicit member lists.
  std::vector<double> lo(total_nodes * p, 0.0), hi(total_nodes * p, 1.0);
  std::vector<std::vector<std::uint32_t>> members(total_nodes);
  std::vector<NodeSums> leaf_sums(total_nodes);
  std::vector<bool> leaf_ready(total_nodes, false);
  std::vector<SplitRule> rules(internal);

  std::vector<std::size_t> feat(kprop);
  std::vector<double> us(kprop), cut(kprop), scores(kprop, 0.0);
  std::vector<NodeSums> below(kprop);
  std::vector<double> probs;

  for (std::size_t k = 0; k < internal; ++k) {
    for (std::size_t q = 0; q < kprop; ++q) {
      feat[q] = rng.uniform_index(p);
      us[q] = rng.uniform_open();
      cut[q] = (1.0 - us[q]) * lo[k * p + feat[q]] + us[q] * hi[k * p + feat[q]];
    }

    const bool root = k == 0;
    if (need_scores) {
      if (root) {
        for (std::size_t q = 0; q < kprop; ++q) {
          below[q] = field.at_most(feat[q], cut[q]);
          scores[q] = split_score(below[q], field.total(feat[q]) - below[q], n);
        }
      } else {
        const auto& mem = members[k];
        const NodeSums node_total = field.sum_over(mem);
        std::fill(below.begin(), below.end(), NodeSums{});
        const auto g = field.grad();
        const auto h = field.hess();
        for (const std::uint32_t i : mem) {
          const Point x = mu.x(i);
          for (std::size_t q = 0; q < kprop; ++q) {
            if (x[feat[q]] <= cut[q]) {
              below[q].grad += g[i];
              below[q].hess += h[i];
              ++below[q].count;
            }
          }
        }
        for (std::size_t q = 0; q < kprop; ++q) {
          scores[q] = split_score(below[q], node_total - below[q], n);
        }
      }
    }

    const double beta = need_scores ? params.beta : 0.0;
    const std::size_t sel =
        softmax_select(scores, beta, rng.uniform_open(), trace != nullptr ? &probs : nullptr);
    if (trace != nullptr) {
      NodeTrace nt;
      nt.node = k;
      nt.selected = sel;
      nt.probabilities = probs;
      for (std::size_t q = 0; q < kprop; ++q) nt.proposals.push_back({feat[q], us[q], scores[q]});
      trace->nodes.push_back(std::move(nt));
    }

    const std::size_t j = feat[sel];
    const double t = cut[sel];
    rules[k] = SplitRule{j, us[sel]};

    const std::size_t c0 = 2 * k + 1;
    const std::size_t c1 = 2 * k + 2;
    for (std::size_t c : {c0, c1}) {
      std::copy_n(lo.begin() + static_cast<std::ptrdiff_t>(k * p), p,
                  lo.begin() + static_cast<std::ptrdiff_t>(c * p));
      std::copy_n(hi.begin() + static_cast<std::ptrdiff_t>(k * p), p,
                  hi.begin() + static_cast<std::ptrdiff_t>(c * p));
    }
    hi[c0 * p + j] = t;
    lo[c1 * p + j] = t;

    if (root && c0 >= internal) {
      // Depth one: both leaves come straight from the prefix sums.
      const NodeSums lower = need_scores ? below[sel] : field.at_most(j, t);
      leaf_sums[c0] = lower;
      leaf_sums[c1] = field.total(j) - lower;
      leaf_ready[c0] = leaf_ready[c1] = true;
      continue;
    }

    auto route = [&](std::uint32_t i) {
      members[mu.x(i)[j] <= t ? c0 : c1].push_back(i);
    };
    if (root) {
      for (std::uint32_t i = 0; i < n; ++i) route(i);
    } else {
      for (const std::uint32_t i : members[k]) route(i);
      members[k] = {};
    }
  }

  std::vector<double> values(internal + 1);
  for (std::size_t v = 0; v <= internal; ++v) {
    const std::size_t node = internal + v;
    const NodeSums s = leaf_ready[node] ? leaf_sums[node] : field.sum_over(members[node]);
    values[v] = leaf_value(s);
  }
  return TreeFunction(SplittingScheme(params.depth, p, std::move(rules)), std::move(values));
}

double rn_weight(const ResidualField& field, const SplittingScheme& scheme,
                 const TreeParams& params, Rng& rng, std::size_t mc) {
  check_dimensions(field, params);
  if (mc < 1) throw InputError("rn_weight: need at least one Monte Carlo replicate");
  if (scheme.depth() != params.depth || scheme.features() != params.features) {
    throw InputError("rn_weight: scheme does not match tree parameters");
  }
  const std::size_t kprop = params.proposals;
  if (kprop == 1) return 1.0;

  const auto& mu = field.distribution();
  const std::size_t n = mu.size();
  const std::size_t internal = scheme.internal_count();
  const auto regions = scheme.node_regions();
  const TreeFunction router(scheme, std::vector<double>(scheme.leaf_count(), 0.0));

  std::vector<std::vector<std::uint32_t>> members(internal);
  for (std::uint32_t i = 0; i < n; ++i) {
    const Point x = mu.x(i);
    std::size_t k = 0;
    while (k < internal) {
      members[k].push_back(i);
      k = 2 * k + (x[scheme.node(k).feature] <= router.threshold(k) ? 1 : 2);
    }
  }

  const auto g = field.grad();
  const auto h = field.hess();
  auto score_at = [&](std::size_t k, std::size_t j, double u) {
    const double t = regions[k].threshold(j, u);
    NodeSums lower, upper;
    for (const std::uint32_t i : members[k]) {
      NodeSums& side = mu.x(i)[j] <= t ? lower : upper;
      side.grad += g[i];
      side.hess += h[i];
      ++side.count;
    }
    return split_score(lower, upper, n);
  };

  const bool scored = params.beta > 0.0;
  std::vector<double> own(internal, 0.0);
  if (scored) {
    for (std::size_t k = 0; k < internal; ++k) own[k] = score_at(k, scheme.node(k).feature, scheme.node(k).u);
  }

  const double kd = static_cast<double>(kprop);
  double acc = 0.0;
  std::vector<double> scores(kprop);
  for (std::size_t rep = 0; rep < mc; ++rep) {
    double prod = 1.0;
    for (std::size_t k = 0; k < internal; ++k) {
      scores[0] = own[k];
      for (std::size_t q = 1; q < kprop; ++q) {
        const std::size_t j = rng.uniform_index(params.features);
        const double u = rng.uniform_open();
        scores[q] = scored ? score_at(k, j, u) : 0.0;
      }
      const double top = *std::max_element(scores.begin(), scores.end());
      double den = 0.0;
      for (double s : scores) den += std::exp(std::max(params.beta * (s - top), kMinExponent));
      const double num = std::exp(std::max(params.beta * (scores[0] - top), kMinExponent));
      prod *= kd * (num / den);
    }
    acc += prod;
  }
  return acc / static_cast<double>(mc);
}

}  // namespace igb
