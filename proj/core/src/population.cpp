#include "igb/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "igb/error.hpp"
#include "igb/parallel.hpp"
#include "igb/random.hpp"
#include "igb/residual_field.hpp"
#include "igb/tree.hpp"

namespace igb {

CornerMeasureEstimate::CornerMeasureEstimate(std::size_t dim, std::size_t schemes,
                                             std::vector<double> atoms)
    : dim_(dim), schemes_(schemes), atoms_(std::move(atoms)) {
  if (dim_ < 1) throw InputError("CornerMeasureEstimate: dimension must be >= 1");
  if (atoms_.empty() || atoms_.size() % dim_ != 0) {
    throw InputError("CornerMeasureEstimate: atom array is empty or ragged");
  }
  sorted_first_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) sorted_first_[i] = atoms_[i * dim_];
  std::sort(sorted_first_.begin(), sorted_first_.end());
}

double CornerMeasureEstimate::mass(const std::function<bool(Point)>& in) const {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < size(); ++i) hits += in(atom(i)) ? 1 : 0;
  return static_cast<double>(hits) * atom_weight();
}

double CornerMeasureEstimate::slice_mass(std::size_t j, double a, double b) const {
  if (j >= dim_) throw InputError("slice_mass: coordinate out of range");
  if (j == 0) {
    const auto lo = std::upper_bound(sorted_first_.begin(), sorted_first_.end(), a);
    const auto hi = std::upper_bound(sorted_first_.begin(), sorted_first_.end(), b);
    return hi > lo ? static_cast<double>(hi - lo) * atom_weight() : 0.0;
  }
  return mass([&](Point x) { return a < x[j] && x[j] <= b; });
}

CornerMeasureEstimate estimate_pi0(std::size_t depth, std::size_t features, std::size_t schemes,
                                   std::uint64_t seed) {
  if (schemes < 1) throw InputError("estimate_pi0: need at least one scheme");
  std::vector<std::vector<double>> per_scheme(schemes);
  parallel_for(schemes, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    const auto leaves = scheme_to_partition(sample_random_scheme(depth, features, rng));
    auto& out = per_scheme[s];
    for (const auto& leaf : leaves) {
      for (const auto& c : leaf.corners()) {
        if (std::all_of(c.begin(), c.end(), [](double v) { return v < 1.0; })) {
          out.insert(out.end(), c.begin(), c.end());
        }
      }
    }
  });
  std::vector<double> atoms;
  for (auto& v : per_scheme) atoms.insert(atoms.end(), v.begin(), v.end());
  return CornerMeasureEstimate(features, schemes, std::move(atoms));
}

double uniform_product_tail(std::size_t d, double eps) {
  if (d < 1) throw InputError("uniform_product_tail: d must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InputError("uniform_product_tail: eps must be in (0, 1]");
  const double l = -std::log(eps);
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 1; k < d; ++k) {
    term *= l / static_cast<double>(k);
    sum += term;
  }
  return eps * sum;
}

TailEstimate monte_carlo_product_tail(std::size_t d, double eps, std::size_t draws,
                                      std::uint64_t seed) {
  if (d < 1 || draws < 1) throw InputError("monte_carlo_product_tail: need d >= 1 and draws >= 1");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    double prod = 1.0;
    for (std::size_t k = 0; k < d; ++k) prod *= rng.uniform_open();
    hits += prod <= eps ? 1 : 0;
  }
  const double n = static_cast<double>(draws);
  const double q = static_cast<double>(hits) / n;
  return {q, std::sqrt(q * (1.0 - q) / n)};
}

double slice_envelope(std::size_t d, double width) {
  if (!(width > 0.0 && width <= 1.0)) throw InputError("slice_envelope: width must be in (0, 1]");
  return width * std::pow(1.0 - std::log(width), static_cast<double>(d) - 1.0);
}

SliceEnvelopeFit fit_slice_envelope(const CornerMeasureEstimate& pi0, std::size_t depth,
                                    std::span<const double> widths, std::size_t coordinate) {
  if (widths.empty()) throw InputError("fit_slice_envelope: no widths");
  SliceEnvelopeFit fit;
  double lo = std::numeric_limits<double>::infinity();
  for (double w : widths) {
    double best = 0.0;
    for (std::size_t k = 0;; ++k) {
      const double a = static_cast<double>(k) * w / 2.0;
      if (a + w > 1.0 + 1e-12) break;
      best = std::max(best, pi0.slice_mass(coordinate, a, a + w));
    }
    const double ratio = best / slice_envelope(depth, w);
    fit.widths.push_back(w);
    fit.masses.push_back(best);
    fit.ratios.push_back(ratio);
    fit.constant = std::max(fit.constant, ratio);
    lo = std::min(lo, ratio);
  }
  fit.log_spread = lo > 0.0 ? std::log(fit.constant / lo) : std::numeric_limits<double>::infinity();
  return fit;
}

namespace {

// Replaces every value by its weighted mean along axis j.
void average_axis(std::vector<double>& v, std::size_t r, std::size_t stride,
                  const std::vector<double>& w) {
  const std::size_t n = v.size();
  double wsum = 0.0;
  for (double x : w) wsum += x;
  for (std::size_t base = 0; base < n; ++base) {
    if ((base / stride) % r != 0) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) s += w[k] * v[base + k * stride];
    s /= wsum;
    for (std::size_t k = 0; k < r; ++k) v[base + k * stride] = s;
  }
}

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

}  // namespace

GridFunction anova_projection(const GridFunction& target, std::size_t d) {
  const Lattice& lat = target.lattice;
  const std::size_t p = lat.dim();
  const std::size_t r = lat.resolution();
  const std::size_t n = lat.size();
  if (target.values.size() != n) throw InputError("anova_projection: value count does not match lattice");
  if (p > 20) throw UnsupportedError("anova_projection: too many coordinates");
  if (d >= p) return target;

  std::vector<std::vector<double>> marginal(p, std::vector<double>(r, 0.0));
  if (target.weights.empty()) {
    for (auto& m : marginal) std::fill(m.begin(), m.end(), 1.0 / static_cast<double>(r));
  } else {
    if (target.weights.size() != n) throw InputError("anova_projection: weight count does not match lattice");
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = lat.multi_index(i);
      for (std::size_t j = 0; j < p; ++j) marginal[j][idx[j]] += target.weights[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = lat.multi_index(i);
      double prod = 1.0;
      for (std::size_t j = 0; j < p; ++j) prod *= marginal[j][idx[j]];
      if (std::abs(prod - target.weights[i]) > 1e-12 * std::max(1.0, std::abs(target.weights[i]))) {
        throw UnsupportedError("anova_projection: X distribution is not a product measure");
      }
    }
  }

  GridFunction out;
  out.lattice = lat;
  out.weights = target.weights;
  out.values.assign(n, 0.0);
  // P_d f = sum_K c_K E[f | x_K], c_K = sum_{m <= d-|K|} (-1)^m C(p-|K|, m).
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (k > d) continue;
    double c = 0.0;
    for (std::size_t m = 0; m + k <= d; ++m) c += (m % 2 == 0 ? 1.0 : -1.0) * binomial(p - k, m);
    if (c == 0.0) continue;
    std::vector<double> cond = target.values;
    std::size_t stride = 1;
    for (std::size_t j = 0; j < p; ++j) {
      if (((mask >> j) & 1U) == 0) average_axis(cond, r, stride, marginal[j]);
      stride *= r;
    }
    for (std::size_t i = 0; i < n; ++i) out.values[i] += c * cond[i];
  }
  return out;
}

RectangleFamily RectangleFamily::lattice(std::size_t p, std::size_t d, std::size_t resolution) {
  if (p < 1 || resolution < 1) throw InputError("RectangleFamily: need p >= 1 and resolution >= 1");
  const double r = static_cast<double>(resolution);
  std::vector<std::pair<double, double>> intervals;
  for (std::size_t a = 0; a <= resolution; ++a) {
    for (std::size_t b = a + 1; b <= resolution; ++b) {
      if (a == 0 && b == resolution) continue;
      intervals.emplace_back(static_cast<double>(a) / r, static_cast<double>(b) / r);
    }
  }
  RectangleFamily family;
  for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
    std::vector<std::size_t> coords;
    for (std::size_t j = 0; j < p; ++j) {
      if ((mask >> j) & 1U) coords.push_back(j);
    }
    if (coords.size() > d) continue;
    std::vector<std::size_t> pick(coords.size(), 0);
    while (true) {
      std::vector<double> lo(p, 0.0), hi(p, 1.0);
      for (std::size_t q = 0; q < coords.size(); ++q) {
        lo[coords[q]] = intervals[pick[q]].first;
        hi[coords[q]] = intervals[pick[q]].second;
      }
      family.members.push_back(Region::closed(std::move(lo), std::move(hi)));
      std::size_t q = 0;
      while (q < pick.size() && ++pick[q] == intervals.size()) pick[q++] = 0;
      if (q == pick.size()) break;
    }
  }
  return family;
}

std::vector<double> family_sums(const PointSet& points, std::span<const double> w,
                                const RectangleFamily& family) {
  if (w.size() != points.size()) throw InputError("family_sums: weight count mismatch");
  const std::size_t p = points.dim();
  const PrefixSums prefix(points, w);
  std::vector<double> out(family.size(), 0.0);
  parallel_for(family.size(), [&](std::size_t m) {
    const Region& a = family.members[m];
    if (a.dim() != p) throw InputError("family_sums: rectangle dimension mismatch");
    std::size_t constrained = 0;
    std::size_t which = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (!(a.lower(j) <= 0.0 && a.lower_closed(j) && a.upper(j) >= 1.0)) {
        ++constrained;
        which = j;
      }
    }
    if (constrained == 0) {
      out[m] = prefix.total(0);
    } else if (constrained == 1) {
      const double below_lo =
          a.lower_closed(which)
              ? prefix.at_most(which, std::nextafter(a.lower(which), -std::numeric_limits<double>::infinity()))
              : prefix.at_most(which, a.lower(which));
      out[m] = prefix.at_most(which, a.upper(which)) - below_lo;
    } else {
      double s = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (a.contains(points.point(i))) s += w[i];
      }
      out[m] = s;
    }
  });
  return out;
}

namespace {

std::vector<double> moment_weights(const EmpiricalDistribution& mu, std::span<const double> pred,
                                   LossKind loss, MomentKind kind) {
  std::vector<double> w(mu.size());
  const double inv_n = mu.weight();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = kind == MomentKind::Gradient ? loss_grad(loss, mu.y(i), pred[i])
                                                  : loss_hess(loss, mu.y(i), pred[i]);
    w[i] = v * inv_n;
  }
  return w;
}

std::vector<double> predictions(const EmpiricalDistribution& mu, const Predictor& f) {
  std::vector<double> pred(mu.size());
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = f(mu.x(i));
  return pred;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double critical_point_residual(const EmpiricalDistribution& mu, std::span<const double> pred,
                               LossKind loss, const RectangleFamily& family) {
  if (pred.size() != mu.size()) throw InputError("critical_point_residual: prediction count mismatch");
  if (family.size() == 0) return 0.0;
  const auto w = moment_weights(mu, pred, loss, MomentKind::Gradient);
  return max_abs(family_sums(mu.points(), w, family));
}

double critical_point_residual(const EmpiricalDistribution& mu, const Predictor& f, LossKind loss,
                               const RectangleFamily& family) {
  return critical_point_residual(mu, predictions(mu, f), loss, family);
}

double gc_sup_discrepancy(const EmpiricalDistribution& mu_n, const EmpiricalDistribution& mu_ref,
                          LossKind loss, const std::vector<Predictor>& models,
                          const RectangleFamily& family, MomentKind kind) {
  if (mu_n.dim() != mu_ref.dim()) throw InputError("gc_sup_discrepancy: dimension mismatch");
  double sup = 0.0;
  for (const auto& f : models) {
    const auto a = family_sums(mu_n.points(), moment_weights(mu_n, predictions(mu_n, f), loss, kind), family);
    const auto b = family_sums(mu_ref.points(), moment_weights(mu_ref, predictions(mu_ref, f), loss, kind), family);
    for (std::size_t m = 0; m < a.size(); ++m) sup = std::max(sup, std::abs(a[m] - b[m]));
  }
  return sup;
}

}  // namespace igb
