#include "igb/beta0_operator.hpp"

#include <algorithm>
#include <cmath>

#include "igb/error.hpp"
#include "igb/parallel.hpp"
#include "igb/random.hpp"
#include "igb/tree.hpp"

namespace igb {

namespace {

// Fixed chunking keeps the reduction order independent of the worker count.
constexpr std::size_t kChunks = 16;

}  // namespace

Eigen::VectorXd cell_indicator(const Lattice& lattice, const Region& a) {
  if (a.dim() != lattice.dim()) throw InputError("cell_indicator: dimension mismatch");
  const std::size_t p = lattice.dim();
  const std::size_t r = lattice.resolution();
  const double h = 1.0 / static_cast<double>(r);
  // Per-axis overlap fractions, then a tensor product.
  std::vector<std::vector<double>> axis(p, std::vector<double>(r));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < r; ++k) {
      const double lo = std::max(a.lower(j), static_cast<double>(k) * h);
      const double hi = std::min(a.upper(j), static_cast<double>(k + 1) * h);
      axis[j][k] = hi > lo ? (hi - lo) / h : 0.0;
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(lattice.size()));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    std::size_t flat = i;
    double v = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      v *= axis[j][flat % r];
      flat /= r;
    }
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

Beta0Operator beta0_operator_matrix(std::size_t depth, const Lattice& lattice,
                                    std::size_t schemes, std::uint64_t seed) {
  if (schemes < 2) throw InputError("beta0_operator_matrix: need at least two schemes");
  const auto n = static_cast<Eigen::Index>(lattice.size());
  const double cell = 1.0 / static_cast<double>(lattice.size());

  std::vector<Eigen::MatrixXd> sums(kChunks), squares(kChunks);
  parallel_for(kChunks, [&](std::size_t chunk) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd x(n, n);
    const std::size_t begin = chunk * schemes / kChunks;
    const std::size_t end = (chunk + 1) * schemes / kChunks;
    for (std::size_t s = begin; s < end; ++s) {
      Rng rng(derive_seed(seed, s));
      const auto leaves = scheme_to_partition(sample_random_scheme(depth, lattice.dim(), rng));
      x.setZero();
      for (const auto& leaf : leaves) {
        const double vol = leaf.volume();
        if (vol <= 0.0) continue;
        const Eigen::VectorXd f = cell_indicator(lattice, leaf);
        x.noalias() += (cell / vol) * f * f.transpose();
      }
      sum += x;
      sq += x.cwiseProduct(x);
    }
    sums[chunk] = std::move(sum);
    squares[chunk] = std::move(sq);
  });

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < kChunks; ++c) {
    sum += sums[c];
    sq += squares[c];
  }
  const double s = static_cast<double>(schemes);
  Beta0Operator op;
  op.lattice = lattice;
  op.schemes = schemes;
  op.matrix = sum / s;
  const Eigen::MatrixXd var =
      ((sq / s - op.matrix.cwiseProduct(op.matrix)) * (s / (s - 1.0))).cwiseMax(0.0);
  op.standard_error = (var / s).cwiseSqrt();
  return op;
}

Eigen::VectorXd Beta0Spectrum::evolve(const Eigen::VectorXd& g, double t) const {
  const Eigen::VectorXd coef = vectors.transpose() * g;
  const Eigen::VectorXd decay = (-t * values.array()).exp().matrix();
  return vectors * coef.cwiseProduct(decay);
}

Eigen::VectorXd Beta0Spectrum::kernel_part(const Eigen::VectorXd& g, double tol) const {
  Eigen::VectorXd coef = vectors.transpose() * g;
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    if (std::abs(values[i]) > tol) coef[i] = 0.0;
  }
  return vectors * coef;
}

Beta0Spectrum beta0_spectrum(const Beta0Operator& op) {
  const Eigen::MatrixXd sym = 0.5 * (op.matrix + op.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw ConvergenceError("beta0_spectrum: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ConstantMode constant_mode(const Beta0Operator& op) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.matrix.rows());
  const Eigen::VectorXd image = op.matrix * ones;
  ConstantMode m;
  m.eigenvalue = image.mean();
  m.residual = (image.array() - m.eigenvalue).abs().maxCoeff();
  return m;
}

double kernel_family_overlap(const Beta0Operator& op, const Beta0Spectrum& spectrum,
                             const RectangleFamily& family, double tol) {
  const double n = static_cast<double>(op.matrix.rows());
  double worst = 0.0;
  for (const auto& a : family.members) {
    const Eigen::VectorXd ind = cell_indicator(op.lattice, a);
    const double norm = std::sqrt(ind.squaredNorm() / n);
    if (norm == 0.0) continue;
    for (Eigen::Index k = 0; k < spectrum.values.size(); ++k) {
      if (std::abs(spectrum.values[k]) > tol) continue;
      // Eigenvectors have unit Euclidean norm, i.e. lattice norm 1/sqrt(n).
      const double inner = spectrum.vectors.col(k).dot(ind) * std::sqrt(n) / n;
      worst = std::max(worst, std::abs(inner) / norm);
    }
  }
  return worst;
}

}  // namespace igb
