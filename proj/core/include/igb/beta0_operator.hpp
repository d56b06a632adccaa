#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "igb/lattice.hpp"
#include "igb/population.hpp"

namespace igb {

/// Monte Carlo estimate of the beta = 0 operator
/// L f = E_xi sum_v <f, 1_{A_v}> / |A_v| 1_{A_v} under uniform X, written in
/// the basis of lattice-cell indicators: (L g)_c = sum_c' L(c, c') g_c'
/// for the piecewise-constant function with cell values g.
struct Beta0Operator {
  Lattice lattice;
  std::size_t schemes = 0;
  Eigen::MatrixXd matrix;
  /// Per-entry Monte Carlo standard error.
  Eigen::MatrixXd standard_error;

  double max_standard_error() const { return standard_error.maxCoeff(); }
  double asymmetry() const { return (matrix - matrix.transpose()).cwiseAbs().maxCoeff(); }
};

Beta0Operator beta0_operator_matrix(std::size_t depth, const Lattice& lattice,
                                    std::size_t schemes, std::uint64_t seed);

/// Eigen-decomposition of the symmetrized matrix, eigenvalues ascending.
struct Beta0Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  /// e^{-t L} g.
  Eigen::VectorXd evolve(const Eigen::VectorXd& g, double t) const;
  /// Component of g in the span of eigenvectors with |lambda| <= tol.
  Eigen::VectorXd kernel_part(const Eigen::VectorXd& g, double tol) const;
};

Beta0Spectrum beta0_spectrum(const Beta0Operator& op);

/// Rayleigh quotient of the constant function and the sup deviation of L 1
/// from its mean (0 for an exact eigenfunction).
struct ConstantMode {
  double eigenvalue = 0.0;
  double residual = 0.0;
};

ConstantMode constant_mode(const Beta0Operator& op);

/// Cell-basis representation of 1_A: the fraction of each cell inside A.
Eigen::VectorXd cell_indicator(const Lattice& lattice, const Region& a);

/// max over kernel eigenvectors v (|lambda| <= tol) and family members A of
/// |<v, 1_A>| / ||1_A||, in the lattice L2 inner product.
double kernel_family_overlap(const Beta0Operator& op, const Beta0Spectrum& spectrum,
                             const RectangleFamily& family, double tol);

}  // namespace igb
