#pragma once

#include <cstddef>
#include <vector>

#include "igb/random.hpp"
#include "igb/region.hpp"
#include "igb/residual_field.hpp"
#include "igb/tree.hpp"

namespace igb {

struct TreeParams {
  std::size_t depth = 1;      // d >= 1
  std::size_t proposals = 1;  // K >= 1
  double beta = 0.0;          // softmax temperature parameter, >= 0
  std::size_t features = 1;   // p >= 1

  void validate() const;
};

struct SplitProposal {
  std::size_t feature = 0;
  double u = 0.5;
  double score = 0.0;
};

/// Two-term split score
///   mu[dL 1_{A0}]^2 / mu(A0) + mu[dL 1_{A1}]^2 / mu(A1)
/// with the normalized empirical measure and 0/0 = 0. The parent term is
/// the same for every proposal at a node and is left out.
double split_score(const ResidualField& field, const Region& a, std::size_t j, double u);
double split_score(const NodeSums& lower, const NodeSums& upper, std::size_t n);

/// Softmax choice among scores: P(k) = exp(beta s_k) / sum_l exp(beta s_l),
/// computed after subtracting the max score. `uniform` in (0,1) drives the
/// draw. Fills `probabilities` when non-null.
std::size_t softmax_select(std::span<const double> scores, double beta, double uniform,
                           std::vector<double>* probabilities = nullptr);

struct SoftmaxSplit {
  std::size_t feature = 0;
  double u = 0.5;
  Region lower;
  Region upper;
  std::vector<SplitProposal> proposals;
  std::vector<double> probabilities;
  std::size_t selected = 0;
};

/// One softmax binary split of region A: K iid uniform proposals on
/// {0..p-1} x (0,1), scored, then one drawn by softmax.
SoftmaxSplit softmax_split(const ResidualField& field, const Region& a, const TreeParams& params,
                           Rng& rng);

/// Newton leaf value -mu[dL 1_A] / mu[d2L 1_A]; 0 when the leaf is empty.
double leaf_value(const NodeSums& sums);
double leaf_value(const ResidualField& field, const Region& a);

struct NodeTrace {
  std::size_t node = 0;
  std::vector<SplitProposal> proposals;
  std::vector<double> probabilities;
  std::size_t selected = 0;
};

struct TreeTrace {
  std::vector<NodeTrace> nodes;
};

/// Samples one softmax gradient tree T(.; mu, F). Nodes are split in heap
/// order; the draw sequence per node is K proposals then one selection
/// uniform, so the tree is a deterministic function of the Rng state.
TreeFunction sample_gradient_tree(const ResidualField& field, const TreeParams& params, Rng& rng,
                                  TreeTrace* trace = nullptr);

/// Monte Carlo estimate of dQ_{mu,F}/dQ_0 at `scheme`, averaging `mc`
/// replicates of the K-1 competing proposals per node. Each node factor is
/// at most K, so the estimate lies in [0, K^{2^d - 1}].
double rn_weight(const ResidualField& field, const SplittingScheme& scheme,
                 const TreeParams& params, Rng& rng, std::size_t mc);

}  // namespace igb
