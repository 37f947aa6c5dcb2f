#pragma once

#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/sampler_state.hpp"

namespace hebart {

// Per-group residual count and sum inside one terminal node.
struct GroupStat {
  int group = 0;
  int count = 0;
  double sum = 0.0;
};

// Sufficient statistics of one terminal node's residual vector: the
// per-present-group counts/sums plus the node totals. Groups absent from
// the node are absent from the list.
struct NodeSuffStats {
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<GroupStat> groups;  // sorted by dense group index

  double group_mean(std::size_t idx) const {
    return groups[idx].sum / static_cast<double>(groups[idx].count);
  }
};

// Exact sums over the given rows.
NodeSuffStats collect_suff_stats(const std::vector<double>& residuals,
                                 const std::vector<int>& rows, const std::vector<int>& groups);

// One pass over all rows of a tree; returns stats indexed by terminal node
// id (arena-sized, untouched slots stay empty).
std::vector<NodeSuffStats> collect_tree_suff_stats(const std::vector<double>& residuals,
                                                   const std::vector<int>& assignment,
                                                   std::size_t arena_size,
                                                   const std::vector<int>& groups);

// Group-block reductions shared by the collapsed likelihood and the node
// mean draw, with c1 = k1/P. Terms are accumulated in sorted (count, sum)
// order so results are bitwise invariant under group relabeling.
struct CollapsedTerms {
  double log_det_block = 0.0;  // sum_j log(1 + c1 n_j)
  double s = 0.0;              // 1' Psi^-1 1 = sum_j n_j / (1 + c1 n_j)
  double t = 0.0;              // 1' Psi^-1 r = sum_j S_j / (1 + c1 n_j)
  double shrink = 0.0;         // sum_j c1 S_j^2 / (1 + c1 n_j)
};

CollapsedTerms collapsed_terms(const NodeSuffStats& stats, double c1);

// Log density of the node's residual vector under the collapsed model
//   r ~ MVN(0, tau^-1 * (I + c1 * M M^T + c2 * 1 1^T)),
// with c1 = k1/P, c2 = k2/P and M the group indicator matrix of the node.
// Evaluated without forming the matrix: Woodbury on the block-diagonal
// group part and Sherman-Morrison on the rank-one part reduce everything
// to the sufficient statistics. k1 = 0 (and/or k2 = 0) is the exact
// degenerate limit; k1 = 0 is how the ungrouped model evaluates nodes.
// Throws on tau <= 0, negative k1/k2, or num_trees < 1.
double node_log_marginal(const NodeSuffStats& stats, double tau, double k1, double k2,
                         int num_trees);

// Sum of node_log_marginal over every tree's terminal nodes, evaluating
// each tree on its own partial residuals at the given (k1, k2). This is
// the collapsed likelihood driving the k1 Metropolis step.
double forest_log_marginal(const SamplerState& state, const Dataset& data, double k1, double k2);

}  // namespace hebart
