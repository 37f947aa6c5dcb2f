#pragma once

#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/tree.hpp"

namespace hebart {

// Mutable state of one MCMC chain: the forest, the global parameters, the
// cached per-row sum-of-trees prediction, and each tree's row-to-terminal
// assignment. Single writer; independent chains own independent states.
struct SamplerState {
  std::vector<Tree> forest;
  double tau = 1.0;
  double k1 = 1.0;
  std::vector<double> fitted;                     // per row, sum over trees
  std::vector<std::vector<int>> node_assignment;  // per tree: row -> terminal id

  std::size_t num_trees() const { return forest.size(); }
};

// All-stumps initial state: fitted = 0, tau at its prior mean, k1 at the
// midpoint of its proposal window.
SamplerState init_state(const Dataset& data, int num_trees, double tau0, double k10);

// Row -> terminal id under the tree's split rules.
std::vector<int> route_assignment(const Tree& tree, const Dataset& data);

// Per-row prediction of a single tree: the routed terminal's group mean
// when the row's group is present there, its overall mean otherwise.
std::vector<double> tree_contribution(const Tree& tree, const std::vector<int>& assignment,
                                      const Dataset& data);

// Sum of contributions recomputed from scratch (coherence checks).
std::vector<double> recompute_fitted(const SamplerState& state, const Dataset& data);

// Partial residuals for tree p: y minus the predictions of every other
// tree, computed from the cached fitted values.
std::vector<double> partial_residuals(const SamplerState& state, const Dataset& data,
                                      std::size_t p);

}  // namespace hebart
