#pragma once

#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/rng.hpp"
#include "hebart/tree.hpp"

namespace hebart {

enum class MoveKind { Grow, Prune, Change, Swap };

const char* move_kind_name(MoveKind kind);

// A candidate tree from one structure move, together with
// log q(T | T*) - log q(T* | T). A move that cannot be performed on the
// current tree comes back with noop = true and is treated as an
// automatic rejection.
struct MoveProposal {
  MoveKind kind = MoveKind::Grow;
  bool noop = false;
  Tree new_tree;
  double log_proposal_ratio = 0.0;
  int node_a = -1;  // grown/pruned/changed node, or swap parent
  int node_b = -1;  // swap child
};

struct MoveProbs {
  double grow = 0.25;
  double prune = 0.25;
  double change = 0.40;
  double swap = 0.10;
};

// Distinct observed values of covariate `var` among the rows reaching
// `node`, excluding values whose left child would be empty under the
// "strict < goes left" convention (i.e. the minimum). Sorted ascending.
std::vector<double> available_cutpoints(const Dataset& data, const Tree& tree, int node, int var);
std::vector<double> cutpoints_from_rows(const Dataset& data, const std::vector<int>& rows, int var);

// Rows reaching every node (indexed by node id), in row order.
std::vector<std::vector<int>> rows_by_node(const Dataset& data, const Tree& tree);

// Log prior of a tree structure. A node at depth d splits with probability
// alpha * (1 + d)^(-beta); an internal node also pays a uniform choice over
// the predictors that still have a cutpoint and over that predictor's
// cutpoints. Terminals that cannot split (no cutpoint on any predictor)
// contribute factor 1, which is what makes the prior sum to one over the
// reachable tree space.
double log_tree_prior(const Tree& tree, double alpha, double beta, const Dataset& data);

// Deterministic single-move constructors; `propose` draws the random
// choices and delegates here. Exposed so the reverse-move bookkeeping can
// be exercised directly.
MoveProposal make_grow(const Tree& tree, const Dataset& data, int node, int var, double value,
                       const MoveProbs& probs);
MoveProposal make_prune(const Tree& tree, const Dataset& data, int node, const MoveProbs& probs);
MoveProposal make_change(const Tree& tree, const Dataset& data, int node, int var, double value);
MoveProposal make_swap(const Tree& tree, const Dataset& data, int parent, int child);

MoveProposal propose(const Tree& tree, const Dataset& data, const MoveProbs& probs, RngStream& rng);

}  // namespace hebart
