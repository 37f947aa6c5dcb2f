#include "hebart/tree_ops.hpp"

#include <algorithm>
#include <cmath>

#include "hebart/distributions.hpp"
#include "hebart/util.hpp"

namespace hebart {

namespace {

double split_prob(double alpha, double beta, int depth) {
  return alpha * std::pow(1.0 + static_cast<double>(depth), -beta);
}

// Predictors that still have at least one available cutpoint at a node.
std::vector<int> splittable_vars(const Dataset& data, const std::vector<int>& rows) {
  std::vector<int> vars;
  for (int v = 0; v < static_cast<int>(data.num_covariates()); ++v) {
    if (!cutpoints_from_rows(data, rows, v).empty()) vars.push_back(v);
  }
  return vars;
}

// Forward probability of generating one specific grow move, and of
// generating one specific prune move. Both directions of the
// grow <-> prune pair call these with identical arguments, so the
// antisymmetry of log_proposal_ratio is exact.
double log_grow_choice(const MoveProbs& probs, std::size_t n_terminals, std::size_t n_vars,
                       std::size_t n_cuts) {
  return std::log(probs.grow) - std::log(static_cast<double>(n_terminals)) -
         std::log(static_cast<double>(n_vars)) - std::log(static_cast<double>(n_cuts));
}

double log_prune_choice(const MoveProbs& probs, std::size_t n_prunable) {
  return std::log(probs.prune) - std::log(static_cast<double>(n_prunable));
}

MoveProposal noop_proposal(MoveKind kind) {
  MoveProposal p;
  p.kind = kind;
  p.noop = true;
  return p;
}

std::size_t pick_index(RngStream& rng, std::size_t size) {
  auto i = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(size));
  return i < size ? i : size - 1;
}

bool any_empty_terminal(const Tree& tree, const Dataset& data) {
  auto rows = rows_by_node(data, tree);
  for (int id : tree.terminal_ids()) {
    if (rows[id].empty()) return true;
  }
  return false;
}

}  // namespace

const char* move_kind_name(MoveKind kind) {
  switch (kind) {
    case MoveKind::Grow: return "grow";
    case MoveKind::Prune: return "prune";
    case MoveKind::Change: return "change";
    case MoveKind::Swap: return "swap";
  }
  return "?";
}

std::vector<double> cutpoints_from_rows(const Dataset& data, const std::vector<int>& rows,
                                        int var) {
  std::vector<double> values;
  values.reserve(rows.size());
  for (int i : rows) values.push_back(data.covariate(i, var));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (!values.empty()) values.erase(values.begin());  // min would leave the left child empty
  return values;
}

std::vector<std::vector<int>> rows_by_node(const Dataset& data, const Tree& tree) {
  std::vector<std::vector<int>> rows(tree.arena_size());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    int id = tree.root();
    rows[id].push_back(static_cast<int>(i));
    while (!tree.node(id).is_terminal()) {
      const TreeNode& n = tree.node(id);
      id = data.covariate(i, n.split_var) < n.split_value ? n.left : n.right;
      rows[id].push_back(static_cast<int>(i));
    }
  }
  return rows;
}

std::vector<double> available_cutpoints(const Dataset& data, const Tree& tree, int node, int var) {
  auto rows = rows_by_node(data, tree);
  return cutpoints_from_rows(data, rows[node], var);
}

double log_tree_prior(const Tree& tree, double alpha, double beta, const Dataset& data) {
  auto rows = rows_by_node(data, tree);
  double lp = 0.0;
  std::vector<int> stack{tree.root()};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const TreeNode& n = tree.node(id);
    auto vars = splittable_vars(data, rows[id]);
    if (n.is_terminal()) {
      // A node with no available cutpoint is terminal with probability 1.
      if (!vars.empty()) lp += std::log1p(-split_prob(alpha, beta, n.depth));
    } else {
      std::size_t n_cuts = cutpoints_from_rows(data, rows[id], n.split_var).size();
      lp += std::log(split_prob(alpha, beta, n.depth)) - std::log(static_cast<double>(vars.size())) -
            std::log(static_cast<double>(n_cuts));
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  return lp;
}

MoveProposal make_grow(const Tree& tree, const Dataset& data, int node, int var, double value,
                       const MoveProbs& probs) {
  auto rows = rows_by_node(data, tree);
  auto vars = splittable_vars(data, rows[node]);
  auto cuts = cutpoints_from_rows(data, rows[node], var);
  if (vars.empty() || cuts.empty()) return noop_proposal(MoveKind::Grow);

  MoveProposal p;
  p.kind = MoveKind::Grow;
  p.node_a = node;
  p.new_tree = tree;
  p.new_tree.grow(node, var, value);
  double forward = log_grow_choice(probs, tree.terminal_ids().size(), vars.size(), cuts.size());
  double reverse = log_prune_choice(probs, p.new_tree.prunable_ids().size());
  p.log_proposal_ratio = reverse - forward;
  return p;
}

MoveProposal make_prune(const Tree& tree, const Dataset& data, int node, const MoveProbs& probs) {
  MoveProposal p;
  p.kind = MoveKind::Prune;
  p.node_a = node;
  p.new_tree = tree;
  p.new_tree.prune(node);

  // The regrow that undoes this prune sees the same row set at `node`.
  auto rows = rows_by_node(data, p.new_tree);
  auto vars = splittable_vars(data, rows[node]);
  auto cuts = cutpoints_from_rows(data, rows[node], tree.node(node).split_var);
  double forward = log_prune_choice(probs, tree.prunable_ids().size());
  double reverse = log_grow_choice(probs, p.new_tree.terminal_ids().size(), vars.size(), cuts.size());
  p.log_proposal_ratio = reverse - forward;
  return p;
}

MoveProposal make_change(const Tree& tree, const Dataset& data, int node, int var, double value) {
  (void)data;
  MoveProposal p;
  p.kind = MoveKind::Change;
  p.node_a = node;
  p.new_tree = tree;
  p.new_tree.node(node).split_var = var;
  p.new_tree.node(node).split_value = value;
  p.log_proposal_ratio = 0.0;  // symmetric: same node set, same row set, same cutpoint counts
  return p;
}

MoveProposal make_swap(const Tree& tree, const Dataset& data, int parent, int child) {
  MoveProposal p;
  p.kind = MoveKind::Swap;
  p.node_a = parent;
  p.node_b = child;
  p.new_tree = tree;
  p.new_tree.swap_rules(parent, child);
  if (any_empty_terminal(p.new_tree, data)) return noop_proposal(MoveKind::Swap);
  p.log_proposal_ratio = 0.0;  // rule exchange is its own inverse
  return p;
}

MoveProposal propose(const Tree& tree, const Dataset& data, const MoveProbs& probs,
                     RngStream& rng) {
  const double weights[4] = {probs.grow, probs.prune, probs.change, probs.swap};
  MoveKind kind = static_cast<MoveKind>(sample_multinomial_index(weights, rng));

  switch (kind) {
    case MoveKind::Grow: {
      auto terminals = tree.terminal_ids();
      int node = terminals[pick_index(rng, terminals.size())];
      auto rows = rows_by_node(data, tree);
      auto vars = splittable_vars(data, rows[node]);
      if (vars.empty()) return noop_proposal(kind);
      int var = vars[pick_index(rng, vars.size())];
      auto cuts = cutpoints_from_rows(data, rows[node], var);
      double value = cuts[pick_index(rng, cuts.size())];
      return make_grow(tree, data, node, var, value, probs);
    }
    case MoveKind::Prune: {
      auto prunable = tree.prunable_ids();
      if (prunable.empty()) return noop_proposal(kind);
      int node = prunable[pick_index(rng, prunable.size())];
      return make_prune(tree, data, node, probs);
    }
    case MoveKind::Change: {
      auto candidates = tree.prunable_ids();  // parents of two terminals
      if (candidates.empty()) return noop_proposal(kind);
      int node = candidates[pick_index(rng, candidates.size())];
      auto rows = rows_by_node(data, tree);
      auto vars = splittable_vars(data, rows[node]);
      if (vars.empty()) return noop_proposal(kind);
      int var = vars[pick_index(rng, vars.size())];
      auto cuts = cutpoints_from_rows(data, rows[node], var);
      double value = cuts[pick_index(rng, cuts.size())];
      return make_change(tree, data, node, var, value);
    }
    case MoveKind::Swap: {
      auto pairs = tree.internal_pairs();
      if (pairs.empty()) return noop_proposal(kind);
      auto [parent, child] = pairs[pick_index(rng, pairs.size())];
      return make_swap(tree, data, parent, child);
    }
  }
  return noop_proposal(kind);
}

}  // namespace hebart
