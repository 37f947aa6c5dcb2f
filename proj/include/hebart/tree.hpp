#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hebart {

class Dataset;

// One decision-tree node, stored in the tree's arena. A terminal node
// (left < 0) carries the overall mean `mu` plus one mean per group that
// is present in the node; group_mus stays sorted by dense group index.
struct TreeNode {
  int parent = -1;
  int left = -1;
  int right = -1;
  int depth = 0;
  int split_var = -1;
  double split_value = 0.0;
  double mu = 0.0;
  std::vector<std::pair<int, double>> group_mus;

  bool is_terminal() const { return left < 0; }
};

// Rooted binary decision tree with value semantics: proposals copy the
// tree and edit the copy. Node ids are arena indices and stay stable
// across grow/prune (freed slots are recycled).
class Tree {
 public:
  static Tree stump();

  int root() const { return root_; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  TreeNode& node(int id) { return nodes_[id]; }
  std::size_t arena_size() const { return nodes_.size(); }

  // Splits terminal `id` on (var, value); the node's parameters are
  // dropped and both children start as placeholder terminals.
  // Returns {left_id, right_id}.
  std::pair<int, int> grow(int id, int var, double value);

  // Collapses an internal node whose children are both terminal back to a
  // placeholder terminal.
  void prune(int id);

  // Exchanges the split rules of two internal nodes.
  void swap_rules(int a, int b);

  // Descends from the root: left when x[split_var] < split_value, right
  // otherwise. Returns the terminal node id.
  int route(std::span<const double> x) const;

  // Value of the terminal `id` for a row in `group`: the group mean when
  // present, the overall mean otherwise (group < 0 means unknown).
  double terminal_value(int id, int group) const;

  void set_group_mu(int id, int group, double value);
  const double* find_group_mu(int id, int group) const;

  // Depth-first (preorder) listings; deterministic, used for all uniform
  // node choices.
  std::vector<int> terminal_ids() const;
  std::vector<int> internal_ids() const;
  // Internal nodes whose children are both terminal (prunable / changeable).
  std::vector<int> prunable_ids() const;
  // (parent, child) pairs with both nodes internal, preorder.
  std::vector<std::pair<int, int>> internal_pairs() const;

  std::size_t num_terminals() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<int> free_;
  int root_ = 0;

  int alloc_node();
  void visit_preorder(int id, const std::function<void(int)>& fn) const;
};

// Structural invariant check (single rooted binary tree, consistent
// depths/parents, valid split columns and in-range split values, every
// training row routes to a non-empty terminal). Returns an empty string
// when the tree is valid, else a description of the first violation.
std::string check_tree(const Tree& tree, const Dataset& data);

}  // namespace hebart
