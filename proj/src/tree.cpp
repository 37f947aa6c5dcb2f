#include "hebart/tree.hpp"

#include <algorithm>
#include <cmath>

#include "hebart/dataset.hpp"
#include "hebart/util.hpp"

namespace hebart {

Tree Tree::stump() {
  Tree t;
  t.nodes_.push_back(TreeNode{});
  t.root_ = 0;
  return t;
}

int Tree::alloc_node() {
  if (!free_.empty()) {
    int id = free_.back();
    free_.pop_back();
    nodes_[id] = TreeNode{};
    return id;
  }
  nodes_.push_back(TreeNode{});
  return static_cast<int>(nodes_.size()) - 1;
}

std::pair<int, int> Tree::grow(int id, int var, double value) {
  int left = alloc_node();
  int right = alloc_node();  // may reallocate the arena; take references after
  TreeNode& parent = nodes_[id];
  parent.left = left;
  parent.right = right;
  parent.split_var = var;
  parent.split_value = value;
  parent.mu = 0.0;
  parent.group_mus.clear();
  nodes_[left].parent = id;
  nodes_[right].parent = id;
  nodes_[left].depth = parent.depth + 1;
  nodes_[right].depth = parent.depth + 1;
  return {left, right};
}

void Tree::prune(int id) {
  TreeNode& n = nodes_[id];
  free_.push_back(n.left);
  free_.push_back(n.right);
  n.left = -1;
  n.right = -1;
  n.split_var = -1;
  n.split_value = 0.0;
  n.mu = 0.0;
  n.group_mus.clear();
}

void Tree::swap_rules(int a, int b) {
  std::swap(nodes_[a].split_var, nodes_[b].split_var);
  std::swap(nodes_[a].split_value, nodes_[b].split_value);
}

int Tree::route(std::span<const double> x) const {
  int id = root_;
  while (!nodes_[id].is_terminal()) {
    const TreeNode& n = nodes_[id];
    id = x[n.split_var] < n.split_value ? n.left : n.right;
  }
  return id;
}

double Tree::terminal_value(int id, int group) const {
  if (group >= 0) {
    if (const double* g = find_group_mu(id, group)) return *g;
  }
  return nodes_[id].mu;
}

void Tree::set_group_mu(int id, int group, double value) {
  auto& gm = nodes_[id].group_mus;
  auto it = std::lower_bound(gm.begin(), gm.end(), group,
                             [](const auto& p, int g) { return p.first < g; });
  if (it != gm.end() && it->first == group) {
    it->second = value;
  } else {
    gm.insert(it, {group, value});
  }
}

const double* Tree::find_group_mu(int id, int group) const {
  const auto& gm = nodes_[id].group_mus;
  auto it = std::lower_bound(gm.begin(), gm.end(), group,
                             [](const auto& p, int g) { return p.first < g; });
  if (it != gm.end() && it->first == group) return &it->second;
  return nullptr;
}

void Tree::visit_preorder(int id, const std::function<void(int)>& fn) const {
  fn(id);
  if (!nodes_[id].is_terminal()) {
    visit_preorder(nodes_[id].left, fn);
    visit_preorder(nodes_[id].right, fn);
  }
}

std::vector<int> Tree::terminal_ids() const {
  std::vector<int> out;
  visit_preorder(root_, [&](int id) {
    if (nodes_[id].is_terminal()) out.push_back(id);
  });
  return out;
}

std::vector<int> Tree::internal_ids() const {
  std::vector<int> out;
  visit_preorder(root_, [&](int id) {
    if (!nodes_[id].is_terminal()) out.push_back(id);
  });
  return out;
}

std::vector<int> Tree::prunable_ids() const {
  std::vector<int> out;
  visit_preorder(root_, [&](int id) {
    const TreeNode& n = nodes_[id];
    if (!n.is_terminal() && nodes_[n.left].is_terminal() && nodes_[n.right].is_terminal()) {
      out.push_back(id);
    }
  });
  return out;
}

std::vector<std::pair<int, int>> Tree::internal_pairs() const {
  std::vector<std::pair<int, int>> out;
  visit_preorder(root_, [&](int id) {
    const TreeNode& n = nodes_[id];
    if (n.is_terminal()) return;
    if (!nodes_[n.left].is_terminal()) out.emplace_back(id, n.left);
    if (!nodes_[n.right].is_terminal()) out.emplace_back(id, n.right);
  });
  return out;
}

std::size_t Tree::num_terminals() const { return terminal_ids().size(); }

std::string check_tree(const Tree& tree, const Dataset& data) {
  // Reachability plus per-node structural checks.
  std::vector<int> stack{tree.root()};
  std::vector<bool> seen(tree.arena_size(), false);
  if (tree.node(tree.root()).parent != -1) return "root has a parent";
  if (tree.node(tree.root()).depth != 0) return "root depth is not 0";
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (seen[id]) return "node " + std::to_string(id) + " reached twice";
    seen[id] = true;
    const TreeNode& n = tree.node(id);
    if (n.is_terminal()) {
      if (n.right >= 0) return "terminal node " + std::to_string(id) + " has a right child";
      continue;
    }
    if (n.left < 0 || n.right < 0) return "internal node " + std::to_string(id) + " missing child";
    if (n.split_var < 0 || n.split_var >= static_cast<int>(data.num_covariates())) {
      return "node " + std::to_string(id) + " has invalid split column";
    }
    double lo = data.covariate(0, n.split_var), hi = lo;
    for (std::size_t i = 1; i < data.num_rows(); ++i) {
      lo = std::min(lo, data.covariate(i, n.split_var));
      hi = std::max(hi, data.covariate(i, n.split_var));
    }
    if (n.split_value < lo || n.split_value > hi) {
      return "node " + std::to_string(id) + " split value outside observed range";
    }
    for (int child : {n.left, n.right}) {
      const TreeNode& c = tree.node(child);
      if (c.parent != id) return "child " + std::to_string(child) + " has wrong parent";
      if (c.depth != n.depth + 1) return "child " + std::to_string(child) + " has wrong depth";
      stack.push_back(child);
    }
  }

  // Every row routes to a reachable terminal, and no terminal is empty.
  std::vector<int> counts(tree.arena_size(), 0);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    int id = tree.route(data.row(i));
    if (!seen[id]) return "row routed to unreachable node";
    ++counts[id];
  }
  for (int id : tree.terminal_ids()) {
    if (counts[id] == 0) return "terminal node " + std::to_string(id) + " holds no training rows";
  }
  return "";
}

}  // namespace hebart
