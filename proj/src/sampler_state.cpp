#include "hebart/sampler_state.hpp"

namespace hebart {

SamplerState init_state(const Dataset& data, int num_trees, double tau0, double k10) {
  SamplerState state;
  state.tau = tau0;
  state.k1 = k10;
  state.fitted.assign(data.num_rows(), 0.0);
  for (int p = 0; p < num_trees; ++p) {
    state.forest.push_back(Tree::stump());
    state.node_assignment.emplace_back(data.num_rows(), state.forest.back().root());
  }
  return state;
}

std::vector<int> route_assignment(const Tree& tree, const Dataset& data) {
  std::vector<int> assignment(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    assignment[i] = tree.route(data.row(i));
  }
  return assignment;
}

std::vector<double> tree_contribution(const Tree& tree, const std::vector<int>& assignment,
                                      const Dataset& data) {
  std::vector<double> g(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    g[i] = tree.terminal_value(assignment[i], data.group(i));
  }
  return g;
}

std::vector<double> recompute_fitted(const SamplerState& state, const Dataset& data) {
  std::vector<double> fitted(data.num_rows(), 0.0);
  for (std::size_t p = 0; p < state.forest.size(); ++p) {
    auto assignment = route_assignment(state.forest[p], data);
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
      fitted[i] += state.forest[p].terminal_value(assignment[i], data.group(i));
    }
  }
  return fitted;
}

std::vector<double> partial_residuals(const SamplerState& state, const Dataset& data,
                                      std::size_t p) {
  const auto& y = data.response();
  auto g = tree_contribution(state.forest[p], state.node_assignment[p], data);
  std::vector<double> r(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    r[i] = y[i] - (state.fitted[i] - g[i]);
  }
  return r;
}

}  // namespace hebart
