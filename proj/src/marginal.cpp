#include "hebart/marginal.hpp"

#include <algorithm>
#include <cmath>

#include "hebart/util.hpp"

namespace hebart {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

NodeSuffStats collect_suff_stats(const std::vector<double>& residuals,
                                 const std::vector<int>& rows, const std::vector<int>& groups) {
  if (rows.empty()) fail(ErrorKind::Numeric, "collect_suff_stats: empty node");
  NodeSuffStats stats;
  for (int i : rows) {
    double r = residuals[i];
    int g = groups[i];
    stats.n += 1;
    stats.sum += r;
    stats.sum_sq += r * r;
    auto it = std::lower_bound(stats.groups.begin(), stats.groups.end(), g,
                               [](const GroupStat& a, int b) { return a.group < b; });
    if (it != stats.groups.end() && it->group == g) {
      it->count += 1;
      it->sum += r;
    } else {
      stats.groups.insert(it, GroupStat{g, 1, r});
    }
  }
  return stats;
}

std::vector<NodeSuffStats> collect_tree_suff_stats(const std::vector<double>& residuals,
                                                   const std::vector<int>& assignment,
                                                   std::size_t arena_size,
                                                   const std::vector<int>& groups) {
  std::vector<NodeSuffStats> stats(arena_size);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    NodeSuffStats& s = stats[assignment[i]];
    double r = residuals[i];
    int g = groups[i];
    s.n += 1;
    s.sum += r;
    s.sum_sq += r * r;
    auto it = std::lower_bound(s.groups.begin(), s.groups.end(), g,
                               [](const GroupStat& a, int b) { return a.group < b; });
    if (it != s.groups.end() && it->group == g) {
      it->count += 1;
      it->sum += r;
    } else {
      s.groups.insert(it, GroupStat{g, 1, r});
    }
  }
  return stats;
}

CollapsedTerms collapsed_terms(const NodeSuffStats& stats, double c1) {
  std::vector<std::pair<long long, double>> sorted;
  sorted.reserve(stats.groups.size());
  for (const auto& g : stats.groups) sorted.emplace_back(g.count, g.sum);
  std::sort(sorted.begin(), sorted.end());

  CollapsedTerms out;
  for (const auto& [count, sum] : sorted) {
    double nj = static_cast<double>(count);
    double denom = 1.0 + c1 * nj;
    out.log_det_block += std::log1p(c1 * nj);
    out.s += nj / denom;
    out.t += sum / denom;
    out.shrink += c1 * sum * sum / denom;
  }
  return out;
}

double node_log_marginal(const NodeSuffStats& stats, double tau, double k1, double k2,
                         int num_trees) {
  if (!(tau > 0.0)) fail(ErrorKind::Numeric, "node_log_marginal: tau must be positive");
  if (k1 < 0.0 || k2 < 0.0) fail(ErrorKind::Numeric, "node_log_marginal: k1 and k2 must be >= 0");
  if (num_trees < 1) fail(ErrorKind::Numeric, "node_log_marginal: need at least one tree");
  if (stats.n <= 0) fail(ErrorKind::Numeric, "node_log_marginal: empty node");

  double c1 = k1 / static_cast<double>(num_trees);
  double c2 = k2 / static_cast<double>(num_trees);
  CollapsedTerms ct = collapsed_terms(stats, c1);

  double n = static_cast<double>(stats.n);
  double log_det = ct.log_det_block + std::log1p(c2 * ct.s);
  double quad = (stats.sum_sq - ct.shrink) - c2 * ct.t * ct.t / (1.0 + c2 * ct.s);
  return -0.5 * n * kLogTwoPi + 0.5 * n * std::log(tau) - 0.5 * log_det - 0.5 * tau * quad;
}

double forest_log_marginal(const SamplerState& state, const Dataset& data, double k1, double k2) {
  double total = 0.0;
  int num_trees = static_cast<int>(state.forest.size());
  for (std::size_t p = 0; p < state.forest.size(); ++p) {
    auto residuals = partial_residuals(state, data, p);
    auto stats = collect_tree_suff_stats(residuals, state.node_assignment[p],
                                         state.forest[p].arena_size(), data.groups());
    for (int id : state.forest[p].terminal_ids()) {
      total += node_log_marginal(stats[id], state.tau, k1, k2, num_trees);
    }
  }
  return total;
}

}  // namespace hebart
