#include "hebart/sampler.hpp"

#include <cmath>

#include "hebart/distributions.hpp"
#include "hebart/tree_ops.hpp"
#include "hebart/util.hpp"

namespace hebart {

namespace {

double effective_k1(const SamplerState& state, Mode mode) {
  return mode == Mode::Bart ? 0.0 : state.k1;
}

MoveProbs move_probs(const Hyperparams& hp) {
  return MoveProbs{hp.p_grow, hp.p_prune, hp.p_change, hp.p_swap};
}

// Collapsed likelihood + structure prior of one tree on its residuals.
double tree_log_target(const Tree& tree, const std::vector<int>& assignment,
                       const std::vector<double>& residuals, const Dataset& data,
                       const Hyperparams& hp, double tau, double k1, int num_trees) {
  auto stats = collect_tree_suff_stats(residuals, assignment, tree.arena_size(), data.groups());
  double ll = 0.0;
  for (int id : tree.terminal_ids()) {
    ll += node_log_marginal(stats[id], tau, k1, hp.k2, num_trees);
  }
  return ll + log_tree_prior(tree, hp.tree_alpha, hp.tree_beta, data);
}

// Draws fresh node and group means for tree p from its full conditionals
// and refreshes the cached contribution/fitted values.
void refresh_node_params(SamplerState& state, const Dataset& data, const Hyperparams& hp,
                         Mode mode, std::size_t p, const std::vector<double>& residuals,
                         std::vector<std::vector<double>>& contribs, RngStream& rng) {
  Tree& tree = state.forest[p];
  int num_trees = static_cast<int>(state.forest.size());
  double k1 = effective_k1(state, mode);
  auto stats = collect_tree_suff_stats(residuals, state.node_assignment[p], tree.arena_size(),
                                       data.groups());
  for (int id : tree.terminal_ids()) {
    double mu_b = sample_node_mu(stats[id], state.tau, k1, hp.k2, num_trees, rng);
    tree.node(id).mu = mu_b;
    tree.node(id).group_mus.clear();
    if (mode == Mode::Hebart) {
      for (const auto& g : stats[id].groups) {
        double mu_bj = sample_group_mu(mu_b, g.count, g.sum, state.tau, state.k1, num_trees, rng);
        tree.set_group_mu(id, g.group, mu_bj);
      }
    }
  }
  auto new_contrib = tree_contribution(tree, state.node_assignment[p], data);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    state.fitted[i] += new_contrib[i] - contribs[p][i];
  }
  contribs[p] = std::move(new_contrib);
}

}  // namespace

const char* mode_name(Mode mode) { return mode == Mode::Hebart ? "hebart" : "bart"; }

Mode mode_from_name(const std::string& name) {
  if (name == "hebart") return Mode::Hebart;
  if (name == "bart") return Mode::Bart;
  fail(ErrorKind::Config, "unknown mode '" + name + "' (expected hebart or bart)");
}

double sample_node_mu(const NodeSuffStats& stats, double tau, double k1, double k2, int num_trees,
                      RngStream& rng) {
  if (!(tau > 0.0) || !(k2 > 0.0)) {
    fail(ErrorKind::Numeric, "sample_node_mu: tau and k2 must be positive");
  }
  if (k1 < 0.0) fail(ErrorKind::Numeric, "sample_node_mu: k1 must be >= 0");
  if (stats.n <= 0) fail(ErrorKind::Numeric, "sample_node_mu: empty node");
  double p = static_cast<double>(num_trees);
  CollapsedTerms ct = collapsed_terms(stats, k1 / p);
  double precision_units = ct.s + p / k2;  // posterior precision is tau * this
  double mean = ct.t / precision_units;
  return sample_normal(mean, tau * precision_units, rng);
}

double sample_group_mu(double mu_b, int n_bj, double s_bj, double tau, double k1, int num_trees,
                       RngStream& rng) {
  if (!(tau > 0.0) || !(k1 > 0.0)) {
    fail(ErrorKind::Numeric, "sample_group_mu: tau and k1 must be positive");
  }
  if (n_bj < 1) fail(ErrorKind::Numeric, "sample_group_mu: group not present in node");
  double pk1 = static_cast<double>(num_trees) / k1;
  double precision_units = static_cast<double>(n_bj) + pk1;
  double mean = (pk1 * mu_b + s_bj) / precision_units;
  return sample_normal(mean, tau * precision_units, rng);
}

double sample_tau(const SamplerState& state, const Dataset& data, const Hyperparams& hp, Mode mode,
                  RngStream& rng) {
  const auto& y = data.response();
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double d = y[i] - state.fitted[i];
    sse += d * d;
  }

  double p = static_cast<double>(state.forest.size());
  long long num_terminals = 0;
  long long num_group_params = 0;
  double mu_sq = 0.0;        // sum over terminals of mu_b^2
  double group_dev_sq = 0.0; // sum over (terminal, group) of (mu_bj - mu_b)^2
  for (const auto& tree : state.forest) {
    for (int id : tree.terminal_ids()) {
      const TreeNode& node = tree.node(id);
      ++num_terminals;
      mu_sq += node.mu * node.mu;
      for (const auto& [g, mu_bj] : node.group_mus) {
        (void)g;
        ++num_group_params;
        group_dev_sq += (mu_bj - node.mu) * (mu_bj - node.mu);
      }
    }
  }

  double shape = 0.5 * static_cast<double>(static_cast<long long>(y.size()) + num_terminals +
                                           num_group_params) +
                 hp.tau_shape;
  double rate = 0.5 * sse + p / (2.0 * hp.k2) * mu_sq + hp.tau_rate;
  if (mode == Mode::Hebart && num_group_params > 0) {
    rate += p / (2.0 * state.k1) * group_dev_sq;
  }
  return sample_gamma(shape, rate, rng);
}

double mh_tree_log_acceptance(const SamplerState& state, const Dataset& data,
                              const Hyperparams& hp, Mode mode, std::size_t p,
                              const MoveProposal& proposal) {
  auto residuals = partial_residuals(state, data, p);
  int num_trees = static_cast<int>(state.forest.size());
  double k1 = effective_k1(state, mode);
  double cur = tree_log_target(state.forest[p], state.node_assignment[p], residuals, data, hp,
                               state.tau, k1, num_trees);
  auto new_assignment = route_assignment(proposal.new_tree, data);
  double prop = tree_log_target(proposal.new_tree, new_assignment, residuals, data, hp, state.tau,
                                k1, num_trees);
  return prop - cur + proposal.log_proposal_ratio;
}

bool mh_tree_update(SamplerState& state, const Dataset& data, const Hyperparams& hp, Mode mode,
                    std::size_t p, RngStream& rng) {
  MoveProposal proposal = propose(state.forest[p], data, move_probs(hp), rng);
  if (proposal.noop) return false;
  double log_alpha = mh_tree_log_acceptance(state, data, hp, mode, p, proposal);
  if (std::log(rng.uniform_open01()) < log_alpha) {
    state.node_assignment[p] = route_assignment(proposal.new_tree, data);
    state.forest[p] = std::move(proposal.new_tree);
    return true;
  }
  return false;
}

double k1_log_acceptance(const SamplerState& state, const Dataset& data, const Hyperparams& hp,
                         double k1_star) {
  // Evaluate both k1 values on the same per-tree sufficient statistics.
  int num_trees = static_cast<int>(state.forest.size());
  double cur = 0.0, prop = 0.0;
  for (std::size_t p = 0; p < state.forest.size(); ++p) {
    auto residuals = partial_residuals(state, data, p);
    auto stats = collect_tree_suff_stats(residuals, state.node_assignment[p],
                                         state.forest[p].arena_size(), data.groups());
    for (int id : state.forest[p].terminal_ids()) {
      cur += node_log_marginal(stats[id], state.tau, state.k1, hp.k2, num_trees);
      prop += node_log_marginal(stats[id], state.tau, k1_star, hp.k2, num_trees);
    }
  }
  return prop - cur + weibull_logpdf(k1_star, hp.weibull_scale, hp.weibull_shape) -
         weibull_logpdf(state.k1, hp.weibull_scale, hp.weibull_shape);
}

bool mh_k1_update(SamplerState& state, const Dataset& data, const Hyperparams& hp,
                  RngStream& rng) {
  double k1_star = sample_uniform(hp.k1_proposal_low, hp.k1_proposal_high, rng);
  if (!(k1_star > 0.0)) return false;  // outside the Weibull support
  double log_alpha = k1_log_acceptance(state, data, hp, k1_star);
  if (std::log(rng.uniform_open01()) < log_alpha) {
    state.k1 = k1_star;
    return true;
  }
  return false;
}

PosteriorDraws run_chain(const Dataset& data, const ChainConfig& config, RngStream& rng) {
  const Hyperparams& hp = config.hyperparams;
  hp.validate();
  if (config.mode == Mode::Bart) {
    log_info("ungrouped mode: k1 proposal window and Weibull prior are ignored");
  }

  double tau0 = config.init_tau > 0.0 ? config.init_tau : hp.tau_shape / hp.tau_rate;
  double k10 = config.init_k1 > 0.0 ? config.init_k1
                                    : 0.5 * (hp.k1_proposal_low + hp.k1_proposal_high);
  SamplerState state = init_state(data, hp.num_trees, tau0, k10);
  std::vector<std::vector<double>> contribs(hp.num_trees,
                                            std::vector<double>(data.num_rows(), 0.0));

  PosteriorDraws draws;
  draws.mode = config.mode;
  draws.num_trees = hp.num_trees;

  for (int iter = 1; iter <= hp.iterations; ++iter) {
    SweepInfo info;
    info.iteration = iter;
    info.tree_accepted.resize(hp.num_trees, false);

    for (std::size_t p = 0; p < state.forest.size(); ++p) {
      // Residuals are fixed for the whole tree-p block; take them from the
      // cached contribution before the structure move swaps parameters out.
      std::vector<double> residuals(data.num_rows());
      for (std::size_t i = 0; i < data.num_rows(); ++i) {
        residuals[i] = data.response()[i] - (state.fitted[i] - contribs[p][i]);
      }
      if (!config.fix_tree_structure) {
        info.tree_accepted[p] = mh_tree_update(state, data, hp, config.mode, p, rng);
      }
      refresh_node_params(state, data, hp, config.mode, p, residuals, contribs, rng);
    }

    if (!config.fix_tau) {
      state.tau = sample_tau(state, data, hp, config.mode, rng);
    }
    if (config.mode == Mode::Hebart && !config.fix_k1) {
      info.k1_accepted = mh_k1_update(state, data, hp, rng);
    }

    if (config.validate_each_sweep) {
      auto fresh = recompute_fitted(state, data);
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        if (std::abs(fresh[i] - state.fitted[i]) > 1e-10) {
          fail(ErrorKind::Numeric, "cached fitted values drifted from a from-scratch recompute");
        }
      }
      for (const Tree& tree : state.forest) {
        std::string err = check_tree(tree, data);
        if (!err.empty()) fail(ErrorKind::Numeric, "tree invariant violated: " + err);
      }
    }

    info.tau = state.tau;
    info.k1 = state.k1;
    if (config.progress) config.progress(info);

    bool keep = iter > hp.burn_in && (iter - hp.burn_in) % hp.thin == 0;
    if (keep) {
      if (!(std::isfinite(state.tau) && state.tau > 0.0 && std::isfinite(state.k1) &&
            state.k1 > 0.0)) {
        fail(ErrorKind::Numeric, "chain produced a non-finite or non-positive parameter");
      }
      draws.iterations.push_back(iter);
      draws.taus.push_back(state.tau);
      draws.k1s.push_back(state.k1);
      int accepted = 0;
      for (bool a : info.tree_accepted) accepted += a ? 1 : 0;
      draws.tree_accepts.push_back(accepted);
      draws.k1_accepts.push_back(info.k1_accepted ? 1 : 0);
      if (config.store_trees) {
        draws.forests.push_back(state.forest);
      } else {
        draws.fitted.push_back(state.fitted);
      }
    }
  }
  return draws;
}

PosteriorDraws run_bart_mode(const Dataset& data, const ChainConfig& config, RngStream& rng) {
  ChainConfig bart = config;
  bart.mode = Mode::Bart;
  return run_chain(data, bart, rng);
}

}  // namespace hebart
