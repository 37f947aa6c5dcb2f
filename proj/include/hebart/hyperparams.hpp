#pragma once

#include <cstdint>

namespace hebart {

// Every fixed constant of the model and its MCMC schedule. Defaults follow
// the reference configuration; everything is overridable from the CLI or a
// config file. `validate()` throws a Config error on any violated bound.
struct Hyperparams {
  int num_trees = 10;

  // Tree prior: a node at depth d splits with probability
  // tree_alpha * (1 + d)^(-tree_beta).
  double tree_alpha = 0.95;
  double tree_beta = 2.0;

  // Precision scalings for the terminal-node priors: overall node mean
  // mu_b ~ N(0, (k2/P) / tau); per-group mean mu_bj ~ N(mu_b, (k1/P) / tau).
  double k2 = 5.0;

  // Residual precision prior tau ~ Gamma(tau_shape, tau_rate).
  double tau_shape = 0.5;
  double tau_rate = 1.0;

  // k1 prior Weibull(weibull_scale, weibull_shape) and its uniform
  // Metropolis proposal window [k1_proposal_low, k1_proposal_high).
  double weibull_scale = 10.0;
  double weibull_shape = 1.0;
  double k1_proposal_low = 0.0;
  double k1_proposal_high = 20.0;

  // Structure-move mix; must be positive and sum to 1.
  double p_grow = 0.25;
  double p_prune = 0.25;
  double p_change = 0.40;
  double p_swap = 0.10;

  // MCMC schedule.
  int iterations = 1500;
  int burn_in = 500;
  int thin = 1;
  std::uint64_t rng_seed = 1;

  void validate() const;

  int stored_draws() const { return (iterations - burn_in) / thin; }
};

}  // namespace hebart
