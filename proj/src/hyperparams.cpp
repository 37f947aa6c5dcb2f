#include "hebart/hyperparams.hpp"

#include <cmath>

#include "hebart/util.hpp"

namespace hebart {

void Hyperparams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) fail(ErrorKind::Config, msg);
  };
  require(num_trees >= 1, "num_trees must be a positive integer");
  require(tree_alpha > 0.0 && tree_alpha < 1.0, "tree_alpha must lie in (0, 1)");
  require(tree_beta > 0.0, "tree_beta must be positive");
  require(k2 > 0.0, "k2 must be positive");
  require(tau_shape > 0.0, "tau_shape must be positive");
  require(tau_rate > 0.0, "tau_rate must be positive");
  require(weibull_scale > 0.0, "weibull_scale must be positive");
  require(weibull_shape > 0.0, "weibull_shape must be positive");
  require(k1_proposal_low >= 0.0, "k1_proposal_low must be non-negative");
  require(k1_proposal_high > k1_proposal_low, "k1_proposal_high must exceed k1_proposal_low");
  require(p_grow > 0.0 && p_prune > 0.0 && p_change > 0.0 && p_swap > 0.0,
          "move probabilities must all be positive");
  require(std::abs(p_grow + p_prune + p_change + p_swap - 1.0) < 1e-9,
          "move probabilities must sum to 1");
  require(iterations >= 1, "iterations must be a positive integer");
  require(burn_in >= 0 && burn_in <= iterations, "burn_in must satisfy 0 <= burn_in <= iterations");
  require(thin >= 1, "thin must be a positive integer");
}

}  // namespace hebart
