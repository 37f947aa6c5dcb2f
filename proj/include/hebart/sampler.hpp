#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/hyperparams.hpp"
#include "hebart/marginal.hpp"
#include "hebart/rng.hpp"
#include "hebart/sampler_state.hpp"
#include "hebart/tree_ops.hpp"

namespace hebart {

// Hebart: terminal nodes carry an overall mean plus per-group means.
// Bart: the grouping layer is disabled; terminal nodes carry only the
// overall mean and k1 plays no role.
enum class Mode { Hebart, Bart };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct SweepInfo {
  int iteration = 0;
  double tau = 0.0;
  double k1 = 0.0;
  std::vector<bool> tree_accepted;
  bool k1_accepted = false;
};

struct ChainConfig {
  Hyperparams hyperparams;
  Mode mode = Mode::Hebart;
  bool store_trees = true;
  std::function<void(const SweepInfo&)> progress;

  // Diagnostic holds: keep a block of the Gibbs sweep fixed. Used by the
  // conjugate-model checks; all off in normal runs.
  bool fix_tree_structure = false;
  bool fix_tau = false;
  bool fix_k1 = false;

  // After every sweep, re-route and re-sum everything from scratch and
  // fail loudly on any cached-state drift or tree invariant violation.
  bool validate_each_sweep = false;

  // Optional overrides for the initial tau / k1 (defaults: prior mean and
  // proposal-window midpoint).
  double init_tau = -1.0;
  double init_k1 = -1.0;
};

// Post-burn-in draws at the configured thinning. Forests are deep copies;
// when store_trees is off, the per-draw in-sample fitted values are kept
// instead so training error is still available.
struct PosteriorDraws {
  Mode mode = Mode::Hebart;
  int num_trees = 0;
  std::vector<int> iterations;
  std::vector<double> taus;
  std::vector<double> k1s;
  std::vector<int> tree_accepts;       // accepted structure moves in the sweep
  std::vector<std::uint8_t> k1_accepts;
  std::vector<std::vector<Tree>> forests;
  std::vector<std::vector<double>> fitted;

  int draw_count() const { return static_cast<int>(taus.size()); }
  bool has_forests() const { return !forests.empty(); }
};

// Conditional draw of a terminal node's overall mean, with the group means
// integrated out:
//   mu_b ~ N( t / (s + P/k2), tau^-1 / (s + P/k2) ),
// where s = 1'Psi^-1 1 and t = 1'Psi^-1 r reduce to per-group sums.
double sample_node_mu(const NodeSuffStats& stats, double tau, double k1, double k2, int num_trees,
                      RngStream& rng);

// Conditional draw of one group mean given the node mean:
//   mu_bj ~ N( (P mu_b / k1 + S_bj) / (n_bj + P/k1), tau^-1 / (n_bj + P/k1) ).
double sample_group_mu(double mu_b, int n_bj, double s_bj, double tau, double k1, int num_trees,
                       RngStream& rng);

// Gamma full conditional of the residual precision. The shape counts the
// instantiated parameters: N data terms, one per terminal node, and (in
// grouped mode) one per present (terminal, group) pair.
double sample_tau(const SamplerState& state, const Dataset& data, const Hyperparams& hp, Mode mode,
                  RngStream& rng);

// Log acceptance ratio of a structure proposal for tree p evaluated on its
// current partial residuals (marginal likelihood + tree prior + proposal
// correction). The proposal's assignment is routed internally.
double mh_tree_log_acceptance(const SamplerState& state, const Dataset& data,
                              const Hyperparams& hp, Mode mode, std::size_t p,
                              const MoveProposal& proposal);

// One Metropolis structure update of tree p. Returns whether the proposal
// was accepted; no-op proposals are rejected outright.
bool mh_tree_update(SamplerState& state, const Dataset& data, const Hyperparams& hp, Mode mode,
                    std::size_t p, RngStream& rng);

double k1_log_acceptance(const SamplerState& state, const Dataset& data, const Hyperparams& hp,
                         double k1_star);

// Uniform-window Metropolis step for k1 (the proposal is symmetric, so
// only likelihood and Weibull prior enter the ratio).
bool mh_k1_update(SamplerState& state, const Dataset& data, const Hyperparams& hp, RngStream& rng);

// The full Metropolis-within-Gibbs loop: per tree a structure update on
// partial residuals followed by fresh node/group mean draws, then the tau
// draw, then the k1 step. Draws are recorded after burn-in at the
// configured thinning.
PosteriorDraws run_chain(const Dataset& data, const ChainConfig& config, RngStream& rng);

// Same loop with the grouping layer disabled (mode forced to Bart).
PosteriorDraws run_bart_mode(const Dataset& data, const ChainConfig& config, RngStream& rng);

}  // namespace hebart
