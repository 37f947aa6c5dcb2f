#pragma once

#include <string>
#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/rng.hpp"

namespace hebart {

// Generating values behind one simulated dataset: the residual precision,
// the scaling constants, and every region/group mean, kept for parameter
// recovery checks. Group means are indexed [region * J + group].
struct SimTruth {
  int n = 0;
  int num_groups = 0;
  int num_trees = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  double tau = 0.0;
  std::vector<double> split_values;             // per tree
  std::vector<std::vector<double>> region_mu;   // per tree: {left, right}
  std::vector<std::vector<double>> group_mu;    // per tree: 2 * J values

  double sqrt_k1_over_tau() const;
};

struct SimResult {
  Dataset data;
  SimTruth truth;
};

// Grouped synthetic data from a sum of single-split trees: a single
// covariate X ~ U(0,1), equiprobable group labels g1..gJ, one random
// cutpoint per tree drawn from the observed X values, region means
// mu_pr ~ N(0, (k2/P)/tau), group means mu_jpr ~ N(mu_pr, (k1/P)/tau),
// and y = sum_p mu_{j,p,region_p(x)} + N(0, 1/tau) with
// tau ~ Gamma(tau_shape, tau_rate).
SimResult simulate_eq8(int n, int num_groups, int num_trees, double k1, double k2,
                       double tau_shape, double tau_rate, RngStream& rng);

// Dataset as a CSV readable by the ingest path (columns y, x, group; raw
// response scale).
void write_simulated_csv(const std::string& path, const Dataset& data);

// Truth sidecar in a line-oriented "key = value" text format.
void write_truth_sidecar(const std::string& path, const SimTruth& truth);
SimTruth load_truth_sidecar(const std::string& path);

}  // namespace hebart
