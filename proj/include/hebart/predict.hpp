#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/hyperparams.hpp"
#include "hebart/rng.hpp"
#include "hebart/sampler.hpp"

namespace hebart {

// Everything needed to predict from a finished fit, independent of the
// training Dataset object: the stored draws plus the response transform
// and label table captured at training time.
struct FittedModel {
  Mode mode = Mode::Hebart;
  Hyperparams hyperparams;
  ResponseTransform transform;
  std::string response_name = "y";
  std::string group_name = "group";
  std::vector<std::string> covariate_names;
  std::vector<std::string> group_labels;
  PosteriorDraws draws;

  int find_group(const std::string& label) const;
};

// Point prediction (posterior mean) with equal-tailed credible bounds,
// all on the raw response scale.
struct Prediction {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> draws;  // per stored draw, standardized scale (optional)
};

// Posterior predictive mean/interval for one covariate row. Per draw and
// tree, the routed terminal contributes
//   - the group mean when the group is known and present in the terminal,
//   - a fresh draw from N(mu_b, (k1/P)/tau) at that draw's (k1, tau) when
//     the group was trained but is absent from the terminal,
//   - the overall mean mu_b when the group is unknown or untrained.
// `rng` only feeds the middle case; callers give each row its own derived
// stream so results do not depend on evaluation order.
Prediction predict_row(const FittedModel& model, std::span<const double> x,
                       const std::optional<std::string>& group, double level, RngStream& rng,
                       bool keep_draws = false);

// Row-per-row prediction over a covariate matrix (row major). Groups may
// be empty (no group information for any row).
std::vector<Prediction> predict_rows(const FittedModel& model,
                                     const std::vector<double>& covariates_rowmajor,
                                     std::size_t num_covariates,
                                     const std::vector<std::string>& groups, double level,
                                     const RngStream& base_rng, bool keep_draws = false);

// Root mean squared error between point predictions and truth.
double rmse(std::span<const double> predictions, std::span<const double> truth);

}  // namespace hebart
