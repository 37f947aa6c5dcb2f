#pragma once

#include <string>
#include <vector>

#include "hebart/hyperparams.hpp"
#include "hebart/predict.hpp"
#include "hebart/sampler.hpp"

namespace hebart {

// Fully resolved run configuration: built-in defaults, overlaid by an
// optional config file, overlaid by command-line flags. The resolved
// form is persisted next to every fit so a run can be reproduced from
// the echoed file alone.
struct ResolvedConfig {
  Hyperparams hyperparams;
  Mode mode = Mode::Hebart;
  bool store_trees = true;
  double credible_level = 0.95;
  std::string response_col;
  std::string group_col;
  std::vector<std::string> covariate_cols;
};

void save_config(const std::string& path, const ResolvedConfig& config);

// Applies the keys present in the file on top of `base`; unknown keys are
// rejected so typos cannot silently fall back to defaults.
void apply_config_file(const std::string& path, ResolvedConfig& base);

// Versioned self-describing model container (JSON with a magic header).
// Layout is documented in the README.
void save_model(const std::string& path, const FittedModel& model);
FittedModel load_model(const std::string& path);

struct DrawsTable {
  std::vector<int> iterations;
  std::vector<double> taus;
  std::vector<double> k1s;
  std::vector<int> tree_accepts;
  std::vector<int> k1_accepts;
};

void write_draws_csv(const std::string& path, const PosteriorDraws& draws);
DrawsTable load_draws_csv(const std::string& path);

}  // namespace hebart
