#pragma once

#include <string>
#include <vector>

#include "hebart/dataset.hpp"
#include "hebart/model_io.hpp"
#include "hebart/rng.hpp"

namespace hebart {

// Raw (unstandardized) training columns as read from a CSV; fold and
// holdout splits slice this before standardization so every sub-fit
// standardizes on its own training rows.
struct RawTable {
  std::vector<double> covariates;  // row major, n x d
  std::size_t num_covariates = 0;
  std::vector<double> response;
  std::vector<std::string> groups;
  std::vector<std::string> covariate_names;
  std::string response_name;
  std::string group_name;

  std::size_t num_rows() const { return response.size(); }
};

RawTable load_raw_table(const std::string& path, const std::string& response_col,
                        const std::string& group_col,
                        const std::vector<std::string>& covariate_cols);

Dataset dataset_from_rows(const RawTable& table, const std::vector<int>& rows);

struct HoldoutSplit {
  std::vector<int> train;
  std::vector<int> test;
};

// Hold out every row of the named groups, then top up the test set with a
// seeded random sample of the remaining rows until `fraction` of all rows
// is held out (fraction 0 keeps just the group rows).
HoldoutSplit split_holdout(const RawTable& table, const std::vector<std::string>& holdout_groups,
                           double fraction, RngStream& rng);

// Seeded shuffle, then contiguous blocks; returns per-fold test rows.
// Folds partition 0..n-1.
std::vector<std::vector<int>> make_folds(std::size_t n, int k, RngStream& rng);

struct CrossvalSummary {
  std::vector<double> train_rmse;  // per fold, standardized scale
  std::vector<double> test_rmse;
  double mean_train = 0.0, mean_test = 0.0;
  double ci_train = 0.0, ci_test = 0.0;  // 1.96 * sd / sqrt(folds)
};

CrossvalSummary summarize_folds(const std::vector<double>& train_rmse,
                                const std::vector<double>& test_rmse);

// Entry point used by the binary: parses arguments and dispatches to the
// subcommands. Returns the process exit code (0 ok, 1 runtime failure,
// 2 usage error).
int run_cli(int argc, const char* const* argv);

}  // namespace hebart
