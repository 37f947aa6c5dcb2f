#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hebart {

// Standardization applied to the response at ingestion: z = (y - center)/scale
// with scale the population standard deviation (divide by n). Covariates are
// kept on their raw scale; tree splits are invariant to monotone transforms.
struct ResponseTransform {
  double center = 0.0;
  double scale = 1.0;

  double apply(double raw) const { return (raw - center) / scale; }
  double invert(double scaled) const { return scaled * scale + center; }
};

// Returns the z-scored copy plus the transform that undoes it.
// `name` is used in the error message when the input is constant.
std::pair<std::vector<double>, ResponseTransform> standardize(std::span<const double> raw,
                                                              const std::string& name = "response");

// Training data: covariate matrix (row major), standardized response, and
// group labels mapped to dense indices 0..num_groups-1 in first-appearance
// order. Immutable after construction; safe to share across threads.
class Dataset {
 public:
  Dataset(std::vector<double> covariates_rowmajor, std::size_t num_covariates,
          std::vector<double> raw_response, std::vector<std::string> group_labels,
          std::vector<std::string> covariate_names = {}, std::string response_name = "y",
          std::string group_name = "group");

  std::size_t num_rows() const { return n_; }
  std::size_t num_covariates() const { return d_; }
  std::size_t num_groups() const { return group_labels_.size(); }

  // Standardized response.
  const std::vector<double>& response() const { return response_; }
  double raw_response(std::size_t i) const { return transform_.invert(response_[i]); }
  const ResponseTransform& transform() const { return transform_; }

  std::span<const double> row(std::size_t i) const {
    return {covariates_.data() + i * d_, d_};
  }
  double covariate(std::size_t i, std::size_t j) const { return covariates_[i * d_ + j]; }

  int group(std::size_t i) const { return group_index_[i]; }
  const std::vector<int>& groups() const { return group_index_; }
  const std::string& group_label(int dense_index) const { return group_labels_[dense_index]; }
  const std::vector<std::string>& group_labels() const { return group_labels_; }
  // Dense index for a raw label, or -1 if the label was never seen.
  int find_group(const std::string& label) const;

  const std::vector<std::string>& covariate_names() const { return covariate_names_; }
  const std::string& response_name() const { return response_name_; }
  const std::string& group_name() const { return group_name_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> covariates_;  // n_ * d_, row major
  std::vector<double> response_;    // standardized
  ResponseTransform transform_;
  std::vector<int> group_index_;
  std::vector<std::string> group_labels_;
  std::unordered_map<std::string, int> group_lookup_;
  std::vector<std::string> covariate_names_;
  std::string response_name_;
  std::string group_name_;
};

// Reads a CSV with a header row and builds a Dataset. Errors carry
// row/column context. Row order is preserved.
Dataset ingest_csv(const std::string& path, const std::string& response_col,
                   const std::string& group_col, const std::vector<std::string>& covariate_cols);

// Same construction path for rows already in memory (simulation, CV folds).
Dataset make_dataset(std::vector<double> covariates_rowmajor, std::size_t num_covariates,
                     std::vector<double> raw_response, std::vector<std::string> group_labels,
                     std::vector<std::string> covariate_names = {}, std::string response_name = "y",
                     std::string group_name = "group");

}  // namespace hebart
