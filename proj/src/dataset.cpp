#include "hebart/dataset.hpp"

#include <cmath>

#include "hebart/csv.hpp"
#include "hebart/util.hpp"

namespace hebart {

std::pair<std::vector<double>, ResponseTransform> standardize(std::span<const double> raw,
                                                              const std::string& name) {
  if (raw.empty()) fail(ErrorKind::Schema, "cannot standardize empty column '" + name + "'");
  double mean = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) fail(ErrorKind::Schema, "non-finite value in column '" + name + "'");
    mean += x;
  }
  mean /= static_cast<double>(raw.size());
  double ss = 0.0;
  for (double x : raw) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / static_cast<double>(raw.size()));
  if (!(sd > 0.0)) fail(ErrorKind::Schema, "constant column '" + name + "' cannot be standardized");
  ResponseTransform t{mean, sd};
  std::vector<double> scaled(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = t.apply(raw[i]);
  return {std::move(scaled), t};
}

Dataset::Dataset(std::vector<double> covariates_rowmajor, std::size_t num_covariates,
                 std::vector<double> raw_response, std::vector<std::string> group_labels,
                 std::vector<std::string> covariate_names, std::string response_name,
                 std::string group_name)
    : d_(num_covariates),
      covariates_(std::move(covariates_rowmajor)),
      covariate_names_(std::move(covariate_names)),
      response_name_(std::move(response_name)),
      group_name_(std::move(group_name)) {
  n_ = raw_response.size();
  if (n_ == 0) fail(ErrorKind::Schema, "dataset is empty");
  if (d_ == 0) fail(ErrorKind::Schema, "dataset has no covariates");
  if (covariates_.size() != n_ * d_) {
    fail(ErrorKind::Schema, "covariate matrix size does not match rows x columns");
  }
  if (group_labels.size() != n_) {
    fail(ErrorKind::Schema, "group column length does not match response length");
  }
  for (double x : covariates_) {
    if (!std::isfinite(x)) fail(ErrorKind::Schema, "non-finite covariate value");
  }
  if (covariate_names_.empty()) {
    for (std::size_t j = 0; j < d_; ++j) covariate_names_.push_back("x" + std::to_string(j + 1));
  }

  auto [scaled, t] = standardize(raw_response, response_name_);
  response_ = std::move(scaled);
  transform_ = t;

  group_index_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto it = group_lookup_.find(group_labels[i]);
    if (it == group_lookup_.end()) {
      int idx = static_cast<int>(group_labels_.size());
      group_lookup_.emplace(group_labels[i], idx);
      group_labels_.push_back(group_labels[i]);
      group_index_[i] = idx;
    } else {
      group_index_[i] = it->second;
    }
  }
}

int Dataset::find_group(const std::string& label) const {
  auto it = group_lookup_.find(label);
  return it == group_lookup_.end() ? -1 : it->second;
}

Dataset ingest_csv(const std::string& path, const std::string& response_col,
                   const std::string& group_col, const std::vector<std::string>& covariate_cols) {
  if (covariate_cols.empty()) fail(ErrorKind::Config, "no covariate columns given");
  CsvTable table = read_csv(path);
  if (table.rows.empty()) fail(ErrorKind::Schema, "'" + path + "' has a header but no data rows");

  std::size_t response_idx = table.column_index(response_col);
  std::size_t group_idx = table.column_index(group_col);
  std::vector<std::size_t> cov_idx;
  for (const auto& c : covariate_cols) cov_idx.push_back(table.column_index(c));

  std::size_t n = table.rows.size();
  std::size_t d = cov_idx.size();
  std::vector<double> covariates(n * d);
  std::vector<double> response(n);
  std::vector<std::string> groups(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    std::size_t file_row = i + 2;  // 1-based, after header
    response[i] = parse_numeric_cell(row[response_idx], file_row, response_col);
    groups[i] = row[group_idx];
    if (groups[i].empty()) {
      fail(ErrorKind::Schema,
           "empty group label at row " + std::to_string(file_row) + ", column '" + group_col + "'");
    }
    for (std::size_t j = 0; j < d; ++j) {
      covariates[i * d + j] = parse_numeric_cell(row[cov_idx[j]], file_row, covariate_cols[j]);
    }
  }
  return Dataset(std::move(covariates), d, std::move(response), std::move(groups), covariate_cols,
                 response_col, group_col);
}

Dataset make_dataset(std::vector<double> covariates_rowmajor, std::size_t num_covariates,
                     std::vector<double> raw_response, std::vector<std::string> group_labels,
                     std::vector<std::string> covariate_names, std::string response_name,
                     std::string group_name) {
  return Dataset(std::move(covariates_rowmajor), num_covariates, std::move(raw_response),
                 std::move(group_labels), std::move(covariate_names), std::move(response_name),
                 std::move(group_name));
}

}  // namespace hebart
