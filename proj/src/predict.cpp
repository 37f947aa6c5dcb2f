#include "hebart/predict.hpp"

#include <cmath>

#include "hebart/distributions.hpp"
#include "hebart/util.hpp"

namespace hebart {

int FittedModel::find_group(const std::string& label) const {
  for (std::size_t i = 0; i < group_labels.size(); ++i) {
    if (group_labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

Prediction predict_row(const FittedModel& model, std::span<const double> x,
                       const std::optional<std::string>& group, double level, RngStream& rng,
                       bool keep_draws) {
  if (!model.draws.has_forests()) {
    fail(ErrorKind::Schema, "model has no stored forests; refit with tree storage enabled");
  }
  if (x.size() != model.covariate_names.size()) {
    fail(ErrorKind::Schema, "covariate row has " + std::to_string(x.size()) +
                                " entries, model expects " +
                                std::to_string(model.covariate_names.size()));
  }
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::Config, "credible level must lie in (0, 1)");

  int g = -1;
  if (group.has_value() && model.mode == Mode::Hebart) g = model.find_group(*group);

  const PosteriorDraws& draws = model.draws;
  std::vector<double> sums(draws.draw_count());
  double p = static_cast<double>(draws.num_trees);
  for (int d = 0; d < draws.draw_count(); ++d) {
    double sum = 0.0;
    for (const Tree& tree : draws.forests[d]) {
      int id = tree.route(x);
      if (g >= 0) {
        if (const double* mu_bj = tree.find_group_mu(id, g)) {
          sum += *mu_bj;
        } else {
          // Trained group absent from this terminal: draw its effect from
          // the group-level prior at this draw's (k1, tau).
          double precision = draws.taus[d] * p / draws.k1s[d];
          sum += sample_normal(tree.node(id).mu, precision, rng);
        }
      } else {
        sum += tree.node(id).mu;
      }
    }
    sums[d] = sum;
  }

  double tail = 0.5 * (1.0 - level);
  Prediction out;
  out.point = model.transform.invert(mean_of(sums));
  out.lower = model.transform.invert(quantile_of(sums, tail));
  out.upper = model.transform.invert(quantile_of(sums, 1.0 - tail));
  if (keep_draws) out.draws = std::move(sums);
  return out;
}

std::vector<Prediction> predict_rows(const FittedModel& model,
                                     const std::vector<double>& covariates_rowmajor,
                                     std::size_t num_covariates,
                                     const std::vector<std::string>& groups, double level,
                                     const RngStream& base_rng, bool keep_draws) {
  if (num_covariates == 0) fail(ErrorKind::Schema, "predict: no covariates");
  std::size_t n = covariates_rowmajor.size() / num_covariates;
  if (!groups.empty() && groups.size() != n) {
    fail(ErrorKind::Schema, "predict: group column length does not match covariate rows");
  }
  std::vector<Prediction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> x(covariates_rowmajor.data() + i * num_covariates, num_covariates);
    std::optional<std::string> group;
    if (!groups.empty()) group = groups[i];
    RngStream row_rng = base_rng.split(i);
    out.push_back(predict_row(model, x, group, level, row_rng, keep_draws));
  }
  return out;
}

double rmse(std::span<const double> predictions, std::span<const double> truth) {
  if (predictions.size() != truth.size()) {
    fail(ErrorKind::Schema, "rmse: prediction and truth lengths differ");
  }
  if (predictions.empty()) fail(ErrorKind::Schema, "rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - truth[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predictions.size()));
}

}  // namespace hebart
