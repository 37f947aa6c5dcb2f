#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "hebart/predict.hpp"
#include "hebart/sampler.hpp"
#include "hebart/util.hpp"

using namespace hebart;

namespace {

// Minimal one-draw model: a single stump with mu = 0.4 and group "a"
// carrying 0.7, identity response transform.
FittedModel stump_model() {
  FittedModel model;
  model.mode = Mode::Hebart;
  model.transform = ResponseTransform{0.0, 1.0};
  model.covariate_names = {"x"};
  model.group_labels = {"a"};
  Tree stump = Tree::stump();
  stump.node(stump.root()).mu = 0.4;
  stump.set_group_mu(stump.root(), 0, 0.7);
  model.draws.mode = Mode::Hebart;
  model.draws.num_trees = 1;
  model.draws.iterations = {1};
  model.draws.taus = {1.0};
  model.draws.k1s = {2.0};
  model.draws.tree_accepts = {0};
  model.draws.k1_accepts = {0};
  model.draws.forests.push_back({stump});
  return model;
}

}  // namespace

TEST_CASE("predict_row: known group takes the group mean, unknown the node mean") {
  FittedModel model = stump_model();
  RngStream rng(71);
  std::vector<double> x{0.5};

  Prediction known = predict_row(model, x, std::optional<std::string>("a"), 0.95, rng);
  CHECK(known.point == doctest::Approx(0.7));

  Prediction unknown = predict_row(model, x, std::nullopt, 0.95, rng);
  CHECK(unknown.point == doctest::Approx(0.4));

  // Untrained labels behave exactly like missing group information.
  RngStream r1(72), r2(72);
  Prediction u1 = predict_row(model, x, std::optional<std::string>("never-seen"), 0.95, r1);
  Prediction u2 = predict_row(model, x, std::optional<std::string>("also-new"), 0.95, r2);
  CHECK(u1.point == u2.point);
  CHECK(u1.lower == u2.lower);
  CHECK(u1.upper == u2.upper);
  CHECK(u1.point == unknown.point);
}

TEST_CASE("predict_row: degenerate identical draws collapse the interval") {
  FittedModel model = stump_model();
  // Three copies of the same forest.
  model.draws.forests.push_back(model.draws.forests[0]);
  model.draws.forests.push_back(model.draws.forests[0]);
  model.draws.iterations = {1, 2, 3};
  model.draws.taus = {1.0, 1.0, 1.0};
  model.draws.k1s = {2.0, 2.0, 2.0};
  model.draws.tree_accepts = {0, 0, 0};
  model.draws.k1_accepts = {0, 0, 0};
  RngStream rng(73);
  std::vector<double> x{0.1};
  Prediction p = predict_row(model, x, std::optional<std::string>("a"), 0.9, rng);
  CHECK(p.lower == p.point);
  CHECK(p.upper == p.point);
  CHECK(p.lower <= p.point);
  CHECK(p.point <= p.upper);
}

TEST_CASE("predict_row: trained group absent from a terminal draws a fresh effect") {
  FittedModel model = stump_model();
  model.group_labels = {"a", "b"};  // "b" trained but absent from the stump
  model.draws.taus = {4.0};
  model.draws.k1s = {1.0};
  std::vector<double> x{0.0};

  // Deterministic under a fixed stream, spread across streams with the
  // prior spread sqrt((k1/P)/tau) = 0.5 around mu_b.
  RngStream r1(74), r1b(74), r2(75);
  Prediction p1 = predict_row(model, x, std::optional<std::string>("b"), 0.95, r1);
  Prediction p1b = predict_row(model, x, std::optional<std::string>("b"), 0.95, r1b);
  CHECK(p1.point == p1b.point);

  std::vector<double> draws;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    RngStream rs(99, s);
    draws.push_back(predict_row(model, x, std::optional<std::string>("b"), 0.95, rs).point);
  }
  CHECK(std::abs(mean_of(draws) - 0.4) < 3.0 * 0.5 / std::sqrt(4000.0));
  CHECK(std::abs(std::sqrt(variance_of(draws)) - 0.5) < 0.03);
}

TEST_CASE("predict errors: no stored forests, wrong covariate arity") {
  FittedModel model = stump_model();
  RngStream rng(76);
  std::vector<double> xbad{0.1, 0.2};
  CHECK_THROWS_AS(predict_row(model, xbad, std::nullopt, 0.95, rng), Error);

  FittedModel empty = stump_model();
  empty.draws.forests.clear();
  std::vector<double> x{0.1};
  CHECK_THROWS_AS(predict_row(empty, x, std::nullopt, 0.95, rng), Error);
  CHECK_THROWS_AS(predict_row(stump_model(), x, std::nullopt, 1.5, rng), Error);
}

TEST_CASE("rmse: hand values and error paths") {
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(rmse(a, a) == 0.0);
  std::vector<double> zero{0.0, 0.0}, truth{3.0, 4.0};
  CHECK(rmse(zero, truth) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(rmse(shorter, truth), Error);
}

TEST_CASE("prediction transforms: standardized rmse scales exactly to raw") {
  // Affine transform means rmse_raw = rmse_std * scale identically.
  ResponseTransform t{100.0, 25.0};
  std::vector<double> pred_std{0.1, -0.4, 1.2, 0.3};
  std::vector<double> truth_std{0.0, -0.2, 1.0, 0.7};
  std::vector<double> pred_raw(4), truth_raw(4);
  for (int i = 0; i < 4; ++i) {
    pred_raw[i] = t.invert(pred_std[i]);
    truth_raw[i] = t.invert(truth_std[i]);
  }
  double r_std = rmse(pred_std, truth_std);
  double r_raw = rmse(pred_raw, truth_raw);
  CHECK(std::abs(r_raw - r_std * t.scale) < 1e-10);
}

TEST_CASE("interval coverage sanity on the conjugate stump problem") {
  // Repeated pinned-parameter chains: the 95% interval for the node mean
  // should cover the analytic posterior mean nearly always.
  std::vector<double> y{1.2, 0.8, 1.5, 0.9, 1.1, 1.4, 0.6, 1.0, 1.3, 0.7};
  std::vector<double> x(y.size(), 0.5);
  std::vector<std::string> labels(y.size(), "g");
  Dataset data = make_dataset(std::vector<double>(x), 1, std::vector<double>(y), std::move(labels));

  double tau = 2.0, k1 = 1.5, k2 = 4.0;
  ChainConfig config;
  config.hyperparams.num_trees = 1;
  config.hyperparams.k2 = k2;
  config.hyperparams.iterations = 400;
  config.hyperparams.burn_in = 0;
  config.fix_tree_structure = true;
  config.fix_tau = true;
  config.fix_k1 = true;
  config.init_tau = tau;
  config.init_k1 = k1;

  // Analytic posterior mean of mu via the collapsed node formulas, on the
  // standardized scale.
  double c1 = k1, c2 = k2;  // P = 1
  double n = static_cast<double>(y.size());
  double sum = 0.0;
  for (double v : data.response()) sum += v;
  double s = n / (1.0 + c1 * n);
  double t_term = sum / (1.0 + c1 * n);
  double mu_mean_std = t_term / (s + 1.0 / c2);

  int covered = 0, chains = 30;
  for (int c = 0; c < chains; ++c) {
    RngStream rng(500 + c);
    PosteriorDraws draws = run_chain(data, config, rng);
    FittedModel model;
    model.mode = Mode::Hebart;
    model.hyperparams = config.hyperparams;
    model.transform = data.transform();
    model.covariate_names = {"x"};
    model.group_labels = data.group_labels();
    model.draws = std::move(draws);
    RngStream prng(900 + c);
    std::vector<double> xr{0.5};
    Prediction p = predict_row(model, xr, std::nullopt, 0.95, prng);
    double target = model.transform.invert(mu_mean_std);
    if (p.lower <= target && target <= p.upper) ++covered;
    CHECK(p.lower <= p.point);
    CHECK(p.point <= p.upper);
  }
  CHECK(covered >= 27);  // >= 90%
}

TEST_CASE("crossval aggregation matches an independent recomputation") {
  std::vector<double> train{0.5, 0.52, 0.48, 0.55, 0.51};
  std::vector<double> test{0.8, 0.9, 0.7, 0.85, 0.75};
  CrossvalSummary s = summarize_folds(train, test);
  // Spreadsheet-style recomputation.
  double mean = 0.0;
  for (double v : test) mean += v;
  mean /= 5.0;
  double sd = 0.0;
  for (double v : test) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / 4.0);
  CHECK(s.mean_test == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.ci_test == doctest::Approx(1.96 * sd / std::sqrt(5.0)).epsilon(1e-12));
}
