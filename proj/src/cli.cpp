#include "hebart/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hebart/csv.hpp"
#include "hebart/predict.hpp"
#include "hebart/sampler.hpp"
#include "hebart/simulate.hpp"
#include "hebart/util.hpp"

namespace hebart {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Derived-stream keys, fixed so every subcommand is reproducible from the
// seed alone.
constexpr std::uint64_t kStreamHoldout = 42;
constexpr std::uint64_t kStreamFolds = 7;
constexpr std::uint64_t kStreamPredict = 9001;
constexpr std::uint64_t kStreamFoldChain = 1000;
constexpr std::uint64_t kStreamFoldChainBart = 2000;
constexpr std::uint64_t kStreamFoldPredict = 5000;
constexpr std::uint64_t kStreamFoldPredictBart = 6000;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

FittedModel fit_model(const Dataset& data, const ResolvedConfig& config, RngStream& rng) {
  ChainConfig cc;
  cc.hyperparams = config.hyperparams;
  cc.mode = config.mode;
  cc.store_trees = config.store_trees;
  int report_every = std::max(1, config.hyperparams.iterations / 10);
  cc.progress = [&](const SweepInfo& info) {
    if (info.iteration % report_every == 0) {
      log_info("sweep %d/%d  tau=%.4g  k1=%.4g", info.iteration, config.hyperparams.iterations,
               info.tau, info.k1);
    }
  };
  PosteriorDraws draws = run_chain(data, cc, rng);

  FittedModel model;
  model.mode = config.mode;
  model.hyperparams = config.hyperparams;
  model.transform = data.transform();
  model.response_name = data.response_name();
  model.group_name = data.group_name();
  model.covariate_names = data.covariate_names();
  model.group_labels = data.group_labels();
  model.draws = std::move(draws);
  return model;
}

// Point predictions for the rows of a dataset, on the standardized scale.
// Training rows always find their group in the routed terminal, so this
// consumes no randomness for in-sample calls.
std::vector<double> predict_points_std(const FittedModel& model, const Dataset& data,
                                       bool with_groups, const RngStream& base_rng) {
  std::vector<double> points(data.num_rows());
  if (!model.draws.has_forests()) {
    for (const auto& fitted : model.draws.fitted) {
      for (std::size_t i = 0; i < fitted.size(); ++i) points[i] += fitted[i];
    }
    for (auto& p : points) p /= static_cast<double>(model.draws.draw_count());
    return points;
  }
  std::vector<double> covs;
  covs.reserve(data.num_rows() * data.num_covariates());
  std::vector<std::string> groups;
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    auto row = data.row(i);
    covs.insert(covs.end(), row.begin(), row.end());
    if (with_groups) groups.push_back(data.group_label(data.group(i)));
  }
  auto preds = predict_rows(model, covs, data.num_covariates(), groups, 0.95, base_rng);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    points[i] = model.transform.apply(preds[i].point);
  }
  return points;
}

struct MomentSummary {
  double mean = 0.0;
  double sd = 0.0;
};

MomentSummary moments(const std::vector<double>& v) {
  MomentSummary m;
  m.mean = mean_of(v);
  m.sd = v.size() > 1 ? sample_sd(v) : 0.0;
  return m;
}

// ---------------------------------------------------------------------
// fit

struct FitFlags {
  std::string data_path;
  std::string out_dir;
  std::string config_path;
  std::string response, group, mode_name;
  std::vector<std::string> covariates;
  std::vector<std::string> holdout_groups;
  double holdout_fraction = 0.0;
  double level = 0.95;
  bool no_store_trees = false;
  Hyperparams hp;

  CLI::App* cmd = nullptr;

  void add_common(CLI::App* c) {
    cmd = c;
    c->add_option("--data", data_path, "training CSV")->required();
    c->add_option("--response", response, "response column name");
    c->add_option("--group", group, "group column name");
    c->add_option("--covariates", covariates, "covariate column names")->delimiter(',');
    c->add_option("--config", config_path, "JSON config file (flags override it)");
    c->add_option("--mode", mode_name, "hebart or bart");
    c->add_option("--trees", hp.num_trees, "number of trees");
    c->add_option("--iterations", hp.iterations, "MCMC sweeps");
    c->add_option("--burn-in", hp.burn_in, "discarded initial sweeps");
    c->add_option("--thin", hp.thin, "keep every thin-th draw");
    c->add_option("--seed", hp.rng_seed, "RNG seed");
    c->add_option("--tree-alpha", hp.tree_alpha, "split probability scale");
    c->add_option("--tree-beta", hp.tree_beta, "split probability depth decay");
    c->add_option("--k2", hp.k2, "overall node mean precision scale");
    c->add_option("--tau-shape", hp.tau_shape, "tau prior shape");
    c->add_option("--tau-rate", hp.tau_rate, "tau prior rate");
    c->add_option("--weibull-scale", hp.weibull_scale, "k1 prior scale (lambda)");
    c->add_option("--weibull-shape", hp.weibull_shape, "k1 prior shape (nu)");
    c->add_option("--k1-low", hp.k1_proposal_low, "k1 proposal window lower bound");
    c->add_option("--k1-high", hp.k1_proposal_high, "k1 proposal window upper bound");
    c->add_option("--p-grow", hp.p_grow, "grow move probability");
    c->add_option("--p-prune", hp.p_prune, "prune move probability");
    c->add_option("--p-change", hp.p_change, "change move probability");
    c->add_option("--p-swap", hp.p_swap, "swap move probability");
    c->add_option("--level", level, "credible level");
    c->add_flag("--no-store-trees", no_store_trees, "do not store forests (disables predict)");
  }

  bool set(const std::string& flag) const { return cmd->count(flag) > 0; }

  ResolvedConfig resolve() const {
    ResolvedConfig cfg;
    if (set("--config")) apply_config_file(config_path, cfg);
    if (set("--response")) cfg.response_col = response;
    if (set("--group")) cfg.group_col = group;
    if (set("--covariates")) cfg.covariate_cols = covariates;
    if (set("--mode")) cfg.mode = mode_from_name(mode_name);
    if (set("--level")) cfg.credible_level = level;
    if (set("--no-store-trees")) cfg.store_trees = false;
    Hyperparams& h = cfg.hyperparams;
    if (set("--trees")) h.num_trees = hp.num_trees;
    if (set("--iterations")) h.iterations = hp.iterations;
    if (set("--burn-in")) h.burn_in = hp.burn_in;
    if (set("--thin")) h.thin = hp.thin;
    if (set("--seed")) h.rng_seed = hp.rng_seed;
    if (set("--tree-alpha")) h.tree_alpha = hp.tree_alpha;
    if (set("--tree-beta")) h.tree_beta = hp.tree_beta;
    if (set("--k2")) h.k2 = hp.k2;
    if (set("--tau-shape")) h.tau_shape = hp.tau_shape;
    if (set("--tau-rate")) h.tau_rate = hp.tau_rate;
    if (set("--weibull-scale")) h.weibull_scale = hp.weibull_scale;
    if (set("--weibull-shape")) h.weibull_shape = hp.weibull_shape;
    if (set("--k1-low")) h.k1_proposal_low = hp.k1_proposal_low;
    if (set("--k1-high")) h.k1_proposal_high = hp.k1_proposal_high;
    if (set("--p-grow")) h.p_grow = hp.p_grow;
    if (set("--p-prune")) h.p_prune = hp.p_prune;
    if (set("--p-change")) h.p_change = hp.p_change;
    if (set("--p-swap")) h.p_swap = hp.p_swap;

    if (cfg.response_col.empty()) fail(ErrorKind::Usage, "missing --response (or config data.response)");
    if (cfg.group_col.empty()) fail(ErrorKind::Usage, "missing --group (or config data.group)");
    if (cfg.covariate_cols.empty()) {
      fail(ErrorKind::Usage, "missing --covariates (or config data.covariates)");
    }
    cfg.hyperparams.validate();
    if (!(cfg.credible_level > 0.0 && cfg.credible_level < 1.0)) {
      fail(ErrorKind::Config, "credible level must lie in (0, 1)");
    }
    if (cfg.mode == Mode::Bart &&
        (set("--weibull-scale") || set("--weibull-shape") || set("--k1-low") ||
         set("--k1-high"))) {
      log_warn("bart mode ignores the k1 proposal window and Weibull prior settings");
    }
    return cfg;
  }
};

json summary_json(const FittedModel& model, double train_std, double train_raw,
                  std::optional<double> test_std, std::optional<double> test_raw) {
  const PosteriorDraws& d = model.draws;
  json j;
  j["mode"] = mode_name(model.mode);
  j["draw_count"] = d.draw_count();
  j["seed"] = model.hyperparams.rng_seed;
  auto tau_m = moments(d.taus);
  j["tau"] = {{"mean", tau_m.mean}, {"sd", tau_m.sd}};
  if (model.mode == Mode::Hebart) {
    auto k1_m = moments(d.k1s);
    j["k1"] = {{"mean", k1_m.mean}, {"sd", k1_m.sd}};
    std::vector<double> ratio(d.draw_count());
    for (int i = 0; i < d.draw_count(); ++i) ratio[i] = std::sqrt(d.k1s[i] / d.taus[i]);
    auto r_m = moments(ratio);
    j["sqrt_k1_over_tau"] = {{"mean", r_m.mean},
                             {"sd", r_m.sd},
                             {"q025", quantile_of(ratio, 0.025)},
                             {"q500", quantile_of(ratio, 0.5)},
                             {"q975", quantile_of(ratio, 0.975)}};
  }
  j["train_rmse"] = {{"standardized", train_std}, {"raw", train_raw}};
  if (test_std.has_value()) {
    j["test_rmse"] = {{"standardized", *test_std}, {"raw", *test_raw}};
  }
  double tree_rate = 0.0, k1_rate = 0.0;
  for (int i = 0; i < d.draw_count(); ++i) {
    tree_rate += d.tree_accepts[i];
    k1_rate += d.k1_accepts[i];
  }
  if (d.draw_count() > 0) {
    tree_rate /= static_cast<double>(d.draw_count() * d.num_trees);
    k1_rate /= static_cast<double>(d.draw_count());
  }
  j["acceptance"] = {{"tree_rate", tree_rate}, {"k1_rate", k1_rate}};
  return j;
}

int run_fit(const FitFlags& flags, const std::string& out_dir) {
  ResolvedConfig cfg = flags.resolve();
  if (cfg.hyperparams.stored_draws() < 1) {
    fail(ErrorKind::Config, "schedule stores no draws; lower burn_in/thin or raise iterations");
  }
  RawTable raw = load_raw_table(flags.data_path, cfg.response_col, cfg.group_col,
                                cfg.covariate_cols);

  RngStream seed_root(cfg.hyperparams.rng_seed);
  HoldoutSplit split;
  bool has_holdout = !flags.holdout_groups.empty() || flags.holdout_fraction > 0.0;
  if (has_holdout) {
    RngStream split_rng = seed_root.split(kStreamHoldout);
    split = split_holdout(raw, flags.holdout_groups, flags.holdout_fraction, split_rng);
    if (split.test.empty()) has_holdout = false;
  }
  if (!has_holdout) {
    split.train.resize(raw.num_rows());
    for (std::size_t i = 0; i < raw.num_rows(); ++i) split.train[i] = static_cast<int>(i);
    split.test.clear();
  }

  Dataset train = dataset_from_rows(raw, split.train);
  log_info("fitting %s model on %zu rows, %zu groups", mode_name(cfg.mode), train.num_rows(),
           train.num_groups());
  RngStream chain_rng = seed_root;
  FittedModel model = fit_model(train, cfg, chain_rng);

  fs::create_directories(out_dir);
  write_draws_csv((fs::path(out_dir) / "draws.csv").string(), model.draws);
  save_model((fs::path(out_dir) / "model.json").string(), model);
  save_config((fs::path(out_dir) / "config.resolved.json").string(), cfg);

  auto train_points = predict_points_std(model, train, cfg.mode == Mode::Hebart,
                                         seed_root.split(kStreamPredict));
  double train_std = rmse(train_points, train.response());
  double train_raw = train_std * train.transform().scale;

  std::optional<double> test_std, test_raw;
  if (has_holdout) {
    // Held-out rows keep their group labels; groups never seen in training
    // fall back to the overall node means automatically.
    std::vector<double> covs;
    std::vector<std::string> groups;
    std::vector<double> truth;
    for (int i : split.test) {
      for (std::size_t jx = 0; jx < raw.num_covariates; ++jx) {
        covs.push_back(raw.covariates[i * raw.num_covariates + jx]);
      }
      groups.push_back(raw.groups[i]);
      truth.push_back(raw.response[i]);
    }
    auto preds = predict_rows(model, covs, raw.num_covariates, groups, cfg.credible_level,
                              seed_root.split(kStreamPredict + 1));
    std::vector<double> pts(preds.size()), tr(truth.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      pts[i] = model.transform.apply(preds[i].point);
      tr[i] = model.transform.apply(truth[i]);
    }
    test_std = rmse(pts, tr);
    test_raw = *test_std * model.transform.scale;

    CsvTable holdout;
    holdout.header = {"row", raw.response_name, raw.group_name};
    for (const auto& c : raw.covariate_names) holdout.header.push_back(c);
    for (int i : split.test) {
      std::vector<std::string> row{std::to_string(i), format_double(raw.response[i]),
                                   raw.groups[i]};
      for (std::size_t jx = 0; jx < raw.num_covariates; ++jx) {
        row.push_back(format_double(raw.covariates[i * raw.num_covariates + jx]));
      }
      holdout.rows.push_back(std::move(row));
    }
    write_csv((fs::path(out_dir) / "holdout.csv").string(), holdout);
  }

  json summary = summary_json(model, train_std, train_raw, test_std, test_raw);
  std::ofstream sum((fs::path(out_dir) / "summary.json").string());
  sum << summary.dump(2) << "\n";
  if (!sum) fail(ErrorKind::Io, "error writing summary.json");

  std::printf("fitted %s model: %d draws (%d iterations, burn-in %d)\n", mode_name(model.mode),
              model.draws.draw_count(), cfg.hyperparams.iterations, cfg.hyperparams.burn_in);
  std::printf("train RMSE: %.6f standardized, %.6f raw\n", train_std, train_raw);
  if (test_std.has_value()) {
    std::printf("holdout RMSE: %.6f standardized, %.6f raw (%zu rows)\n", *test_std, *test_raw,
                split.test.size());
  }
  if (model.mode == Mode::Hebart) {
    std::printf("posterior sqrt(k1/tau): mean %.4f, 95%% interval [%.4f, %.4f]\n",
                summary["sqrt_k1_over_tau"]["mean"].get<double>(),
                summary["sqrt_k1_over_tau"]["q025"].get<double>(),
                summary["sqrt_k1_over_tau"]["q975"].get<double>());
  }
  std::printf("outputs written to %s\n", out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------
// predict

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& group_col, bool group_given, const std::string& truth_col,
                bool truth_given, double level, std::uint64_t seed, bool seed_given,
                const std::string& out_path) {
  fs::path mp(model_path);
  if (fs::is_directory(mp)) mp /= "model.json";
  FittedModel model = load_model(mp.string());

  CsvTable table = read_csv(data_path);
  if (table.rows.empty()) fail(ErrorKind::Schema, "'" + data_path + "' has no data rows");
  std::size_t n = table.rows.size();
  std::size_t d = model.covariate_names.size();

  std::vector<std::size_t> cov_idx;
  for (const auto& c : model.covariate_names) cov_idx.push_back(table.column_index(c));
  std::vector<double> covs(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jx = 0; jx < d; ++jx) {
      covs[i * d + jx] = parse_numeric_cell(table.rows[i][cov_idx[jx]], i + 2,
                                            model.covariate_names[jx]);
    }
  }

  std::vector<std::string> groups;
  if (group_given) {
    std::size_t gi = table.column_index(group_col);
    for (std::size_t i = 0; i < n; ++i) groups.push_back(table.rows[i][gi]);
  }

  std::uint64_t eff_seed = seed_given ? seed : model.hyperparams.rng_seed;
  RngStream base(eff_seed);
  auto preds = predict_rows(model, covs, d, groups, level, base.split(kStreamPredict));

  CsvTable out;
  out.header = {"row", "point", "lower", "upper"};
  for (std::size_t i = 0; i < n; ++i) {
    out.rows.push_back({std::to_string(i), format_double(preds[i].point),
                        format_double(preds[i].lower), format_double(preds[i].upper)});
  }
  write_csv(out_path, out);

  std::string truth_name = truth_given ? truth_col : model.response_name;
  if (table.has_column(truth_name)) {
    std::size_t ti = table.column_index(truth_name);
    std::vector<double> pts(n), tr(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = model.transform.apply(preds[i].point);
      tr[i] = model.transform.apply(parse_numeric_cell(table.rows[i][ti], i + 2, truth_name));
    }
    double r_std = rmse(pts, tr);
    std::printf("RMSE: %.17g standardized, %.17g raw (%zu rows)\n", r_std,
                r_std * model.transform.scale, n);
  } else if (truth_given) {
    fail(ErrorKind::Schema, "truth column '" + truth_name + "' not found in '" + data_path + "'");
  }
  std::printf("predictions written to %s\n", out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------
// simulate

int run_simulate(int n, int groups, int trees, double k1, double k2, double tau_shape,
                 double tau_rate, std::uint64_t seed, const std::string& out_path) {
  RngStream rng(seed);
  SimResult sim = simulate_eq8(n, groups, trees, k1, k2, tau_shape, tau_rate, rng);
  write_simulated_csv(out_path, sim.data);
  write_truth_sidecar(out_path + ".truth.txt", sim.truth);
  std::printf("simulated %d rows, %d groups, tau=%.6g, sqrt(k1/tau)=%.6g\n", n, groups,
              sim.truth.tau, sim.truth.sqrt_k1_over_tau());
  std::printf("dataset written to %s (truth sidecar %s.truth.txt)\n", out_path.c_str(),
              out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------
// crossval

struct FoldResult {
  double he_train = 0.0, he_test = 0.0;
  double bart_train = 0.0, bart_test = 0.0;
};

FoldResult run_fold(const RawTable& raw, const std::vector<std::vector<int>>& folds,
                    std::size_t fold, const ResolvedConfig& cfg, bool baseline,
                    const RngStream& seed_root) {
  std::vector<int> test_rows = folds[fold];
  std::vector<char> in_test(raw.num_rows(), 0);
  for (int i : test_rows) in_test[i] = 1;
  std::vector<int> train_rows;
  for (std::size_t i = 0; i < raw.num_rows(); ++i) {
    if (!in_test[i]) train_rows.push_back(static_cast<int>(i));
  }

  Dataset train = dataset_from_rows(raw, train_rows);
  std::vector<double> test_covs;
  std::vector<std::string> test_groups;
  std::vector<double> test_truth;
  for (int i : test_rows) {
    for (std::size_t jx = 0; jx < raw.num_covariates; ++jx) {
      test_covs.push_back(raw.covariates[i * raw.num_covariates + jx]);
    }
    test_groups.push_back(raw.groups[i]);
    test_truth.push_back(raw.response[i]);
  }

  auto eval = [&](Mode mode, std::uint64_t chain_key, std::uint64_t pred_key, double& tr,
                  double& te) {
    ResolvedConfig fold_cfg = cfg;
    fold_cfg.mode = mode;
    fold_cfg.store_trees = true;
    RngStream chain_rng = seed_root.split(chain_key + fold);
    FittedModel model = fit_model(train, fold_cfg, chain_rng);
    auto train_points = predict_points_std(model, train, mode == Mode::Hebart,
                                           seed_root.split(pred_key + 500 + fold));
    tr = rmse(train_points, train.response());
    auto preds = predict_rows(model, test_covs, raw.num_covariates, test_groups,
                              cfg.credible_level, seed_root.split(pred_key + fold));
    std::vector<double> pts(preds.size()), truth_std(test_truth.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      pts[i] = model.transform.apply(preds[i].point);
      truth_std[i] = model.transform.apply(test_truth[i]);
    }
    te = rmse(pts, truth_std);
  };

  FoldResult out;
  eval(cfg.mode, kStreamFoldChain, kStreamFoldPredict, out.he_train, out.he_test);
  if (baseline) {
    eval(Mode::Bart, kStreamFoldChainBart, kStreamFoldPredictBart, out.bart_train, out.bart_test);
  }
  return out;
}

int run_crossval(const FitFlags& flags, int num_folds, bool baseline, int jobs,
                 const std::string& out_dir) {
  ResolvedConfig cfg = flags.resolve();
  RawTable raw = load_raw_table(flags.data_path, cfg.response_col, cfg.group_col,
                                cfg.covariate_cols);
  if (num_folds < 2) fail(ErrorKind::Config, "need at least 2 folds");
  if (static_cast<std::size_t>(num_folds) > raw.num_rows()) {
    fail(ErrorKind::Config, "more folds than rows");
  }

  RngStream seed_root(cfg.hyperparams.rng_seed);
  RngStream fold_rng = seed_root.split(kStreamFolds);
  auto folds = make_folds(raw.num_rows(), num_folds, fold_rng);

  std::vector<FoldResult> results(folds.size());
  std::atomic<std::size_t> next{0};
  int workers = std::max(1, jobs);
  auto work = [&]() {
    for (;;) {
      std::size_t f = next.fetch_add(1);
      if (f >= folds.size()) return;
      results[f] = run_fold(raw, folds, f, cfg, baseline, seed_root);
      log_info("fold %zu/%zu done", f + 1, folds.size());
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<double> he_train, he_test, bart_train, bart_test;
  for (const auto& r : results) {
    he_train.push_back(r.he_train);
    he_test.push_back(r.he_test);
    if (baseline) {
      bart_train.push_back(r.bart_train);
      bart_test.push_back(r.bart_test);
    }
  }
  CrossvalSummary he = summarize_folds(he_train, he_test);
  CrossvalSummary ba;
  if (baseline) ba = summarize_folds(bart_train, bart_test);

  std::printf("%-6s %12s %12s", "fold", "train", "test");
  if (baseline) std::printf(" %12s %12s", "bart train", "bart test");
  std::printf("\n");
  for (std::size_t f = 0; f < results.size(); ++f) {
    std::printf("%-6zu %12.4f %12.4f", f + 1, results[f].he_train, results[f].he_test);
    if (baseline) std::printf(" %12.4f %12.4f", results[f].bart_train, results[f].bart_test);
    std::printf("\n");
  }
  std::printf("\n%-10s %-28s", "Source", "HE-BART");
  if (baseline) std::printf(" %-28s", "BART");
  std::printf("\n");
  char cell[64];
  std::snprintf(cell, sizeof(cell), "%.3f [%.3f,%.3f]", he.mean_test, he.mean_test - he.ci_test,
                he.mean_test + he.ci_test);
  std::printf("%-10s %-28s", "Test set", cell);
  if (baseline) {
    std::snprintf(cell, sizeof(cell), "%.3f [%.3f,%.3f]", ba.mean_test, ba.mean_test - ba.ci_test,
                  ba.mean_test + ba.ci_test);
    std::printf(" %-28s", cell);
  }
  std::printf("\n");
  std::snprintf(cell, sizeof(cell), "%.3f [%.3f,%.3f]", he.mean_train,
                he.mean_train - he.ci_train, he.mean_train + he.ci_train);
  std::printf("%-10s %-28s", "Train set", cell);
  if (baseline) {
    std::snprintf(cell, sizeof(cell), "%.3f [%.3f,%.3f]", ba.mean_train,
                  ba.mean_train - ba.ci_train, ba.mean_train + ba.ci_train);
    std::printf(" %-28s", cell);
  }
  std::printf("\n");

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    CsvTable table;
    table.header = {"fold", "model", "train_rmse", "test_rmse"};
    for (std::size_t f = 0; f < results.size(); ++f) {
      table.rows.push_back({std::to_string(f + 1), "hebart", format_double(results[f].he_train),
                            format_double(results[f].he_test)});
      if (baseline) {
        table.rows.push_back({std::to_string(f + 1), "bart", format_double(results[f].bart_train),
                              format_double(results[f].bart_test)});
      }
    }
    write_csv((fs::path(out_dir) / "folds.csv").string(), table);
    std::printf("per-fold results written to %s/folds.csv\n", out_dir.c_str());
  }
  return 0;
}

}  // namespace

RawTable load_raw_table(const std::string& path, const std::string& response_col,
                        const std::string& group_col,
                        const std::vector<std::string>& covariate_cols) {
  if (covariate_cols.empty()) fail(ErrorKind::Config, "no covariate columns given");
  CsvTable table = read_csv(path);
  if (table.rows.empty()) fail(ErrorKind::Schema, "'" + path + "' has a header but no data rows");
  RawTable out;
  out.num_covariates = covariate_cols.size();
  out.covariate_names = covariate_cols;
  out.response_name = response_col;
  out.group_name = group_col;
  std::size_t ri = table.column_index(response_col);
  std::size_t gi = table.column_index(group_col);
  std::vector<std::size_t> ci;
  for (const auto& c : covariate_cols) ci.push_back(table.column_index(c));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out.response.push_back(parse_numeric_cell(row[ri], i + 2, response_col));
    out.groups.push_back(row[gi]);
    for (std::size_t jx = 0; jx < ci.size(); ++jx) {
      out.covariates.push_back(parse_numeric_cell(row[ci[jx]], i + 2, covariate_cols[jx]));
    }
  }
  return out;
}

Dataset dataset_from_rows(const RawTable& table, const std::vector<int>& rows) {
  if (rows.empty()) fail(ErrorKind::Schema, "empty row selection");
  std::vector<double> covs;
  covs.reserve(rows.size() * table.num_covariates);
  std::vector<double> response;
  std::vector<std::string> groups;
  for (int i : rows) {
    for (std::size_t jx = 0; jx < table.num_covariates; ++jx) {
      covs.push_back(table.covariates[i * table.num_covariates + jx]);
    }
    response.push_back(table.response[i]);
    groups.push_back(table.groups[i]);
  }
  return make_dataset(std::move(covs), table.num_covariates, std::move(response),
                      std::move(groups), table.covariate_names, table.response_name,
                      table.group_name);
}

HoldoutSplit split_holdout(const RawTable& table, const std::vector<std::string>& holdout_groups,
                           double fraction, RngStream& rng) {
  if (fraction < 0.0 || fraction >= 1.0) {
    fail(ErrorKind::Config, "holdout fraction must lie in [0, 1)");
  }
  std::size_t n = table.num_rows();
  std::vector<char> in_test(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& g : holdout_groups) {
      if (table.groups[i] == g) in_test[i] = 1;
    }
  }
  std::size_t target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::size_t current = 0;
  for (char c : in_test) current += c;

  if (current < target) {
    std::vector<int> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) pool.push_back(static_cast<int>(i));
    }
    // Fisher-Yates, then take from the front.
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
      if (j >= i) j = i - 1;
      std::swap(pool[i - 1], pool[j]);
    }
    for (std::size_t k = 0; k < pool.size() && current < target; ++k, ++current) {
      in_test[pool[k]] = 1;
    }
  }

  HoldoutSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? split.test : split.train).push_back(static_cast<int>(i));
  }
  if (split.train.empty()) fail(ErrorKind::Config, "holdout leaves no training rows");
  return split;
}

std::vector<std::vector<int>> make_folds(std::size_t n, int k, RngStream& rng) {
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<int>> folds(k);
  std::size_t base = n / static_cast<std::size_t>(k);
  std::size_t rem = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    for (std::size_t s = 0; s < size; ++s) folds[f].push_back(order[pos++]);
    std::sort(folds[f].begin(), folds[f].end());
  }
  return folds;
}

CrossvalSummary summarize_folds(const std::vector<double>& train_rmse,
                                const std::vector<double>& test_rmse) {
  CrossvalSummary s;
  s.train_rmse = train_rmse;
  s.test_rmse = test_rmse;
  s.mean_train = mean_of(train_rmse);
  s.mean_test = mean_of(test_rmse);
  double k = static_cast<double>(train_rmse.size());
  if (train_rmse.size() > 1) {
    s.ci_train = 1.96 * sample_sd(train_rmse) / std::sqrt(k);
    s.ci_test = 1.96 * sample_sd(test_rmse) / std::sqrt(k);
  }
  return s;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Hierarchical embedded BART: sum-of-trees regression with group-level "
               "terminal-node effects"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model with MCMC and persist the draws");
  FitFlags fit_flags;
  fit_flags.add_common(fit);
  std::string fit_out;
  fit->add_option("--out", fit_out, "output directory")->required();
  fit->add_option("--holdout-groups", fit_flags.holdout_groups,
                  "group labels held out of training entirely")
      ->delimiter(',');
  fit->add_option("--holdout-fraction", fit_flags.holdout_fraction,
                  "total fraction of rows held out for testing");

  // predict
  auto* predict = app.add_subcommand("predict", "predict from a fitted model directory");
  std::string pr_model, pr_data, pr_group, pr_truth, pr_out;
  double pr_level = 0.95;
  std::uint64_t pr_seed = 0;
  predict->add_option("--model", pr_model, "model directory or model.json path")->required();
  predict->add_option("--data", pr_data, "CSV with covariate columns")->required();
  predict->add_option("--group", pr_group, "group column to use (omit to predict without groups)");
  predict->add_option("--truth", pr_truth, "truth column for RMSE reporting");
  predict->add_option("--level", pr_level, "credible level");
  predict->add_option("--seed", pr_seed, "seed for unseen-group effect draws");
  predict->add_option("--out", pr_out, "output CSV")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate grouped synthetic data");
  int sim_n = 500, sim_groups = 10, sim_trees = 10;
  double sim_k1 = 8.0, sim_k2 = 5.0, sim_tau_shape = 0.5, sim_tau_rate = 1.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  simulate->add_option("--n", sim_n, "number of rows");
  simulate->add_option("--groups", sim_groups, "number of groups");
  simulate->add_option("--trees", sim_trees, "number of generating trees");
  simulate->add_option("--k1", sim_k1, "group-level precision scale");
  simulate->add_option("--k2", sim_k2, "region-level precision scale");
  simulate->add_option("--tau-shape", sim_tau_shape, "tau prior shape");
  simulate->add_option("--tau-rate", sim_tau_rate, "tau prior rate");
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--out", sim_out, "output CSV path")->required();

  // crossval
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validated RMSE benchmark");
  FitFlags cv_flags;
  cv_flags.add_common(crossval);
  int cv_folds = 10, cv_jobs = 1;
  std::string cv_baseline, cv_out;
  crossval->add_option("--folds", cv_folds, "number of folds");
  crossval->add_option("--baseline", cv_baseline, "also fit a baseline (bart)");
  crossval->add_option("--jobs", cv_jobs, "parallel fold workers");
  crossval->add_option("--out", cv_out, "directory for per-fold results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(fit)) return run_fit(fit_flags, fit_out);
    if (app.got_subcommand(predict)) {
      return run_predict(pr_model, pr_data, pr_group, predict->count("--group") > 0, pr_truth,
                         predict->count("--truth") > 0, pr_level, pr_seed,
                         predict->count("--seed") > 0, pr_out);
    }
    if (app.got_subcommand(simulate)) {
      return run_simulate(sim_n, sim_groups, sim_trees, sim_k1, sim_k2, sim_tau_shape,
                          sim_tau_rate, sim_seed, sim_out);
    }
    if (app.got_subcommand(crossval)) {
      bool baseline = crossval->count("--baseline") > 0;
      if (baseline && cv_baseline != "bart") {
        fail(ErrorKind::Usage, "unsupported baseline '" + cv_baseline + "' (only: bart)");
      }
      return run_crossval(cv_flags, cv_folds, baseline, cv_jobs, cv_out);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace hebart
