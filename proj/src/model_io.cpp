#include "hebart/model_io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "hebart/csv.hpp"
#include "hebart/util.hpp"

namespace hebart {

namespace {

using nlohmann::json;

constexpr const char* kModelMagic = "hebart-model";
constexpr int kFormatVersion = 1;

json hyperparams_to_json(const Hyperparams& hp) {
  return json{{"num_trees", hp.num_trees},
              {"tree_alpha", hp.tree_alpha},
              {"tree_beta", hp.tree_beta},
              {"k2", hp.k2},
              {"tau_shape", hp.tau_shape},
              {"tau_rate", hp.tau_rate},
              {"weibull_scale", hp.weibull_scale},
              {"weibull_shape", hp.weibull_shape},
              {"k1_proposal_low", hp.k1_proposal_low},
              {"k1_proposal_high", hp.k1_proposal_high},
              {"p_grow", hp.p_grow},
              {"p_prune", hp.p_prune},
              {"p_change", hp.p_change},
              {"p_swap", hp.p_swap},
              {"iterations", hp.iterations},
              {"burn_in", hp.burn_in},
              {"thin", hp.thin},
              {"rng_seed", hp.rng_seed}};
}

void hyperparams_from_json(const json& j, Hyperparams& hp) {
  static const std::vector<std::string> known = {
      "num_trees",     "tree_alpha",      "tree_beta",        "k2",
      "tau_shape",     "tau_rate",        "weibull_scale",    "weibull_shape",
      "k1_proposal_low", "k1_proposal_high", "p_grow",        "p_prune",
      "p_change",      "p_swap",          "iterations",       "burn_in",
      "thin",          "rng_seed"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) fail(ErrorKind::Config, "unknown hyperparameter key '" + key + "'");
  }
  hp.num_trees = j.value("num_trees", hp.num_trees);
  hp.tree_alpha = j.value("tree_alpha", hp.tree_alpha);
  hp.tree_beta = j.value("tree_beta", hp.tree_beta);
  hp.k2 = j.value("k2", hp.k2);
  hp.tau_shape = j.value("tau_shape", hp.tau_shape);
  hp.tau_rate = j.value("tau_rate", hp.tau_rate);
  hp.weibull_scale = j.value("weibull_scale", hp.weibull_scale);
  hp.weibull_shape = j.value("weibull_shape", hp.weibull_shape);
  hp.k1_proposal_low = j.value("k1_proposal_low", hp.k1_proposal_low);
  hp.k1_proposal_high = j.value("k1_proposal_high", hp.k1_proposal_high);
  hp.p_grow = j.value("p_grow", hp.p_grow);
  hp.p_prune = j.value("p_prune", hp.p_prune);
  hp.p_change = j.value("p_change", hp.p_change);
  hp.p_swap = j.value("p_swap", hp.p_swap);
  hp.iterations = j.value("iterations", hp.iterations);
  hp.burn_in = j.value("burn_in", hp.burn_in);
  hp.thin = j.value("thin", hp.thin);
  hp.rng_seed = j.value("rng_seed", hp.rng_seed);
}

// Trees are stored as preorder node arrays; child fields index into the
// same array.
void tree_to_json_rec(const Tree& tree, int id, json& nodes) {
  const TreeNode& n = tree.node(id);
  if (n.is_terminal()) {
    json groups = json::array();
    for (const auto& [g, mu] : n.group_mus) groups.push_back(json::array({g, mu}));
    nodes.push_back(json{{"mu", n.mu}, {"groups", std::move(groups)}});
    return;
  }
  std::size_t self = nodes.size();
  nodes.push_back(json{{"var", n.split_var}, {"value", n.split_value}, {"left", 0}, {"right", 0}});
  nodes[self]["left"] = static_cast<int>(nodes.size());
  tree_to_json_rec(tree, n.left, nodes);
  nodes[self]["right"] = static_cast<int>(nodes.size());
  tree_to_json_rec(tree, n.right, nodes);
}

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  tree_to_json_rec(tree, tree.root(), nodes);
  return nodes;
}

int tree_from_json_rec(const json& nodes, std::size_t idx, Tree& tree, int node_id) {
  const json& jn = nodes.at(idx);
  if (jn.contains("mu")) {
    tree.node(node_id).mu = jn.at("mu").get<double>();
    for (const auto& pair : jn.at("groups")) {
      tree.set_group_mu(node_id, pair.at(0).get<int>(), pair.at(1).get<double>());
    }
    return node_id;
  }
  auto [left, right] =
      tree.grow(node_id, jn.at("var").get<int>(), jn.at("value").get<double>());
  tree_from_json_rec(nodes, jn.at("left").get<std::size_t>(), tree, left);
  tree_from_json_rec(nodes, jn.at("right").get<std::size_t>(), tree, right);
  return node_id;
}

Tree tree_from_json(const json& nodes) {
  Tree tree = Tree::stump();
  if (nodes.empty()) fail(ErrorKind::Schema, "model container: empty tree");
  tree_from_json_rec(nodes, 0, tree, tree.root());
  return tree;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j, int indent = -1) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << j.dump(indent) << "\n";
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

}  // namespace

void save_config(const std::string& path, const ResolvedConfig& config) {
  json j{{"mode", mode_name(config.mode)},
         {"store_trees", config.store_trees},
         {"credible_level", config.credible_level},
         {"data",
          {{"response", config.response_col},
           {"group", config.group_col},
           {"covariates", config.covariate_cols}}},
         {"hyperparams", hyperparams_to_json(config.hyperparams)}};
  save_json_file(path, j, 2);
}

void apply_config_file(const std::string& path, ResolvedConfig& base) {
  json j = load_json_file(path);
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "mode") {
        base.mode = mode_from_name(value.get<std::string>());
      } else if (key == "store_trees") {
        base.store_trees = value.get<bool>();
      } else if (key == "credible_level") {
        base.credible_level = value.get<double>();
      } else if (key == "data") {
        for (const auto& [dkey, dvalue] : value.items()) {
          if (dkey == "response") {
            base.response_col = dvalue.get<std::string>();
          } else if (dkey == "group") {
            base.group_col = dvalue.get<std::string>();
          } else if (dkey == "covariates") {
            base.covariate_cols = dvalue.get<std::vector<std::string>>();
          } else {
            fail(ErrorKind::Config, "unknown config key 'data." + dkey + "'");
          }
        }
      } else if (key == "hyperparams") {
        hyperparams_from_json(value, base.hyperparams);
      } else {
        fail(ErrorKind::Config, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "bad config value in '" + path + "': " + e.what());
  }
}

void save_model(const std::string& path, const FittedModel& model) {
  json draws = json::array();
  const PosteriorDraws& d = model.draws;
  for (int i = 0; i < d.draw_count(); ++i) {
    json draw{{"iteration", d.iterations[i]},
              {"tau", d.taus[i]},
              {"k1", d.k1s[i]},
              {"tree_accepts", d.tree_accepts[i]},
              {"k1_accept", static_cast<int>(d.k1_accepts[i])}};
    if (d.has_forests()) {
      json trees = json::array();
      for (const Tree& t : d.forests[i]) trees.push_back(tree_to_json(t));
      draw["trees"] = std::move(trees);
    } else {
      draw["fitted"] = d.fitted[i];
    }
    draws.push_back(std::move(draw));
  }
  json j{{"magic", kModelMagic},
         {"format_version", kFormatVersion},
         {"mode", mode_name(model.mode)},
         {"num_trees", model.draws.num_trees},
         {"response",
          {{"name", model.response_name},
           {"center", model.transform.center},
           {"scale", model.transform.scale}}},
         {"group_column", model.group_name},
         {"covariates", model.covariate_names},
         {"group_labels", model.group_labels},
         {"hyperparams", hyperparams_to_json(model.hyperparams)},
         {"draws", std::move(draws)}};
  save_json_file(path, j);
}

FittedModel load_model(const std::string& path) {
  json j = load_json_file(path);
  try {
    if (!j.contains("magic") || j.at("magic").get<std::string>() != kModelMagic) {
      fail(ErrorKind::Schema, "'" + path + "' is not a model container");
    }
    if (j.at("format_version").get<int>() != kFormatVersion) {
      fail(ErrorKind::Schema, "unsupported model format version in '" + path + "'");
    }
    FittedModel model;
    model.mode = mode_from_name(j.at("mode").get<std::string>());
    model.response_name = j.at("response").at("name").get<std::string>();
    model.transform.center = j.at("response").at("center").get<double>();
    model.transform.scale = j.at("response").at("scale").get<double>();
    model.group_name = j.at("group_column").get<std::string>();
    model.covariate_names = j.at("covariates").get<std::vector<std::string>>();
    model.group_labels = j.at("group_labels").get<std::vector<std::string>>();
    hyperparams_from_json(j.at("hyperparams"), model.hyperparams);
    model.draws.mode = model.mode;
    model.draws.num_trees = j.at("num_trees").get<int>();
    for (const auto& draw : j.at("draws")) {
      model.draws.iterations.push_back(draw.at("iteration").get<int>());
      model.draws.taus.push_back(draw.at("tau").get<double>());
      model.draws.k1s.push_back(draw.at("k1").get<double>());
      model.draws.tree_accepts.push_back(draw.at("tree_accepts").get<int>());
      model.draws.k1_accepts.push_back(static_cast<std::uint8_t>(draw.at("k1_accept").get<int>()));
      if (draw.contains("trees")) {
        std::vector<Tree> forest;
        for (const auto& jt : draw.at("trees")) forest.push_back(tree_from_json(jt));
        model.draws.forests.push_back(std::move(forest));
      } else {
        model.draws.fitted.push_back(draw.at("fitted").get<std::vector<double>>());
      }
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, "malformed model container '" + path + "': " + e.what());
  }
}

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << "iteration,tau,k1,tree_accepts,k1_accept\n";
  char buf[64];
  for (int i = 0; i < draws.draw_count(); ++i) {
    out << draws.iterations[i] << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", draws.taus[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", draws.k1s[i]);
    out << buf << ',';
    out << draws.tree_accepts[i] << ',' << static_cast<int>(draws.k1_accepts[i]) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

DrawsTable load_draws_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {"iteration", "tau", "k1", "tree_accepts",
                                             "k1_accept"};
  if (table.header != expected) fail(ErrorKind::Schema, "'" + path + "' is not a draws file");
  DrawsTable out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out.iterations.push_back(static_cast<int>(parse_numeric_cell(row[0], i + 2, "iteration")));
    out.taus.push_back(parse_numeric_cell(row[1], i + 2, "tau"));
    out.k1s.push_back(parse_numeric_cell(row[2], i + 2, "k1"));
    out.tree_accepts.push_back(static_cast<int>(parse_numeric_cell(row[3], i + 2, "tree_accepts")));
    out.k1_accepts.push_back(static_cast<int>(parse_numeric_cell(row[4], i + 2, "k1_accept")));
  }
  return out;
}

}  // namespace hebart
