#include "hebart/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hebart/csv.hpp"
#include "hebart/distributions.hpp"
#include "hebart/util.hpp"

namespace hebart {

double SimTruth::sqrt_k1_over_tau() const { return std::sqrt(k1 / tau); }

SimResult simulate_eq8(int n, int num_groups, int num_trees, double k1, double k2,
                       double tau_shape, double tau_rate, RngStream& rng) {
  if (n < 1 || num_groups < 1 || num_trees < 1 || n < num_groups) {
    fail(ErrorKind::Config, "simulate: need n >= groups >= 1 and trees >= 1");
  }
  if (!(k1 > 0.0) || !(k2 > 0.0)) fail(ErrorKind::Config, "simulate: k1 and k2 must be positive");

  SimTruth truth;
  truth.n = n;
  truth.num_groups = num_groups;
  truth.num_trees = num_trees;
  truth.k1 = k1;
  truth.k2 = k2;
  truth.tau = sample_gamma(tau_shape, tau_rate, rng);

  std::vector<double> x(n);
  for (auto& xi : x) xi = rng.uniform01();

  std::vector<int> group(n);
  std::vector<double> weights(num_groups, 1.0);
  for (auto& g : group) g = static_cast<int>(sample_multinomial_index(weights, rng));

  double p = static_cast<double>(num_trees);
  double region_precision = truth.tau * p / k2;
  double group_precision = truth.tau * p / k1;

  // Cutpoints come from the observed values, excluding the minimum so both
  // regions are non-empty (same convention as the fitted trees).
  std::vector<double> cuts = x;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(cuts.begin());
  if (cuts.empty()) fail(ErrorKind::Config, "simulate: covariate has a single distinct value");

  for (int t = 0; t < num_trees; ++t) {
    std::size_t ci = static_cast<std::size_t>(rng.uniform01() * cuts.size());
    if (ci >= cuts.size()) ci = cuts.size() - 1;
    truth.split_values.push_back(cuts[ci]);
    std::vector<double> region(2), gmu(2 * num_groups);
    for (int r = 0; r < 2; ++r) {
      region[r] = sample_normal(0.0, region_precision, rng);
      for (int j = 0; j < num_groups; ++j) {
        gmu[r * num_groups + j] = sample_normal(region[r], group_precision, rng);
      }
    }
    truth.region_mu.push_back(std::move(region));
    truth.group_mu.push_back(std::move(gmu));
  }

  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double signal = 0.0;
    for (int t = 0; t < num_trees; ++t) {
      int r = x[i] < truth.split_values[t] ? 0 : 1;
      signal += truth.group_mu[t][r * num_groups + group[i]];
    }
    y[i] = signal + sample_normal(0.0, truth.tau, rng);
  }

  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "g" + std::to_string(group[i] + 1);

  Dataset data = make_dataset(std::move(x), 1, std::move(y), std::move(labels), {"x"}, "y",
                              "group");
  return SimResult{std::move(data), std::move(truth)};
}

void write_simulated_csv(const std::string& path, const Dataset& data) {
  CsvTable table;
  table.header = {data.response_name(), data.covariate_names()[0], data.group_name()};
  char buf[64];
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    std::vector<std::string> row(3);
    std::snprintf(buf, sizeof(buf), "%.17g", data.raw_response(i));
    row[0] = buf;
    std::snprintf(buf, sizeof(buf), "%.17g", data.covariate(i, 0));
    row[1] = buf;
    row[2] = data.group_label(data.group(i));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

void write_truth_sidecar(const std::string& path, const SimTruth& truth) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  char buf[96];
  auto put = [&](const std::string& key, double value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << key << " = " << buf << "\n";
  };
  out << "n = " << truth.n << "\n";
  out << "groups = " << truth.num_groups << "\n";
  out << "trees = " << truth.num_trees << "\n";
  put("k1", truth.k1);
  put("k2", truth.k2);
  put("tau", truth.tau);
  put("sqrt_k1_over_tau", truth.sqrt_k1_over_tau());
  for (int t = 0; t < truth.num_trees; ++t) {
    put("split[" + std::to_string(t) + "]", truth.split_values[t]);
    for (int r = 0; r < 2; ++r) {
      put("region_mu[" + std::to_string(t) + "," + std::to_string(r) + "]",
          truth.region_mu[t][r]);
      for (int j = 0; j < truth.num_groups; ++j) {
        put("group_mu[" + std::to_string(t) + "," + std::to_string(r) + "," + std::to_string(j) +
                "]",
            truth.group_mu[t][r * truth.num_groups + j]);
      }
    }
  }
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

SimTruth load_truth_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  SimTruth truth;
  std::string line;
  auto parse_value = [&](const std::string& l) {
    auto pos = l.find('=');
    if (pos == std::string::npos) fail(ErrorKind::Schema, "bad sidecar line: " + l);
    return std::stod(l.substr(pos + 1));
  };
  std::vector<std::pair<std::string, double>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto pos = line.find('=');
    if (pos == std::string::npos) fail(ErrorKind::Schema, "bad sidecar line: " + line);
    std::string key = line.substr(0, pos);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    entries.emplace_back(key, parse_value(line));
  }
  auto find = [&](const std::string& key) -> double {
    for (const auto& [k, v] : entries) {
      if (k == key) return v;
    }
    fail(ErrorKind::Schema, "sidecar missing key '" + key + "'");
  };
  truth.n = static_cast<int>(find("n"));
  truth.num_groups = static_cast<int>(find("groups"));
  truth.num_trees = static_cast<int>(find("trees"));
  truth.k1 = find("k1");
  truth.k2 = find("k2");
  truth.tau = find("tau");
  truth.split_values.resize(truth.num_trees);
  truth.region_mu.assign(truth.num_trees, std::vector<double>(2));
  truth.group_mu.assign(truth.num_trees, std::vector<double>(2 * truth.num_groups));
  for (int t = 0; t < truth.num_trees; ++t) {
    truth.split_values[t] = find("split[" + std::to_string(t) + "]");
    for (int r = 0; r < 2; ++r) {
      truth.region_mu[t][r] =
          find("region_mu[" + std::to_string(t) + "," + std::to_string(r) + "]");
      for (int j = 0; j < truth.num_groups; ++j) {
        truth.group_mu[t][r * truth.num_groups + j] = find(
            "group_mu[" + std::to_string(t) + "," + std::to_string(r) + "," + std::to_string(j) +
            "]");
      }
    }
  }
  return truth;
}

}  // namespace hebart
