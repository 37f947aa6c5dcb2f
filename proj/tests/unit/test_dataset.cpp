#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hebart/dataset.hpp"
#include "hebart/rng.hpp"
#include "hebart/util.hpp"

using namespace hebart;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& content) {
  std::string path = "/tmp/hebart_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("standardize: population convention, hand values") {
  std::vector<double> raw{2.0, 4.0, 6.0};
  auto [scaled, t] = standardize(raw);
  CHECK(t.center == doctest::Approx(4.0));
  CHECK(t.scale == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));  // 1.63299...
  CHECK(scaled[0] == doctest::Approx(-1.2247448713915889).epsilon(1e-12));
  CHECK(scaled[1] == doctest::Approx(0.0));
  CHECK(scaled[2] == doctest::Approx(1.2247448713915889).epsilon(1e-12));
}

TEST_CASE("standardize: constant input is an error naming the column") {
  std::vector<double> raw{5.0, 5.0, 5.0};
  CHECK_THROWS_WITH_AS(standardize(raw, "Reaction"), doctest::Contains("Reaction"), Error);
}

TEST_CASE("standardize: inverse round-trips random vectors") {
  RngStream rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 40);
    std::vector<double> raw(n);
    for (auto& x : raw) x = 100.0 * (rng.uniform01() - 0.3);
    raw[0] += 1e-3;  // guard against an accidentally constant draw
    auto [scaled, t] = standardize(raw);
    CHECK(std::abs(mean_of(scaled)) < 1e-12);
    CHECK(variance_of(scaled) == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t i = 0; i < n; ++i) {
      double back = t.invert(scaled[i]);
      CHECK(std::abs(back - raw[i]) <= 1e-10 * std::max(1.0, std::abs(raw[i])));
    }
  }
}

TEST_CASE("ingest_csv: 3-row file, dense re-indexing, z-scored response") {
  auto path = write_temp_csv("basic.csv", "y,x,g\n10,1.5,A\n20,2.5,B\n30,3.5,A\n");
  Dataset data = ingest_csv(path, "y", "g", {"x"});
  CHECK(data.num_rows() == 3);
  CHECK(data.num_groups() == 2);
  CHECK(data.num_covariates() == 1);
  // Population-sd z-scores of (10, 20, 30).
  CHECK(data.response()[0] == doctest::Approx(-1.2247448713915889).epsilon(1e-12));
  CHECK(data.response()[1] == doctest::Approx(0.0));
  CHECK(data.response()[2] == doctest::Approx(1.2247448713915889).epsilon(1e-12));
  // First-appearance ordering: A -> 0, B -> 1; equal labels, equal indices.
  CHECK(data.group(0) == 0);
  CHECK(data.group(1) == 1);
  CHECK(data.group(2) == 0);
  CHECK(data.find_group("B") == 1);
  CHECK(data.find_group("zzz") == -1);
  // Round trip through the inverse transform.
  CHECK(data.raw_response(0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(data.raw_response(2) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("ingest_csv: single distinct group gives J = 1") {
  auto path = write_temp_csv("onegroup.csv", "y,x,g\n1,0.1,only\n2,0.2,only\n3,0.3,only\n");
  Dataset data = ingest_csv(path, "y", "g", {"x"});
  CHECK(data.num_groups() == 1);
}

TEST_CASE("ingest_csv: error paths carry context") {
  CHECK_THROWS_WITH_AS(ingest_csv("/tmp/does_not_exist_hebart.csv", "y", "g", {"x"}),
                       doctest::Contains("does_not_exist"), Error);

  auto missing_col = write_temp_csv("missing.csv", "y,x\n1,2\n");
  CHECK_THROWS_WITH_AS(ingest_csv(missing_col, "y", "g", {"x"}), doctest::Contains("'g'"), Error);

  auto bad_cell = write_temp_csv("badcell.csv", "y,x,g\n1,2,A\noops,3,B\n");
  CHECK_THROWS_WITH_AS(ingest_csv(bad_cell, "y", "g", {"x"}), doctest::Contains("row 3"), Error);

  auto empty = write_temp_csv("empty.csv", "y,x,g\n");
  CHECK_THROWS_AS(ingest_csv(empty, "y", "g", {"x"}), Error);
}

TEST_CASE("ingest_csv: sleep study shape") {
  Dataset data = ingest_csv(std::string(HEBART_TEST_DATA_DIR) + "/sleepstudy_synth.csv",
                            "Reaction", "Subject", {"Days"});
  CHECK(data.num_rows() == 180);
  CHECK(data.num_groups() == 18);
  CHECK(data.num_covariates() == 1);
  CHECK(data.find_group("308") >= 0);
  CHECK(data.find_group("309") >= 0);
  CHECK(data.find_group("351") >= 0);
}
