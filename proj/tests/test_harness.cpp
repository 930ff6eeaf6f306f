#include "hsm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hsm/io.hpp"
#include "test_util.hpp"

using hsm::Config;
using hsm::ExperimentResult;
using testutil::CsvTable;

namespace {

Config small_profile_config() {
  return Config::from_pairs({{"d", "6"}, {"lambda_count", "3"}});
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config") {
  SUBCASE("key value lines with comments") {
    std::istringstream in(
        "# experiment settings\n"
        "d = 12\n"
        "\n"
        "label = tiny run   # inline note\n"
        "scale = 0.25\n"
        "k_list = 2, 4,8\n");
    Config cfg = Config::parse(in, "demo.cfg");
    CHECK(cfg.has("d"));
    CHECK_FALSE(cfg.has("missing"));
    CHECK(cfg.get_int("d", 0) == 12);
    CHECK(cfg.get_string("label", "") == "tiny run");
    CHECK(cfg.get_double("scale", 0.0) == 0.25);
    CHECK(cfg.get_int_list("k_list", {}) == std::vector<int>{2, 4, 8});
    CHECK_NOTHROW(cfg.finish());
  }
  SUBCASE("fallbacks cover missing keys") {
    Config cfg = Config::from_pairs({});
    CHECK(cfg.get_int("n", 7) == 7);
    CHECK(cfg.get_double("lambda", 0.5) == 0.5);
    CHECK(cfg.get_string("name", "x") == "x");
    CHECK(cfg.get_int_list("ks", {1, 2}) == std::vector<int>{1, 2});
    CHECK_NOTHROW(cfg.finish());
  }
  SUBCASE("unread keys are called out by name") {
    std::istringstream in("a = 1\nmistyped = 2\n");
    Config cfg = Config::parse(in);
    cfg.get_int("a", 0);
    CHECK_THROWS_WITH_AS(cfg.finish(), doctest::Contains("mistyped"),
                         std::invalid_argument);
  }
  SUBCASE("duplicate keys are rejected") {
    std::istringstream in("a = 1\na = 2\n");
    CHECK_THROWS_WITH_AS(Config::parse(in, "dup.cfg"),
                         doctest::Contains("dup.cfg:2"), hsm::ParseError);
    CHECK_THROWS_AS(Config::from_pairs({{"a", "1"}, {"a", "2"}}),
                    std::invalid_argument);
  }
  SUBCASE("malformed entries") {
    std::istringstream in("just a line\n");
    CHECK_THROWS_WITH_AS(Config::parse(in), doctest::Contains("config:1"),
                         hsm::ParseError);
    Config cfg = Config::from_pairs(
        {{"n", "1.5"}, {"x", "abc"}, {"ks", "1,,2"}, {"more", "1,a"}});
    CHECK_THROWS_AS(cfg.get_int("n", 0), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_double("x", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_int_list("ks", {}), std::invalid_argument);
    CHECK_THROWS_AS(cfg.get_int_list("more", {}), std::invalid_argument);
  }
  SUBCASE("missing config file") {
    CHECK_THROWS_AS(Config::parse_file("/no/such/file.cfg"), hsm::ParseError);
  }
}

TEST_CASE("parallel loop") {
  SUBCASE("every index runs exactly once") {
    std::vector<std::atomic<int>> hits(37);
    for (auto& h : hits) h = 0;
    hsm::parallel_for(37, [&](int i) { hits[static_cast<size_t>(i)]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  SUBCASE("zero iterations is a no-op") {
    CHECK_NOTHROW(hsm::parallel_for(0, [](int) { throw std::runtime_error("boom"); }));
  }
  SUBCASE("worker exceptions surface") {
    CHECK_THROWS_AS(hsm::parallel_for(8,
                                      [](int i) {
                                        if (i == 3)
                                          throw std::runtime_error("boom");
                                      }),
                    std::runtime_error);
  }
}

TEST_CASE("shrinkage profile experiment") {
  Config cfg = small_profile_config();
  ExperimentResult res = hsm::run_shrinkage_profile(cfg);
  CsvTable t = testutil::parse_csv(res.csv);

  REQUIRE(t.columns == std::vector<std::string>{"pattern", "regularizer",
                                                "lambda", "index", "value"});
  CHECK(t.rows.size() == 2u * 3u * 3u * 6u);
  CHECK(res.csv.find("# experiment = shrinkage-profile\n") !=
        std::string::npos);
  CHECK(res.csv.find("# seed = 1\n") != std::string::npos);

  SUBCASE("level zero rows reproduce each signal") {
    for (size_t r = 0; r < t.rows.size(); ++r) {
      if (t.num(r, "lambda") != 0.0) continue;
      int idx = static_cast<int>(t.num(r, "index"));
      double want = t.cell(r, "pattern") == "linear"
                        ? 1.0 - (idx - 1) / 6.0
                        : (idx - 1 < 3 ? 1.0 : 0.5);
      CHECK(t.num(r, "value") == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("the top level kills the single-weight profiles") {
    // Both signals peak at 1, so lambda = 1 zeroes the gl and log fits; the
    // multilevel fit keeps small values because its per-pair weights shrink
    // each level only partially.
    for (size_t r = 0; r < t.rows.size(); ++r) {
      if (t.num(r, "lambda") != 1.0) continue;
      if (t.cell(r, "regularizer") == "mgl")
        CHECK(std::abs(t.num(r, "value")) < 1.0);
      else
        CHECK(t.num(r, "value") == 0.0);
    }
  }
  SUBCASE("identical configs reproduce identical bytes") {
    Config again = small_profile_config();
    CHECK(hsm::run_shrinkage_profile(again).csv == res.csv);
  }
  SUBCASE("a single worker thread reproduces the same bytes") {
    REQUIRE(setenv("HSM_THREADS", "1", 1) == 0);
    Config again = small_profile_config();
    std::string serial = hsm::run_shrinkage_profile(again).csv;
    unsetenv("HSM_THREADS");
    CHECK(serial == res.csv);
  }
}

TEST_CASE("rate check experiment") {
  Config cfg = Config::from_pairs({{"p_list", "12,16"},
                                   {"n", "20"},
                                   {"replicates", "3"},
                                   {"k_list", "2,4"}});
  ExperimentResult res = hsm::run_rate_check(cfg);
  CsvTable t = testutil::parse_csv(res.csv);

  REQUIRE(t.columns ==
          std::vector<std::string>{"p", "k_param", "k_true", "lambda_theory",
                                   "mse", "mse_over_logp", "median_err",
                                   "median_over_logp"});
  REQUIRE(t.rows.size() == 4);
  for (size_t r = 0; r < t.rows.size(); ++r) {
    double p = t.num(r, "p");
    CHECK(t.num(r, "k_true") == t.num(r, "k_param") - 1);
    CHECK(t.num(r, "lambda_theory") ==
          doctest::Approx(2.0 * std::sqrt(std::log(p) / 20.0)).epsilon(1e-12));
    CHECK(t.num(r, "mse_over_logp") ==
          doctest::Approx(t.num(r, "mse") / std::log(p)).epsilon(1e-12));
    CHECK(t.num(r, "median_err") > 0.0);
  }
  Config again = Config::from_pairs({{"p_list", "12,16"},
                                     {"n", "20"},
                                     {"replicates", "3"},
                                     {"k_list", "2,4"}});
  CHECK(hsm::run_rate_check(again).csv == res.csv);
}

TEST_CASE("mse comparison experiment") {
  Config cfg = Config::from_pairs({{"p", "12"},
                                   {"n", "15"},
                                   {"replicates", "2"},
                                   {"lambda_count", "5"},
                                   {"k_list_ma", "3"},
                                   {"k_list_stair", "5"}});
  ExperimentResult res = hsm::run_mse_comparison(cfg);
  CsvTable t = testutil::parse_csv(res.csv);

  REQUIRE(t.columns ==
          std::vector<std::string>{"pattern", "estimator", "k_param", "k_true",
                                   "lambda_best", "mse", "median_err"});
  REQUIRE(t.rows.size() == 6);
  const std::vector<std::string> estimators = {"gl", "mgl", "log"};
  for (size_t r = 0; r < 6; ++r) {
    CHECK(t.cell(r, "pattern") == (r < 3 ? "moving-average" : "stair"));
    CHECK(t.cell(r, "estimator") == estimators[r % 3]);
    CHECK(t.num(r, "lambda_best") > 0.0);
    CHECK(t.num(r, "mse") > 0.0);
  }
  CHECK(t.num(0, "k_true") == 2.0);
  CHECK(t.num(3, "k_true") == 4.0);
}

TEST_CASE("psd diagnostics experiment") {
  Config cfg = Config::from_pairs({{"p", "12"},
                                   {"n", "15"},
                                   {"replicates", "3"},
                                   {"lambda_count", "4"},
                                   {"k_list", "3"}});
  ExperimentResult res = hsm::run_psd_diagnostics(cfg);
  CsvTable t = testutil::parse_csv(res.csv);

  REQUIRE(t.columns ==
          std::vector<std::string>{"estimator", "k_param", "k_true",
                                   "lambda_best", "psd_fraction",
                                   "min_eig_median", "min_eig_min"});
  REQUIRE(t.rows.size() == 3);
  for (size_t r = 0; r < 3; ++r) {
    double frac = t.num(r, "psd_fraction");
    CHECK(frac >= 0.0);
    CHECK(frac <= 1.0);
    CHECK(t.num(r, "min_eig_min") <= t.num(r, "min_eig_median") + 1e-15);
  }
}

TEST_CASE("prox benchmark experiment") {
  Config cfg = Config::from_pairs({{"instances", "4"}});
  ExperimentResult res = hsm::run_prox_benchmark(cfg);
  CsvTable t = testutil::parse_csv(res.csv);

  REQUIRE(t.columns ==
          std::vector<std::string>{"family", "instance", "nodes", "p",
                                   "cycles_naive", "cycles_path", "knots",
                                   "loop_evals"});
  REQUIRE(t.rows.size() == 8);
  for (size_t r = 0; r < 8; ++r) {
    CHECK(t.cell(r, "family") == (r < 4 ? "dag" : "path"));
    CHECK(t.num(r, "cycles_naive") >= 1.0);
    if (t.cell(r, "family") == "path") {
      CHECK(t.num(r, "cycles_path") == 1.0);
      CHECK(t.num(r, "loop_evals") == t.num(r, "knots") + 1.0);
    }
  }
  CHECK(res.note.find("naive_bcd_seconds") != std::string::npos);
  CHECK(res.note.find("path_based_seconds") != std::string::npos);

  Config again = Config::from_pairs({{"instances", "4"}});
  CHECK(hsm::run_prox_benchmark(again).csv == res.csv);
}

TEST_CASE("experiment dispatch") {
  Config cfg = small_profile_config();
  ExperimentResult direct = hsm::run_shrinkage_profile(cfg);
  Config via = small_profile_config();
  CHECK(hsm::run_experiment("shrinkage-profile", via).csv == direct.csv);
  Config bad = Config::from_pairs({});
  CHECK_THROWS_WITH_AS(hsm::run_experiment("volume-check", bad),
                       doctest::Contains("volume-check"),
                       std::invalid_argument);
}

TEST_CASE("unknown config keys stop an experiment") {
  Config cfg = Config::from_pairs({{"d", "6"}, {"lambda_cout", "3"}});
  CHECK_THROWS_WITH_AS(hsm::run_shrinkage_profile(cfg),
                       doctest::Contains("lambda_cout"),
                       std::invalid_argument);
}

TEST_SUITE_END();
