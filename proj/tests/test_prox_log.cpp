#include "hsm/prox_log.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hsm/hierarchy.hpp"
#include "test_util.hpp"

using hsm::GroupStructure;
using hsm::Hierarchy;
using hsm::LogProxOptions;
using hsm::LogProxSolution;
using hsm::PathDecomposition;
using hsm::PathKnots;

namespace {

LogProxOptions tight_bcd() {
  LogProxOptions opts;
  opts.tol = 1e-12;
  return opts;
}

Eigen::VectorXd latent_sum(const LogProxSolution& sol,
                           const GroupStructure& gs, Eigen::Index p) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
  for (size_t g = 0; g < gs.groups.size(); ++g)
    for (size_t k = 0; k < gs.groups[g].indices.size(); ++k)
      sum[gs.groups[g].indices[k]] +=
          sol.latents[g][static_cast<Eigen::Index>(k)];
  return sum;
}

}  // namespace

TEST_SUITE_BEGIN("log prox");

TEST_CASE("naive block descent") {
  std::mt19937_64 rng(101);

  SUBCASE("lambda zero is the identity") {
    GroupStructure gs = hsm::group_structure_log(testutil::two_layer_dag());
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 6);
    LogProxSolution sol = hsm::prox_log_naive_bcd(y, gs, 0.0);
    CHECK(sol.converged);
    CHECK((sol.beta - y).lpNorm<Eigen::Infinity>() <= 1e-12);
  }

  SUBCASE("a large level kills everything in one cycle") {
    GroupStructure gs = hsm::group_structure_log(testutil::two_layer_dag());
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 6);
    double lambda = 10.0 * y.norm();
    LogProxSolution sol = hsm::prox_log_naive_bcd(y, gs, lambda);
    CHECK(sol.beta.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(sol.cycles <= 2);
  }

  SUBCASE("reference pair") {
    GroupStructure gs;
    gs.p = 2;
    gs.groups = {{{0}, 1.0}, {{0, 1}, std::sqrt(2.0)}};
    Eigen::VectorXd y(2);
    y << 1.0, 1.0;
    LogProxSolution sol = hsm::prox_log_naive_bcd(y, gs, 0.2, tight_bcd());
    CHECK(sol.beta[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(sol.beta[1] == doctest::Approx(0.8).epsilon(1e-9));
    Eigen::VectorXd sum = latent_sum(sol, gs, 2);
    CHECK((sum - sol.beta).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("block statistic") {
  std::vector<int> sizes = {1, 1, 1};
  Eigen::VectorXd w(3);
  w << 1.0, std::sqrt(2.0), std::sqrt(3.0);
  Eigen::VectorXd y(3);
  y << 2.0, 2.0, 0.1;

  CHECK(hsm::f_stat(1, 0, y, sizes, w) == doctest::Approx(2.0));
  CHECK(hsm::f_stat(2, 0, y, sizes, w) == doctest::Approx(2.0));
  CHECK(hsm::f_stat(3, 2, y, sizes, w) == doctest::Approx(0.1));

  SUBCASE("standard weights give a running root mean square") {
    std::mt19937_64 rng(5);
    Eigen::VectorXd r = testutil::gaussian_vector(rng, 3);
    double f = hsm::f_stat(3, 1, r, sizes, w);
    double rms = std::sqrt((r[1] * r[1] + r[2] * r[2]) / 2.0);
    CHECK(f == doctest::Approx(rms));
  }
  SUBCASE("index and weight validation") {
    CHECK_THROWS_AS(hsm::f_stat(1, 1, y, sizes, w), std::invalid_argument);
    CHECK_THROWS_AS(hsm::f_stat(4, 0, y, sizes, w), std::invalid_argument);
    CHECK_THROWS_AS(hsm::f_stat(1, -1, y, sizes, w), std::invalid_argument);
    Eigen::VectorXd flat(3);
    flat << 1.0, 1.0, 2.0;
    CHECK_THROWS_AS(hsm::f_stat(2, 0, y, sizes, flat), std::invalid_argument);
  }
}

TEST_CASE("chain prox") {
  std::vector<int> ones3 = {1, 1, 1};
  Eigen::VectorXd w3(3);
  w3 << 1.0, std::sqrt(2.0), std::sqrt(3.0);

  SUBCASE("reference knot example") {
    Eigen::VectorXd y(3);
    y << 2.0, 2.0, 0.1;
    LogProxSolution sol = hsm::prox_log_path(y, ones3, 0.5, w3, true);
    CHECK(sol.knots == std::vector<int>{2});
    CHECK(sol.beta[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(sol.beta[1] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(sol.beta[2] == 0.0);
    CHECK(sol.loop_evals == 2);

    GroupStructure gs = hsm::nested_groups(ones3);
    auto report = hsm::verify_log_optimality(y, sol, gs, 0.5, 1e-8);
    CHECK(report.ok);

    LogProxSolution oracle = hsm::prox_log_naive_bcd(y, gs, 0.5, tight_bcd());
    CHECK((sol.beta - oracle.beta).lpNorm<Eigen::Infinity>() <= 1e-8);
  }

  SUBCASE("two-block second branch") {
    std::vector<int> ones2 = {1, 1};
    Eigen::VectorXd w2(2);
    w2 << 1.0, std::sqrt(2.0);
    Eigen::VectorXd y(2);
    y << 1.0, 0.5;
    LogProxSolution sol = hsm::prox_log_path(y, ones2, 0.2, w2);
    CHECK(sol.beta[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(sol.beta[1] == doctest::Approx(0.3).epsilon(1e-12));
  }

  SUBCASE("lambda zero reproduces the input") {
    std::mt19937_64 rng(111);
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 3);
    LogProxSolution sol = hsm::prox_log_path(y, ones3, 0.0, w3);
    CHECK((sol.beta - y).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK(sol.loop_evals == static_cast<int>(sol.knots.size()) + 1);
  }

  SUBCASE("knot locations do not depend on lambda") {
    std::mt19937_64 rng(112);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<int> sizes = testutil::random_sizes(rng, 2, 20, 4);
      Eigen::VectorXd w = testutil::nested_weights(sizes);
      Eigen::VectorXd y =
          testutil::gaussian_vector(rng, Hierarchy::path(sizes).p());
      LogProxSolution lo = hsm::prox_log_path(y, sizes, 0.05, w);
      LogProxSolution hi = hsm::prox_log_path(y, sizes, 0.6, w);
      REQUIRE(hi.knots.size() <= lo.knots.size());
      for (size_t i = 0; i < hi.knots.size(); ++i)
        CHECK(hi.knots[i] == lo.knots[i]);
    }
  }

  SUBCASE("two-phase evaluation matches the direct solve") {
    std::mt19937_64 rng(113);
    for (int rep = 0; rep < 15; ++rep) {
      std::vector<int> sizes = testutil::random_sizes(rng, 2, 20, 4);
      Eigen::VectorXd w = testutil::nested_weights(sizes);
      Eigen::VectorXd y =
          testutil::gaussian_vector(rng, Hierarchy::path(sizes).p());
      PathKnots pk = hsm::log_path_knots(y, sizes, w);
      for (size_t j = 1; j < pk.values.size(); ++j)
        CHECK(pk.values[j] <= pk.values[j - 1] * (1.0 + 1e-12));
      for (double lambda : {0.0, 0.1, 0.3, 0.8}) {
        LogProxSolution direct = hsm::prox_log_path(y, sizes, lambda, w);
        LogProxSolution reused = hsm::apply_log_knots(pk, y, sizes, lambda, w);
        CHECK(reused.loop_evals == 0);
        CHECK(reused.knots == direct.knots);
        CHECK((reused.beta - direct.beta).lpNorm<Eigen::Infinity>() <= 1e-12);
      }
    }
  }

  SUBCASE("agrees with naive descent on random chains") {
    std::mt19937_64 rng(114);
    std::uniform_real_distribution<double> lam(0.02, 1.2);
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<int> sizes = testutil::random_sizes(rng, 1, 15, 4);
      Eigen::VectorXd w = testutil::nested_weights(sizes);
      Eigen::VectorXd y =
          testutil::gaussian_vector(rng, Hierarchy::path(sizes).p());
      double lambda = lam(rng);
      LogProxSolution fast = hsm::prox_log_path(y, sizes, lambda, w, true);
      CHECK(fast.loop_evals == static_cast<int>(fast.knots.size()) + 1);

      GroupStructure gs = hsm::nested_groups(sizes);
      LogProxSolution oracle =
          hsm::prox_log_naive_bcd(y, gs, lambda, tight_bcd());
      CHECK((fast.beta - oracle.beta).lpNorm<Eigen::Infinity>() <= 1e-8);

      Eigen::VectorXd sum = latent_sum(fast, gs, y.size());
      CHECK((sum - fast.beta).lpNorm<Eigen::Infinity>() <=
            1e-12 * (1.0 + y.lpNorm<Eigen::Infinity>()));
    }
  }

  SUBCASE("support is a prefix of the blocks") {
    std::mt19937_64 rng(115);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<int> sizes = testutil::random_sizes(rng, 2, 20, 3);
      Eigen::VectorXd w = testutil::nested_weights(sizes);
      Eigen::VectorXd y =
          testutil::gaussian_vector(rng, Hierarchy::path(sizes).p());
      LogProxSolution sol = hsm::prox_log_path(y, sizes, 0.4, w);
      int at = 0;
      bool dead = false;
      for (size_t d = 0; d < sizes.size(); ++d) {
        double blk = sol.beta.segment(at, sizes[d]).norm();
        if (dead) CHECK(blk == 0.0);
        if (blk == 0.0) dead = true;
        at += sizes[d];
      }
    }
  }

  SUBCASE("weight validation") {
    Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
    Eigen::VectorXd bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(hsm::prox_log_path(y, {1, 1}, 0.1, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(hsm::prox_log_path(y, {1, 1}, -0.1, w3.head(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("pair closed form") {
  SUBCASE("reference points") {
    Eigen::Vector2d a =
        hsm::prox_log_pair({1.0, 1.0}, 0.2, 1.0, std::sqrt(2.0));
    CHECK(a[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.8).epsilon(1e-12));
    Eigen::Vector2d b =
        hsm::prox_log_pair({1.0, 0.5}, 0.2, 1.0, std::sqrt(2.0));
    CHECK(b[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(0.3).epsilon(1e-12));
    Eigen::Vector2d c = hsm::prox_log_pair({1.0, -2.0}, 0.0, 1.0, 2.0);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -2.0);
  }
  SUBCASE("matches the chain solver and naive descent") {
    std::mt19937_64 rng(121);
    std::uniform_real_distribution<double> unif(0.1, 1.5);
    GroupStructure gs;
    gs.p = 2;
    for (int rep = 0; rep < 300; ++rep) {
      Eigen::Vector2d y(testutil::gaussian_vector(rng, 2));
      double w1 = unif(rng), w2 = w1 + unif(rng), lambda = 0.5 * unif(rng);
      Eigen::Vector2d direct = hsm::prox_log_pair(y, lambda, w1, w2);
      Eigen::VectorXd wv(2);
      wv << w1, w2;
      LogProxSolution chain = hsm::prox_log_path(y, {1, 1}, lambda, wv);
      CHECK((direct - Eigen::Vector2d(chain.beta)).lpNorm<Eigen::Infinity>() <=
            1e-12);
      gs.groups = {{{0}, w1}, {{0, 1}, w2}};
      LogProxSolution oracle =
          hsm::prox_log_naive_bcd(y, gs, lambda, tight_bcd());
      CHECK((direct - Eigen::Vector2d(oracle.beta)).lpNorm<Eigen::Infinity>() <=
            1e-8);
    }
  }
  SUBCASE("weights must be ordered") {
    CHECK_THROWS_AS(hsm::prox_log_pair({1.0, 1.0}, 0.1, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(hsm::prox_log_pair({1.0, 1.0}, 0.1, 2.0, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("path-based block descent") {
  std::mt19937_64 rng(131);

  SUBCASE("a chain finishes in one outer cycle") {
    std::vector<int> sizes = {2, 1, 2};
    Hierarchy h = Hierarchy::path(sizes);
    PathDecomposition pd = hsm::path_decompose(h);
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 5);
    LogProxSolution sol = hsm::prox_log_path_bcd(y, h, pd, 0.3);
    CHECK(sol.cycles == 1);
    CHECK(sol.converged);
    LogProxSolution chain =
        hsm::prox_log_path(y, sizes, 0.3, testutil::nested_weights(sizes));
    CHECK((sol.beta - chain.beta).lpNorm<Eigen::Infinity>() <= 1e-15);
  }

  SUBCASE("lambda zero is the identity") {
    Hierarchy h = testutil::two_layer_dag();
    PathDecomposition pd = hsm::path_decompose(h);
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 6);
    LogProxSolution sol = hsm::prox_log_path_bcd(y, h, pd, 0.0);
    CHECK((sol.beta - y).lpNorm<Eigen::Infinity>() <= 1e-12);
  }

  SUBCASE("agrees with naive descent on random DAGs") {
    for (int rep = 0; rep < 30; ++rep) {
      Hierarchy h = testutil::random_dag(rng, 8, 3);
      PathDecomposition pd = hsm::path_decompose(h);
      GroupStructure gs = hsm::group_structure_log(h);
      Eigen::VectorXd y = testutil::gaussian_vector(rng, h.p());
      double lambda = 0.3 * y.lpNorm<Eigen::Infinity>();
      LogProxSolution fast =
          hsm::prox_log_path_bcd(y, h, pd, lambda, {}, tight_bcd());
      LogProxSolution naive =
          hsm::prox_log_naive_bcd(y, gs, lambda, tight_bcd());
      REQUIRE(fast.converged);
      REQUIRE(naive.converged);
      CHECK((fast.beta - naive.beta).lpNorm<Eigen::Infinity>() <= 1e-8);
      CHECK(fast.cycles <= naive.cycles);
    }
  }

  SUBCASE("latents land on the ancestor groups") {
    Hierarchy h = testutil::two_layer_dag();
    PathDecomposition pd = hsm::path_decompose(h);
    GroupStructure gs = hsm::group_structure_log(h);
    Eigen::VectorXd y = testutil::gaussian_vector(rng, 6);
    LogProxOptions opts = tight_bcd();
    opts.want_latents = true;
    LogProxSolution sol = hsm::prox_log_path_bcd(y, h, pd, 0.2, {}, opts);
    REQUIRE(sol.latents.size() == gs.groups.size());
    Eigen::VectorXd sum = latent_sum(sol, gs, 6);
    CHECK((sum - sol.beta).lpNorm<Eigen::Infinity>() <= 1e-10);
    auto report = hsm::verify_log_optimality(y, sol, gs, 0.2, 1e-6);
    CHECK(report.ok);
  }

  SUBCASE("ancestors of live nodes stay live") {
    for (int rep = 0; rep < 20; ++rep) {
      Hierarchy h = testutil::random_dag(rng, 10, 2);
      PathDecomposition pd = hsm::path_decompose(h);
      Eigen::VectorXd y = testutil::gaussian_vector(rng, h.p());
      LogProxSolution sol =
          hsm::prox_log_path_bcd(y, h, pd, 0.3, {}, tight_bcd());
      for (int j = 0; j < h.node_count(); ++j) {
        double mag = 0.0;
        for (int idx : h.node(j))
          mag = std::max(mag, std::abs(sol.beta[idx]));
        if (mag <= 1e-4) continue;
        for (int i : h.ancestors(j)) {
          double up = 0.0;
          for (int idx : h.node(i)) up = std::max(up, std::abs(sol.beta[idx]));
          CHECK(up > 1e-8);
        }
      }
    }
  }

  SUBCASE("a bad decomposition is rejected") {
    Hierarchy h = Hierarchy::path({1, 1});
    PathDecomposition missing;
    missing.paths = {{0}};
    Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(hsm::prox_log_path_bcd(y, h, missing, 0.1),
                    std::invalid_argument);
    PathDecomposition twice;
    twice.paths = {{0, 1}, {1}};
    CHECK_THROWS_AS(hsm::prox_log_path_bcd(y, h, twice, 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("optimality verifier") {
  std::vector<int> sizes = {1, 1, 1};
  GroupStructure gs = hsm::nested_groups(sizes);
  Eigen::VectorXd y(3);
  y << 2.0, 2.0, 0.1;

  SUBCASE("accepts the solver output") {
    Eigen::VectorXd w = testutil::nested_weights(sizes);
    LogProxSolution sol = hsm::prox_log_path(y, sizes, 0.5, w, true);
    auto report = hsm::verify_log_optimality(y, sol, gs, 0.5, 1e-8);
    CHECK(report.ok);
    CHECK(report.max_violation <= 1e-8);
    CHECK(report.sum_defect <= 1e-8);
  }
  SUBCASE("rejects an unshrunk point") {
    LogProxSolution fake;
    fake.beta = y;
    fake.latents.resize(3);
    fake.latents[0] = y.head(1);
    fake.latents[1] = Eigen::VectorXd::Zero(2);
    fake.latents[2] = Eigen::VectorXd::Zero(3);
    fake.latents[2].tail(2) = y.tail(2);
    auto report = hsm::verify_log_optimality(y, fake, gs, 0.5, 1e-8);
    CHECK_FALSE(report.ok);
    CHECK(report.max_violation > 0.1);
  }
  SUBCASE("lambda zero accepts an exact decomposition") {
    LogProxSolution ident;
    ident.beta = y;
    ident.latents.resize(3);
    ident.latents[0] = y.head(1);
    ident.latents[1] = Eigen::VectorXd::Zero(2);
    ident.latents[1][1] = y[1];
    ident.latents[2] = Eigen::VectorXd::Zero(3);
    ident.latents[2][2] = y[2];
    auto report = hsm::verify_log_optimality(y, ident, gs, 0.0, 1e-10);
    CHECK(report.ok);
  }
  SUBCASE("latents are required") {
    LogProxSolution bare;
    bare.beta = y;
    CHECK_THROWS_AS(hsm::verify_log_optimality(y, bare, gs, 0.5, 1e-8),
                    std::invalid_argument);
  }
}

TEST_CASE("depth ratio window") {
  // Deep chain with root-mean-square weights: output coordinate ratios never
  // exceed the input ratios, and inside the solver's flat-signal window they
  // are also bounded below.
  const int depth = 50;
  std::vector<int> sizes(depth, 1);
  Eigen::VectorXd w(depth);
  for (int d = 0; d < depth; ++d) w[d] = std::sqrt(d + 1.0);

  auto upper_bound_holds = [&](const Eigen::VectorXd& y, double lambda) {
    LogProxSolution sol = hsm::prox_log_path(y, sizes, lambda, w);
    for (int d = 0; d < depth; ++d) {
      if (sol.beta[d] == 0.0 || y[d] == 0.0) continue;
      for (int h = 1; d + h < depth; ++h) {
        if (y[d + h] == 0.0) continue;
        double lhs = std::abs(sol.beta[d + h]) / std::abs(sol.beta[d]);
        double rhs = std::abs(y[d + h]) / std::abs(y[d]);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
    return sol;
  };

  SUBCASE("flat signal shrinks uniformly") {
    const int support = 30;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(depth);
    y.head(support).setOnes();
    for (double lambda : {0.1, 0.35, 0.6, 0.9}) {
      LogProxSolution sol = hsm::prox_log_path(y, sizes, lambda, w);
      for (int d = 0; d < support; ++d)
        CHECK(sol.beta[d] == doctest::Approx(1.0 - lambda).epsilon(1e-12));
      for (int d = support; d < depth; ++d) CHECK(sol.beta[d] == 0.0);
    }
  }

  SUBCASE("linear signal keeps ratios below the input ratios") {
    Eigen::VectorXd y(depth);
    for (int i = 0; i < depth; ++i) y[i] = 1.0 - i / 50.0;
    for (int li = 1; li <= 10; ++li) upper_bound_holds(y, li / 10.0);
  }

  SUBCASE("noisy flat signal stays inside the two-sided window") {
    const int support = 30;
    const double sigma = 0.05, lambda = 0.35;
    const double lam_bar = 2.0 * sigma * std::sqrt(std::log((double)depth));
    const double delta = 1.0 - lambda / (1.0 - lam_bar);
    std::mt19937_64 rng(9);
    Eigen::VectorXd y = testutil::gaussian_vector(rng, depth, sigma);
    y.head(support).array() += 1.0;

    // The window premise: every selected segment average inside the support
    // stays above 1 - lam_bar.
    PathKnots pk = hsm::log_path_knots(y, sizes, w);
    for (size_t j = 0; j < pk.knots.size() && pk.knots[j] <= support; ++j)
      REQUIRE(pk.values[j] >= 1.0 - lam_bar);

    LogProxSolution sol = upper_bound_holds(y, lambda);
    for (int d = 0; d < support; ++d) {
      REQUIRE(sol.beta[d] != 0.0);
      for (int h = 1; d + h < support; ++h) {
        double lhs = std::abs(sol.beta[d + h]) / std::abs(sol.beta[d]);
        double rhs = std::abs(y[d + h]) / std::abs(y[d]);
        CHECK(lhs >= delta * rhs * (1.0 - 1e-12));
      }
    }
  }
}

TEST_SUITE_END();
