#include "hsm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hsm/covband.hpp"
#include "hsm/hierarchy.hpp"
#include "hsm/io.hpp"
#include "hsm/prox_gl.hpp"
#include "hsm/prox_log.hpp"

namespace hsm {

namespace {

int pool_size() {
  unsigned hw = std::thread::hardware_concurrency();
  int t = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("HSM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) t = static_cast<int>(std::min(v, 256L));
  }
  return t;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<int> rounded_linspace(double lo, double hi, int count) {
  std::vector<int> out(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
    out[static_cast<size_t>(i)] =
        static_cast<int>(std::lround(lo + t * (hi - lo)));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

void common_metadata(CsvWriter& w, const std::string& experiment,
                     std::uint64_t seed) {
  w.metadata("experiment", experiment);
  w.metadata("version", kVersion);
  w.metadata("seed", std::to_string(seed));
}

// k_param follows the generator parameter; the strict nonzero-lag count of
// the generated matrix is one less, reported per row as k_true.
void bandwidth_metadata(CsvWriter& w) {
  w.metadata("bandwidth_note",
             "k_param counts nonzero lags including lag 0; k_true is the "
             "largest nonzero off-diagonal lag of the generated matrix");
}

Eigen::MatrixXd make_pattern(const std::string& pattern, int p, int k) {
  if (pattern == "moving-average") return gen_moving_average(p, k);
  if (pattern == "stair") return gen_stair(p, k);
  throw std::invalid_argument("unknown pattern: " + pattern);
}

BandPenalty penalty_kind(const std::string& name) {
  if (name == "gl") return BandPenalty::Gl;
  if (name == "mgl") return BandPenalty::Mgl;
  if (name == "log") return BandPenalty::Log;
  throw std::invalid_argument("unknown estimator: " + name);
}

// Sample covariances for all replicates of one covariance model.
std::vector<Eigen::MatrixXd> replicate_covs(const Eigen::MatrixXd& sigma,
                                            int n, int replicates,
                                            std::uint64_t seed) {
  GaussianSampler sampler(sigma);
  std::vector<Eigen::MatrixXd> covs(static_cast<size_t>(replicates));
  parallel_for(replicates, [&](int j) {
    Eigen::MatrixXd X = sampler.draw(n, seed + static_cast<std::uint64_t>(j));
    covs[static_cast<size_t>(j)] = sample_covariance(X);
  });
  return covs;
}

struct BestPick {
  double lambda = 0.0;
  double mse = 0.0;
  std::vector<double> errs;  // per replicate at the picked level
};

// Grid search over 50 log-spaced levels anchored on the first replicate.
BestPick best_on_grid(const std::vector<Eigen::MatrixXd>& covs,
                      const Eigen::MatrixXd& sigma_star, BandPenalty kind,
                      int lambda_count) {
  const int reps = static_cast<int>(covs.size());
  const double p = static_cast<double>(sigma_star.rows());
  std::vector<double> grid = lambda_grid(covs[0], kind, lambda_count);
  const int nl = static_cast<int>(grid.size());
  std::vector<std::vector<double>> errs(static_cast<size_t>(nl));
  parallel_for(nl, [&](int li) {
    std::vector<double> e(static_cast<size_t>(reps));
    for (int j = 0; j < reps; ++j) {
      BandEstimate est =
          estimate_banded(covs[static_cast<size_t>(j)], grid[static_cast<size_t>(li)], kind);
      e[static_cast<size_t>(j)] = (est.sigma - sigma_star).squaredNorm() / p;
    }
    errs[static_cast<size_t>(li)] = std::move(e);
  });
  std::vector<std::pair<double, double>> pairs(static_cast<size_t>(nl));
  for (int li = 0; li < nl; ++li)
    pairs[static_cast<size_t>(li)] = {grid[static_cast<size_t>(li)],
                                      mean(errs[static_cast<size_t>(li)])};
  BestPick pick;
  pick.lambda = lambda_best(pairs);
  for (int li = 0; li < nl; ++li)
    if (grid[static_cast<size_t>(li)] == pick.lambda) {
      pick.mse = pairs[static_cast<size_t>(li)].second;
      pick.errs = errs[static_cast<size_t>(li)];
    }
  return pick;
}

}  // namespace

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int threads = std::min(pool_size(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

Config Config::parse(std::istream& in, const std::string& name) {
  Config cfg;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError((name.empty() ? "config" : name) + ":" +
                     std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (!cfg.values_.emplace(key, value).second) fail("duplicate key: " + key);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return parse(in, path);
}

Config Config::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  Config cfg;
  for (const auto& [key, value] : kv)
    if (!cfg.values_.emplace(key, value).second)
      throw std::invalid_argument("duplicate config key: " + key);
  return cfg;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key, int fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not an integer: " + it->second);
  }
}

double Config::get_double(const std::string& key, double fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "' is not a number: " + it->second);
  }
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) {
  consumed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config key '" + key + "' has an empty item");
    try {
      size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw std::invalid_argument("config key '" + key +
                                  "' is not an integer list: " + it->second);
    }
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "' is empty");
  return out;
}

bool Config::has(const std::string& key) const {
  return values_.count(key) > 0;
}

void Config::finish() const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty())
    throw std::invalid_argument("unknown config key(s): " + unknown);
}

ExperimentResult run_shrinkage_profile(Config& cfg) {
  const int depth = cfg.get_int("d", 50);
  const int lambda_count = cfg.get_int("lambda_count", 10);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.finish();
  if (depth < 2) throw std::invalid_argument("d must be >= 2");
  if (lambda_count < 2) throw std::invalid_argument("lambda_count must be >= 2");

  const std::vector<int> sizes(static_cast<size_t>(depth), 1);
  Eigen::VectorXd w_gl = Eigen::VectorXd::Ones(depth);
  Eigen::VectorXd w_log(depth);
  for (int d = 0; d < depth; ++d) w_log[d] = std::sqrt(d + 1.0);
  MglWeights w_mgl = MglWeights::standard(sizes);

  Eigen::VectorXd linear(depth), step(depth);
  for (int i = 0; i < depth; ++i) {
    linear[i] = 1.0 - static_cast<double>(i) / depth;
    step[i] = i < depth / 2 ? 1.0 : 0.5;
  }

  std::ostringstream out;
  CsvWriter w(out);
  common_metadata(w, "shrinkage-profile", seed);
  w.metadata("d", std::to_string(depth));
  w.metadata("lambda_count", std::to_string(lambda_count));
  w.header({"pattern", "regularizer", "lambda", "index", "value"});

  const std::vector<std::pair<std::string, const Eigen::VectorXd*>> patterns =
      {{"linear", &linear}, {"step", &step}};
  const std::vector<std::string> regs = {"gl", "log", "mgl"};
  for (const auto& [pname, signal] : patterns)
    for (const auto& reg : regs)
      for (int li = 0; li < lambda_count; ++li) {
        double lambda = static_cast<double>(li) / (lambda_count - 1);
        Eigen::VectorXd beta;
        if (reg == "gl")
          beta = prox_gl_path(*signal, sizes, lambda, w_gl).beta;
        else if (reg == "log")
          beta = prox_log_path(*signal, sizes, lambda, w_log).beta;
        else
          beta = prox_mgl_path(*signal, sizes, lambda, w_mgl).beta;
        for (int i = 0; i < depth; ++i)
          w.row({pname, reg, CsvWriter::cell(lambda), CsvWriter::cell(i + 1),
                 CsvWriter::cell(beta[i])});
      }
  return {out.str(), ""};
}

ExperimentResult run_rate_check(Config& cfg) {
  const std::vector<int> p_list = cfg.get_int_list("p_list", {100, 200, 400});
  const int n = cfg.get_int("n", 50);
  const int replicates = cfg.get_int("replicates", 50);
  const std::vector<int> k_list =
      cfg.get_int_list("k_list", rounded_linspace(10, 90, 10));
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.finish();
  if (n < 2 || replicates < 1)
    throw std::invalid_argument("need n >= 2 and replicates >= 1");

  std::ostringstream out;
  CsvWriter w(out);
  common_metadata(w, "rate-check", seed);
  w.metadata("p_list", join_ints(p_list));
  w.metadata("n", std::to_string(n));
  w.metadata("replicates", std::to_string(replicates));
  w.metadata("k_list", join_ints(k_list));
  bandwidth_metadata(w);
  w.header({"p", "k_param", "k_true", "lambda_theory", "mse", "mse_over_logp",
            "median_err", "median_over_logp"});

  for (int p : p_list) {
    const double lambda = 2.0 * std::sqrt(std::log(static_cast<double>(p)) / n);
    for (int k : k_list) {
      Eigen::MatrixXd sigma_star = gen_moving_average(p, k);
      int k_true = bandwidth(sigma_star);
      auto covs = replicate_covs(sigma_star, n, replicates, seed);
      std::vector<double> errs(static_cast<size_t>(replicates));
      parallel_for(replicates, [&](int j) {
        BandEstimate est = estimate_log(covs[static_cast<size_t>(j)], lambda);
        errs[static_cast<size_t>(j)] =
            (est.sigma - sigma_star).squaredNorm() / p;
      });
      double m = mean(errs), med = median(errs);
      double logp = std::log(static_cast<double>(p));
      w.row({CsvWriter::cell(p), CsvWriter::cell(k), CsvWriter::cell(k_true),
             CsvWriter::cell(lambda), CsvWriter::cell(m),
             CsvWriter::cell(m / logp), CsvWriter::cell(med),
             CsvWriter::cell(med / logp)});
    }
  }
  return {out.str(), ""};
}

ExperimentResult run_mse_comparison(Config& cfg) {
  const int p = cfg.get_int("p", 100);
  const int n = cfg.get_int("n", 50);
  const int replicates = cfg.get_int("replicates", 50);
  const int lambda_count = cfg.get_int("lambda_count", 50);
  const std::vector<int> k_list_ma =
      cfg.get_int_list("k_list_ma", rounded_linspace(10, 90, 10));
  const std::vector<int> k_list_stair =
      cfg.get_int_list("k_list_stair", {5, 15, 25, 35, 45, 55, 65, 75, 85, 95});
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.finish();

  std::ostringstream out;
  CsvWriter w(out);
  common_metadata(w, "mse-comparison", seed);
  w.metadata("p", std::to_string(p));
  w.metadata("n", std::to_string(n));
  w.metadata("replicates", std::to_string(replicates));
  w.metadata("lambda_count", std::to_string(lambda_count));
  w.metadata("k_list_ma", join_ints(k_list_ma));
  w.metadata("k_list_stair", join_ints(k_list_stair));
  bandwidth_metadata(w);
  w.header({"pattern", "estimator", "k_param", "k_true", "lambda_best", "mse",
            "median_err"});

  const std::vector<std::pair<std::string, const std::vector<int>*>> cells = {
      {"moving-average", &k_list_ma}, {"stair", &k_list_stair}};
  const std::vector<std::string> estimators = {"gl", "mgl", "log"};
  for (const auto& [pattern, klist] : cells)
    for (int k : *klist) {
      Eigen::MatrixXd sigma_star = make_pattern(pattern, p, k);
      int k_true = bandwidth(sigma_star);
      auto covs = replicate_covs(sigma_star, n, replicates, seed);
      for (const auto& est_name : estimators) {
        BestPick pick = best_on_grid(covs, sigma_star,
                                     penalty_kind(est_name), lambda_count);
        w.row({pattern, est_name, CsvWriter::cell(k), CsvWriter::cell(k_true),
               CsvWriter::cell(pick.lambda), CsvWriter::cell(pick.mse),
               CsvWriter::cell(median(pick.errs))});
      }
    }
  return {out.str(), ""};
}

ExperimentResult run_psd_diagnostics(Config& cfg) {
  const int p = cfg.get_int("p", 100);
  const int n = cfg.get_int("n", 50);
  const int replicates = cfg.get_int("replicates", 50);
  const int lambda_count = cfg.get_int("lambda_count", 50);
  const std::vector<int> k_list =
      cfg.get_int_list("k_list", rounded_linspace(10, 90, 10));
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.finish();

  std::ostringstream out;
  CsvWriter w(out);
  common_metadata(w, "psd-diagnostics", seed);
  w.metadata("pattern", "moving-average");
  w.metadata("p", std::to_string(p));
  w.metadata("n", std::to_string(n));
  w.metadata("replicates", std::to_string(replicates));
  w.metadata("lambda_count", std::to_string(lambda_count));
  w.metadata("k_list", join_ints(k_list));
  bandwidth_metadata(w);
  w.header({"estimator", "k_param", "k_true", "lambda_best", "psd_fraction",
            "min_eig_median", "min_eig_min"});

  const std::vector<std::string> estimators = {"gl", "mgl", "log"};
  for (const auto& est_name : estimators)
    for (int k : k_list) {
      Eigen::MatrixXd sigma_star = gen_moving_average(p, k);
      int k_true = bandwidth(sigma_star);
      auto covs = replicate_covs(sigma_star, n, replicates, seed);
      BandPenalty kind = penalty_kind(est_name);
      BestPick pick = best_on_grid(covs, sigma_star, kind, lambda_count);
      std::vector<double> eigs(static_cast<size_t>(replicates));
      std::vector<int> psd(static_cast<size_t>(replicates));
      parallel_for(replicates, [&](int j) {
        BandEstimate est =
            estimate_banded(covs[static_cast<size_t>(j)], pick.lambda, kind);
        eigs[static_cast<size_t>(j)] = min_eigenvalue(est.sigma);
        psd[static_cast<size_t>(j)] = is_psd(est.sigma) ? 1 : 0;
      });
      int hits = 0;
      for (int flag : psd) hits += flag;
      w.row({est_name, CsvWriter::cell(k), CsvWriter::cell(k_true),
             CsvWriter::cell(pick.lambda),
             CsvWriter::cell(static_cast<double>(hits) / replicates),
             CsvWriter::cell(median(eigs)),
             CsvWriter::cell(*std::min_element(eigs.begin(), eigs.end()))});
    }
  return {out.str(), ""};
}

namespace {

struct BenchRow {
  std::string family;
  int instance = 0;
  int nodes = 0;
  int p = 0;
  int cycles_naive = 0;
  int cycles_path = 0;
  int knots = 0;
  int loop_evals = 0;
};

Hierarchy random_dag(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> node_count(5, 25);
  std::uniform_int_distribution<int> node_size(1, 4);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = node_count(rng);
  std::vector<std::vector<int>> nodes(static_cast<size_t>(n));
  int at = 0;
  for (auto& s : nodes) {
    int len = node_size(rng);
    for (int i = 0; i < len; ++i) s.push_back(at++);
  }
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
    if (v >= 2 && coin(rng) < 0.3) {
      int u = pick(rng);
      if (u != edges.back().first) edges.emplace_back(u, v);
    }
  }
  return Hierarchy(at, std::move(nodes), std::move(edges));
}

}  // namespace

ExperimentResult run_prox_benchmark(Config& cfg) {
  const int instances = cfg.get_int("instances", 100);
  const double lambda = cfg.get_double("lambda", 0.3);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.finish();
  if (instances < 1) throw std::invalid_argument("instances must be >= 1");

  std::vector<BenchRow> rows(static_cast<size_t>(2 * instances));
  std::atomic<long> naive_ns{0}, path_ns{0};
  using clock = std::chrono::steady_clock;

  parallel_for(2 * instances, [&](int idx) {
    const bool is_dag = idx < instances;
    const int i = is_dag ? idx : idx - instances;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(idx));
    BenchRow row;
    row.family = is_dag ? "dag" : "path";
    row.instance = i;
    Hierarchy h = [&]() {
      if (is_dag) return random_dag(rng);
      std::uniform_int_distribution<int> depth_pick(10, 60);
      std::uniform_int_distribution<int> node_size(1, 4);
      int depth = depth_pick(rng);
      std::vector<int> sizes(static_cast<size_t>(depth));
      for (auto& s : sizes) s = node_size(rng);
      return Hierarchy::path(sizes);
    }();
    row.nodes = h.node_count();
    row.p = h.p();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd y(h.p());
    for (int j = 0; j < h.p(); ++j) y[j] = gauss(rng);

    GroupStructure gs = group_structure_log(h);
    auto t0 = clock::now();
    LogProxSolution naive = prox_log_naive_bcd(y, gs, lambda);
    auto t1 = clock::now();
    PathDecomposition pd = path_decompose(h);
    LogProxSolution fast = prox_log_path_bcd(y, h, pd, lambda);
    auto t2 = clock::now();
    row.cycles_naive = naive.cycles;
    row.cycles_path = fast.cycles;
    if (!is_dag) {
      std::vector<int> sizes;
      for (int node : h.path_order())
        sizes.push_back(static_cast<int>(h.node(node).size()));
      Eigen::VectorXd w(h.node_count());
      double cum = 0.0;
      for (int d = 0; d < h.node_count(); ++d) {
        cum += sizes[static_cast<size_t>(d)];
        w[d] = std::sqrt(cum);
      }
      LogProxSolution chain = prox_log_path(y, sizes, lambda, w);
      row.knots = static_cast<int>(chain.knots.size());
      row.loop_evals = chain.loop_evals;
    }
    naive_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                    .count();
    path_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1)
                   .count();
    rows[static_cast<size_t>(idx)] = std::move(row);
  });

  std::ostringstream out;
  CsvWriter w(out);
  common_metadata(w, "prox-benchmark", seed);
  w.metadata("instances", std::to_string(instances));
  w.metadata("lambda", format_double(lambda));
  w.metadata("timing_note",
             "wall-clock totals go to stdout, not the CSV, so identical "
             "configs reproduce identical bytes");
  w.header({"family", "instance", "nodes", "p", "cycles_naive", "cycles_path",
            "knots", "loop_evals"});
  for (const auto& row : rows)
    w.row({row.family, CsvWriter::cell(row.instance),
           CsvWriter::cell(row.nodes), CsvWriter::cell(row.p),
           CsvWriter::cell(row.cycles_naive), CsvWriter::cell(row.cycles_path),
           CsvWriter::cell(row.knots), CsvWriter::cell(row.loop_evals)});

  std::ostringstream note;
  note << "naive_bcd_seconds = " << (naive_ns.load() * 1e-9) << "\n"
       << "path_based_seconds = " << (path_ns.load() * 1e-9) << "\n";
  return {out.str(), note.str()};
}

ExperimentResult run_experiment(const std::string& kind, Config& cfg) {
  if (kind == "shrinkage-profile") return run_shrinkage_profile(cfg);
  if (kind == "rate-check") return run_rate_check(cfg);
  if (kind == "mse-comparison") return run_mse_comparison(cfg);
  if (kind == "psd-diagnostics") return run_psd_diagnostics(cfg);
  if (kind == "prox-benchmark") return run_prox_benchmark(cfg);
  throw std::invalid_argument("unknown experiment: " + kind);
}

}  // namespace hsm
