#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hsm {

inline constexpr const char* kVersion = "0.1.0";

// Runs fn(0..n-1) on a small thread pool.  HSM_THREADS caps the pool size
// (default: hardware concurrency).  Callers write results into slots indexed
// by i, so output does not depend on scheduling.  The first exception thrown
// by fn is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& fn);

// Flat `key = value` experiment configuration; '#' comments and blank lines
// are ignored.  Reads mark keys as consumed and finish() rejects leftovers,
// so a mistyped key fails instead of silently running defaults.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& name = "");
  static Config parse_file(const std::string& path);
  static Config from_pairs(
      const std::vector<std::pair<std::string, std::string>>& kv);

  std::string get_string(const std::string& key, const std::string& fallback);
  int get_int(const std::string& key, int fallback);
  double get_double(const std::string& key, double fallback);
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback);
  bool has(const std::string& key) const;
  void finish() const;  // throws listing any key never read

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

// An experiment maps (config, seed) to CSV bytes; re-running reproduces them
// exactly.  The csv string carries a '#' metadata preamble (config, seed,
// version), a header row, and the data rows.  note holds human-oriented
// extras such as wall-clock timings that must stay out of the CSV.
struct ExperimentResult {
  std::string csv;
  std::string note;
};

// Solution profiles for two signal patterns on a 50-deep scalar chain under
// the three chain regularizers, over ten levels between 0 and 1.
// Columns: pattern, regularizer, lambda, index, value.
ExperimentResult run_shrinkage_profile(Config& cfg);

// Error of the prefix-group estimator at the theory-scaled level
// 2*sqrt(log(p)/n) across (p, bandwidth) cells, with the log(p)-scaled
// column that should make curves for different p coincide.
// Columns: p, k_param, k_true, lambda_theory, mse, mse_over_logp,
//          median_err, median_over_logp.
ExperimentResult run_rate_check(Config& cfg);

// Best-on-a-grid error for the three band estimators on both covariance
// patterns.  Columns: pattern, estimator, k_param, k_true, lambda_best, mse,
// median_err.
ExperimentResult run_mse_comparison(Config& cfg);

// Fraction of replicates whose estimate at lambda_best is positive
// semidefinite, with min-eigenvalue summaries.  Columns: estimator, k_param,
// k_true, lambda_best, psd_fraction, min_eig_median, min_eig_min.
ExperimentResult run_psd_diagnostics(Config& cfg);

// Outer-cycle counts for naive block descent versus the path-based solver on
// random DAGs, and versus the direct chain solver on random path graphs.
// Columns: family, instance, nodes, p, cycles_naive, cycles_path, knots,
// loop_evals (knots and loop_evals apply to path instances only).
ExperimentResult run_prox_benchmark(Config& cfg);

// Dispatch by experiment name: shrinkage-profile, rate-check,
// mse-comparison, psd-diagnostics, prox-benchmark.
ExperimentResult run_experiment(const std::string& kind, Config& cfg);

}  // namespace hsm
