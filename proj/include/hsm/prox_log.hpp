#pragma once

#include <Eigen/Dense>

#include <vector>

#include "hsm/hierarchy.hpp"

namespace hsm {

struct LogProxOptions {
  double tol = 1e-10;      // cycle-to-cycle max-norm change, scaled by 1+||y||_inf
  int max_cycles = 100000;
  bool want_latents = false;
};

// beta plus its latent decomposition beta = sum_g v_g with supp(v_g) in
// group g.  latents holds one vector per group, compressed to the group's
// index list; it is empty when not materialized.  Path runs fill knots
// (1-based end positions of the selected blocks) and loop_evals (number of
// while-condition evaluations, = |knots| + 1); BCD runs fill cycles.
struct LogProxSolution {
  Eigen::VectorXd beta;
  std::vector<Eigen::VectorXd> latents;
  std::vector<int> knots;
  int cycles = 0;
  int loop_evals = 0;
  bool converged = false;
};

// Cyclic BCD over the latent vectors: each block update group-soft-thresholds
// the residual y_g - (beta_g - v_g).  Works for any group structure.
LogProxSolution prox_log_naive_bcd(const Eigen::VectorXd& y,
                                   const GroupStructure& gs, double lambda,
                                   const LogProxOptions& opts = {});

// Block statistic ||y over blocks k+1..j|| / sqrt(w_j^2 - w_k^2) for nested
// chain groups; j and k are 1-based block counts, k = 0 means the empty
// prefix with w_0 = 0.  Requires strictly increasing w.
double f_stat(int j, int k, const Eigen::VectorXd& y,
              const std::vector<int>& node_sizes, const Eigen::VectorXd& w);

// All knots of the chain prox, valid for every lambda: block ends are
// lambda-independent and the selection values are non-increasing, so the
// active set at level lambda is the prefix with values > lambda.
struct PathKnots {
  std::vector<int> knots;      // 1-based block ends, strictly increasing
  std::vector<double> values;  // f at selection, non-increasing
};
PathKnots log_path_knots(const Eigen::VectorXd& y,
                         const std::vector<int>& node_sizes,
                         const Eigen::VectorXd& w);

// Exact chain prox for nested groups {blocks 0..d} with strictly increasing
// weights w (w[d] weights the group ending at block d).  Scans for the
// maximizing block end (ties to the largest index), shrinks, and repeats;
// runtime O(p + D * |knots|).
LogProxSolution prox_log_path(const Eigen::VectorXd& y,
                              const std::vector<int>& node_sizes,
                              double lambda, const Eigen::VectorXd& w,
                              bool want_latents = false);

// Chain prox at the given lambda reusing precomputed knots; loop_evals is 0
// because no scan runs.
LogProxSolution apply_log_knots(const PathKnots& pk, const Eigen::VectorXd& y,
                                const std::vector<int>& node_sizes,
                                double lambda, const Eigen::VectorXd& w,
                                bool want_latents = false);

// Closed form for the two-node chain {0} -> {1}: w1 weights the group {0},
// w2 the group {0,1}; requires w1 < w2.
Eigen::Vector2d prox_log_pair(const Eigen::Vector2d& y, double lambda,
                              double w1, double w2);

// BCD across the blocks of a path decomposition; each block update is the
// exact chain prox on the block's nested ancestor groups.  node_weights[j]
// weights the ancestor group of node j (default sqrt of the group size).
// Exact in one cycle when the decomposition has a single path.
LogProxSolution prox_log_path_bcd(const Eigen::VectorXd& y, const Hierarchy& h,
                                  const PathDecomposition& pd, double lambda,
                                  const std::vector<double>& node_weights = {},
                                  const LogProxOptions& opts = {});

// Stationarity certificate from the latent decomposition: active groups must
// satisfy beta_g - y_g = -lambda w_g v_g/||v_g||, inactive groups
// ||beta_g - y_g|| <= lambda w_g, and the latents must sum to beta.
struct OptimalityReport {
  bool ok = false;
  double max_violation = 0.0;
  double sum_defect = 0.0;
};
OptimalityReport verify_log_optimality(const Eigen::VectorXd& y,
                                       const LogProxSolution& sol,
                                       const GroupStructure& gs, double lambda,
                                       double tol);

// Penalty value sum_g w_g ||v_g|| from the latent decomposition.
double omega_log(const LogProxSolution& sol, const GroupStructure& gs);

}  // namespace hsm
