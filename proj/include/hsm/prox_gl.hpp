#pragma once

#include <Eigen/Dense>

#include <vector>

#include "hsm/hierarchy.hpp"

namespace hsm {

// Elementwise shrink toward zero: y_i (1 - mu/|y_i|)_+.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& y, double mu);
// Whole-vector shrink: y (1 - mu/||y||_2)_+; the zero vector maps to itself.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& y, double mu);

struct GlProxOptions {
  double tol = 1e-10;      // cycle-to-cycle max-norm change, scaled by 1+||y||_inf
  int max_cycles = 100000;
  bool want_duals = false;
};

struct GlProxSolution {
  Eigen::VectorXd beta;
  Eigen::VectorXd dual_norms;  // ||eta_g||_2 per group, feasible: <= lambda w_g
  // Dual vectors eta_g compressed to each group's index list, satisfying
  // y = beta + sum_g scatter(eta_g); empty unless requested.
  std::vector<Eigen::VectorXd> duals;
  int cycles = 0;
  bool converged = false;
};

// Cyclic block coordinate descent on the dual of the overlapping group-lasso
// prox: each block is projected onto its ball of radius lambda*w_g.  Exact
// after one cycle on trees when groups are processed children before parents;
// for general structures it iterates to the stopping rule.  Coordinates not
// in any group pass through unchanged.
GlProxSolution prox_gl_dual_bcd(const Eigen::VectorXd& y,
                                const GroupStructure& gs, double lambda,
                                const GlProxOptions& opts = {});

// One-pass exact prox when the hierarchy is a forest and gs holds the
// descendant groups (one per node, node order).  Runs the dual sweep from
// leaves to roots in closed form.  want_duals materializes the dual vectors
// via the literal sweep; on forests they satisfy the stationarity conditions
// exactly, since every later update rescales a subtree uniformly.
GlProxSolution prox_gl_tree(const Eigen::VectorXd& y, const Hierarchy& h,
                            double lambda, const GroupStructure& gs,
                            bool want_duals = false);

// Chain specialization with contiguous blocks of the given sizes.
// w[d] is the weight of the suffix group covering blocks d..D-1; the sweep
// costs O(p + D).
GlProxSolution prox_gl_path(const Eigen::VectorXd& y,
                            const std::vector<int>& node_sizes, double lambda,
                            const Eigen::VectorXd& w);

// Closed form for the two-node chain {0} -> {1}: w1 weights the group {0,1},
// w2 the group {1}.
Eigen::Vector2d prox_gl_pair(const Eigen::Vector2d& y, double lambda,
                             double w1, double w2);

// Per-pair weights w(l,m) = sqrt(|s_l|)/(m-l+1) for the multilevel penalty
// on a chain: group l covers blocks l..D-1 and weights block m inside it.
class MglWeights {
 public:
  MglWeights(int depth, std::vector<double> packed);
  static MglWeights standard(const std::vector<int>& node_sizes);
  int depth() const { return depth_; }
  // Requires 0 <= l <= m < depth.
  double operator()(int l, int m) const {
    return packed_[static_cast<size_t>(offset_[l] + (m - l))];
  }

 private:
  int depth_ = 0;
  std::vector<int> offset_;
  std::vector<double> packed_;
};

MglWeights mgl_weights(const std::vector<int>& node_sizes);

struct MglProxOptions {
  double g_tol = 1e-12;       // |g(v)| <= g_tol * lambda^2
  double bracket_tol = 1e-14; // bracket width <= bracket_tol * (1 + v)
  int max_iters = 200;
  double tol = 1e-12;      // cycle-to-cycle max-norm change, scaled by 1+||y||_inf
  int max_cycles = 10000;
};

struct MglProxSolution {
  Eigen::VectorXd beta;
  Eigen::VectorXd v_hat;  // scale root per level in the final sweep; <= 0
                          // means the level zeroed its suffix
  // Dual blocks eta^(l) compressed to blocks l..D-1, one per level; they
  // reconstruct y = beta + sum_l scatter(eta^(l)) exactly.
  std::vector<Eigen::VectorXd> duals;
  int cycles = 0;
  bool converged = false;
};

// Cyclic dual block descent for the multilevel penalty on a chain.  Each
// level's update solves the scale equation
// sum_m w(l,m)^2 ||b_m||^2 / (w(l,m)^2 + v)^2 = lambda^2 by safeguarded
// Newton and rescales its blocks by v_+/(w(l,m)^2+v_+), where b is the
// level's current candidate (beta plus the level's own dual).  The first
// cycle is the classic one-pass backward sweep; with non-uniform weights
// inside a group that pass is not yet stationary, so cycles repeat until
// beta stops moving.
MglProxSolution prox_mgl_path(const Eigen::VectorXd& y,
                              const std::vector<int>& node_sizes,
                              double lambda, const MglWeights& w,
                              const MglProxOptions& opts = {});

// Stationarity certificate from the dual blocks: they must reconstruct
// y - beta, stay inside their ellipsoids ||eta^(l)_m / w(l,m)|| <= lambda,
// and equal lambda w(l,m)^2 beta_m / S_l on levels whose weighted norm S_l
// is nonzero.  Returns the worst normalized defect.
double mgl_stationarity_residual(const Eigen::VectorXd& y,
                                 const std::vector<int>& node_sizes,
                                 double lambda, const MglWeights& w,
                                 const MglProxSolution& sol);

// Stationarity check from the dual vectors: the duals must reconstruct
// y - beta, stay inside their balls, and align with beta on groups where
// beta_g is nonzero.  max_violation is the worst infinity-norm defect.
struct GlOptimalityReport {
  bool ok = false;
  double max_violation = 0.0;
};
GlOptimalityReport verify_gl_optimality(const Eigen::VectorXd& y,
                                        const GlProxSolution& sol,
                                        const GroupStructure& gs,
                                        double lambda, double tol);

// Penalty values, for objective traces and certificates.
double omega_gl(const Eigen::VectorXd& beta, const GroupStructure& gs);
double omega_mgl(const Eigen::VectorXd& beta,
                 const std::vector<int>& node_sizes, const MglWeights& w);

}  // namespace hsm
