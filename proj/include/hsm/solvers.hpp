#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "hsm/hierarchy.hpp"
#include "hsm/prox_gl.hpp"
#include "hsm/prox_log.hpp"

namespace hsm {

// Smooth convex loss with Lipschitz-continuous gradient.  value_and_grad
// fills grad and returns the value.
struct SmoothLoss {
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>
      value_and_grad;
  double lipschitz = 0.0;
};

// 1/2 ||y - X b||^2; the gradient Lipschitz constant is the top eigenvalue
// of X^T X, estimated by power iteration and inflated by 5%.
SmoothLoss least_squares_loss(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);

// A prox evaluation returns the shrunk point together with the penalty value
// at it, so objective traces need no separate penalty solve.
struct ProxPoint {
  Eigen::VectorXd beta;
  double penalty = 0.0;
};
using ProxOperator = std::function<ProxPoint(const Eigen::VectorXd&, double)>;

ProxOperator make_gl_prox(const GroupStructure& gs,
                          const GlProxOptions& opts = {});
ProxOperator make_log_prox(const Hierarchy& h, const PathDecomposition& pd,
                           const std::vector<double>& node_weights = {},
                           const LogProxOptions& opts = {});

struct SolveOptions {
  double tol = 1e-10;  // relative objective decrease
  int max_iters = 50000;
  bool accelerate = false;  // momentum off by default
};

struct SolveResult {
  Eigen::VectorXd beta;
  std::vector<double> objective_trace;
  int iters = 0;
  bool converged = false;
};

// Proximal gradient with fixed step 1/L; monotone when accelerate is off.
// Throws on a non-finite gradient.
SolveResult proximal_gradient(const SmoothLoss& loss, const ProxOperator& prox,
                              double lambda, const Eigen::VectorXd& beta0,
                              const SolveOptions& opts = {});

struct AdmmOptions {
  double rho = 1.0;
  double tol = 1e-8;  // residual norms, scaled by 1+||y||_2
  int max_iters = 100000;
};

struct AdmmResult {
  Eigen::VectorXd beta;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iters = 0;
  bool converged = false;
};

// Splitting solver for least squares plus the latent overlapping penalty over
// the blocks of a path decomposition.  One copy of the coefficients per
// block; the n x n ridge system is factored once, and each iteration costs
// one back-solve plus one exact chain prox per block.
AdmmResult admm_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                           const Hierarchy& h, const PathDecomposition& pd,
                           double lambda,
                           const std::vector<double>& node_weights = {},
                           const AdmmOptions& opts = {});

}  // namespace hsm
