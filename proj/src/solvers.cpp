#include "hsm/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsm {

SmoothLoss least_squares_loss(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    throw std::invalid_argument("X and y row counts differ");
  SmoothLoss loss;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(X.cols());
  v.normalize();
  double top = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd u = X.transpose() * (X * v);
    double norm = u.norm();
    if (norm == 0.0) break;
    top = v.dot(u);
    v = u / norm;
  }
  loss.lipschitz = std::max(1.05 * top, 1e-12);
  loss.value_and_grad = [X, y](const Eigen::VectorXd& b,
                               Eigen::VectorXd& grad) {
    Eigen::VectorXd r = X * b - y;
    grad = X.transpose() * r;
    return 0.5 * r.squaredNorm();
  };
  return loss;
}

ProxOperator make_gl_prox(const GroupStructure& gs, const GlProxOptions& opts) {
  return [gs, opts](const Eigen::VectorXd& v, double thr) {
    GlProxSolution s = prox_gl_dual_bcd(v, gs, thr, opts);
    return ProxPoint{s.beta, omega_gl(s.beta, gs)};
  };
}

ProxOperator make_log_prox(const Hierarchy& h, const PathDecomposition& pd,
                           const std::vector<double>& node_weights,
                           const LogProxOptions& opts) {
  GroupStructure gs = group_structure_log(h, node_weights);
  LogProxOptions inner = opts;
  inner.want_latents = true;
  return [h, pd, node_weights, gs, inner](const Eigen::VectorXd& v,
                                          double thr) {
    LogProxSolution s = prox_log_path_bcd(v, h, pd, thr, node_weights, inner);
    return ProxPoint{s.beta, omega_log(s, gs)};
  };
}

SolveResult proximal_gradient(const SmoothLoss& loss, const ProxOperator& prox,
                              double lambda, const Eigen::VectorXd& beta0,
                              const SolveOptions& opts) {
  if (!(loss.lipschitz > 0.0))
    throw std::invalid_argument("loss needs a positive Lipschitz constant");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const double step = 1.0 / loss.lipschitz;

  SolveResult res;
  res.beta = beta0;
  Eigen::VectorXd prev = beta0;  // for momentum
  Eigen::VectorXd grad(beta0.size());
  double t_momentum = 1.0;
  double last_obj = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= opts.max_iters; ++it) {
    Eigen::VectorXd at = res.beta;
    if (opts.accelerate && it > 1) {
      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      at = res.beta + ((t_momentum - 1.0) / t_next) * (res.beta - prev);
      t_momentum = t_next;
    }
    double f = loss.value_and_grad(at, grad);
    if (!std::isfinite(f) || !grad.allFinite())
      throw std::runtime_error("non-finite gradient");
    ProxPoint next = prox(at - step * grad, lambda * step);
    prev = res.beta;
    res.beta = next.beta;

    double fe = loss.value_and_grad(res.beta, grad);
    double obj = fe + lambda * next.penalty;
    res.objective_trace.push_back(obj);
    res.iters = it;
    if (std::abs(last_obj - obj) <= opts.tol * (1.0 + std::abs(obj))) {
      res.converged = true;
      break;
    }
    last_obj = obj;
  }
  return res;
}

namespace {

struct AdmmBlock {
  std::vector<int> coords;  // nested-group increment order
  std::vector<int> sizes;
  Eigen::VectorXd w;
  GroupStructure nested;  // weights for the penalty value
};

}  // namespace

AdmmResult admm_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                           const Hierarchy& h, const PathDecomposition& pd,
                           double lambda,
                           const std::vector<double>& node_weights,
                           const AdmmOptions& opts) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  if (X.rows() != y.size())
    throw std::invalid_argument("X and y row counts differ");
  if (X.cols() != h.p())
    throw std::invalid_argument("X column count must equal p");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (!(opts.rho > 0.0)) throw std::invalid_argument("rho must be positive");

  std::vector<AdmmBlock> blocks;
  for (const auto& path : pd.paths) {
    GroupStructure gs = induced_path_groups(h, path, node_weights);
    AdmmBlock b;
    std::vector<char> seen(h.p(), 0);
    for (size_t i = 0; i < gs.groups.size(); ++i) {
      int added = 0;
      for (int idx : gs.groups[i].indices)
        if (!seen[idx]) {
          seen[idx] = 1;
          b.coords.push_back(idx);
          ++added;
        }
      b.sizes.push_back(added);
    }
    b.w.resize(static_cast<Eigen::Index>(gs.groups.size()));
    for (size_t i = 0; i < gs.groups.size(); ++i)
      b.w[static_cast<Eigen::Index>(i)] = gs.groups[i].weight;
    b.nested = nested_groups(b.sizes, std::vector<double>(
                                          b.w.data(), b.w.data() + b.w.size()));
    blocks.push_back(std::move(b));
  }
  const int n = static_cast<int>(X.rows());
  const double rho = opts.rho;

  // Column multiplicity across block supports; the quadratic step solves an
  // n x n ridge system through the factored I + (1/rho) X C X^T.
  Eigen::VectorXd mult = Eigen::VectorXd::Zero(X.cols());
  for (const auto& b : blocks)
    for (int c : b.coords) mult[c] += 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  M.noalias() += (1.0 / rho) * (X * mult.asDiagonal() * X.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("failed to factor the quadratic-step system");
  const Eigen::VectorXd xty_scaled =
      X * mult.cwiseProduct(X.transpose() * y) / rho;

  std::vector<Eigen::VectorXd> beta(blocks.size()), u(blocks.size()),
      gamma(blocks.size());
  for (size_t l = 0; l < blocks.size(); ++l) {
    Eigen::Index len = static_cast<Eigen::Index>(blocks[l].coords.size());
    beta[l] = Eigen::VectorXd::Zero(len);
    u[l] = Eigen::VectorXd::Zero(len);
    gamma[l] = Eigen::VectorXd::Zero(len);
  }

  AdmmResult res;
  const double stop = opts.tol * (1.0 + y.norm());
  for (int it = 1; it <= opts.max_iters; ++it) {
    Eigen::VectorXd qsum = Eigen::VectorXd::Zero(X.cols());
    for (size_t l = 0; l < blocks.size(); ++l)
      for (size_t k = 0; k < blocks[l].coords.size(); ++k)
        qsum[blocks[l].coords[k]] +=
            beta[l][static_cast<Eigen::Index>(k)] +
            u[l][static_cast<Eigen::Index>(k)] / rho;
    Eigen::VectorXd delta = llt.solve(X * qsum + xty_scaled);
    Eigen::VectorXd corr = X.transpose() * (y - delta) / rho;

    double primal_sq = 0.0, dual_sq = 0.0;
    for (size_t l = 0; l < blocks.size(); ++l) {
      auto& b = blocks[l];
      for (size_t k = 0; k < b.coords.size(); ++k)
        gamma[l][static_cast<Eigen::Index>(k)] =
            beta[l][static_cast<Eigen::Index>(k)] +
            u[l][static_cast<Eigen::Index>(k)] / rho + corr[b.coords[k]];
      LogProxSolution ps =
          prox_log_path(gamma[l] - u[l] / rho, b.sizes, lambda / rho, b.w);
      dual_sq += rho * rho * (ps.beta - beta[l]).squaredNorm();
      beta[l] = ps.beta;
      primal_sq += (gamma[l] - beta[l]).squaredNorm();
      u[l] += rho * (beta[l] - gamma[l]);
    }
    res.iters = it;
    res.primal_residual = std::sqrt(primal_sq);
    res.dual_residual = std::sqrt(dual_sq);
    if (res.primal_residual <= stop && res.dual_residual <= stop) {
      res.converged = true;
      break;
    }
  }

  res.beta = Eigen::VectorXd::Zero(X.cols());
  double penalty = 0.0;
  for (size_t l = 0; l < blocks.size(); ++l) {
    for (size_t k = 0; k < blocks[l].coords.size(); ++k)
      res.beta[blocks[l].coords[k]] += beta[l][static_cast<Eigen::Index>(k)];
    LogProxSolution ps = prox_log_path(
        gamma[l] - u[l] / rho, blocks[l].sizes, lambda / rho, blocks[l].w, true);
    penalty += omega_log(ps, blocks[l].nested);
  }
  res.objective = 0.5 * (y - X * res.beta).squaredNorm() + lambda * penalty;
  return res;
}

}  // namespace hsm
