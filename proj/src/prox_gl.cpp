#include "hsm/prox_gl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsm {

namespace {

void check_partition(const std::vector<int>& node_sizes, Eigen::Index p) {
  long long total = 0;
  for (int s : node_sizes) {
    if (s <= 0) throw std::invalid_argument("node sizes must be positive");
    total += s;
  }
  if (total != p)
    throw std::invalid_argument("node sizes must sum to the vector length");
}

void check_groups(const GroupStructure& gs, Eigen::Index p) {
  if (gs.p != p)
    throw std::invalid_argument("group structure built for a different p");
  for (const auto& g : gs.groups) {
    if (g.indices.empty())
      throw std::invalid_argument("groups must be non-empty");
    if (!(g.weight > 0.0))
      throw std::invalid_argument("group weights must be positive");
    for (int idx : g.indices)
      if (idx < 0 || idx >= p)
        throw std::invalid_argument("group index out of range");
  }
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// (1 - mu/norm)_+ with the 0/0 convention that a zero vector stays zero.
double shrink_scale(double norm, double mu) {
  if (norm <= mu) return 0.0;
  return 1.0 - mu / norm;
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& y, double mu) {
  if (mu < 0.0) throw std::invalid_argument("threshold must be >= 0");
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double a = std::abs(y[i]);
    out[i] = a <= mu ? 0.0 : y[i] * (1.0 - mu / a);
  }
  return out;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& y, double mu) {
  if (mu < 0.0) throw std::invalid_argument("threshold must be >= 0");
  return y * shrink_scale(y.norm(), mu);
}

GlProxSolution prox_gl_dual_bcd(const Eigen::VectorXd& y,
                                const GroupStructure& gs, double lambda,
                                const GlProxOptions& opts) {
  check_groups(gs, y.size());
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int n_groups = static_cast<int>(gs.groups.size());

  GlProxSolution sol;
  sol.beta = y;
  sol.dual_norms = Eigen::VectorXd::Zero(n_groups);
  std::vector<Eigen::VectorXd> eta(n_groups);
  for (int g = 0; g < n_groups; ++g)
    eta[g] = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(gs.groups[g].indices.size()));

  // Smaller groups first; when the family is laminar the first cycle is then
  // the inner-to-outer composition and later cycles only confirm it.
  std::vector<int> order(static_cast<size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) order[static_cast<size_t>(g)] = g;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return gs.groups[a].indices.size() < gs.groups[b].indices.size();
  });

  const double scale = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd prev = sol.beta;
  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    prev = sol.beta;
    for (int at = 0; at < n_groups; ++at) {
      const int g = order[static_cast<size_t>(at)];
      const auto& idx = gs.groups[g].indices;
      const double radius = lambda * gs.groups[g].weight;
      double sq = 0.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        double v = sol.beta[idx[k]] + eta[g][static_cast<Eigen::Index>(k)];
        eta[g][static_cast<Eigen::Index>(k)] = v;
        sq += v * v;
      }
      const double norm = std::sqrt(sq);
      if (norm <= radius) {
        // Whole block absorbed by the dual variable.
        for (size_t k = 0; k < idx.size(); ++k) sol.beta[idx[k]] = 0.0;
        sol.dual_norms[g] = norm;
      } else {
        const double keep = 1.0 - radius / norm;
        for (size_t k = 0; k < idx.size(); ++k) {
          double v = eta[g][static_cast<Eigen::Index>(k)];
          sol.beta[idx[k]] = keep * v;
          eta[g][static_cast<Eigen::Index>(k)] = v - keep * v;
        }
        sol.dual_norms[g] = radius;
      }
    }
    sol.cycles = cycle;
    if ((sol.beta - prev).lpNorm<Eigen::Infinity>() <= scale) {
      sol.converged = true;
      break;
    }
  }
  if (opts.want_duals) sol.duals = std::move(eta);
  return sol;
}

GlOptimalityReport verify_gl_optimality(const Eigen::VectorXd& y,
                                        const GlProxSolution& sol,
                                        const GroupStructure& gs,
                                        double lambda, double tol) {
  check_groups(gs, y.size());
  if (sol.duals.size() != gs.groups.size())
    throw std::invalid_argument("solution carries no dual vectors");

  GlOptimalityReport report;
  Eigen::VectorXd residual = y - sol.beta;
  for (size_t g = 0; g < gs.groups.size(); ++g) {
    const auto& idx = gs.groups[g].indices;
    const Eigen::VectorXd& eta = sol.duals[g];
    if (eta.size() != static_cast<Eigen::Index>(idx.size()))
      throw std::invalid_argument("dual vector size mismatch");
    const double radius = lambda * gs.groups[g].weight;
    report.max_violation =
        std::max(report.max_violation, positive_part(eta.norm() - radius));
    double beta_sq = 0.0;
    for (int i : idx) beta_sq += sol.beta[i] * sol.beta[i];
    if (beta_sq > 0.0) {
      // Active group: eta_g must be the radius times the unit beta_g.
      double beta_norm = std::sqrt(beta_sq);
      for (size_t k = 0; k < idx.size(); ++k) {
        double want = radius * sol.beta[idx[k]] / beta_norm;
        report.max_violation = std::max(
            report.max_violation,
            std::abs(eta[static_cast<Eigen::Index>(k)] - want));
      }
    }
    for (size_t k = 0; k < idx.size(); ++k)
      residual[idx[k]] -= eta[static_cast<Eigen::Index>(k)];
  }
  report.max_violation = std::max(report.max_violation,
                                  residual.lpNorm<Eigen::Infinity>());
  report.ok = report.max_violation <= tol;
  return report;
}

GlProxSolution prox_gl_tree(const Eigen::VectorXd& y, const Hierarchy& h,
                            double lambda, const GroupStructure& gs,
                            bool want_duals) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  if (!h.is_forest())
    throw std::invalid_argument("hierarchy must be a forest");
  if (static_cast<int>(gs.groups.size()) != h.node_count())
    throw std::invalid_argument("need one group per node");
  check_groups(gs, y.size());
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  const int n = h.node_count();
  const auto& topo = h.topological_order();

  // Squared norm of each node's subtree after all deeper groups have been
  // shrunk; the leaves-to-roots dual sweep in closed form.
  std::vector<double> sub(n, 0.0);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int v = *it;
    double sq = 0.0;
    for (int idx : h.node(v)) sq += y[idx] * y[idx];
    for (int c : h.children()[v]) {
      double kept =
          positive_part(std::sqrt(sub[c]) - lambda * gs.groups[c].weight);
      sq += kept * kept;
    }
    sub[v] = sq;
  }

  GlProxSolution sol;
  sol.beta = y;
  sol.dual_norms = Eigen::VectorXd::Zero(n);
  std::vector<double> factor(n, 1.0);
  for (int v : topo) {
    const double norm = std::sqrt(sub[v]);
    const double radius = lambda * gs.groups[v].weight;
    const double own = shrink_scale(norm, radius);
    const auto& pa = h.parents()[v];
    factor[v] = (pa.empty() ? 1.0 : factor[pa[0]]) * own;
    sol.dual_norms[v] = std::min(radius, norm);
    for (int idx : h.node(v)) sol.beta[idx] = factor[v] * y[idx];
  }
  sol.cycles = 1;
  sol.converged = true;

  if (want_duals) {
    // Literal children-before-parents sweep; also rebuilds beta so that
    // beta + sum of scattered duals reconstructs y to the last bit.
    Eigen::VectorXd beta = y;
    sol.duals.resize(static_cast<size_t>(n));
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      int v = *it;
      const auto& idx = gs.groups[static_cast<size_t>(v)].indices;
      Eigen::VectorXd blk(static_cast<Eigen::Index>(idx.size()));
      for (size_t k = 0; k < idx.size(); ++k)
        blk[static_cast<Eigen::Index>(k)] = beta[idx[k]];
      const double norm = blk.norm();
      const double radius = lambda * gs.groups[static_cast<size_t>(v)].weight;
      if (norm <= radius) {
        sol.duals[static_cast<size_t>(v)] = blk;
        for (int i : idx) beta[i] = 0.0;
      } else {
        const double keep = 1.0 - radius / norm;
        Eigen::VectorXd& eta = sol.duals[static_cast<size_t>(v)];
        eta.resize(blk.size());
        for (size_t k = 0; k < idx.size(); ++k) {
          double kept = keep * blk[static_cast<Eigen::Index>(k)];
          eta[static_cast<Eigen::Index>(k)] =
              blk[static_cast<Eigen::Index>(k)] - kept;
          beta[idx[k]] = kept;
        }
      }
    }
    sol.beta = beta;
  }
  return sol;
}

GlProxSolution prox_gl_path(const Eigen::VectorXd& y,
                            const std::vector<int>& node_sizes, double lambda,
                            const Eigen::VectorXd& w) {
  check_partition(node_sizes, y.size());
  const int depth = static_cast<int>(node_sizes.size());
  if (w.size() != depth) throw std::invalid_argument("need one weight per group");
  for (int d = 0; d < depth; ++d)
    if (!(w[d] > 0.0))
      throw std::invalid_argument("group weights must be positive");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  std::vector<double> z(depth, 0.0);
  {
    int at = 0;
    for (int d = 0; d < depth; ++d) {
      z[d] = y.segment(at, node_sizes[d]).squaredNorm();
      at += node_sizes[d];
    }
  }
  // Suffix-group norms before that group's own shrink.
  std::vector<double> root_norm(depth, 0.0);
  for (int d = depth - 1; d >= 0; --d) {
    double tail = d + 1 < depth
                      ? positive_part(root_norm[d + 1] - lambda * w[d + 1])
                      : 0.0;
    root_norm[d] = std::sqrt(z[d] + tail * tail);
  }

  GlProxSolution sol;
  sol.beta = Eigen::VectorXd::Zero(y.size());
  sol.dual_norms = Eigen::VectorXd::Zero(depth);
  for (int d = 0; d < depth; ++d)
    sol.dual_norms[d] = std::min(lambda * w[d], root_norm[d]);
  double factor = 1.0;
  int at = 0;
  for (int d = 0; d < depth && factor > 0.0; ++d) {
    factor *= shrink_scale(root_norm[d], lambda * w[d]);
    sol.beta.segment(at, node_sizes[d]) =
        factor * y.segment(at, node_sizes[d]);
    at += node_sizes[d];
  }
  sol.cycles = 1;
  sol.converged = true;
  return sol;
}

Eigen::Vector2d prox_gl_pair(const Eigen::Vector2d& y, double lambda,
                             double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0))
    throw std::invalid_argument("weights must be positive");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  Eigen::Vector2d inner(y[0], 0.0);
  double a2 = std::abs(y[1]);
  inner[1] = a2 <= lambda * w2 ? 0.0 : y[1] * (1.0 - lambda * w2 / a2);
  return inner * shrink_scale(inner.norm(), lambda * w1);
}

MglWeights::MglWeights(int depth, std::vector<double> packed)
    : depth_(depth), packed_(std::move(packed)) {
  offset_.resize(static_cast<size_t>(depth) + 1);
  int at = 0;
  for (int l = 0; l <= depth; ++l) {
    offset_[static_cast<size_t>(l)] = at;
    at += depth - l;
  }
  if (packed_.size() != static_cast<size_t>(offset_.back()))
    throw std::invalid_argument("packed weight table has the wrong size");
  for (double v : packed_)
    if (!(v > 0.0)) throw std::invalid_argument("weights must be positive");
}

MglWeights MglWeights::standard(const std::vector<int>& node_sizes) {
  const int depth = static_cast<int>(node_sizes.size());
  std::vector<double> packed;
  packed.reserve(static_cast<size_t>(depth) * (depth + 1) / 2);
  for (int l = 0; l < depth; ++l) {
    if (node_sizes[l] <= 0)
      throw std::invalid_argument("node sizes must be positive");
    const double top = std::sqrt(static_cast<double>(node_sizes[l]));
    for (int m = l; m < depth; ++m) packed.push_back(top / (m - l + 1));
  }
  return MglWeights(depth, std::move(packed));
}

MglWeights mgl_weights(const std::vector<int>& node_sizes) {
  return MglWeights::standard(node_sizes);
}

MglProxSolution prox_mgl_path(const Eigen::VectorXd& y,
                              const std::vector<int>& node_sizes,
                              double lambda, const MglWeights& w,
                              const MglProxOptions& opts) {
  check_partition(node_sizes, y.size());
  const int depth = static_cast<int>(node_sizes.size());
  if (w.depth() != depth)
    throw std::invalid_argument("weight table depth mismatch");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  MglProxSolution sol;
  sol.beta = y;
  sol.v_hat = Eigen::VectorXd::Zero(depth);
  sol.converged = true;

  std::vector<int> start(depth, 0);
  for (int d = 1; d < depth; ++d) start[d] = start[d - 1] + node_sizes[d - 1];
  sol.duals.resize(static_cast<size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    int len = static_cast<int>(y.size()) - start[l];
    sol.duals[static_cast<size_t>(l)] = Eigen::VectorXd::Zero(len);
  }
  if (lambda == 0.0) return sol;

  const double lam2 = lambda * lambda;
  const double scale = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
  std::vector<double> blk(depth, 0.0);
  Eigen::VectorXd prev = sol.beta;
  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    prev = sol.beta;
    bool newton_ok = true;
    for (int lvl = depth - 1; lvl >= 0; --lvl) {
      Eigen::VectorXd& eta = sol.duals[static_cast<size_t>(lvl)];
      // Candidate for this level: beta plus the level's own dual, stored in
      // the dual slot until the split below.
      eta += sol.beta.tail(eta.size());
      for (int m = lvl; m < depth; ++m)
        blk[m] = eta.segment(start[m] - start[lvl], node_sizes[m]).squaredNorm();

      double at_zero = 0.0;  // g(0) + lambda^2
      for (int m = lvl; m < depth; ++m) {
        double c = w(lvl, m);
        at_zero += blk[m] / (c * c);
      }
      if (at_zero <= lam2) {
        // The whole suffix is inside the dual ellipsoid: the level absorbs
        // its candidate and the blocks go to zero.
        sol.beta.tail(eta.size()).setZero();
        sol.v_hat[lvl] = at_zero == lam2 ? 0.0 : -1.0;
        continue;
      }

      auto eval = [&](double v, double& g, double& dg) {
        g = -lam2;
        dg = 0.0;
        for (int m = lvl; m < depth; ++m) {
          if (blk[m] == 0.0) continue;
          double c2 = w(lvl, m) * w(lvl, m);
          double den = c2 + v;
          double t = c2 * blk[m] / (den * den);
          g += t;
          dg -= 2.0 * t / den;
        }
      };

      double lo = 0.0, hi = 1.0, g, dg;
      eval(hi, g, dg);
      while (g > 0.0) {
        lo = hi;
        hi *= 2.0;
        eval(hi, g, dg);
        if (hi > 1e300) break;
      }
      double v = 0.5 * (lo + hi);
      bool ok = false;
      for (int it = 0; it < opts.max_iters; ++it) {
        eval(v, g, dg);
        if (std::abs(g) <= opts.g_tol * lam2 ||
            hi - lo <= opts.bracket_tol * (1.0 + v)) {
          ok = true;
          break;
        }
        if (g > 0.0)
          lo = v;
        else
          hi = v;
        double step = dg != 0.0 ? v - g / dg : lo - 1.0;
        v = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
      }
      if (!ok) newton_ok = false;
      sol.v_hat[lvl] = v;
      for (int m = lvl; m < depth; ++m) {
        double c2 = w(lvl, m) * w(lvl, m);
        double s = v / (c2 + v);
        auto cand = eta.segment(start[m] - start[lvl], node_sizes[m]);
        sol.beta.segment(start[m], node_sizes[m]) = s * cand;
        cand *= 1.0 - s;
      }
    }
    sol.cycles = cycle;
    if ((sol.beta - prev).lpNorm<Eigen::Infinity>() <= scale) {
      sol.converged = newton_ok;
      break;
    }
    sol.converged = false;
  }
  return sol;
}

double mgl_stationarity_residual(const Eigen::VectorXd& y,
                                 const std::vector<int>& node_sizes,
                                 double lambda, const MglWeights& w,
                                 const MglProxSolution& sol) {
  check_partition(node_sizes, y.size());
  const int depth = static_cast<int>(node_sizes.size());
  if (w.depth() != depth || sol.v_hat.size() != depth ||
      sol.beta.size() != y.size() ||
      sol.duals.size() != static_cast<size_t>(depth))
    throw std::invalid_argument("solution does not match the chain");

  std::vector<int> start(depth, 0);
  for (int d = 1; d < depth; ++d) start[d] = start[d - 1] + node_sizes[d - 1];
  const double scale = 1.0 + y.lpNorm<Eigen::Infinity>();

  // Reconstruction: the dual blocks must account for the full shrinkage.
  Eigen::VectorXd resid = y - sol.beta;
  for (int l = 0; l < depth; ++l) {
    const Eigen::VectorXd& eta = sol.duals[static_cast<size_t>(l)];
    if (eta.size() != y.size() - start[l])
      throw std::invalid_argument("solution does not match the chain");
    resid.tail(eta.size()) -= eta;
  }
  double worst = resid.lpNorm<Eigen::Infinity>() / scale;

  for (int lvl = 0; lvl < depth; ++lvl) {
    const Eigen::VectorXd& eta = sol.duals[static_cast<size_t>(lvl)];
    // Feasibility: each dual block stays inside its weighted ellipsoid.
    double feas = 0.0;
    double weighted = 0.0;  // S_l of the primal suffix
    for (int m = lvl; m < depth; ++m) {
      double c2 = w(lvl, m) * w(lvl, m);
      feas += eta.segment(start[m] - start[lvl], node_sizes[m]).squaredNorm() /
              c2;
      weighted +=
          c2 * sol.beta.segment(start[m], node_sizes[m]).squaredNorm();
    }
    worst = std::max(
        worst, positive_part(std::sqrt(feas) - lambda) / (1.0 + lambda));
    // Alignment: where the level's weighted norm is positive the dual must
    // point along the primal, eta_m = lambda w(l,m)^2 beta_m / S_l.
    if (weighted > 0.0) {
      const double s = std::sqrt(weighted);
      double align = 0.0;
      for (int m = lvl; m < depth; ++m) {
        double c2 = w(lvl, m) * w(lvl, m);
        align = std::max(
            align, (eta.segment(start[m] - start[lvl], node_sizes[m]) -
                    (lambda * c2 / s) * sol.beta.segment(start[m], node_sizes[m]))
                       .lpNorm<Eigen::Infinity>());
      }
      worst = std::max(worst, align / scale);
    }
  }
  return worst;
}

double omega_gl(const Eigen::VectorXd& beta, const GroupStructure& gs) {
  check_groups(gs, beta.size());
  double total = 0.0;
  for (const auto& g : gs.groups) {
    double sq = 0.0;
    for (int idx : g.indices) sq += beta[idx] * beta[idx];
    total += g.weight * std::sqrt(sq);
  }
  return total;
}

double omega_mgl(const Eigen::VectorXd& beta,
                 const std::vector<int>& node_sizes, const MglWeights& w) {
  check_partition(node_sizes, beta.size());
  const int depth = static_cast<int>(node_sizes.size());
  if (w.depth() != depth)
    throw std::invalid_argument("weight table depth mismatch");
  std::vector<double> blk(depth, 0.0);
  int at = 0;
  for (int d = 0; d < depth; ++d) {
    blk[d] = beta.segment(at, node_sizes[d]).squaredNorm();
    at += node_sizes[d];
  }
  double total = 0.0;
  for (int l = 0; l < depth; ++l) {
    double sq = 0.0;
    for (int m = l; m < depth; ++m) sq += w(l, m) * w(l, m) * blk[m];
    total += std::sqrt(sq);
  }
  return total;
}

}  // namespace hsm
