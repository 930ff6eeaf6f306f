#include "hsm/prox_log.hpp"

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

void check_increasing_weights(const Eigen::VectorXd& w) {
  double prev = 0.0;
  for (Eigen::Index d = 0; d < w.size(); ++d) {
    if (!(w[d] > prev))
      throw std::invalid_argument(
          "chain weights must be positive and strictly increasing");
    prev = w[d];
  }
}

std::vector<int> block_starts(const std::vector<int>& node_sizes) {
  std::vector<int> start(node_sizes.size() + 1, 0);
  for (size_t d = 0; d < node_sizes.size(); ++d)
    start[d + 1] = start[d] + node_sizes[d];
  return start;
}

// Shared chain machinery: one knot-selection loop, parameterized by the
// stopping level.  record gets (end, value) for every accepted knot.
template <typename Record>
int run_knot_loop(const std::vector<double>& z, const Eigen::VectorXd& w,
                  double lambda, Record&& record) {
  const int depth = static_cast<int>(z.size());
  auto w2 = [&](int j) { return j == 0 ? 0.0 : w[j - 1] * w[j - 1]; };
  int k = 0;
  int evals = 0;
  for (;;) {
    ++evals;
    if (k >= depth) break;
    double best_f2 = -1.0;
    int best_j = k;
    double num = 0.0;  // squared norm of blocks k+1..j
    for (int j = k + 1; j <= depth; ++j) {
      num += z[j - 1];
      double f2 = num / (w2(j) - w2(k));
      // ties go to the largest j; the window absorbs rounding in w^2 so
      // exact-arithmetic ties are still recognized
      if (f2 >= best_f2 - 1e-12 * std::max(f2, best_f2)) {
        best_f2 = std::max(best_f2, f2);
        best_j = j;
      }
    }
    double f = std::sqrt(std::max(best_f2, 0.0));
    if (f <= lambda) break;
    record(best_j, f);
    k = best_j;
  }
  return evals;
}

std::vector<double> block_sq_norms(const Eigen::VectorXd& y,
                                   const std::vector<int>& node_sizes) {
  std::vector<double> z(node_sizes.size(), 0.0);
  int at = 0;
  for (size_t d = 0; d < node_sizes.size(); ++d) {
    z[d] = y.segment(at, node_sizes[d]).squaredNorm();
    at += node_sizes[d];
  }
  return z;
}

// Latents certifying the chain solution: the running direction A_j
// accumulates y block / value over selected blocks, and group k_j carries
// A_j * (value_j - value_{j+1}) with the trailing value clamped at lambda.
std::vector<Eigen::VectorXd> chain_latents(
    const Eigen::VectorXd& y, const std::vector<int>& node_sizes,
    double lambda, const std::vector<int>& knots,
    const std::vector<double>& values) {
  const int depth = static_cast<int>(node_sizes.size());
  auto start = block_starts(node_sizes);
  std::vector<Eigen::VectorXd> latents(depth);
  for (int d = 0; d < depth; ++d)
    latents[d] = Eigen::VectorXd::Zero(start[d + 1]);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(y.size());
  int prev_end = 0;
  for (size_t j = 0; j < knots.size(); ++j) {
    const int end = knots[j];
    const int len = start[end] - start[prev_end];
    acc.segment(start[prev_end], len) =
        y.segment(start[prev_end], len) / values[j];
    const double next = j + 1 < knots.size() ? values[j + 1] : lambda;
    latents[end - 1].head(start[end]) = acc.head(start[end]) * (values[j] - next);
    prev_end = end;
  }
  return latents;
}

}  // namespace

LogProxSolution prox_log_naive_bcd(const Eigen::VectorXd& y,
                                   const GroupStructure& gs, double lambda,
                                   const LogProxOptions& opts) {
  check_groups(gs, y.size());
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int n_groups = static_cast<int>(gs.groups.size());

  LogProxSolution sol;
  sol.beta = Eigen::VectorXd::Zero(y.size());
  sol.latents.resize(n_groups);
  for (int g = 0; g < n_groups; ++g)
    sol.latents[g] = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(gs.groups[g].indices.size()));

  const double scale = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd prev = sol.beta;
  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    prev = sol.beta;
    for (int g = 0; g < n_groups; ++g) {
      const auto& idx = gs.groups[g].indices;
      auto& v = sol.latents[g];
      // Remove this latent, shrink the residual, add it back.
      double sq = 0.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        sol.beta[idx[k]] -= v[static_cast<Eigen::Index>(k)];
        double r = y[idx[k]] - sol.beta[idx[k]];
        v[static_cast<Eigen::Index>(k)] = r;
        sq += r * r;
      }
      const double norm = std::sqrt(sq);
      const double thr = lambda * gs.groups[g].weight;
      const double keep = norm <= thr ? 0.0 : 1.0 - thr / norm;
      for (size_t k = 0; k < idx.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] *= keep;
        sol.beta[idx[k]] += v[static_cast<Eigen::Index>(k)];
      }
    }
    sol.cycles = cycle;
    if ((sol.beta - prev).lpNorm<Eigen::Infinity>() <= scale) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

double f_stat(int j, int k, const Eigen::VectorXd& y,
              const std::vector<int>& node_sizes, const Eigen::VectorXd& w) {
  check_partition(node_sizes, y.size());
  const int depth = static_cast<int>(node_sizes.size());
  if (w.size() != depth) throw std::invalid_argument("need one weight per group");
  check_increasing_weights(w);
  if (k < 0 || j <= k || j > depth)
    throw std::invalid_argument("need 0 <= k < j <= number of blocks");
  auto start = block_starts(node_sizes);
  double num = y.segment(start[k], start[j] - start[k]).squaredNorm();
  double wk2 = k == 0 ? 0.0 : w[k - 1] * w[k - 1];
  return std::sqrt(num / (w[j - 1] * w[j - 1] - wk2));
}

PathKnots log_path_knots(const Eigen::VectorXd& y,
                         const std::vector<int>& node_sizes,
                         const Eigen::VectorXd& w) {
  check_partition(node_sizes, y.size());
  if (w.size() != static_cast<Eigen::Index>(node_sizes.size()))
    throw std::invalid_argument("need one weight per group");
  check_increasing_weights(w);
  auto z = block_sq_norms(y, node_sizes);
  PathKnots pk;
  run_knot_loop(z, w, 0.0, [&](int end, double f) {
    pk.knots.push_back(end);
    pk.values.push_back(f);
  });
  return pk;
}

LogProxSolution prox_log_path(const Eigen::VectorXd& y,
                              const std::vector<int>& node_sizes,
                              double lambda, const Eigen::VectorXd& w,
                              bool want_latents) {
  check_partition(node_sizes, y.size());
  if (w.size() != static_cast<Eigen::Index>(node_sizes.size()))
    throw std::invalid_argument("need one weight per group");
  check_increasing_weights(w);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  auto z = block_sq_norms(y, node_sizes);
  auto start = block_starts(node_sizes);

  LogProxSolution sol;
  sol.beta = Eigen::VectorXd::Zero(y.size());
  std::vector<double> values;
  int prev_end = 0;
  sol.loop_evals = run_knot_loop(z, w, lambda, [&](int end, double f) {
    const int len = start[end] - start[prev_end];
    sol.beta.segment(start[prev_end], len) =
        y.segment(start[prev_end], len) * (1.0 - lambda / f);
    sol.knots.push_back(end);
    values.push_back(f);
    prev_end = end;
  });
  sol.converged = true;
  if (want_latents)
    sol.latents = chain_latents(y, node_sizes, lambda, sol.knots, values);
  return sol;
}

LogProxSolution apply_log_knots(const PathKnots& pk, const Eigen::VectorXd& y,
                                const std::vector<int>& node_sizes,
                                double lambda, const Eigen::VectorXd& w,
                                bool want_latents) {
  check_partition(node_sizes, y.size());
  if (w.size() != static_cast<Eigen::Index>(node_sizes.size()))
    throw std::invalid_argument("need one weight per group");
  check_increasing_weights(w);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  auto start = block_starts(node_sizes);

  LogProxSolution sol;
  sol.beta = Eigen::VectorXd::Zero(y.size());
  std::vector<double> values;
  int prev_end = 0;
  for (size_t j = 0; j < pk.knots.size() && pk.values[j] > lambda; ++j) {
    const int end = pk.knots[j];
    const int len = start[end] - start[prev_end];
    sol.beta.segment(start[prev_end], len) =
        y.segment(start[prev_end], len) * (1.0 - lambda / pk.values[j]);
    sol.knots.push_back(end);
    values.push_back(pk.values[j]);
    prev_end = end;
  }
  sol.converged = true;
  if (want_latents)
    sol.latents = chain_latents(y, node_sizes, lambda, sol.knots, values);
  return sol;
}

Eigen::Vector2d prox_log_pair(const Eigen::Vector2d& y, double lambda,
                              double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > w1))
    throw std::invalid_argument("need 0 < w1 < w2");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const double split = std::sqrt(w2 * w2 - w1 * w1);
  if (std::abs(y[1]) * w1 >= split * std::abs(y[0])) {
    double norm = y.norm();
    double keep = norm <= lambda * w2 ? 0.0 : 1.0 - lambda * w2 / norm;
    return y * keep;
  }
  auto soft = [](double v, double t) {
    double a = std::abs(v);
    return a <= t ? 0.0 : v * (1.0 - t / a);
  };
  return {soft(y[0], lambda * w1), soft(y[1], lambda * split)};
}

LogProxSolution prox_log_path_bcd(const Eigen::VectorXd& y, const Hierarchy& h,
                                  const PathDecomposition& pd, double lambda,
                                  const std::vector<double>& node_weights,
                                  const LogProxOptions& opts) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  if (y.size() != h.p())
    throw std::invalid_argument("vector length must equal p");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int n = h.node_count();
  {
    std::vector<char> seen(n, 0);
    for (const auto& path : pd.paths)
      for (int v : path) {
        if (v < 0 || v >= n || seen[v])
          throw std::invalid_argument("decomposition must cover each node once");
        seen[v] = 1;
      }
    for (int v = 0; v < n; ++v)
      if (!seen[v])
        throw std::invalid_argument("decomposition must cover each node once");
  }

  // Per block: local coordinate list ordered by nested-group increments,
  // block sizes of those increments, and the increasing group weights.
  struct Block {
    std::vector<int> coords;
    std::vector<int> sizes;
    Eigen::VectorXd w;
    std::vector<int> nodes;
  };
  std::vector<Block> blocks;
  blocks.reserve(pd.paths.size());
  for (const auto& path : pd.paths) {
    GroupStructure gs = induced_path_groups(h, path, node_weights);
    Block b;
    b.nodes = path;
    b.w.resize(static_cast<Eigen::Index>(path.size()));
    std::vector<char> in_block(h.p(), 0);
    for (size_t i = 0; i < gs.groups.size(); ++i) {
      int added = 0;
      for (int idx : gs.groups[i].indices)
        if (!in_block[idx]) {
          in_block[idx] = 1;
          b.coords.push_back(idx);
          ++added;
        }
      b.sizes.push_back(added);
      b.w[static_cast<Eigen::Index>(i)] = gs.groups[i].weight;
    }
    double prev = 0.0;
    for (Eigen::Index i = 0; i < b.w.size(); ++i) {
      if (!(b.w[i] > prev))
        throw std::invalid_argument(
            "path group weights must be strictly increasing");
      prev = b.w[i];
    }
    blocks.push_back(std::move(b));
  }

  LogProxSolution sol;
  sol.beta = Eigen::VectorXd::Zero(y.size());
  std::vector<Eigen::VectorXd> local(blocks.size());
  for (size_t l = 0; l < blocks.size(); ++l)
    local[l] =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks[l].coords.size()));

  const double scale = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
  const int max_cycles = blocks.size() <= 1 ? 1 : opts.max_cycles;
  Eigen::VectorXd prev = sol.beta;
  std::vector<LogProxSolution> last(blocks.size());
  for (int cycle = 1; cycle <= max_cycles; ++cycle) {
    prev = sol.beta;
    for (size_t l = 0; l < blocks.size(); ++l) {
      auto& b = blocks[l];
      Eigen::VectorXd r(static_cast<Eigen::Index>(b.coords.size()));
      for (size_t k = 0; k < b.coords.size(); ++k)
        r[static_cast<Eigen::Index>(k)] =
            y[b.coords[k]] -
            (sol.beta[b.coords[k]] - local[l][static_cast<Eigen::Index>(k)]);
      LogProxSolution bs =
          prox_log_path(r, b.sizes, lambda, b.w, opts.want_latents);
      for (size_t k = 0; k < b.coords.size(); ++k) {
        sol.beta[b.coords[k]] += bs.beta[static_cast<Eigen::Index>(k)] -
                                 local[l][static_cast<Eigen::Index>(k)];
        local[l][static_cast<Eigen::Index>(k)] =
            bs.beta[static_cast<Eigen::Index>(k)];
      }
      last[l] = std::move(bs);
    }
    sol.cycles = cycle;
    if (blocks.size() <= 1 ||
        (sol.beta - prev).lpNorm<Eigen::Infinity>() <= scale) {
      sol.converged = true;
      break;
    }
  }

  if (opts.want_latents) {
    // Scatter each block's nested-group latents onto the ancestor groups of
    // the hierarchy (group id = node id, indices sorted).
    sol.latents.assign(n, {});
    std::vector<int> pos(h.p(), -1);
    for (size_t l = 0; l < blocks.size(); ++l) {
      const auto& b = blocks[l];
      for (size_t k = 0; k < b.coords.size(); ++k)
        pos[b.coords[k]] = static_cast<int>(k);
      for (size_t i = 0; i < b.nodes.size(); ++i) {
        const auto& latent = last[l].latents[i];
        std::vector<int> sorted;
        int upto = 0;
        for (size_t d = 0; d <= i; ++d) upto += b.sizes[d];
        sorted.assign(b.coords.begin(), b.coords.begin() + upto);
        std::sort(sorted.begin(), sorted.end());
        Eigen::VectorXd out(upto);
        for (int k = 0; k < upto; ++k) out[k] = latent[pos[sorted[k]]];
        sol.latents[b.nodes[i]] = std::move(out);
      }
      for (int c : b.coords) pos[c] = -1;
    }
  }
  return sol;
}

OptimalityReport verify_log_optimality(const Eigen::VectorXd& y,
                                       const LogProxSolution& sol,
                                       const GroupStructure& gs, double lambda,
                                       double tol) {
  check_groups(gs, y.size());
  if (sol.latents.size() != gs.groups.size())
    throw std::invalid_argument("solution carries no latent decomposition");
  OptimalityReport rep;

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(y.size());
  for (size_t g = 0; g < gs.groups.size(); ++g) {
    const auto& idx = gs.groups[g].indices;
    if (sol.latents[g].size() != static_cast<Eigen::Index>(idx.size()))
      throw std::invalid_argument("latent size does not match its group");
    for (size_t k = 0; k < idx.size(); ++k)
      sum[idx[k]] += sol.latents[g][static_cast<Eigen::Index>(k)];
  }
  rep.sum_defect = (sum - sol.beta).lpNorm<Eigen::Infinity>();

  for (size_t g = 0; g < gs.groups.size(); ++g) {
    const auto& idx = gs.groups[g].indices;
    const double radius = lambda * gs.groups[g].weight;
    const double vnorm = sol.latents[g].norm();
    double viol;
    if (vnorm > tol) {
      double worst = 0.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        double lhs = sol.beta[idx[k]] - y[idx[k]];
        double rhs =
            -radius * sol.latents[g][static_cast<Eigen::Index>(k)] / vnorm;
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      viol = worst;
    } else {
      double sq = 0.0;
      for (int i : idx) {
        double d = sol.beta[i] - y[i];
        sq += d * d;
      }
      viol = std::max(0.0, std::sqrt(sq) - radius);
    }
    rep.max_violation = std::max(rep.max_violation, viol);
  }
  rep.ok = rep.max_violation <= tol && rep.sum_defect <= tol;
  return rep;
}

double omega_log(const LogProxSolution& sol, const GroupStructure& gs) {
  if (sol.latents.size() != gs.groups.size())
    throw std::invalid_argument("solution carries no latent decomposition");
  double total = 0.0;
  for (size_t g = 0; g < gs.groups.size(); ++g)
    total += gs.groups[g].weight * sol.latents[g].norm();
  return total;
}

}  // namespace hsm
