#include "hsm/covband.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "hsm/prox_gl.hpp"

namespace hsm {

namespace {

void check_square(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols() || S.rows() < 1)
    throw std::invalid_argument("matrix must be square and non-empty");
}

void check_symmetric(const Eigen::MatrixXd& S) {
  check_square(S);
  double scale = 1.0 + S.cwiseAbs().maxCoeff();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix must be symmetric");
}

// Squared Frobenius norm of each band 1..p-1, both triangles.
std::vector<double> band_sq_norms(const Eigen::MatrixXd& S) {
  const int p = static_cast<int>(S.rows());
  std::vector<double> z(static_cast<size_t>(p > 0 ? p - 1 : 0), 0.0);
  for (int m = 1; m < p; ++m) {
    double sq = 0.0;
    for (int i = 0; i + m < p; ++i) {
      sq += S(i + m, i) * S(i + m, i);
      sq += S(i, i + m) * S(i, i + m);
    }
    z[static_cast<size_t>(m - 1)] = sq;
  }
  return z;
}

std::vector<double> cumulative_sizes(int p) {
  std::vector<double> cum(static_cast<size_t>(p), 0.0);
  double acc = 0.0;
  for (int m = 1; m < p; ++m) {
    acc += 2.0 * (p - m);
    cum[static_cast<size_t>(m)] = acc;
  }
  return cum;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) throw std::invalid_argument("need at least two rows");
  const double n = static_cast<double>(X.rows());
  Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::MatrixXd C = X.rowwise() - mean;
  Eigen::MatrixXd S = (C.transpose() * C) / n;
  // mirror the upper triangle so the result is symmetric to the bit
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = i + 1; j < S.cols(); ++j) S(j, i) = S(i, j);
  return S;
}

BandEstimate estimate_log(const Eigen::MatrixXd& S, double lambda) {
  check_symmetric(S);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int p = static_cast<int>(S.rows());
  const auto z = band_sq_norms(S);
  const auto cum = cumulative_sizes(p);

  BandEstimate est;
  est.sigma = Eigen::MatrixXd::Zero(p, p);
  est.sigma.diagonal() = S.diagonal();

  int k = 0;
  const int depth = p - 1;
  for (;;) {
    if (k >= depth) break;
    double best_f2 = -1.0;
    int best_j = k;
    double num = 0.0;
    for (int j = k + 1; j <= depth; ++j) {
      num += z[static_cast<size_t>(j - 1)];
      double f2 = num / (cum[static_cast<size_t>(j)] - cum[static_cast<size_t>(k)]);
      // ties go to the largest j, with a window absorbing rounding noise
      if (f2 >= best_f2 - 1e-12 * std::max(f2, best_f2)) {
        best_f2 = std::max(best_f2, f2);
        best_j = j;
      }
    }
    double f = std::sqrt(std::max(best_f2, 0.0));
    if (f <= lambda) break;
    const double keep = 1.0 - lambda / f;
    for (int m = k + 1; m <= best_j; ++m)
      for (int i = 0; i + m < p; ++i) {
        est.sigma(i + m, i) = keep * S(i + m, i);
        est.sigma(i, i + m) = keep * S(i, i + m);
      }
    est.knots.push_back(best_j);
    k = best_j;
  }
  est.bandwidth = bandwidth(est.sigma);
  return est;
}

BandEstimate estimate_gl(const Eigen::MatrixXd& S, double lambda) {
  check_symmetric(S);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int p = static_cast<int>(S.rows());
  const auto z = band_sq_norms(S);

  // Suffix-group sweep from the outermost band inward, then one scale pass.
  std::vector<double> w(static_cast<size_t>(p), 0.0);
  for (int m = 1; m < p; ++m)
    w[static_cast<size_t>(m)] = std::sqrt(2.0 * (p - m));
  std::vector<double> root(static_cast<size_t>(p), 0.0);
  for (int m = p - 1; m >= 1; --m) {
    double tail = m + 1 < p ? positive_part(root[static_cast<size_t>(m + 1)] -
                                            lambda * w[static_cast<size_t>(m + 1)])
                            : 0.0;
    root[static_cast<size_t>(m)] =
        std::sqrt(z[static_cast<size_t>(m - 1)] + tail * tail);
  }

  BandEstimate est;
  est.sigma = Eigen::MatrixXd::Zero(p, p);
  est.sigma.diagonal() = S.diagonal();
  double factor = 1.0;
  for (int m = 1; m < p && factor > 0.0; ++m) {
    double norm = root[static_cast<size_t>(m)];
    double radius = lambda * w[static_cast<size_t>(m)];
    factor *= norm <= radius ? 0.0 : 1.0 - radius / norm;
    if (factor == 0.0) break;
    for (int i = 0; i + m < p; ++i) {
      est.sigma(i + m, i) = factor * S(i + m, i);
      est.sigma(i, i + m) = factor * S(i, i + m);
    }
  }
  est.bandwidth = bandwidth(est.sigma);
  return est;
}

BandEstimate estimate_mgl(const Eigen::MatrixXd& S, double lambda) {
  check_symmetric(S);
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int p = static_cast<int>(S.rows());

  BandEstimate est;
  est.sigma = S;
  if (lambda > 0.0 && p > 1) {
    SubdiagonalView view(p);
    auto sol = prox_mgl_path(view.vectorize(S), view.sizes(), lambda,
                             mgl_weights(view.sizes()));
    view.scatter(sol.beta, est.sigma);
  }
  est.bandwidth = bandwidth(est.sigma);
  return est;
}

BandEstimate estimate_banded(const Eigen::MatrixXd& S, double lambda,
                             BandPenalty kind) {
  switch (kind) {
    case BandPenalty::Log:
      return estimate_log(S, lambda);
    case BandPenalty::Gl:
      return estimate_gl(S, lambda);
    case BandPenalty::Mgl:
      return estimate_mgl(S, lambda);
  }
  throw std::invalid_argument("unknown penalty kind");
}

int bandwidth(const Eigen::MatrixXd& M) {
  check_square(M);
  const int p = static_cast<int>(M.rows());
  for (int m = p - 1; m >= 1; --m)
    for (int i = 0; i + m < p; ++i)
      if (M(i + m, i) != 0.0 || M(i, i + m) != 0.0) return m;
  return 0;
}

Eigen::MatrixXd gen_moving_average(int p, int K) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (K < 2 || K >= p) throw std::invalid_argument("need 2 <= K < p");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      int m = std::abs(i - j);
      if (m < K) sigma(i, j) = static_cast<double>(K - m) / K;
    }
  return sigma;
}

Eigen::MatrixXd gen_stair(int p, int K) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (K < 5 || K % 5 != 0 || K >= p)
    throw std::invalid_argument("need K divisible by 5 with 5 <= K < p");
  const int step = K / 5;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      int m = std::abs(i - j);
      if (m < K) delta(i, j) = 1.0 - 0.2 * (m / step);
    }
  double shift = positive_part(0.01 - min_eigenvalue(delta));
  if (shift > 0.0) delta.diagonal().array() += shift;
  return delta;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& sigma) {
  check_square(sigma);
  if (sigma.cwiseAbs().maxCoeff() == 0.0) {
    chol_ = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
    return;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = sigma;
    jittered.diagonal().array() +=
        1e-10 * sigma.trace() / static_cast<double>(sigma.rows());
    llt.compute(jittered);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("covariance is not positive semidefinite");
  }
  chol_ = llt.matrixL();
}

Eigen::MatrixXd GaussianSampler::draw(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  const int p = static_cast<int>(chol_.rows());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd Z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Z(i, j) = gauss(rng);
  return Z * chol_.transpose();
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& sigma, int n,
                                std::uint64_t seed) {
  return GaussianSampler(sigma).draw(n, seed);
}

double mse(const std::vector<Eigen::MatrixXd>& estimates,
           const Eigen::MatrixXd& sigma_star) {
  check_square(sigma_star);
  if (estimates.empty()) throw std::invalid_argument("need at least one estimate");
  double total = 0.0;
  for (const auto& est : estimates) {
    if (est.rows() != sigma_star.rows() || est.cols() != sigma_star.cols())
      throw std::invalid_argument("estimate dimensions differ from the target");
    total += (est - sigma_star).squaredNorm();
  }
  return total / (static_cast<double>(estimates.size()) *
                  static_cast<double>(sigma_star.rows()));
}

double lambda_best(const std::vector<std::pair<double, double>>& lambda_mse) {
  if (lambda_mse.empty()) throw std::invalid_argument("empty grid");
  auto sorted = lambda_mse;
  std::sort(sorted.begin(), sorted.end());
  double best_lambda = sorted.front().first;
  double best_mse = sorted.front().second;
  for (const auto& [lam, m] : sorted)
    if (m <= best_mse) {
      best_mse = m;
      best_lambda = lam;
    }
  return best_lambda;
}

double min_eigenvalue(const Eigen::MatrixXd& S) {
  check_square(S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& S, double tol_scale) {
  return min_eigenvalue(S) >= -tol_scale * S.norm();
}

SubdiagonalView::SubdiagonalView(int p) : p_(p) {
  if (p < 2) throw std::invalid_argument("need p >= 2");
  sizes_.resize(static_cast<size_t>(p - 1));
  for (int m = 1; m < p; ++m) sizes_[static_cast<size_t>(m - 1)] = 2 * (p - m);
}

Eigen::VectorXd SubdiagonalView::vectorize(const Eigen::MatrixXd& S) const {
  check_square(S);
  if (S.rows() != p_) throw std::invalid_argument("matrix size mismatch");
  Eigen::VectorXd v(static_cast<Eigen::Index>(p_) * (p_ - 1));
  Eigen::Index at = 0;
  for (int m = 1; m < p_; ++m) {
    for (int i = 0; i + m < p_; ++i) v[at++] = S(i + m, i);
    for (int i = 0; i + m < p_; ++i) v[at++] = S(i, i + m);
  }
  return v;
}

void SubdiagonalView::scatter(const Eigen::VectorXd& v,
                              Eigen::MatrixXd& S) const {
  if (S.rows() != p_ || S.cols() != p_)
    throw std::invalid_argument("matrix size mismatch");
  if (v.size() != static_cast<Eigen::Index>(p_) * (p_ - 1))
    throw std::invalid_argument("vector size mismatch");
  Eigen::Index at = 0;
  for (int m = 1; m < p_; ++m) {
    for (int i = 0; i + m < p_; ++i) S(i + m, i) = v[at++];
    for (int i = 0; i + m < p_; ++i) S(i, i + m) = v[at++];
  }
}

Eigen::VectorXd SubdiagonalView::chain_weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(sizes_.size()));
  double acc = 0.0;
  for (size_t m = 0; m < sizes_.size(); ++m) {
    acc += sizes_[m];
    w[static_cast<Eigen::Index>(m)] = std::sqrt(acc);
  }
  return w;
}

double min_band_signal(const Eigen::MatrixXd& sigma, int K) {
  check_square(sigma);
  const int p = static_cast<int>(sigma.rows());
  if (K < 1 || K >= p) throw std::invalid_argument("need 1 <= K <= p-1");
  const auto z = band_sq_norms(sigma);
  double best = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= K; ++m) {
    double sq = 0.0;
    double size = 0.0;
    for (int r = m; r <= K; ++r) {
      sq += z[static_cast<size_t>(r - 1)];
      size += 2.0 * (p - r);
    }
    best = std::min(best, std::sqrt(sq / size));
  }
  return best;
}

std::vector<double> lambda_grid(const Eigen::MatrixXd& S, BandPenalty kind,
                                int count) {
  check_square(S);
  if (count < 2) throw std::invalid_argument("need at least two grid points");
  double hi = 1.0;
  while (estimate_banded(S, hi, kind).bandwidth > 0 && hi < 1e300) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (estimate_banded(S, mid, kind).bandwidth > 0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * (1.0 + hi)) break;
  }
  const double lambda_max = hi;
  std::vector<double> grid(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    double t = static_cast<double>(i) / (count - 1);
    grid[static_cast<size_t>(i)] = lambda_max * std::pow(10.0, -4.0 * (1.0 - t));
  }
  return grid;
}

}  // namespace hsm
