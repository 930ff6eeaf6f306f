#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace hsm {

// Sample covariance with divisor n after column mean-centering.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X);

enum class BandPenalty { Log, Gl, Mgl };

struct BandEstimate {
  Eigen::MatrixXd sigma;
  int bandwidth = 0;       // largest band index carrying a nonzero entry
  std::vector<int> knots;  // Log estimator: selected band ends
};

// Band-shrinkage estimators.  The diagonal is copied from S; bands are the
// sets {(i,j): |i-j| = m} over both triangles, so band m has 2(p-m) entries.
// All three run directly on band Frobenius norms in O(p^2).
BandEstimate estimate_log(const Eigen::MatrixXd& S, double lambda);
BandEstimate estimate_gl(const Eigen::MatrixXd& S, double lambda);
BandEstimate estimate_mgl(const Eigen::MatrixXd& S, double lambda);
BandEstimate estimate_banded(const Eigen::MatrixXd& S, double lambda,
                             BandPenalty kind);

// Largest m >= 1 whose band holds a nonzero entry; 0 for diagonal matrices.
int bandwidth(const Eigen::MatrixXd& M);

// Toeplitz covariance with lag-m entry (K-m)/K for m < K, zero beyond;
// requires 2 <= K < p.  The last nonzero lag is K-1.
Eigen::MatrixXd gen_moving_average(int p, int K);

// Five equal steps 1.0, 0.8, 0.6, 0.4, 0.2 over the first K lags (K divisible
// by 5), then a diagonal shift making the smallest eigenvalue at least 0.01.
Eigen::MatrixXd gen_stair(int p, int K);

// Draws rows from N(0, sigma).  The symmetric factorization happens once; if
// it fails, a jitter of 1e-10 * trace/p is added to the diagonal and the
// factorization retried once before giving up.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& sigma);
  Eigen::MatrixXd draw(int n, std::uint64_t seed) const;

 private:
  Eigen::MatrixXd chol_;  // lower factor
};
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& sigma, int n,
                                std::uint64_t seed);

// Mean over estimates of ||est - sigma_star||_F^2 / p.
double mse(const std::vector<Eigen::MatrixXd>& estimates,
           const Eigen::MatrixXd& sigma_star);

// Grid minimizer of (lambda, mse) pairs; ties resolve to the larger lambda.
double lambda_best(const std::vector<std::pair<double, double>>& lambda_mse);

double min_eigenvalue(const Eigen::MatrixXd& S);
bool is_psd(const Eigen::MatrixXd& S, double tol_scale = 1e-10);

// Chain view of the off-diagonal bands: band m vectorized as the lower then
// the upper triangle entries, bands 1..p-1 concatenated.  Lets the generic
// chain proxes run on symmetric matrices.
class SubdiagonalView {
 public:
  explicit SubdiagonalView(int p);
  int p() const { return p_; }
  const std::vector<int>& sizes() const { return sizes_; }
  Eigen::VectorXd vectorize(const Eigen::MatrixXd& S) const;
  // Writes the band entries of v into S; the diagonal is left untouched.
  void scatter(const Eigen::VectorXd& v, Eigen::MatrixXd& S) const;
  // sqrt of cumulative band sizes: the standard nested-group weights.
  Eigen::VectorXd chain_weights() const;

 private:
  int p_ = 0;
  std::vector<int> sizes_;
};

// Smallest root-mean-square band norm over bands m..K, m = 1..K; recovery of
// the exact bandwidth needs this margin to exceed twice the threshold level.
double min_band_signal(const Eigen::MatrixXd& sigma, int K);

// count log-spaced values on [1e-4 * lambda_max, lambda_max], where
// lambda_max is the smallest level at which the estimate has bandwidth 0.
std::vector<double> lambda_grid(const Eigen::MatrixXd& S, BandPenalty kind,
                                int count = 50);

}  // namespace hsm
