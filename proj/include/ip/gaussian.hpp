#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ip/dataset.hpp"
#include "ip/rng.hpp"
#include "ip/types.hpp"

namespace ip {

enum class CovKind { identity, ar1, equicorr, tridiagonal, dense };

// Covariance of a zero-mean Gaussian covariate vector. The structured kinds
// store (kind, rho) and sample in O(bandwidth) per entry; dense stores Sigma
// and its Cholesky factor.
class CovarianceModel {
 public:
  CovarianceModel() = default;  // empty; assign one of the factories below

  static CovarianceModel identity(int p);
  static CovarianceModel ar1(int p, double rho);         // Sigma_jk = rho^|j-k|
  static CovarianceModel equicorr(int p, double rho);    // 1 on diag, rho off
  static CovarianceModel tridiagonal(int p, double rho); // rho on first off-diag
  static CovarianceModel dense(Eigen::MatrixXd sigma);   // SPD required

  int dim() const noexcept { return p_; }
  CovKind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }

  double operator()(int i, int j) const;

  // Columns can be generated independently of each other (no cross-column
  // recursion), which lets the experiment driver stream a subset of columns.
  bool independent_columns() const noexcept {
    return kind_ == CovKind::identity || kind_ == CovKind::tridiagonal ||
           (kind_ == CovKind::equicorr && rho_ >= 0.0);
  }

  // One covariate row from iid N(0,1) draws indexed off `rng`; `row` selects
  // the per-row counter block. Lower-triangular (Cholesky) application for
  // ar1/tridiagonal/dense; nonnegative equicorrelation uses the shared-factor
  // form sqrt(rho) G + sqrt(1-rho) Z_j.
  void sample_row(const CounterRng& rng, std::uint64_t row,
                  Eigen::Ref<Eigen::VectorXd> out) const;

  // Value of covariate `col` in row `row`; only valid when
  // independent_columns() is true.
  double sample_entry(const CounterRng& rng, std::uint64_t row, int col) const;

  // Counters consumed per row (normal draws).
  std::uint64_t draws_per_row() const noexcept {
    return kind_ == CovKind::equicorr && rho_ >= 0.0
               ? static_cast<std::uint64_t>(p_) + 1
               : static_cast<std::uint64_t>(p_);
  }

 private:
  void prepare();

  CovKind kind_ = CovKind::identity;
  int p_ = 0;
  double rho_ = 0.0;
  Eigen::MatrixXd sigma_;       // dense only
  Eigen::MatrixXd chol_;        // dense only, lower
  Eigen::VectorXd band_diag_;   // tridiagonal Cholesky diagonal
  Eigen::VectorXd band_sub_;    // tridiagonal Cholesky subdiagonal
};

// n x p covariate draw; bitwise deterministic for a given rng key,
// independent of thread count.
Eigen::MatrixXd sample_covariates(const CovarianceModel& cov, Eigen::Index n,
                                  const CounterRng& rng);

struct GaussianSpec {
  CovarianceModel cov;
  TrueModel model;
  double error_variance = 1.0;
};

// E[prod X_i] over a multiset of <= 6 indices, by recursive pairing with
// memoization; 0 for odd cardinality.
double isserlis_moment(const CovarianceModel& cov, std::vector<int> indices);

// Exact population cov(X_j^2, Y^2), assembled term-by-term from Gaussian
// product moments. Guards the pair enumeration at 1e6 terms.
double cov_xsq_ysq(const GaussianSpec& spec, int j);

// var(signal)/var(error); the individual variant uses the single term's
// variance.
double snr_overall(const GaussianSpec& spec);
double snr_individual(const GaussianSpec& spec, const FeatureId& f);

// Covariates plus the model response y = beta0 + x'beta + sum gamma x x + eps,
// eps ~ N(0, error_variance). Deterministic per seed.
Dataset sample_gaussian(const GaussianSpec& spec, Eigen::Index n,
                        std::uint64_t seed);

}  // namespace ip
