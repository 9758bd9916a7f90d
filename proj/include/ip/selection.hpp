#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ip/design.hpp"
#include "ip/types.hpp"

namespace ip {

struct PenaltySpec {
  enum class Kind { lasso, elastic_net, l1_sica };
  Kind kind = Kind::lasso;
  double lambda0 = 0.0;  // L1 weight (lasso, l1_sica)
  double lambda = 0.0;   // elastic-net / concave weight
  double alpha = 1.0;    // elastic-net mixing in [0,1]
  double a = 0.5;        // SICA shape, > 0

  static PenaltySpec lasso(double lambda0);
  static PenaltySpec elastic_net(double lambda, double alpha);
  static PenaltySpec l1_sica(double lambda0, double lambda, double a = 0.5);

  bool convex() const noexcept { return kind != Kind::l1_sica; }
};

// Penalty value at |t| (per coordinate).
double penalty_value(double t, const PenaltySpec& pen);

// SICA component alone: lambda (a+1) t / (a + t), t >= 0.
double sica_penalty(double t, double lambda, double a);

// Hard-thresholding penalty 0.5 { lambda^2 - (lambda - t)_+^2 }; reference
// function only, not a fit option.
double hard_threshold_penalty(double t, double lambda);

// argmin_t (c/2)(t - z)^2 + penalty(|t|), exact. For L1+SICA the global
// minimum over {0} u {real stationary points} is returned.
double univariate_prox(double z, double c, const PenaltySpec& pen);

struct SolverOptions {
  int max_iterations = 10000;  // full coordinate sweeps
  double tolerance = 1e-7;     // max |delta theta*| per sweep
  std::optional<Eigen::VectorXd> warm_start;  // theta* scale
  bool track_objective = false;
};

struct FitResult {
  std::map<FeatureId, double> theta;  // nonzeros only, original column scale
  double intercept = 0.0;
  double objective = 0.0;  // penalized objective at the solution (theta* scale)
  int iterations = 0;
  bool converged = false;
  double kkt_max_violation = 0.0;  // stationarity gap for l1_sica
  // diagnostics
  double rss = 0.0;
  std::vector<double> objective_history;  // filled when track_objective

  int df() const noexcept { return static_cast<int>(theta.size()); }
};

// Cyclic coordinate descent on the rescaled columns z D^{-1} (unit norm
// sqrt(n)), minimizing
//   (2n)^{-1} ||y - z theta||^2 + lambda0 ||D theta||_1 + ||p_lambda(D theta)||_1.
// Non-convergence within max_iterations returns converged=false with the
// best iterate, not an exception.
FitResult fit(const AugmentedDesign& design, const PenaltySpec& pen,
              const SolverOptions& opts = {});

// Unpenalized least squares on the design (used by the oracle method).
FitResult fit_ols(const AugmentedDesign& design);

// Max KKT violation of a candidate theta (original scale, dense over
// design.features). Convex penalties only; throws InputError for l1_sica.
double kkt_check(const AugmentedDesign& design, const PenaltySpec& pen,
                 const Eigen::VectorXd& theta);

struct BicGrid {
  std::vector<double> lambda0s;
  std::vector<double> lambdas;
  std::vector<double> as{0.5};
};

// Anchors {0.25, 0.5, 1} * sqrt(log(p~)/n) with p~ = p(p+1)/2, and a
// geometric lambda path sized from the data. p is the ambient covariate
// count (before screening).
BicGrid default_bic_grid(const AugmentedDesign& design, int ambient_p);

// BIC = n log(RSS/n) + df log(n), df = #nonzeros. Warm starts along each
// descending-lambda path; ties prefer the sparser model, then smaller
// lambda, then smaller lambda0, then smaller a.
std::pair<PenaltySpec, FitResult> tune_bic(const AugmentedDesign& design,
                                           const BicGrid& grid,
                                           const SolverOptions& opts = {});

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid;  // empty = automatic geometric path
  double alpha = 1.0;               // elastic-net mixing; 1 = lasso
  PenaltySpec::Kind family = PenaltySpec::Kind::lasso;
};

// k-fold CV on mean squared prediction error; fold assignment is a seeded
// random permutation partitioned contiguously. Returns the winning penalty
// refit on all data.
std::pair<PenaltySpec, FitResult> tune_cv(const AugmentedDesign& design,
                                          const CvOptions& cv,
                                          const SolverOptions& opts = {});

// Automatic geometric lambda path (descending) for the L1 family.
std::vector<double> default_lambda_path(const AugmentedDesign& design,
                                        int points = 50,
                                        double min_ratio = 1e-3);

struct Metrics {
  double pe = 0.0;
  int fp = 0;
  int fn = 0;
  int fs = 0;
};

// PE on a test set plus support/sign errors against the truth. When the fit
// was produced on standardized covariates, pass the training transform so
// the same map is applied to the test covariates.
Metrics evaluate(const FitResult& fit, const TrueModel& truth,
                 const Dataset& test,
                 const StandardizeParams* train_transform = nullptr);

// Support/sign counts only (no test data needed).
void count_errors(const FitResult& fit, const TrueModel& truth, Metrics* out);

}  // namespace ip
