#pragma once

#include <Eigen/Core>
#include <vector>

#include "ip/dataset.hpp"
#include "ip/types.hpp"

namespace ip {

// Column-de-meaned design over a chosen feature set, plus the diagonal D
// rescaling that gives every column L2-norm sqrt(n).
struct AugmentedDesign {
  std::vector<FeatureId> features;  // mains ascending, then pairs lexicographic
  Eigen::MatrixXd z;                // n x q, de-meaned columns
  Eigen::VectorXd d_scale;          // D_mm = n^{-1/2} ||z_m||, all > 0
  Eigen::VectorXd col_means;        // raw feature means removed from z
  Eigen::VectorXd y_centered;
  double y_mean = 0.0;

  Eigen::Index n() const noexcept { return z.rows(); }
  Eigen::Index q() const noexcept { return z.cols(); }
};

// Main-effect columns are copied from the (standardized) covariates;
// interaction columns are Hadamard products of standardized covariate
// columns. Every column is then de-meaned and y centered.
// Throws InputError on an empty/duplicated feature list, out-of-range
// indices, or a zero-norm column (named).
AugmentedDesign build_design(const Dataset& standardized,
                             const std::vector<FeatureId>& features);

// The feature value of each design column at one covariate row (standardized
// scale), without de-meaning. Used for prediction on fresh data.
double raw_feature_value(const FeatureId& f, const Eigen::VectorXd& x_row);

// theta* = D theta and its inverse.
Eigen::VectorXd rescale_to_theta_star(const Eigen::VectorXd& theta,
                                      const AugmentedDesign& design);
Eigen::VectorXd rescale_from_theta_star(const Eigen::VectorXd& theta_star,
                                        const AugmentedDesign& design);

// Debug dump: feature names as header ("x3", "x1:x5"), then the de-meaned
// design columns and the centered response.
void design_to_csv(const AugmentedDesign& design, const std::string& path);

}  // namespace ip
