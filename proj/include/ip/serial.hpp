#pragma once

#include <Eigen/Core>

#include "ip/dataset.hpp"
#include "ip/design.hpp"
#include "ip/gaussian.hpp"

namespace ip::serial {

// Plain single-threaded references for the OpenMP kernels, written as direct
// loops. Kept for tests (agreement within 1e-12 or bitwise) and for the
// benchmark target.

Eigen::VectorXd omega_utilities(const Dataset& d);
Eigen::VectorXd omega_star_utilities(const Dataset& d);
Eigen::VectorXd dcsis_utilities(const Dataset& d);
AugmentedDesign build_design(const Dataset& standardized,
                             const std::vector<FeatureId>& features);
Eigen::MatrixXd sample_covariates(const CovarianceModel& cov, Eigen::Index n,
                                  const CounterRng& rng);

}  // namespace ip::serial
