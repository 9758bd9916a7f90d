#include "ip/serial.hpp"

#include <cmath>

namespace ip::serial {

Eigen::VectorXd omega_utilities(const Dataset& d) {
  const Eigen::Index n = d.n(), p = d.p();
  double ysq_mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ysq_mean += d.y[i] * d.y[i];
  ysq_mean /= double(n);

  Eigen::VectorXd omega(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    double xsq_mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) xsq_mean += d.x(i, k) * d.x(i, k);
    xsq_mean /= double(n);
    double cov = 0.0, var = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xc = d.x(i, k) * d.x(i, k) - xsq_mean;
      const double yc = d.y[i] * d.y[i] - ysq_mean;
      cov += xc * yc;
      var += xc * xc;
    }
    cov /= double(n);
    var /= double(n);
    if (var <= 0.0)
      throw InputError("zero variance of squared column " + std::to_string(k + 1));
    omega[k] = cov / std::sqrt(var);
  }
  return omega;
}

Eigen::VectorXd omega_star_utilities(const Dataset& d) {
  const Eigen::Index n = d.n(), p = d.p();
  Eigen::VectorXd out(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += d.x(i, j) * d.y[i];
    out[j] = s / double(n);
  }
  return out;
}

namespace {

Eigen::MatrixXd centered_abs_distances(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = std::abs(v[i] - v[j]);
  Eigen::VectorXd row_means(n);
  for (Eigen::Index i = 0; i < n; ++i) row_means[i] = a.row(i).mean();
  const double grand = row_means.mean();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = a(i, j) - row_means[i] - row_means[j] + grand;
  return a;
}

}  // namespace

Eigen::VectorXd dcsis_utilities(const Dataset& d) {
  const Eigen::Index n = d.n(), p = d.p();
  const Eigen::MatrixXd b = centered_abs_distances(d.y);
  const double dvar_y = b.array().square().sum() / double(n * n);

  Eigen::VectorXd out(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::MatrixXd a = centered_abs_distances(d.x.col(k));
    const double dvar_x = a.array().square().sum() / double(n * n);
    if (dvar_x <= 0.0 || dvar_y <= 0.0) {
      out[k] = 0.0;
      continue;
    }
    const double dcov_sq = (a.array() * b.array()).sum() / double(n * n);
    out[k] = dcov_sq > 0.0 ? std::sqrt(dcov_sq / std::sqrt(dvar_x * dvar_y))
                           : 0.0;
  }
  return out;
}

AugmentedDesign build_design(const Dataset& d,
                             const std::vector<FeatureId>& features) {
  if (!d.standardized)
    throw InputError("design construction requires a standardized dataset");
  const Eigen::Index n = d.n();
  const Eigen::Index q = static_cast<Eigen::Index>(features.size());
  AugmentedDesign out;
  out.features = features;
  out.z.resize(n, q);
  out.d_scale.resize(q);
  out.col_means.resize(q);
  for (Eigen::Index m = 0; m < q; ++m) {
    const FeatureId& f = features[m];
    if (f.is_main()) {
      for (Eigen::Index i = 0; i < n; ++i) out.z(i, m) = d.x(i, f.main_index());
    } else {
      const auto [k, l] = f.interaction_pair();
      for (Eigen::Index i = 0; i < n; ++i) out.z(i, m) = d.x(i, k) * d.x(i, l);
    }
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += out.z(i, m);
    mean /= double(n);
    out.col_means[m] = mean;
    double sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      out.z(i, m) -= mean;
      sq += out.z(i, m) * out.z(i, m);
    }
    out.d_scale[m] = std::sqrt(sq / double(n));
    if (!(out.d_scale[m] > 0.0))
      throw InputError("zero-norm design column for feature " +
                       features[m].name());
  }
  out.y_mean = d.y.mean();
  out.y_centered = d.y.array() - out.y_mean;
  return out;
}

Eigen::MatrixXd sample_covariates(const CovarianceModel& cov, Eigen::Index n,
                                  const CounterRng& rng) {
  Eigen::MatrixXd x(n, cov.dim());
  Eigen::VectorXd row(cov.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    cov.sample_row(rng, static_cast<std::uint64_t>(i), row);
    x.row(i) = row;
  }
  return x;
}

}  // namespace ip::serial
