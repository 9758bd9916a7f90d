#include "ip/design.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ip/parallel.hpp"

namespace ip {

AugmentedDesign build_design(const Dataset& d,
                             const std::vector<FeatureId>& features) {
  d.validate();
  if (!d.standardized)
    throw InputError("design construction requires a standardized dataset");
  if (features.empty()) throw InputError("feature list is empty");
  {
    std::set<FeatureId> seen;
    for (const auto& f : features) {
      if (!seen.insert(f).second)
        throw InputError("duplicate feature " + f.name());
      const int hi = f.is_main() ? f.main_index() : f.second();
      if (hi >= d.p())
        throw InputError("feature " + f.name() + " exceeds " +
                         std::to_string(d.p()) + " covariates");
    }
  }

  const Eigen::Index n = d.n();
  const Eigen::Index q = static_cast<Eigen::Index>(features.size());
  AugmentedDesign out;
  out.features = features;
  out.z.resize(n, q);
  out.d_scale.resize(q);
  out.col_means.resize(q);

#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
  for (Eigen::Index m = 0; m < q; ++m) {
    const FeatureId& f = features[m];
    if (f.is_main()) {
      out.z.col(m) = d.x.col(f.main_index());
    } else {
      const auto [k, l] = f.interaction_pair();
      out.z.col(m) = d.x.col(k).cwiseProduct(d.x.col(l));
    }
    const double mean = out.z.col(m).mean();
    out.col_means[m] = mean;
    out.z.col(m).array() -= mean;
    out.d_scale[m] = out.z.col(m).norm() / std::sqrt(double(n));
  }

  for (Eigen::Index m = 0; m < q; ++m)
    if (!(out.d_scale[m] > 0.0))
      throw InputError("zero-norm design column for feature " +
                       features[m].name());

  out.y_mean = d.y.mean();
  out.y_centered = d.y.array() - out.y_mean;
  return out;
}

double raw_feature_value(const FeatureId& f, const Eigen::VectorXd& x_row) {
  if (f.is_main()) return x_row[f.main_index()];
  const auto [k, l] = f.interaction_pair();
  return x_row[k] * x_row[l];
}

Eigen::VectorXd rescale_to_theta_star(const Eigen::VectorXd& theta,
                                      const AugmentedDesign& design) {
  if (theta.size() != design.q())
    throw InputError("coefficient length does not match design");
  return theta.cwiseProduct(design.d_scale);
}

Eigen::VectorXd rescale_from_theta_star(const Eigen::VectorXd& theta_star,
                                        const AugmentedDesign& design) {
  if (theta_star.size() != design.q())
    throw InputError("coefficient length does not match design");
  return theta_star.cwiseQuotient(design.d_scale);
}

void design_to_csv(const AugmentedDesign& design, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file '" + path + "'");
  for (const auto& f : design.features) out << f.name() << ',';
  out << "y_centered\n";
  for (Eigen::Index i = 0; i < design.n(); ++i) {
    for (Eigen::Index m = 0; m < design.q(); ++m)
      out << format_double(design.z(i, m)) << ',';
    out << format_double(design.y_centered[i]) << '\n';
  }
}

}  // namespace ip
