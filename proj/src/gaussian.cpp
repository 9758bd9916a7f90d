#include "ip/gaussian.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>

#include "ip/parallel.hpp"

namespace ip {

CovarianceModel CovarianceModel::identity(int p) {
  if (p < 1) throw InputError("dimension must be positive");
  CovarianceModel c;
  c.kind_ = CovKind::identity;
  c.p_ = p;
  return c;
}

CovarianceModel CovarianceModel::ar1(int p, double rho) {
  if (p < 1) throw InputError("dimension must be positive");
  if (!(std::abs(rho) < 1.0)) throw InputError("AR(1) needs |rho| < 1");
  CovarianceModel c;
  c.kind_ = rho == 0.0 ? CovKind::identity : CovKind::ar1;
  c.p_ = p;
  c.rho_ = rho;
  return c;
}

CovarianceModel CovarianceModel::equicorr(int p, double rho) {
  if (p < 1) throw InputError("dimension must be positive");
  if (!(rho < 1.0) || !(rho > -1.0 / std::max(1.0, double(p - 1))))
    throw InputError("equicorrelation matrix is not positive definite");
  CovarianceModel c;
  c.kind_ = rho == 0.0 ? CovKind::identity : CovKind::equicorr;
  c.p_ = p;
  c.rho_ = rho;
  c.prepare();
  return c;
}

CovarianceModel CovarianceModel::tridiagonal(int p, double rho) {
  if (p < 1) throw InputError("dimension must be positive");
  const double min_eig = 1.0 - 2.0 * std::abs(rho) * std::cos(M_PI / double(p + 1));
  if (!(min_eig > 1e-12))
    throw InputError("tridiagonal matrix is not positive definite");
  CovarianceModel c;
  c.kind_ = rho == 0.0 ? CovKind::identity : CovKind::tridiagonal;
  c.p_ = p;
  c.rho_ = rho;
  c.prepare();
  return c;
}

CovarianceModel CovarianceModel::dense(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw InputError("covariance must be square");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw InputError("covariance must be symmetric");
  CovarianceModel c;
  c.kind_ = CovKind::dense;
  c.p_ = static_cast<int>(sigma.rows());
  c.sigma_ = std::move(sigma);
  c.prepare();
  return c;
}

void CovarianceModel::prepare() {
  if (kind_ == CovKind::tridiagonal) {
    band_diag_.resize(p_);
    band_sub_.resize(p_);
    band_diag_[0] = 1.0;
    band_sub_[0] = 0.0;
    for (int j = 1; j < p_; ++j) {
      band_sub_[j] = rho_ / band_diag_[j - 1];
      const double rem = 1.0 - band_sub_[j] * band_sub_[j];
      if (!(rem > 0.0))
        throw InputError("tridiagonal matrix is not positive definite");
      band_diag_[j] = std::sqrt(rem);
    }
  } else if (kind_ == CovKind::equicorr && rho_ < 0.0) {
    // Negative equicorrelation has no shared-factor form; fall back to a
    // dense Cholesky factor.
    sigma_ = Eigen::MatrixXd::Constant(p_, p_, rho_);
    sigma_.diagonal().setOnes();
  }
  if (sigma_.size() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
    if (llt.info() != Eigen::Success)
      throw InputError("covariance is not positive definite");
    chol_ = llt.matrixL();
  }
}

double CovarianceModel::operator()(int i, int j) const {
  if (i < 0 || j < 0 || i >= p_ || j >= p_)
    throw InputError("covariance index out of range");
  switch (kind_) {
    case CovKind::identity:
      return i == j ? 1.0 : 0.0;
    case CovKind::ar1:
      return std::pow(rho_, std::abs(i - j));
    case CovKind::equicorr:
      return i == j ? 1.0 : rho_;
    case CovKind::tridiagonal:
      return i == j ? 1.0 : (std::abs(i - j) == 1 ? rho_ : 0.0);
    case CovKind::dense:
      return sigma_(i, j);
  }
  return 0.0;
}

void CovarianceModel::sample_row(const CounterRng& rng, std::uint64_t row,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  const std::uint64_t base = row * draws_per_row();
  switch (kind_) {
    case CovKind::identity:
      for (int j = 0; j < p_; ++j) out[j] = rng.normal_at(base + j);
      return;
    case CovKind::ar1: {
      const double s = std::sqrt(1.0 - rho_ * rho_);
      double prev = rng.normal_at(base);
      out[0] = prev;
      for (int j = 1; j < p_; ++j) {
        prev = rho_ * prev + s * rng.normal_at(base + j);
        out[j] = prev;
      }
      return;
    }
    case CovKind::equicorr: {
      if (rho_ >= 0.0) {
        const double g = rng.normal_at(base);
        const double sr = std::sqrt(rho_), sc = std::sqrt(1.0 - rho_);
        for (int j = 0; j < p_; ++j)
          out[j] = sr * g + sc * rng.normal_at(base + 1 + j);
        return;
      }
      break;  // dense factor below
    }
    case CovKind::tridiagonal: {
      double zprev = rng.normal_at(base);
      out[0] = zprev;
      for (int j = 1; j < p_; ++j) {
        const double zj = rng.normal_at(base + j);
        out[j] = band_sub_[j] * zprev + band_diag_[j] * zj;
        zprev = zj;
      }
      return;
    }
    case CovKind::dense:
      break;
  }
  Eigen::VectorXd z(p_);
  for (int j = 0; j < p_; ++j) z[j] = rng.normal_at(base + j);
  out = chol_.template triangularView<Eigen::Lower>() * z;
}

double CovarianceModel::sample_entry(const CounterRng& rng, std::uint64_t row,
                                     int col) const {
  const std::uint64_t base = row * draws_per_row();
  switch (kind_) {
    case CovKind::identity:
      return rng.normal_at(base + col);
    case CovKind::equicorr: {
      const double g = rng.normal_at(base);
      return std::sqrt(rho_) * g +
             std::sqrt(1.0 - rho_) * rng.normal_at(base + 1 + col);
    }
    case CovKind::tridiagonal: {
      if (col == 0) return rng.normal_at(base);
      return band_sub_[col] * rng.normal_at(base + col - 1) +
             band_diag_[col] * rng.normal_at(base + col);
    }
    default:
      throw std::logic_error("sample_entry requires independent columns");
  }
}

Eigen::MatrixXd sample_covariates(const CovarianceModel& cov, Eigen::Index n,
                                  const CounterRng& rng) {
  Eigen::MatrixXd x(n, cov.dim());
#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row(cov.dim());
    cov.sample_row(rng, static_cast<std::uint64_t>(i), row);
    x.row(i) = row;
  }
  return x;
}

namespace {

double isserlis_recurse(const CovarianceModel& cov, std::vector<int>& idx,
                        std::map<std::vector<int>, double>& memo) {
  const std::size_t m = idx.size();
  if (m == 0) return 1.0;
  if (m % 2 == 1) return 0.0;
  if (m == 2) return cov(idx[0], idx[1]);
  if (auto it = memo.find(idx); it != memo.end()) return it->second;

  // Pair the first index with each remaining one.
  const std::vector<int> key = idx;
  const int head = idx[0];
  double total = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double s = cov(head, idx[i]);
    if (s != 0.0) {
      std::vector<int> rest;
      rest.reserve(m - 2);
      for (std::size_t t = 1; t < m; ++t)
        if (t != i) rest.push_back(idx[t]);
      total += s * isserlis_recurse(cov, rest, memo);
    }
  }
  memo.emplace(key, total);
  return total;
}

}  // namespace

double isserlis_moment(const CovarianceModel& cov, std::vector<int> indices) {
  if (indices.size() > 6)
    throw InputError("moment order is limited to 6");
  for (int i : indices)
    if (i < 0 || i >= cov.dim()) throw InputError("moment index out of range");
  std::sort(indices.begin(), indices.end());
  std::map<std::vector<int>, double> memo;
  return isserlis_recurse(cov, indices, memo);
}

namespace {

struct SignalTerm {
  double coef;
  std::vector<int> vars;  // 1 (main) or 2 (interaction) indices
};

std::vector<SignalTerm> signal_terms(const TrueModel& m) {
  std::vector<SignalTerm> terms;
  terms.reserve(m.beta.size() + m.gamma.size());
  for (const auto& [j, v] : m.beta) terms.push_back({v, {j}});
  for (const auto& [kl, v] : m.gamma)
    terms.push_back({v, {kl.first, kl.second}});
  return terms;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_spec(const GaussianSpec& spec) {
  if (spec.model.max_index() >= spec.cov.dim())
    throw InputError("model references covariates beyond the covariance dimension");
  if (!(spec.error_variance >= 0.0))
    throw InputError("error variance must be nonnegative");
}

}  // namespace

double cov_xsq_ysq(const GaussianSpec& spec, int j) {
  check_spec(spec);
  if (j < 0 || j >= spec.cov.dim())
    throw InputError("covariate index out of range");
  const auto terms = signal_terms(spec.model);
  const std::size_t t = terms.size();
  if (t * t > 1000000)
    throw std::runtime_error(
        "model support too large for exact moment enumeration; "
        "use a Monte Carlo estimate instead");

  const std::vector<int> jj{j, j};
  const double var_j = spec.cov(j, j);
  double total = 0.0;
  // Intercept cross terms 2 b0 cov(X_j^2, T).
  if (spec.model.beta0 != 0.0) {
    for (const auto& s : terms)
      total += 2.0 * spec.model.beta0 * s.coef *
               (isserlis_moment(spec.cov, concat(jj, s.vars)) -
                var_j * isserlis_moment(spec.cov, s.vars));
  }
  // cov(X_j^2, T^2); error terms vanish (independent, mean zero).
  for (const auto& s : terms) {
    for (const auto& u : terms) {
      const std::vector<int> su = concat(s.vars, u.vars);
      total += s.coef * u.coef *
               (isserlis_moment(spec.cov, concat(jj, su)) -
                var_j * isserlis_moment(spec.cov, su));
    }
  }
  return total;
}

double snr_overall(const GaussianSpec& spec) {
  check_spec(spec);
  if (!(spec.error_variance > 0.0))
    throw InputError("SNR needs a positive error variance");
  const auto terms = signal_terms(spec.model);
  double var = 0.0;
  for (const auto& s : terms) {
    for (const auto& u : terms) {
      var += s.coef * u.coef *
             (isserlis_moment(spec.cov, concat(s.vars, u.vars)) -
              isserlis_moment(spec.cov, s.vars) *
                  isserlis_moment(spec.cov, u.vars));
    }
  }
  return var / spec.error_variance;
}

double snr_individual(const GaussianSpec& spec, const FeatureId& f) {
  check_spec(spec);
  if (!(spec.error_variance > 0.0))
    throw InputError("SNR needs a positive error variance");
  const double coef = spec.model.theta(f);
  std::vector<int> vars;
  if (f.is_main())
    vars = {f.main_index()};
  else
    vars = {f.first(), f.second()};
  const double e1 = isserlis_moment(spec.cov, vars);
  const double e2 = isserlis_moment(spec.cov, concat(vars, vars));
  return coef * coef * (e2 - e1 * e1) / spec.error_variance;
}

Dataset sample_gaussian(const GaussianSpec& spec, Eigen::Index n,
                        std::uint64_t seed) {
  check_spec(spec);
  const CounterRng rng(seed);
  Dataset d;
  d.x = sample_covariates(spec.cov, n, rng.split(1));
  d.y.resize(n);
  const CounterRng noise = rng.split(2);
  const double sd = std::sqrt(spec.error_variance);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = spec.model.beta0;
    for (const auto& [j, v] : spec.model.beta) s += v * d.x(i, j);
    for (const auto& [kl, v] : spec.model.gamma)
      s += v * d.x(i, kl.first) * d.x(i, kl.second);
    d.y[i] = s + sd * noise.normal_at(static_cast<std::uint64_t>(i));
  }
  return d;
}

}  // namespace ip
