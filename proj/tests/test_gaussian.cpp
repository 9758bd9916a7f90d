#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ip/gaussian.hpp"
#include "ip/parallel.hpp"
#include "ip/serial.hpp"
#include "test_util.hpp"

using ip::CovarianceModel;
using ip::FeatureId;
using ip::GaussianSpec;
using ip::TrueModel;

namespace {

Eigen::MatrixXd materialized(const CovarianceModel& cov) {
  Eigen::MatrixXd s(cov.dim(), cov.dim());
  for (int i = 0; i < cov.dim(); ++i)
    for (int j = 0; j < cov.dim(); ++j) s(i, j) = cov(i, j);
  return s;
}

}  // namespace

TEST_CASE("isserlis base cases") {
  const auto id = CovarianceModel::identity(3);
  CHECK(ip::isserlis_moment(id, {0, 1}) == 0.0);
  CHECK(ip::isserlis_moment(id, {0, 0}) == 1.0);
  CHECK(ip::isserlis_moment(id, {0, 1, 2}) == 0.0);  // odd
  CHECK(ip::isserlis_moment(id, {0, 0, 0, 0}) == 3.0);
  CHECK(ip::isserlis_moment(id, {0, 0, 1, 1}) == 1.0);

  const auto ar = CovarianceModel::ar1(4, 0.5);
  CHECK(ip::isserlis_moment(ar, {0, 1}) == doctest::Approx(0.5));
  CHECK(ip::isserlis_moment(ar, {0, 3}) == doctest::Approx(0.125));

  CHECK_THROWS_AS(ip::isserlis_moment(id, {0, 0, 0, 0, 0, 0, 0, 0}),
                  ip::InputError);
  CHECK_THROWS_AS(ip::isserlis_moment(id, {5, 0}), ip::InputError);
}

TEST_CASE("isserlis equals the independent pairing oracle up to order 6") {
  ip::CounterRng rng(31);
  for (int round = 0; round < 20; ++round) {
    const int p = 6;
    const Eigen::MatrixXd sigma = testutil::random_spd(p, rng);
    const auto cov = CovarianceModel::dense(sigma);
    for (int order = 0; order <= 6; ++order) {
      std::vector<int> idx(order);
      for (int& v : idx) v = int(rng.next_u64() % p);
      CHECK(ip::isserlis_moment(cov, idx) ==
            doctest::Approx(testutil::isserlis_brute(sigma, idx))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("cov_xsq_ysq: identity covariance closed form") {
  // single interaction + main effect
  GaussianSpec spec;
  spec.cov = CovarianceModel::identity(4);
  spec.model.set_beta(0, 1.0);
  spec.model.set_gamma(0, 1, 1.0);
  spec.error_variance = 1.0;
  CHECK(ip::cov_xsq_ysq(spec, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(ip::cov_xsq_ysq(spec, 3) == doctest::Approx(0.0));

  // random sparse models against the closed form 2(beta_j^2 + sum gamma^2)
  ip::CounterRng rng(77);
  for (int round = 0; round < 40; ++round) {
    GaussianSpec s;
    const int p = 8;
    s.cov = CovarianceModel::identity(p);
    for (int t = 0; t < 3; ++t) {
      s.model.set_beta(int(rng.next_u64() % p), rng.normal());
      const int k = int(rng.next_u64() % p), l = int(rng.next_u64() % p);
      if (k != l) s.model.set_gamma(k, l, rng.normal());
    }
    s.error_variance = 1.0;
    for (int j = 0; j < p; ++j) {
      double expect = 0.0;
      if (auto it = s.model.beta.find(j); it != s.model.beta.end())
        expect += it->second * it->second;
      for (const auto& [kl, v] : s.model.gamma)
        if (kl.first == j || kl.second == j) expect += v * v;
      expect *= 2.0;
      CHECK(ip::cov_xsq_ysq(s, j) ==
            doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("cov_xsq_ysq: equicorrelated single-interaction values") {
  for (double rho : {-0.3, 0.0, 0.3, 0.6}) {
    GaussianSpec spec;
    spec.cov = CovarianceModel::equicorr(4, rho);
    spec.model.set_gamma(0, 1, 1.0);
    spec.error_variance = 1.0;
    CHECK(ip::cov_xsq_ysq(spec, 0) ==
          doctest::Approx(2.0 + 10.0 * rho * rho).epsilon(1e-13));
    CHECK(ip::cov_xsq_ysq(spec, 2) ==
          doctest::Approx(4.0 * rho * rho * (1.0 + 2.0 * rho)).epsilon(1e-13));
  }
}

TEST_CASE("cov_xsq_ysq: tridiagonal strong-heredity interaction term") {
  // cov(X_1^2, (X_1 X_2)^2) = 2 gamma^2 (1 + 5 rho^2) at gamma = 1
  GaussianSpec spec;
  spec.cov = CovarianceModel::tridiagonal(5, 0.5);
  spec.model.set_gamma(0, 1, 1.0);
  spec.error_variance = 1.0;
  CHECK(ip::cov_xsq_ysq(spec, 0) == doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("cov_xsq_ysq matches Monte Carlo for correlated designs") {
  // includes a nonzero intercept so the 2 b0 cov(X_j^2, T) terms are covered
  struct Case {
    CovarianceModel cov;
    double beta0;
  };
  const std::vector<Case> cases = {
      {CovarianceModel::tridiagonal(6, 0.4), 0.0},
      {CovarianceModel::equicorr(6, 0.3), 1.5},
  };
  for (const auto& cs : cases) {
    GaussianSpec spec;
    spec.cov = cs.cov;
    spec.model.beta0 = cs.beta0;
    spec.model.set_beta(2, 1.0);
    spec.model.set_gamma(0, 1, 2.0);
    spec.model.set_gamma(1, 3, -1.0);
    spec.error_variance = 0.5;

    const int n = 200000;
    const ip::Dataset d = ip::sample_gaussian(spec, n, 99);
    for (int j : {0, 1, 2, 5}) {
      const Eigen::ArrayXd xsq = d.x.col(j).array().square();
      const Eigen::ArrayXd ysq = d.y.array().square();
      const Eigen::ArrayXd prod = (xsq - xsq.mean()) * (ysq - ysq.mean());
      const double est = prod.mean();
      const double se = std::sqrt((prod - est).square().mean() / double(n));
      const double exact = ip::cov_xsq_ysq(spec, j);
      CHECK(std::abs(est - exact) <= 5.0 * se);
    }
  }
}

TEST_CASE("snr values for the builtin models") {
  // strong heredity: var 2^2 + 2^2 + 3^2 over 2.5^2
  GaussianSpec m1;
  m1.cov = CovarianceModel::identity(15);
  m1.model.set_beta(0, 2);
  m1.model.set_beta(4, 2);
  m1.model.set_gamma(0, 4, 3);
  m1.error_variance = 6.25;
  CHECK(ip::snr_individual(m1, FeatureId::main(0)) == doctest::Approx(0.64));
  CHECK(ip::snr_individual(m1, FeatureId::interaction(0, 4)) ==
        doctest::Approx(1.44));
  CHECK(ip::snr_overall(m1) == doctest::Approx(2.72));

  GaussianSpec m4;
  m4.cov = CovarianceModel::identity(15);
  m4.model.set_gamma(0, 4, 3);
  m4.model.set_gamma(9, 14, 3);
  m4.error_variance = 2.25;
  CHECK(ip::snr_overall(m4) == doctest::Approx(8.0));

  GaussianSpec zero;
  zero.cov = CovarianceModel::identity(3);
  zero.error_variance = 1.0;
  CHECK(ip::snr_overall(zero) == 0.0);
}

TEST_CASE("covariance models: entries and structured sampling match dense") {
  ip::CounterRng rng(5);
  const int p = 6, n = 4000;
  const std::vector<CovarianceModel> models = {
      CovarianceModel::ar1(p, 0.6),
      CovarianceModel::equicorr(p, 0.4),
      CovarianceModel::equicorr(p, -0.15),
      CovarianceModel::tridiagonal(p, 0.45),
  };
  for (const auto& cov : models) {
    const Eigen::MatrixXd sigma = materialized(cov);
    // sample covariance from the structured sampler approaches sigma
    const Eigen::MatrixXd x = ip::sample_covariates(cov, n, rng.split(1));
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd sample = centered.transpose() * centered / double(n);
    CHECK((sample - sigma).cwiseAbs().maxCoeff() < 0.12);
  }
}

TEST_CASE("sampling: CLT bounds and seed determinism") {
  const int n = 100000;
  const auto id = CovarianceModel::identity(4);
  const Eigen::MatrixXd x = ip::sample_covariates(id, n, ip::CounterRng(123));
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(x.col(j).mean()) < 4.0 / std::sqrt(double(n)));
    const double var = (x.col(j).array() - x.col(j).mean()).square().mean();
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
  }

  const auto ar = CovarianceModel::ar1(3, 0.5);
  const Eigen::MatrixXd xa = ip::sample_covariates(ar, n, ip::CounterRng(7));
  const auto corr = [&](int a, int b) {
    const Eigen::ArrayXd ca = xa.col(a).array() - xa.col(a).mean();
    const Eigen::ArrayXd cb = xa.col(b).array() - xa.col(b).mean();
    return (ca * cb).mean() /
           std::sqrt(ca.square().mean() * cb.square().mean());
  };
  CHECK(std::abs(corr(0, 1) - 0.5) < 0.02);
  CHECK(std::abs(corr(0, 2) - 0.25) < 0.02);

  // same seed -> bitwise identical; different seed -> different
  const Eigen::MatrixXd again = ip::sample_covariates(ar, n, ip::CounterRng(7));
  CHECK((again.array() == xa.array()).all());
  const Eigen::MatrixXd other = ip::sample_covariates(ar, n, ip::CounterRng(8));
  CHECK_FALSE((other.array() == xa.array()).all());
}

TEST_CASE("parallel sampler is bitwise identical to the serial reference") {
  const auto cov = CovarianceModel::ar1(40, 0.3);
  const ip::CounterRng rng(55);
  ip::set_num_threads(4);
  const Eigen::MatrixXd par = ip::sample_covariates(cov, 500, rng);
  ip::set_num_threads(1);
  const Eigen::MatrixXd par1 = ip::sample_covariates(cov, 500, rng);
  const Eigen::MatrixXd ser = ip::serial::sample_covariates(cov, 500, rng);
  CHECK((par.array() == ser.array()).all());
  CHECK((par1.array() == ser.array()).all());
  ip::set_num_threads(0);
}

TEST_CASE("sample_gaussian is deterministic and obeys the model") {
  GaussianSpec spec;
  spec.cov = CovarianceModel::identity(5);
  spec.model.beta0 = 0.5;
  spec.model.set_beta(1, 2.0);
  spec.model.set_gamma(0, 2, 1.0);
  spec.error_variance = 0.0;  // noiseless: y is the exact signal
  const ip::Dataset d = ip::sample_gaussian(spec, 100, 17);
  for (int i = 0; i < 100; ++i) {
    const double sig = 0.5 + 2.0 * d.x(i, 1) + d.x(i, 0) * d.x(i, 2);
    CHECK(d.y[i] == doctest::Approx(sig).epsilon(1e-12));
  }
}

TEST_CASE("covariance validation") {
  CHECK_THROWS_AS(CovarianceModel::ar1(3, 1.0), ip::InputError);
  CHECK_THROWS_AS(CovarianceModel::equicorr(3, -0.6), ip::InputError);
  CHECK_THROWS_AS(CovarianceModel::tridiagonal(50, 0.9), ip::InputError);
  Eigen::MatrixXd notspd(2, 2);
  notspd << 1, 2, 2, 1;
  CHECK_THROWS_AS(CovarianceModel::dense(notspd), ip::InputError);
}
