#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "ip/selection.hpp"
#include "test_util.hpp"

using ip::AugmentedDesign;
using ip::FeatureId;
using ip::PenaltySpec;
using ip::SolverOptions;

namespace {

// Hand-assembled design with zero-mean columns of L2-norm sqrt(n) * d_scale.
AugmentedDesign make_design(Eigen::MatrixXd z, Eigen::VectorXd y) {
  AugmentedDesign d;
  const Eigen::Index n = z.rows(), q = z.cols();
  d.col_means.resize(q);
  d.d_scale.resize(q);
  for (Eigen::Index m = 0; m < q; ++m) {
    d.col_means[m] = z.col(m).mean();
    z.col(m).array() -= d.col_means[m];
    d.d_scale[m] = z.col(m).norm() / std::sqrt(double(n));
    d.features.push_back(FeatureId::main(int(m)));
  }
  d.z = std::move(z);
  d.y_mean = y.mean();
  d.y_centered = y.array() - d.y_mean;
  return d;
}

// Columns orthonormal after centering, scaled to norm sqrt(n).
AugmentedDesign orthonormal_design(int n, int q, std::uint64_t seed,
                                   Eigen::VectorXd* y_out) {
  ip::CounterRng rng(seed);
  Eigen::MatrixXd a(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) a(i, j) = rng.normal();
  for (int j = 0; j < q; ++j) a.col(j).array() -= a.col(j).mean();
  const Eigen::MatrixXd qmat =
      Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
      Eigen::MatrixXd::Identity(n, q);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  y.array() -= y.mean();
  *y_out = y;
  return make_design(std::sqrt(double(n)) * qmat, y);
}

Eigen::VectorXd dense_theta(const ip::FitResult& fit,
                            const AugmentedDesign& design) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(design.q());
  for (Eigen::Index m = 0; m < design.q(); ++m) {
    auto it = fit.theta.find(design.features[m]);
    if (it != fit.theta.end()) theta[m] = it->second;
  }
  return theta;
}

// Exhaustive sign-pattern solution of the lasso for q <= 3.
Eigen::VectorXd lasso_brute(const Eigen::MatrixXd& w, const Eigen::VectorXd& y,
                            double lambda0) {
  const Eigen::Index n = w.rows(), q = w.cols();
  const auto objective = [&](const Eigen::VectorXd& t) {
    return (y - w * t).squaredNorm() / (2.0 * double(n)) +
           lambda0 * t.cwiseAbs().sum();
  };
  Eigen::VectorXd best = Eigen::VectorXd::Zero(q);
  double best_obj = objective(best);
  std::vector<int> signs(q, -1);
  const int total = static_cast<int>(std::pow(3, q));
  for (int code = 0; code < total; ++code) {
    int c = code;
    std::vector<int> s(q);
    std::vector<int> active;
    for (int m = 0; m < q; ++m, c /= 3) {
      s[m] = (c % 3) - 1;
      if (s[m] != 0) active.push_back(m);
    }
    if (active.empty()) continue;
    Eigen::MatrixXd wa(n, active.size());
    Eigen::VectorXd sa(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      wa.col(i) = w.col(active[i]);
      sa[i] = s[active[i]];
    }
    const Eigen::MatrixXd gram = wa.transpose() * wa / double(n);
    const Eigen::VectorXd rhs =
        wa.transpose() * y / double(n) - lambda0 * sa;
    const Eigen::VectorXd ta = gram.ldlt().solve(rhs);
    bool consistent = true;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (ta[i] * sa[i] <= 0.0) consistent = false;
    if (!consistent) continue;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < active.size(); ++i) t[active[i]] = ta[i];
    const double obj = objective(t);
    if (obj < best_obj) {
      best_obj = obj;
      best = t;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("univariate prox: lasso and elastic net closed forms") {
  CHECK(ip::univariate_prox(3.0, 1.0, PenaltySpec::lasso(1.0)) == 2.0);
  CHECK(ip::univariate_prox(0.5, 1.0, PenaltySpec::lasso(1.0)) == 0.0);
  CHECK(ip::univariate_prox(-3.0, 1.0, PenaltySpec::lasso(1.0)) == -2.0);
  CHECK(ip::univariate_prox(3.0, 2.0, PenaltySpec::lasso(1.0)) == 2.5);

  // alpha = 1 reduces to the lasso, alpha = 0 to pure ridge shrinkage
  CHECK(ip::univariate_prox(3.0, 1.0, PenaltySpec::elastic_net(1.0, 1.0)) ==
        2.0);
  CHECK(ip::univariate_prox(3.0, 1.0, PenaltySpec::elastic_net(1.0, 0.0)) ==
        doctest::Approx(1.5));
  CHECK_THROWS_AS(ip::univariate_prox(1.0, 0.0, PenaltySpec::lasso(1.0)),
                  ip::InputError);
}

TEST_CASE("univariate prox: L1+SICA vs the fine-grid oracle") {
  // the worked instance
  const auto pen = PenaltySpec::l1_sica(0.1, 1.0, 0.5);
  const double got = ip::univariate_prox(5.0, 1.0, pen);
  const double oracle = testutil::prox_grid_oracle(5.0, 1.0, pen);
  CHECK(std::abs(got - oracle) < 1e-5);

  ip::CounterRng rng(64);
  for (int round = 0; round < 60; ++round) {
    const double z = 8.0 * (rng.uniform() - 0.5);
    const double c = 0.2 + 2.0 * rng.uniform();
    const auto p = PenaltySpec::l1_sica(rng.uniform(), 2.0 * rng.uniform(),
                                        0.1 + rng.uniform());
    const double fast = ip::univariate_prox(z, c, p);
    const double slow = testutil::prox_grid_oracle(z, c, p);
    CAPTURE(z);
    CAPTURE(c);
    CHECK(std::abs(fast - slow) < 1e-5);
  }
}

TEST_CASE("L1+SICA prox output has the hard-thresholding gap") {
  // parameters with p_lambda >= hard-threshold penalty on [0, lambda]
  const double lambda = 1.0, a = 0.5, lambda0 = 0.05, c = 1.0;
  for (double t = 0.0; t <= lambda; t += 1e-3)
    CHECK(ip::sica_penalty(t, lambda, a) >=
          ip::hard_threshold_penalty(t, lambda) - 1e-12);

  const auto pen = PenaltySpec::l1_sica(lambda0, lambda, a);
  double min_positive = 1e300;
  for (double z = 0.0; z <= 3.0 * lambda; z += 1e-3) {
    const double t = ip::univariate_prox(z, c, pen);
    CHECK(t >= 0.0);
    if (t > 0.0) min_positive = std::min(min_positive, t);
  }
  // outputs jump from 0 to a strictly positive magnitude
  CHECK(min_positive > 0.2 * lambda);
}

TEST_CASE("fit: orthonormal design matches soft thresholding") {
  Eigen::VectorXd y;
  const AugmentedDesign design = orthonormal_design(80, 6, 11, &y);
  const double lambda0 = 0.08;
  const auto fit = ip::fit(design, PenaltySpec::lasso(lambda0));
  REQUIRE(fit.converged);
  const Eigen::VectorXd theta = dense_theta(fit, design);
  for (int m = 0; m < 6; ++m) {
    const double zty = design.z.col(m).dot(design.y_centered) /
                       (design.d_scale[m] * 80.0);
    const double expect =
        (zty > lambda0 ? zty - lambda0 : (zty < -lambda0 ? zty + lambda0 : 0.0));
    CHECK(std::abs(theta[m] * design.d_scale[m] - expect) < 1e-8);
  }
  CHECK(ip::kkt_check(design, PenaltySpec::lasso(lambda0), theta) <= 1e-10);
}

TEST_CASE("fit: full shrinkage above lambda_max") {
  Eigen::VectorXd y;
  const AugmentedDesign design = orthonormal_design(50, 4, 13, &y);
  double lambda_max = 0.0;
  for (int m = 0; m < 4; ++m)
    lambda_max = std::max(lambda_max,
                          std::abs(design.z.col(m).dot(design.y_centered)) /
                              (design.d_scale[m] * 50.0));
  const auto fit = ip::fit(design, PenaltySpec::lasso(lambda_max * 1.01));
  CHECK(fit.theta.empty());
  CHECK(fit.converged);
  CHECK(ip::kkt_check(design, PenaltySpec::lasso(lambda_max * 1.01),
                      Eigen::VectorXd::Zero(4)) == 0.0);
}

TEST_CASE("fit: correlated designs match exhaustive sign enumeration") {
  ip::CounterRng rng(21);
  for (int round = 0; round < 40; ++round) {
    const int n = 30, q = 3;
    Eigen::MatrixXd z(n, q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      z(i, 0) = rng.normal();
      z(i, 1) = 0.6 * z(i, 0) + 0.8 * rng.normal();
      z(i, 2) = -0.4 * z(i, 1) + rng.normal();
      y[i] = z(i, 0) - 0.5 * z(i, 2) + 0.5 * rng.normal();
    }
    const AugmentedDesign design = make_design(z, y);
    const double lambda0 = 0.02 + 0.2 * rng.uniform();

    SolverOptions opts;
    opts.tolerance = 1e-10;
    const auto fit = ip::fit(design, PenaltySpec::lasso(lambda0), opts);
    REQUIRE(fit.converged);

    Eigen::MatrixXd w = design.z;
    for (int m = 0; m < q; ++m) w.col(m) /= design.d_scale[m];
    const Eigen::VectorXd brute = lasso_brute(w, design.y_centered, lambda0);
    const Eigen::VectorXd star =
        dense_theta(fit, design).cwiseProduct(design.d_scale);
    CHECK((star - brute).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fit: objective is non-increasing across sweeps") {
  Eigen::VectorXd y;
  const AugmentedDesign design = orthonormal_design(60, 8, 5, &y);
  SolverOptions opts;
  opts.track_objective = true;
  for (const auto& pen :
       {PenaltySpec::lasso(0.05), PenaltySpec::elastic_net(0.1, 0.7),
        PenaltySpec::l1_sica(0.02, 0.3, 0.5)}) {
    const auto fit = ip::fit(design, pen, opts);
    REQUIRE(fit.objective_history.size() > 1);
    for (std::size_t i = 1; i < fit.objective_history.size(); ++i)
      CHECK(fit.objective_history[i] <=
            fit.objective_history[i - 1] + 1e-12);
    CHECK(fit.converged);
  }
}

TEST_CASE("fit: scaling consistency of the lasso") {
  ip::CounterRng rng(31);
  Eigen::MatrixXd z(40, 5);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 5; ++j) z(i, j) = rng.normal();
    y[i] = z(i, 0) - z(i, 3) + 0.3 * rng.normal();
  }
  const AugmentedDesign d1 = make_design(z, y);
  const AugmentedDesign d2 = make_design(z, 2.0 * y);
  SolverOptions opts;
  opts.tolerance = 1e-11;
  const auto f1 = ip::fit(d1, PenaltySpec::lasso(0.1), opts);
  const auto f2 = ip::fit(d2, PenaltySpec::lasso(0.2), opts);
  const Eigen::VectorXd t1 = dense_theta(f1, d1);
  const Eigen::VectorXd t2 = dense_theta(f2, d2);
  CHECK((2.0 * t1 - t2).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit: SICA solutions are coordinate-stationary") {
  ip::CounterRng rng(77);
  Eigen::MatrixXd z(50, 6);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 6; ++j) z(i, j) = rng.normal();
    y[i] = 2.0 * z(i, 1) + z(i, 4) + 0.4 * rng.normal();
  }
  const AugmentedDesign design = make_design(z, y);
  const auto fit = ip::fit(design, PenaltySpec::l1_sica(0.05, 0.2, 0.5));
  REQUIRE(fit.converged);
  CHECK(fit.kkt_max_violation <= 1e-6);
  CHECK_THROWS_AS(ip::kkt_check(design, PenaltySpec::l1_sica(0.05, 0.2, 0.5),
                                dense_theta(fit, design)),
                  ip::InputError);
}

TEST_CASE("kkt_check: violations respond linearly to perturbations") {
  Eigen::VectorXd y;
  const AugmentedDesign design = orthonormal_design(70, 5, 23, &y);
  const double lambda0 = 0.05;
  const auto fit = ip::fit(design, PenaltySpec::lasso(lambda0));
  Eigen::VectorXd theta = dense_theta(fit, design);
  REQUIRE(ip::kkt_check(design, PenaltySpec::lasso(lambda0), theta) <= 1e-10);

  // bump one active coordinate by +0.1 (theta* scale): violation ~ 0.1
  for (int m = 0; m < 5; ++m) {
    if (theta[m] != 0.0) {
      theta[m] += 0.1 / design.d_scale[m];
      break;
    }
  }
  const double v = ip::kkt_check(design, PenaltySpec::lasso(lambda0), theta);
  CHECK(v == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("fit_ols matches an independent QR solve") {
  ip::CounterRng rng(41);
  Eigen::MatrixXd z(45, 4);
  Eigen::VectorXd y(45);
  for (int i = 0; i < 45; ++i) {
    for (int j = 0; j < 4; ++j) z(i, j) = rng.normal();
    y[i] = z(i, 0) + 0.5 * z(i, 2) + 0.2 * rng.normal();
  }
  const AugmentedDesign design = make_design(z, y);
  const auto fit = ip::fit_ols(design);
  const Eigen::VectorXd qr = testutil::ols_qr(design.z, design.y_centered);
  CHECK((dense_theta(fit, design) - qr).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("tune_bic: single grid point and model recovery rates") {
  // grid of size one returns that fit
  ip::CounterRng rng(3);
  Eigen::MatrixXd z(50, 4);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 4; ++j) z(i, j) = rng.normal();
    y[i] = z(i, 1) + 0.1 * rng.normal();
  }
  const AugmentedDesign design = make_design(z, y);
  ip::BicGrid one;
  one.lambda0s = {0.05};
  one.lambdas = {0.2};
  const auto [pen, fit] = ip::tune_bic(design, one);
  CHECK(pen.lambda == 0.2);
  CHECK(fit.converged);

  // strong signal: support {x1} recovered almost always
  int exact = 0, null_ok = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    ip::CounterRng r2(1000 + run);
    const int n = 200, p = 10;
    Eigen::MatrixXd zz(n, p);
    Eigen::VectorXd yy(n), noise(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) zz(i, j) = r2.normal();
      yy[i] = 2.0 * zz(i, 0) + 0.1 * r2.normal();
      noise[i] = r2.normal();
    }
    const AugmentedDesign dd = make_design(zz, yy);
    const auto [ps, fs] = ip::tune_bic(dd, ip::default_bic_grid(dd, p));
    if (fs.theta.size() == 1 &&
        fs.theta.count(FeatureId::main(0)) == 1)
      ++exact;

    const AugmentedDesign dn = make_design(zz, noise);
    const auto [pn, fn] = ip::tune_bic(dn, ip::default_bic_grid(dn, p));
    if (fn.theta.empty()) ++null_ok;
  }
  CHECK(exact >= 95);
  CHECK(null_ok >= 90);
}

TEST_CASE("tune_cv: determinism, validation, and signal recovery") {
  ip::CounterRng rng(9);
  const int n = 100, q = 8;
  Eigen::MatrixXd z(n, q);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) z(i, j) = rng.normal();
    y[i] = 1.5 * z(i, 0) - 2.0 * z(i, 5) + 0.5 * rng.normal();
  }
  const AugmentedDesign design = make_design(z, y);

  ip::CvOptions cv;
  cv.folds = 5;
  cv.seed = 123;
  const auto [p1, f1] = ip::tune_cv(design, cv);
  const auto [p2, f2] = ip::tune_cv(design, cv);
  CHECK(p1.lambda0 == p2.lambda0);
  CHECK(f1.theta == f2.theta);  // identical fold assignment and selection

  // the strong signals survive
  CHECK(f1.theta.count(FeatureId::main(0)) == 1);
  CHECK(f1.theta.count(FeatureId::main(5)) == 1);

  cv.folds = 1;
  CHECK_THROWS_AS(ip::tune_cv(design, cv), ip::InputError);
  cv.folds = n + 1;
  CHECK_THROWS_AS(ip::tune_cv(design, cv), ip::InputError);

  // identical grid values: deterministic result
  ip::CvOptions fixed;
  fixed.folds = 4;
  fixed.seed = 7;
  fixed.lambda_grid = {0.1, 0.1, 0.1};
  const auto [pf, ff] = ip::tune_cv(design, fixed);
  CHECK(pf.lambda0 == 0.1);
}

TEST_CASE("evaluate: definition checks") {
  ip::TrueModel truth;
  truth.set_beta(0, 1.0);

  ip::FitResult fit;
  fit.theta[FeatureId::main(0)] = 1.0;
  fit.theta[FeatureId::main(1)] = -1.0;
  ip::Metrics m;
  ip::count_errors(fit, truth, &m);
  CHECK(m.fp == 1);
  CHECK(m.fn == 0);
  CHECK(m.fs == 1);

  // exact fit on noiseless data: all zeros
  ip::Dataset test;
  test.x.resize(5, 2);
  test.x << 1, 0, -1, 2, 0.5, 1, 2, -1, 0, 0;
  test.y = test.x.col(0);
  ip::FitResult exact;
  exact.theta[FeatureId::main(0)] = 1.0;
  exact.intercept = 0.0;
  const ip::Metrics me = ip::evaluate(exact, truth, test);
  CHECK(me.pe == doctest::Approx(0.0));
  CHECK(me.fp == 0);
  CHECK(me.fn == 0);
  CHECK(me.fs == 0);
}

TEST_CASE("penalty and reference functions") {
  CHECK(ip::hard_threshold_penalty(0.0, 2.0) == 0.0);
  CHECK(ip::hard_threshold_penalty(2.0, 2.0) == 2.0);
  CHECK(ip::hard_threshold_penalty(5.0, 2.0) == 2.0);  // flat past lambda
  CHECK(ip::sica_penalty(0.0, 1.0, 0.5) == 0.0);
  // increasing and concave on t >= 0
  double prev = 0.0, prev_slope = 1e300;
  for (double t = 0.1; t <= 3.0; t += 0.1) {
    const double v = ip::sica_penalty(t, 1.0, 0.5);
    CHECK(v >= prev);
    const double slope = (v - prev) / 0.1;
    CHECK(slope <= prev_slope + 1e-12);
    prev = v;
    prev_slope = slope;
  }
  CHECK_THROWS_AS(PenaltySpec::l1_sica(0.1, 0.1, 0.0), ip::InputError);
  CHECK_THROWS_AS(PenaltySpec::elastic_net(0.1, 1.5), ip::InputError);
  CHECK_THROWS_AS(PenaltySpec::lasso(-1.0), ip::InputError);
}
