#include "ip/selection.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "ip/parallel.hpp"
#include "ip/rng.hpp"

namespace ip {

PenaltySpec PenaltySpec::lasso(double lambda0) {
  if (!(lambda0 >= 0) || !std::isfinite(lambda0))
    throw InputError("lasso needs a finite nonnegative lambda0");
  PenaltySpec p;
  p.kind = Kind::lasso;
  p.lambda0 = lambda0;
  return p;
}

PenaltySpec PenaltySpec::elastic_net(double lambda, double alpha) {
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw InputError("elastic net needs a finite nonnegative lambda");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InputError("elastic net mixing must lie in [0,1]");
  PenaltySpec p;
  p.kind = Kind::elastic_net;
  p.lambda = lambda;
  p.alpha = alpha;
  return p;
}

PenaltySpec PenaltySpec::l1_sica(double lambda0, double lambda, double a) {
  if (!(lambda0 >= 0) || !(lambda >= 0))
    throw InputError("L1+SICA needs nonnegative lambda0, lambda");
  if (!(a > 0)) throw InputError("SICA shape a must be positive");
  PenaltySpec p;
  p.kind = Kind::l1_sica;
  p.lambda0 = lambda0;
  p.lambda = lambda;
  p.a = a;
  return p;
}

double sica_penalty(double t, double lambda, double a) {
  t = std::abs(t);
  return lambda * (a + 1.0) * t / (a + t);
}

double hard_threshold_penalty(double t, double lambda) {
  t = std::abs(t);
  const double rest = std::max(lambda - t, 0.0);
  return 0.5 * (lambda * lambda - rest * rest);
}

double penalty_value(double t, const PenaltySpec& pen) {
  t = std::abs(t);
  switch (pen.kind) {
    case PenaltySpec::Kind::lasso:
      return pen.lambda0 * t;
    case PenaltySpec::Kind::elastic_net:
      return pen.lambda * (pen.alpha * t + 0.5 * (1.0 - pen.alpha) * t * t);
    case PenaltySpec::Kind::l1_sica:
      return pen.lambda0 * t + sica_penalty(t, pen.lambda, pen.a);
  }
  return 0.0;
}

namespace {

inline double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Real roots of x^3 + b x^2 + c x + d, ascending. Trigonometric method for
// three real roots, Cardano otherwise.
int cubic_roots(double b, double c, double d, double out[3]) {
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double shift = -b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    out[0] = u + v + shift;
    return 1;
  }
  if (p == 0.0) {  // triple root
    out[0] = shift + std::cbrt(-q);
    return 1;
  }
  const double r = std::sqrt(-p * p * p / 27.0);
  double cosphi = -q / (2.0 * r);
  cosphi = std::clamp(cosphi, -1.0, 1.0);
  const double phi = std::acos(cosphi);
  const double m = 2.0 * std::sqrt(-p / 3.0);
  out[0] = m * std::cos(phi / 3.0) + shift;
  out[1] = m * std::cos((phi + 2.0 * M_PI) / 3.0) + shift;
  out[2] = m * std::cos((phi + 4.0 * M_PI) / 3.0) + shift;
  std::sort(out, out + 3);
  return 3;
}

// argmin over t >= 0 of (c/2)(t-s)^2 + lambda0 t + lambda(a+1)t/(a+t).
double sica_prox_nonneg(double s, double c, double lambda0, double lambda,
                        double a) {
  const auto value = [&](double t) {
    return 0.5 * c * (t - s) * (t - s) + lambda0 * t +
           lambda * (a + 1.0) * t / (a + t);
  };
  double best_t = 0.0;
  double best_v = value(0.0);

  // Stationary points solve c(t-s)(a+t)^2 + lambda0 (a+t)^2 + lambda a(a+1) = 0.
  const double w = lambda0 - c * s;
  const double B = (2.0 * a * c + w) / c;
  const double C = (a * a * c + 2.0 * a * w) / c;
  const double D = (a * a * w + lambda * a * (a + 1.0)) / c;
  double roots[3];
  const int nr = cubic_roots(B, C, D, roots);
  for (int i = 0; i < nr; ++i) {
    double t = roots[i];
    if (!(t > 0.0) || !std::isfinite(t)) continue;
    // Newton polish on the stationarity equation.
    for (int it = 0; it < 3; ++it) {
      const double at = a + t;
      const double f = c * (t - s) + lambda0 + lambda * (a + 1.0) * a / (at * at);
      const double fp = c - 2.0 * lambda * (a + 1.0) * a / (at * at * at);
      if (fp == 0.0) break;
      const double step = f / fp;
      const double t2 = t - step;
      if (!(t2 > 0.0) || !std::isfinite(t2)) break;
      t = t2;
      if (std::abs(step) < 1e-14 * (1.0 + t)) break;
    }
    const double v = value(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

double univariate_prox(double z, double c, const PenaltySpec& pen) {
  if (!(c > 0.0)) throw InputError("prox curvature must be positive");
  switch (pen.kind) {
    case PenaltySpec::Kind::lasso:
      return soft(z, pen.lambda0 / c);
    case PenaltySpec::Kind::elastic_net:
      return soft(c * z, pen.lambda * pen.alpha) /
             (c + pen.lambda * (1.0 - pen.alpha));
    case PenaltySpec::Kind::l1_sica: {
      const double t =
          sica_prox_nonneg(std::abs(z), c, pen.lambda0, pen.lambda, pen.a);
      return z < 0.0 ? -t : t;
    }
  }
  return 0.0;
}

namespace {

struct CdCore {
  Eigen::VectorXd coef;      // solution in the column coordinates of M
  Eigen::VectorXd residual;  // y - M coef, recomputed exactly at exit
  double objective = 0.0;
  double rss = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> history;
};

double cd_objective(const Eigen::VectorXd& r, const Eigen::VectorXd& coef,
                    const PenaltySpec& pen, Eigen::Index n) {
  double obj = r.squaredNorm() / (2.0 * double(n));
  for (Eigen::Index m = 0; m < coef.size(); ++m)
    if (coef[m] != 0.0) obj += penalty_value(coef[m], pen);
  return obj;
}

// Cyclic coordinate descent with exact univariate minimization; after each
// full pass the active set is iterated until stable. Deterministic: fixed
// column order, no randomization.
CdCore cd_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                const PenaltySpec& pen, const SolverOptions& opts) {
  const Eigen::Index n = M.rows(), k = M.cols();
  CdCore core;
  core.coef = Eigen::VectorXd::Zero(k);
  if (opts.warm_start) {
    if (opts.warm_start->size() != k)
      throw InputError("warm start length does not match design");
    core.coef = *opts.warm_start;
  }
  Eigen::VectorXd r = core.coef.isZero() ? y : (y - M * core.coef).eval();
  Eigen::VectorXd csq(k);
  for (Eigen::Index m = 0; m < k; ++m)
    csq[m] = M.col(m).squaredNorm() / double(n);

  double prev_obj = cd_objective(r, core.coef, pen, n);
  if (opts.track_objective) core.history.push_back(prev_obj);

  const auto pass = [&](bool active_only) {
    double max_delta = 0.0;
    for (Eigen::Index m = 0; m < k; ++m) {
      const double old = core.coef[m];
      if (active_only && old == 0.0) continue;
      if (csq[m] <= 0.0) continue;
      const double z = M.col(m).dot(r) / double(n) + csq[m] * old;
      const double t = univariate_prox(z / csq[m], csq[m], pen);
      if (t != old) {
        r += M.col(m) * (old - t);
        core.coef[m] = t;
        max_delta = std::max(max_delta, std::abs(t - old));
      }
    }
    return max_delta;
  };

  const auto note_pass = [&]() {
    ++core.sweeps;
    const double obj = cd_objective(r, core.coef, pen, n);
    assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)));
    prev_obj = obj;
    if (opts.track_objective) core.history.push_back(obj);
  };

  while (core.sweeps < opts.max_iterations) {
    const double delta_full = pass(false);
    note_pass();
    if (delta_full <= opts.tolerance) {
      core.converged = true;
      break;
    }
    while (core.sweeps < opts.max_iterations) {
      const double delta_active = pass(true);
      note_pass();
      if (delta_active <= opts.tolerance) break;
    }
  }

  core.residual = y - M * core.coef;
  core.rss = core.residual.squaredNorm();
  core.objective = cd_objective(core.residual, core.coef, pen, n);
  return core;
}

// Max KKT violation in the column coordinates of M (convex penalties).
double kkt_violation(const Eigen::MatrixXd& M, const Eigen::VectorXd& residual,
                     const Eigen::VectorXd& coef, const PenaltySpec& pen) {
  const Eigen::Index n = M.rows();
  const double l1 = pen.kind == PenaltySpec::Kind::lasso
                        ? pen.lambda0
                        : pen.lambda * pen.alpha;
  const double ridge = pen.kind == PenaltySpec::Kind::elastic_net
                           ? pen.lambda * (1.0 - pen.alpha)
                           : 0.0;
  double worst = 0.0;
  for (Eigen::Index m = 0; m < M.cols(); ++m) {
    const double grad = -M.col(m).dot(residual) / double(n) + ridge * coef[m];
    double v;
    if (coef[m] != 0.0)
      v = std::abs(grad + l1 * (coef[m] > 0 ? 1.0 : -1.0));
    else
      v = std::max(0.0, std::abs(grad) - l1);
    worst = std::max(worst, v);
  }
  return worst;
}

// Coordinate-stationarity gap for the nonconvex penalty: how far each
// coordinate sits from its own exact univariate minimizer.
double stationarity_gap(const Eigen::MatrixXd& M,
                        const Eigen::VectorXd& residual,
                        const Eigen::VectorXd& coef, const PenaltySpec& pen) {
  const Eigen::Index n = M.rows();
  double worst = 0.0;
  for (Eigen::Index m = 0; m < M.cols(); ++m) {
    const double c = M.col(m).squaredNorm() / double(n);
    if (c <= 0.0) continue;
    const double z = M.col(m).dot(residual) / double(n) + c * coef[m];
    const double t = univariate_prox(z / c, c, pen);
    worst = std::max(worst, std::abs(t - coef[m]));
  }
  return worst;
}

Eigen::MatrixXd rescaled_columns(const AugmentedDesign& design) {
  Eigen::MatrixXd w = design.z;
  for (Eigen::Index m = 0; m < w.cols(); ++m) w.col(m) /= design.d_scale[m];
  return w;
}

FitResult assemble_fit(const AugmentedDesign& design, const Eigen::MatrixXd& w,
                       const CdCore& core, const PenaltySpec& pen) {
  FitResult fit;
  const Eigen::VectorXd theta = core.coef.cwiseQuotient(design.d_scale);
  double shift = 0.0;
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    if (theta[m] != 0.0) {
      fit.theta[design.features[m]] = theta[m];
      shift += theta[m] * design.col_means[m];
    }
  }
  fit.intercept = design.y_mean - shift;
  fit.objective = core.objective;
  fit.rss = core.rss;
  fit.iterations = core.sweeps;
  fit.converged = core.converged;
  fit.objective_history = core.history;
  fit.kkt_max_violation =
      pen.convex() ? kkt_violation(w, core.residual, core.coef, pen)
                   : stationarity_gap(w, core.residual, core.coef, pen);
  return fit;
}

}  // namespace

FitResult fit(const AugmentedDesign& design, const PenaltySpec& pen,
              const SolverOptions& opts) {
  const Eigen::MatrixXd w = rescaled_columns(design);
  const CdCore core = cd_solve(w, design.y_centered, pen, opts);
  return assemble_fit(design, w, core, pen);
}

FitResult fit_ols(const AugmentedDesign& design) {
  const Eigen::MatrixXd& z = design.z;
  Eigen::MatrixXd gram = z.transpose() * z;
  const Eigen::VectorXd rhs = z.transpose() * design.y_centered;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  Eigen::VectorXd theta;
  if (llt.info() == Eigen::Success) {
    theta = llt.solve(rhs);
  }
  if (theta.size() == 0 || !theta.allFinite()) {
    gram.diagonal().array() += 1e-8 * gram.trace() / double(design.q());
    theta = Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
  }

  FitResult fit;
  double shift = 0.0;
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    if (theta[m] != 0.0) {
      fit.theta[design.features[m]] = theta[m];
      shift += theta[m] * design.col_means[m];
    }
  }
  fit.intercept = design.y_mean - shift;
  const Eigen::VectorXd r = design.y_centered - z * theta;
  fit.rss = r.squaredNorm();
  fit.objective = fit.rss / (2.0 * double(design.n()));
  fit.iterations = 1;
  fit.converged = true;
  double worst = 0.0;
  for (Eigen::Index m = 0; m < z.cols(); ++m)
    worst = std::max(worst, std::abs(z.col(m).dot(r)) / double(design.n()));
  fit.kkt_max_violation = worst;
  return fit;
}

double kkt_check(const AugmentedDesign& design, const PenaltySpec& pen,
                 const Eigen::VectorXd& theta) {
  if (!pen.convex())
    throw InputError("KKT certificate requires a convex penalty");
  if (theta.size() != design.q())
    throw InputError("coefficient length does not match design");
  const Eigen::MatrixXd w = rescaled_columns(design);
  const Eigen::VectorXd coef = theta.cwiseProduct(design.d_scale);
  const Eigen::VectorXd residual = design.y_centered - w * coef;
  return kkt_violation(w, residual, coef, pen);
}

std::vector<double> default_lambda_path(const AugmentedDesign& design,
                                        int points, double min_ratio) {
  const Eigen::Index n = design.n();
  double lambda_max = 0.0;
  for (Eigen::Index m = 0; m < design.q(); ++m)
    lambda_max = std::max(lambda_max,
                          std::abs(design.z.col(m).dot(design.y_centered)) /
                              (design.d_scale[m] * double(n)));
  if (lambda_max <= 0.0) lambda_max = 1.0;
  std::vector<double> path(points);
  const double step = std::log(min_ratio) / double(points - 1);
  for (int i = 0; i < points; ++i)
    path[i] = lambda_max * std::exp(step * double(i));
  return path;
}

BicGrid default_bic_grid(const AugmentedDesign& design, int ambient_p) {
  const double p_tilde =
      0.5 * double(ambient_p) * (double(ambient_p) + 1.0);
  const double anchor = std::sqrt(std::log(p_tilde) / double(design.n()));
  BicGrid grid;
  grid.lambda0s = {0.25 * anchor, 0.5 * anchor, 1.0 * anchor};

  const Eigen::Index n = design.n();
  double zmax = 0.0;
  for (Eigen::Index m = 0; m < design.q(); ++m)
    zmax = std::max(zmax, std::abs(design.z.col(m).dot(design.y_centered)) /
                              (design.d_scale[m] * double(n)));
  // Largest concave weight that still zeroes everything at the smallest
  // anchor; the grid walks down three decades from there.
  const double top = std::max((zmax - grid.lambda0s.front()) / 3.0, 1e-4) * 1.05;
  const int points = 30;
  grid.lambdas.resize(points);
  const double step = std::log(1e-3) / double(points - 1);
  for (int i = 0; i < points; ++i)
    grid.lambdas[i] = top * std::exp(step * double(i));
  grid.as = {0.5};
  return grid;
}

std::pair<PenaltySpec, FitResult> tune_bic(const AugmentedDesign& design,
                                           const BicGrid& grid,
                                           const SolverOptions& opts) {
  if (grid.lambda0s.empty() || grid.lambdas.empty() || grid.as.empty())
    throw InputError("BIC grid must be non-empty");
  std::vector<double> lambdas = grid.lambdas;
  std::sort(lambdas.rbegin(), lambdas.rend());

  const Eigen::MatrixXd w = rescaled_columns(design);
  const Eigen::Index n = design.n();

  struct Candidate {
    double bic = std::numeric_limits<double>::infinity();
    int df = 0;
    double lambda = 0.0, lambda0 = 0.0, a = 0.0;
    CdCore core;
    PenaltySpec pen;
  };

  const int chains = static_cast<int>(grid.lambda0s.size() * grid.as.size());
  std::vector<Candidate> best_per_chain(chains);
  std::vector<int> converged_count(chains, 0);

#pragma omp parallel for schedule(dynamic) num_threads(ip::num_threads())
  for (int chain = 0; chain < chains; ++chain) {
    const double lambda0 = grid.lambda0s[chain / grid.as.size()];
    const double a = grid.as[chain % grid.as.size()];
    Candidate best;
    SolverOptions o = opts;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(design.q());
    for (double lambda : lambdas) {
      const PenaltySpec pen = PenaltySpec::l1_sica(lambda0, lambda, a);
      o.warm_start = warm;
      CdCore core = cd_solve(w, design.y_centered, pen, o);
      warm = core.coef;
      if (!core.converged) continue;
      ++converged_count[chain];
      const int df = static_cast<int>((core.coef.array() != 0.0).count());
      const double bic =
          double(n) * std::log(core.rss / double(n)) + df * std::log(double(n));
      const bool better =
          bic < best.bic ||
          (bic == best.bic &&
           (df < best.df || (df == best.df && lambda < best.lambda)));
      if (better) {
        best.bic = bic;
        best.df = df;
        best.lambda = lambda;
        best.lambda0 = lambda0;
        best.a = a;
        best.core = std::move(core);
        best.pen = pen;
      }
    }
    best_per_chain[chain] = std::move(best);
  }

  if (std::accumulate(converged_count.begin(), converged_count.end(), 0) == 0)
    throw std::runtime_error("no converged fit on the BIC grid");

  // Deterministic merge: bic, then sparser, then smaller lambda, lambda0, a.
  const Candidate* best = &best_per_chain[0];
  for (const Candidate& c : best_per_chain) {
    if (c.bic < best->bic ||
        (c.bic == best->bic &&
         (c.df < best->df ||
          (c.df == best->df &&
           (c.lambda < best->lambda ||
            (c.lambda == best->lambda &&
             (c.lambda0 < best->lambda0 ||
              (c.lambda0 == best->lambda0 && c.a < best->a))))))))
      best = &c;
  }
  return {best->pen, assemble_fit(design, w, best->core, best->pen)};
}

namespace {

std::vector<int> cv_fold_of_row(Eigen::Index n, int folds, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed, /*stream=*/7);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % (i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> fold(n);
  const Eigen::Index base = n / folds, extra = n % folds;
  Eigen::Index pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index len = base + (f < extra ? 1 : 0);
    if (len == 0) throw InputError("cross-validation fold has no rows");
    for (Eigen::Index t = 0; t < len; ++t) fold[perm[pos++]] = f;
  }
  return fold;
}

PenaltySpec cv_penalty(const CvOptions& cv, double lambda) {
  if (cv.family == PenaltySpec::Kind::lasso) return PenaltySpec::lasso(lambda);
  if (cv.family == PenaltySpec::Kind::elastic_net)
    return PenaltySpec::elastic_net(lambda, cv.alpha);
  throw InputError("cross-validation supports lasso and elastic net only");
}

}  // namespace

std::pair<PenaltySpec, FitResult> tune_cv(const AugmentedDesign& design,
                                          const CvOptions& cv,
                                          const SolverOptions& opts) {
  const Eigen::Index n = design.n();
  if (cv.folds < 2 || cv.folds > n)
    throw InputError("folds must lie in [2, n]");
  const std::vector<double> lambdas =
      cv.lambda_grid.empty() ? default_lambda_path(design) : cv.lambda_grid;
  std::vector<double> path = lambdas;
  std::sort(path.rbegin(), path.rend());

  const Eigen::MatrixXd w = rescaled_columns(design);
  const std::vector<int> fold = cv_fold_of_row(n, cv.folds, cv.seed);

  Eigen::MatrixXd sq_err =
      Eigen::MatrixXd::Zero(cv.folds, static_cast<Eigen::Index>(path.size()));

#pragma omp parallel for schedule(dynamic) num_threads(ip::num_threads())
  for (int f = 0; f < cv.folds; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold[i] == f ? te : tr).push_back(i);
    Eigen::MatrixXd w_tr(tr.size(), w.cols()), w_te(te.size(), w.cols());
    Eigen::VectorXd y_tr(tr.size()), y_te(te.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
      w_tr.row(i) = w.row(tr[i]);
      y_tr[i] = design.y_centered[tr[i]];
    }
    for (std::size_t i = 0; i < te.size(); ++i) {
      w_te.row(i) = w.row(te[i]);
      y_te[i] = design.y_centered[te[i]];
    }
    const double fold_mean = y_tr.mean();
    y_tr.array() -= fold_mean;

    SolverOptions o = opts;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(w.cols());
    for (std::size_t li = 0; li < path.size(); ++li) {
      const PenaltySpec pen = cv_penalty(cv, path[li]);
      o.warm_start = warm;
      const CdCore core = cd_solve(w_tr, y_tr, pen, o);
      warm = core.coef;
      const Eigen::VectorXd pred =
          (w_te * core.coef).array() + fold_mean;
      sq_err(f, static_cast<Eigen::Index>(li)) =
          (y_te - pred).squaredNorm();
    }
  }

  const Eigen::VectorXd total = sq_err.colwise().sum();
  Eigen::Index best_i = 0;
  for (Eigen::Index i = 1; i < total.size(); ++i)
    if (total[i] < total[best_i]) best_i = i;

  const PenaltySpec chosen = cv_penalty(cv, path[static_cast<std::size_t>(best_i)]);
  return {chosen, fit(design, chosen, opts)};
}

void count_errors(const FitResult& fit, const TrueModel& truth, Metrics* out) {
  out->fp = out->fn = out->fs = 0;
  std::set<FeatureId> all;
  for (const auto& [f, v] : fit.theta) all.insert(f);
  for (const auto& f : truth.support()) all.insert(f);
  for (const auto& f : all) {
    const auto it = fit.theta.find(f);
    const double est = it == fit.theta.end() ? 0.0 : it->second;
    const double tru = truth.theta(f);
    if (est != 0.0 && tru == 0.0) ++out->fp;
    if (est == 0.0 && tru != 0.0) ++out->fn;
    const int s_est = est > 0 ? 1 : (est < 0 ? -1 : 0);
    const int s_tru = tru > 0 ? 1 : (tru < 0 ? -1 : 0);
    if (s_est != s_tru) ++out->fs;
  }
}

Metrics evaluate(const FitResult& fit, const TrueModel& truth,
                 const Dataset& test, const StandardizeParams* train_transform) {
  test.validate();
  Metrics m;
  count_errors(fit, truth, &m);

  const Eigen::Index n = test.n();
  double acc = 0.0;
  Eigen::VectorXd row(test.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    row = test.x.row(i);
    if (train_transform)
      row = (row - train_transform->mean).cwiseQuotient(train_transform->sd);
    double pred = fit.intercept;
    for (const auto& [f, v] : fit.theta) pred += v * raw_feature_value(f, row);
    const double e = test.y[i] - pred;
    acc += e * e;
  }
  m.pe = acc / double(n);
  return m;
}

}  // namespace ip
