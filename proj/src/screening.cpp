#include "ip/screening.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ip/design.hpp"
#include "ip/parallel.hpp"

namespace ip {

int default_top_d(Eigen::Index n, double c) {
  const int d = static_cast<int>(std::floor(c * double(n) / std::log(double(n))));
  return std::max(d, 1);
}

namespace {

void check_standardized(const Dataset& d, bool require) {
  d.validate();
  if (require && !d.standardized)
    throw InputError("dataset must be standardized (or pass the override flag)");
}

}  // namespace

Eigen::VectorXd omega_utilities(const Dataset& d, bool require_standardized) {
  check_standardized(d, require_standardized);
  const Eigen::Index n = d.n(), p = d.p();
  const Eigen::ArrayXd ysq = d.y.array().square();
  const double ysq_mean = ysq.mean();
  const Eigen::ArrayXd ysq_c = ysq - ysq_mean;

  Eigen::VectorXd omega(p);
  std::vector<char> degenerate(p, 0);
#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::ArrayXd xsq = d.x.col(k).array().square();
    const double m = xsq.mean();
    const Eigen::ArrayXd xc = xsq - m;
    const double var = xc.square().sum() / double(n);
    if (var <= 0.0) {
      degenerate[k] = 1;
      omega[k] = 0.0;
      continue;
    }
    const double cov = (xc * ysq_c).sum() / double(n);
    omega[k] = cov / std::sqrt(var);
  }
  for (Eigen::Index k = 0; k < p; ++k)
    if (degenerate[k])
      throw InputError("zero variance of squared column " + std::to_string(k + 1));
  return omega;
}

Eigen::VectorXd omega_star_utilities(const Dataset& d, bool require_standardized) {
  check_standardized(d, require_standardized);
  const Eigen::Index n = d.n(), p = d.p();
  Eigen::VectorXd out(p);
#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
  for (Eigen::Index j = 0; j < p; ++j)
    out[j] = d.x.col(j).dot(d.y) / double(n);
  return out;
}

namespace {

// Row means of the |v_i - v_j| distance matrix, shifted so that
// A_ij = |v_i - v_j| - m_i - m_j with A double-centered.
Eigen::VectorXd centering_offsets(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd m(n);
  for (Eigen::Index i = 0; i < n; ++i)
    m[i] = (v.array() - v[i]).abs().sum() / double(n);
  m.array() -= 0.5 * m.mean();
  return m;
}

// dCorr of u against v where v's double-centered matrix B and distance
// variance were precomputed.
double dcorr_vs_centered(const Eigen::VectorXd& u, const Eigen::MatrixXd& b,
                         double dvar_v) {
  const Eigen::Index n = u.size();
  const Eigen::VectorXd off = centering_offsets(u);
  double dvar_u = 0.0, dcov = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd a =
        (u.array() - u[i]).abs() - off.array() - off[i];
    dvar_u += a.square().sum();
    dcov += (a * b.col(i).array()).sum();
  }
  dvar_u /= double(n * n);
  dcov /= double(n * n);
  if (dvar_u <= 0.0 || dvar_v <= 0.0 || dcov <= 0.0) return 0.0;
  return std::sqrt(dcov / std::sqrt(dvar_u * dvar_v));
}

struct CenteredY {
  Eigen::MatrixXd b;
  double dvar = 0.0;
};

CenteredY center_y_distances(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  CenteredY out;
  const Eigen::VectorXd off = centering_offsets(y);
  out.b.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.b.col(i) = (y.array() - y[i]).abs() - off.array() - off[i];
  out.dvar = out.b.array().square().sum() / double(n * n);
  return out;
}

}  // namespace

double distance_correlation(const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
  if (u.size() != v.size() || u.size() < 2)
    throw InputError("distance correlation needs two samples of equal size >= 2");
  const Eigen::Index n = u.size();
  const Eigen::VectorXd ou = centering_offsets(u);
  const Eigen::VectorXd ov = centering_offsets(v);
  double dvar_u = 0.0, dvar_v = 0.0, dcov = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd a = (u.array() - u[i]).abs() - ou.array() - ou[i];
    const Eigen::ArrayXd b = (v.array() - v[i]).abs() - ov.array() - ov[i];
    dvar_u += a.square().sum();
    dvar_v += b.square().sum();
    dcov += (a * b).sum();
  }
  if (dvar_u <= 0.0 || dvar_v <= 0.0 || dcov <= 0.0) return 0.0;
  return std::sqrt(dcov / std::sqrt(dvar_u * dvar_v));
}

Eigen::VectorXd dcsis_utilities(const Dataset& d) {
  d.validate();
  const Eigen::Index p = d.p();
  const CenteredY cy = center_y_distances(d.y);

  Eigen::VectorXd out(p);
#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
  for (Eigen::Index k = 0; k < p; ++k)
    out[k] = dcorr_vs_centered(d.x.col(k), cy.b, cy.dvar);
  return out;
}

std::vector<int> select(const Eigen::VectorXd& utilities,
                        const SelectionRule& rule) {
  const int p = static_cast<int>(utilities.size());
  std::vector<int> out;
  if (rule.kind == SelectionRule::Kind::threshold) {
    for (int k = 0; k < p; ++k)
      if (std::abs(utilities[k]) >= rule.tau) out.push_back(k);
    return out;
  }
  if (rule.d > p)
    throw InputError("budget " + std::to_string(rule.d) + " exceeds " +
                     std::to_string(p) + " candidates");
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + rule.d, idx.end(),
                    [&](int i, int j) {
                      const double ai = std::abs(utilities[i]);
                      const double aj = std::abs(utilities[j]);
                      if (ai != aj) return ai > aj;
                      return i < j;  // ties: smaller index wins
                    });
  out.assign(idx.begin(), idx.begin() + rule.d);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, int>> build_interactions(
    const std::vector<int>& a_hat) {
  std::vector<int> s = a_hat;
  std::sort(s.begin(), s.end());
  std::vector<std::pair<int, int>> out;
  out.reserve(s.size() * (s.size() > 0 ? s.size() - 1 : 0) / 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      out.emplace_back(s[i], s[j]);
  return out;
}

namespace {

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::set<int> u(a.begin(), a.end());
  u.insert(b.begin(), b.end());
  return {u.begin(), u.end()};
}

}  // namespace

ScreeningResult ip_screen(const Dataset& d, const ScreenOptions& opts) {
  Dataset ds = opts.standardize ? standardize(d).first : d;
  ScreeningResult r;
  r.rule_a = opts.rule_a;
  r.rule_b = opts.rule_b;
  r.omega = omega_utilities(ds, /*require_standardized=*/opts.standardize);
  r.omega_star = omega_star_utilities(ds, opts.standardize);
  r.a_hat = select(r.omega, opts.rule_a);
  r.b_hat = select(r.omega_star, opts.rule_b);
  r.m_hat = sorted_union(r.a_hat, r.b_hat);
  r.i_hat = build_interactions(opts.interactions_from_m_hat ? r.m_hat : r.a_hat);
  return r;
}

std::vector<int> sis_screen(const Dataset& d, const SelectionRule& rule,
                            bool standardize_first) {
  Dataset ds = standardize_first ? standardize(d).first : d;
  return select(omega_star_utilities(ds, standardize_first), rule);
}

std::vector<int> dcsis_screen(const Dataset& d, const SelectionRule& rule,
                              bool standardize_first) {
  if (d.n() < 4) throw InputError("distance correlation screening needs n >= 4");
  Dataset ds = standardize_first ? standardize(d).first : d;
  return select(dcsis_utilities(ds), rule);
}

namespace {

// Least-squares coefficients of y on the design columns; falls back to a
// small ridge when the normal equations are not positive definite.
Eigen::VectorXd residual_fit(const AugmentedDesign& design) {
  const Eigen::MatrixXd& z = design.z;
  Eigen::MatrixXd gram = z.transpose() * z;
  Eigen::VectorXd rhs = z.transpose() * design.y_centered;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd coef = llt.solve(rhs);
    if (coef.allFinite()) return coef;
  }
  const double ridge = 1e-8 * gram.trace() / double(design.q());
  gram.diagonal().array() += ridge;
  return Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
}

}  // namespace

namespace {

// Rule applied to the candidate pool only; the budget shrinks to the pool.
std::vector<int> select_from_pool(const Eigen::VectorXd& utilities,
                                  SelectionRule rule,
                                  const std::set<int>& excluded) {
  std::vector<int> pool;
  for (int k = 0; k < utilities.size(); ++k)
    if (!excluded.count(k)) pool.push_back(k);
  Eigen::VectorXd u(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) u[i] = utilities[pool[i]];
  if (rule.kind == SelectionRule::Kind::top_d)
    rule.d = std::min<int>(rule.d, static_cast<int>(pool.size()));
  if (pool.empty()) return {};
  std::vector<int> local = select(u, rule);
  std::vector<int> out;
  out.reserve(local.size());
  for (int i : local) out.push_back(pool[i]);
  return out;
}

}  // namespace

ScreeningResult iterative_ip(const Dataset& d, const IterativeOptions& opts) {
  auto [ds, params] = standardize(d);
  const int n = static_cast<int>(ds.n());
  const int budget = opts.max_features > 0 ? opts.max_features : n - 1;

  ScreeningResult first = ip_screen(d, opts.base);
  int total = static_cast<int>(first.i_hat.size() + first.b_hat.size());
  if (total > budget)
    throw InputError("max_features smaller than the first-pass selection (" +
                     std::to_string(total) + ")");

  std::set<int> a_all(first.a_hat.begin(), first.a_hat.end());
  std::set<int> b_all(first.b_hat.begin(), first.b_hat.end());
  std::set<std::pair<int, int>> i_all(first.i_hat.begin(), first.i_hat.end());

  while (total < budget) {
    // Residual from a least-squares fit of y on everything retained so far.
    Eigen::VectorXd response = ds.y;
    std::vector<FeatureId> feats;
    for (int j : b_all) feats.push_back(FeatureId::main(j));
    for (const auto& kl : i_all)
      feats.push_back(FeatureId::interaction(kl.first, kl.second));
    if (!feats.empty()) {
      AugmentedDesign design = build_design(ds, feats);
      const Eigen::VectorXd coef = residual_fit(design);
      response = design.y_centered - design.z * coef;
    }

    Dataset pass = ds;
    pass.y = response;
    const Eigen::VectorXd omega = omega_utilities(pass);
    const Eigen::VectorXd omega_star = omega_star_utilities(pass);
    const std::vector<int> a_k = select_from_pool(omega, opts.base.rule_a, a_all);
    const std::vector<int> b_k =
        select_from_pool(omega_star, opts.base.rule_b, b_all);

    const auto i_k = build_interactions(a_k);
    int added = 0;
    for (const auto& kl : i_k) added += i_all.insert(kl).second ? 1 : 0;
    for (int j : b_k) added += b_all.insert(j).second ? 1 : 0;
    a_all.insert(a_k.begin(), a_k.end());
    if (added == 0) break;
    total += added;
  }

  ScreeningResult out;
  out.rule_a = opts.base.rule_a;
  out.rule_b = opts.base.rule_b;
  out.omega = first.omega;
  out.omega_star = first.omega_star;
  out.a_hat.assign(a_all.begin(), a_all.end());
  out.b_hat.assign(b_all.begin(), b_all.end());
  out.m_hat = sorted_union(out.a_hat, out.b_hat);
  out.i_hat.assign(i_all.begin(), i_all.end());
  return out;
}

}  // namespace ip
