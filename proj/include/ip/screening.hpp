#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "ip/dataset.hpp"

namespace ip {

// How a utility vector is turned into a retained set.
struct SelectionRule {
  enum class Kind { top_d, threshold };
  Kind kind = Kind::top_d;
  int d = 0;
  double tau = 0.0;

  static SelectionRule top_d(int d) {
    if (d <= 0) throw InputError("budget must be positive");
    SelectionRule r;
    r.kind = Kind::top_d;
    r.d = d;
    return r;
  }
  static SelectionRule threshold(double tau) {
    if (tau < 0) throw InputError("threshold must be nonnegative");
    SelectionRule r;
    r.kind = Kind::threshold;
    r.tau = tau;
    return r;
  }
};

// floor(c * n / log n), natural log, at least 1.
int default_top_d(Eigen::Index n, double c = 1.0);

// Interaction-variable utility: cov(X_k^2, Y^2) / sqrt(var(X_k^2)) with
// plug-in n-denominator sample moments, one entry per column.
// Throws InputError naming the (1-based) column if var(X_k^2) == 0.
Eigen::VectorXd omega_utilities(const Dataset& d,
                                bool require_standardized = true);

// Main-effect utility: (1/n) sum_i x_ij y_i.
Eigen::VectorXd omega_star_utilities(const Dataset& d,
                                     bool require_standardized = true);

// Sample distance correlation (V-statistic, double-centered Euclidean
// distances) between two scalar samples; 0 when either is degenerate.
double distance_correlation(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// distance_correlation of each column against y; degenerate columns get 0.
Eigen::VectorXd dcsis_utilities(const Dataset& d);

// Indices (0-based, ascending) retained by the rule. TopD breaks ties in
// favor of the smaller column index.
std::vector<int> select(const Eigen::VectorXd& utilities,
                        const SelectionRule& rule);

// All unordered pairs (k < l) from a set, lexicographically sorted.
std::vector<std::pair<int, int>> build_interactions(
    const std::vector<int>& a_hat);

struct ScreeningResult {
  Eigen::VectorXd omega;
  Eigen::VectorXd omega_star;
  std::vector<int> a_hat;
  std::vector<int> b_hat;
  std::vector<int> m_hat;  // a_hat u b_hat
  std::vector<std::pair<int, int>> i_hat;
  SelectionRule rule_a;
  SelectionRule rule_b;
};

struct ScreenOptions {
  SelectionRule rule_a;
  SelectionRule rule_b;
  // Empirically standardize before computing utilities (columns mapped to
  // mean 0, second moment 1).
  bool standardize = true;
  // Build i_hat from m_hat instead of a_hat (the conservative variant).
  bool interactions_from_m_hat = false;
};

ScreeningResult ip_screen(const Dataset& d, const ScreenOptions& opts);

// Marginal-correlation screening of main effects (|omega_star| ranking).
std::vector<int> sis_screen(const Dataset& d, const SelectionRule& rule,
                            bool standardize = true);

// Distance-correlation screening.
std::vector<int> dcsis_screen(const Dataset& d, const SelectionRule& rule,
                              bool standardize = true);

struct IterativeOptions {
  ScreenOptions base;
  // Stop once the accumulated count of retained interactions + main effects
  // reaches this, or a pass adds nothing new. Defaults to n - 1 when 0.
  int max_features = 0;
};

// Repeats screening on least-squares residuals, excluding previously
// retained interaction variables / main effects from their candidate pools,
// and returns the accumulated union sets. omega/omega_star are the
// first-pass vectors.
ScreeningResult iterative_ip(const Dataset& d, const IterativeOptions& opts);

}  // namespace ip
