#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ip {

// Bad user input (files, flags, malformed data, out-of-range requests).
// The CLI maps InputError to exit code 2 and any other exception to 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One column of the augmented feature space: a single covariate ("x3") or a
// product of two distinct covariates ("x1:x5"). Indices are 0-based in code
// and rendered 1-based in all user-facing output.
class FeatureId {
 public:
  static FeatureId main(int j) {
    if (j < 0) throw InputError("main-effect index must be nonnegative");
    return FeatureId(j, -1);
  }

  static FeatureId interaction(int k, int l) {
    if (k < 0 || l < 0) throw InputError("interaction indices must be nonnegative");
    if (k == l) throw InputError("interaction requires two distinct covariates");
    if (k > l) std::swap(k, l);
    return FeatureId(k, l);
  }

  bool is_main() const noexcept { return second_ < 0; }
  bool is_interaction() const noexcept { return second_ >= 0; }

  int main_index() const {
    if (!is_main()) throw std::logic_error("not a main effect");
    return first_;
  }

  std::pair<int, int> interaction_pair() const {
    if (!is_interaction()) throw std::logic_error("not an interaction");
    return {first_, second_};
  }

  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

  // "x3" / "x1:x5" (1-based).
  std::string name() const;
  static FeatureId parse(const std::string& text);

  // Main effects sort before interactions; within each kind by index.
  friend bool operator<(const FeatureId& a, const FeatureId& b) noexcept {
    if (a.is_interaction() != b.is_interaction())
      return b.is_interaction();
    if (a.first_ != b.first_) return a.first_ < b.first_;
    return a.second_ < b.second_;
  }
  friend bool operator==(const FeatureId& a, const FeatureId& b) noexcept {
    return a.first_ == b.first_ && a.second_ == b.second_;
  }
  friend bool operator!=(const FeatureId& a, const FeatureId& b) noexcept {
    return !(a == b);
  }

 private:
  FeatureId(int f, int s) : first_(f), second_(s) {}
  int first_;
  int second_;
};

// Sparse ground-truth coefficients. Maps never hold explicit zeros and
// interaction keys always satisfy k < l.
struct TrueModel {
  double beta0 = 0.0;
  std::map<int, double> beta;                       // main index -> coefficient
  std::map<std::pair<int, int>, double> gamma;      // (k < l) -> coefficient

  void set_beta(int j, double value) {
    if (j < 0) throw InputError("main-effect index must be nonnegative");
    if (value == 0.0)
      beta.erase(j);
    else
      beta[j] = value;
  }

  void set_gamma(int k, int l, double value) {
    if (k == l) throw InputError("interaction requires two distinct covariates");
    if (k < 0 || l < 0) throw InputError("interaction indices must be nonnegative");
    if (k > l) std::swap(k, l);
    if (value == 0.0)
      gamma.erase({k, l});
    else
      gamma[{k, l}] = value;
  }

  // Coefficient of a feature, zero if absent.
  double theta(const FeatureId& f) const {
    if (f.is_main()) {
      auto it = beta.find(f.main_index());
      return it == beta.end() ? 0.0 : it->second;
    }
    auto it = gamma.find(f.interaction_pair());
    return it == gamma.end() ? 0.0 : it->second;
  }

  std::vector<FeatureId> support() const {
    std::vector<FeatureId> s;
    s.reserve(beta.size() + gamma.size());
    for (const auto& [j, v] : beta) s.push_back(FeatureId::main(j));
    for (const auto& [kl, v] : gamma)
      s.push_back(FeatureId::interaction(kl.first, kl.second));
    return s;  // already sorted: mains ascending, then pairs lexicographic
  }

  // Largest covariate index referenced, -1 when empty.
  int max_index() const {
    int m = -1;
    for (const auto& [j, v] : beta) m = std::max(m, j);
    for (const auto& [kl, v] : gamma) m = std::max(m, kl.second);
    return m;
  }
};

struct TrueSets {
  std::set<std::pair<int, int>> interactions;  // I
  std::set<int> interaction_vars;              // A
  std::set<int> main_effects;                  // B
  std::set<int> important_features;            // M = A u B
};

TrueSets true_sets(const TrueModel& m);

}  // namespace ip
