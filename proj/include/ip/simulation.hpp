#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ip/dataset.hpp"
#include "ip/gaussian.hpp"
#include "ip/types.hpp"

#include <nlohmann/json.hpp>

namespace ip {

// Covariance family without a fixed dimension; materialized at generate time.
struct CovStructure {
  CovKind kind = CovKind::identity;
  double rho = 0.0;
  CovarianceModel materialize(int p) const;
};

enum class ErrorLaw { normal, student_t };

struct SimModel {
  std::string name;
  CovStructure cov;
  TrueModel truth;
  ErrorLaw error = ErrorLaw::normal;
  double sigma = 1.0;              // normal law scale
  int t_df = 0;                    // student_t degrees of freedom
  double perturb_half_width = 0.0; // additive U[-hw, hw] on covariates; 0 = none

  double error_variance() const;   // exact var of the error law
};

// "M1".."M5", "M3p", "M4p". example selects the error/perturbation variant
// (1 = Gaussian errors; 2 = t errors with uniform covariate perturbation,
// except M5 which keeps unperturbed covariates). rho is ignored for
// M3p/M4p, which fix equicorrelation 0.2.
SimModel builtin_model(const std::string& name, int example, double rho);

struct GeneratedData {
  Dataset train;
  Dataset test;
  TrueModel truth;
  Eigen::VectorXd train_noise;  // stored error draws (model identity checks)
  Eigen::VectorXd test_noise;
};

struct GenerateOptions {
  int test_n = 10000;      // 0 skips the test set
  bool noiseless = false;  // y = signal exactly
};

// Train/test draws from independent seed substreams; p must cover the
// model's index pattern (>= 15 for the builtins).
GeneratedData generate(const SimModel& model, int n, int p, std::uint64_t seed,
                       const GenerateOptions& opts = {});

// Deterministic signal x'beta + sum gamma x_k x_l (+beta0) for each row.
Eigen::VectorXd model_signal(const TrueModel& truth, const Eigen::MatrixXd& x);

// Prediction error on the test split of `seed` without materializing the
// full test matrix: only covariate columns appearing in the truth or the
// fitted support are generated. Exactly evaluate() on generate()'s test set.
struct FitResult;
double streaming_test_pe(const SimModel& model, int p, std::uint64_t seed,
                         int test_n, const FitResult& fit,
                         const StandardizeParams& train_transform,
                         const TrueModel& truth);

struct ExperimentSpec {
  SimModel model;
  int n = 200;
  int p = 2000;
  int replications = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;  // see run_* for the accepted names
  double budget_c = 1.0;             // d = floor(c n / log n) per retained set
  int test_n = 10000;
  int cv_folds = 5;
  bool interactions_from_m_hat = false;
};

nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::ordered_json& j);

struct SummaryTable {
  enum class Kind { screening, selection };
  Kind kind = Kind::screening;
  struct Row {
    std::string model;
    std::string method;
    std::vector<std::pair<std::string, double>> values;  // metric -> value

    double at(const std::string& metric) const;
  };
  std::vector<Row> rows;
  nlohmann::ordered_json metadata() const;  // spec echo + seeds + counts
  std::vector<nlohmann::ordered_json> spec_echo;
  std::vector<std::pair<std::string, int>> failures;  // method -> count

  const Row& row(const std::string& model, const std::string& method) const;

  // Long format: model,method,metric,value (one line per entry).
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
  void append(const SummaryTable& other);
};

// Methods: "IP", "SIS2", "DC-SIS2". Columns are per-target retention rates
// plus "All". Comparator budgets are matched to |M-hat| of IP replication by
// replication.
SummaryTable run_screening_experiment(const ExperimentSpec& spec);

// Methods: "IP-Lasso", "IP-L1+SICA", "SIS2-Lasso", "SIS2-L1+SICA",
// "DC-SIS2-Lasso", "DC-SIS2-L1+SICA", "Oracle". Columns are median/RSD of
// PE, FP, FN.
SummaryTable run_selection_experiment(const ExperimentSpec& spec);

// Linear-interpolation quantile at position 1 + (n-1)q over the sorted
// values; median/RSD (= IQR/1.34) built on it.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double rsd(std::vector<double> values);

// The screening/selection targets reported for a builtin model (Table rows).
struct Target {
  std::string label;
  FeatureId feature;
};
std::vector<Target> model_targets(const std::string& model_name);

}  // namespace ip
