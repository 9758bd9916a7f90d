#include "ip/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "ip/design.hpp"
#include "ip/parallel.hpp"
#include "ip/screening.hpp"
#include "ip/selection.hpp"

namespace ip {

using json = nlohmann::ordered_json;

CovarianceModel CovStructure::materialize(int p) const {
  switch (kind) {
    case CovKind::identity:
      return CovarianceModel::identity(p);
    case CovKind::ar1:
      return CovarianceModel::ar1(p, rho);
    case CovKind::equicorr:
      return CovarianceModel::equicorr(p, rho);
    case CovKind::tridiagonal:
      return CovarianceModel::tridiagonal(p, rho);
    case CovKind::dense:
      break;
  }
  throw InputError("dense covariance cannot be used as a model structure");
}

double SimModel::error_variance() const {
  if (error == ErrorLaw::normal) return sigma * sigma;
  if (t_df <= 2) throw InputError("t error needs df > 2 for a finite variance");
  return double(t_df) / double(t_df - 2);
}

namespace {

const std::vector<std::string> kModelNames = {"M1", "M2", "M3", "M4",
                                              "M5", "M3p", "M4p"};

}  // namespace

SimModel builtin_model(const std::string& name, int example, double rho) {
  if (example != 1 && example != 2)
    throw InputError("example must be 1 or 2");
  SimModel m;
  m.name = name;
  m.cov = {CovKind::ar1, rho};

  const auto set_error = [&](double sigma_ex1, int df_ex2) {
    if (example == 1) {
      m.error = ErrorLaw::normal;
      m.sigma = sigma_ex1;
    } else {
      m.error = ErrorLaw::student_t;
      m.t_df = df_ex2;
      m.perturb_half_width = 0.5;
    }
  };

  if (name == "M1") {
    m.truth.set_beta(0, 2);
    m.truth.set_beta(4, 2);
    m.truth.set_gamma(0, 4, 3);
    set_error(2.5, 3);
  } else if (name == "M2") {
    m.truth.set_beta(0, 2);
    m.truth.set_beta(9, 2);
    m.truth.set_gamma(0, 4, 3);
    set_error(2.0, 4);
  } else if (name == "M3" || name == "M3p") {
    m.truth.set_beta(9, 2);
    m.truth.set_beta(14, 2);
    m.truth.set_gamma(0, 4, 3);
    set_error(2.0, 4);
  } else if (name == "M4" || name == "M4p") {
    m.truth.set_gamma(0, 4, 3);
    m.truth.set_gamma(9, 14, 3);
    set_error(1.5, 8);
  } else if (name == "M5") {
    m.truth.set_beta(0, 1);
    m.truth.set_beta(4, 1);
    m.truth.set_beta(9, 1);
    m.truth.set_beta(14, 1);
    set_error(2.0, 3);
    m.perturb_half_width = 0.0;  // A.3 keeps unperturbed covariates
  } else {
    std::ostringstream msg;
    msg << "unknown model '" << name << "'; valid:";
    for (const auto& s : kModelNames) msg << ' ' << s;
    throw InputError(msg.str());
  }
  if (name == "M3p" || name == "M4p") m.cov = {CovKind::equicorr, 0.2};
  return m;
}

std::vector<Target> model_targets(const std::string& model_name) {
  const auto main = [](int j) { return FeatureId::main(j - 1); };
  const auto inter = [](int k, int l) {
    return FeatureId::interaction(k - 1, l - 1);
  };
  if (model_name == "M1")
    return {{"x1", main(1)}, {"x5", main(5)}, {"x1:x5", inter(1, 5)}};
  if (model_name == "M2")
    return {{"x1", main(1)}, {"x10", main(10)}, {"x1:x5", inter(1, 5)}};
  if (model_name == "M3" || model_name == "M3p")
    return {{"x10", main(10)}, {"x15", main(15)}, {"x1:x5", inter(1, 5)}};
  if (model_name == "M4" || model_name == "M4p")
    return {{"x1:x5", inter(1, 5)}, {"x10:x15", inter(10, 15)}};
  if (model_name == "M5")
    return {{"x1", main(1)}, {"x5", main(5)}, {"x10", main(10)},
            {"x15", main(15)}};
  throw InputError("no targets known for model '" + model_name + "'");
}

namespace {

// Substream ids under one generation seed.
enum Stream : std::uint64_t {
  kTrainX = 1,
  kTestX = 2,
  kTrainNoise = 3,
  kTestNoise = 4,
  kTrainPerturb = 5,
  kTestPerturb = 6,
  kCv = 7,
  kRepSeeds = 100,
};

double noise_at(const CounterRng& rng, const SimModel& model, std::uint64_t i) {
  if (model.error == ErrorLaw::normal) return model.sigma * rng.normal_at(i);
  const std::uint64_t stride = static_cast<std::uint64_t>(model.t_df) + 1;
  const double z = rng.normal_at(i * stride);
  double v = 0.0;
  for (int k = 1; k <= model.t_df; ++k) {
    const double g = rng.normal_at(i * stride + k);
    v += g * g;
  }
  return z / std::sqrt(v / double(model.t_df));
}

double perturb_at(const CounterRng& rng, double half_width, std::uint64_t i,
                  std::uint64_t j, std::uint64_t p) {
  return half_width * (2.0 * rng.uniform_at(i * p + j) - 1.0);
}

Dataset make_split(const SimModel& model, const CovarianceModel& cov, int n,
                   const CounterRng& base, Stream x_stream, Stream noise_stream,
                   Stream perturb_stream, bool noiseless,
                   Eigen::VectorXd* noise_out) {
  Dataset d;
  d.x = sample_covariates(cov, n, base.split(x_stream));
  const int p = cov.dim();
  if (model.perturb_half_width > 0.0) {
    const CounterRng pr = base.split(perturb_stream);
#pragma omp parallel for schedule(static) num_threads(ip::num_threads())
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j)
        d.x(i, j) += perturb_at(pr, model.perturb_half_width, i, j, p);
  }
  Eigen::VectorXd signal = model_signal(model.truth, d.x);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(n);
  if (!noiseless) {
    const CounterRng nr = base.split(noise_stream);
    for (int i = 0; i < n; ++i) noise[i] = noise_at(nr, model, i);
  }
  d.y = signal + noise;
  if (noise_out) *noise_out = std::move(noise);
  return d;
}

std::uint64_t rep_seed(std::uint64_t base, int rep) {
  return CounterRng(base, kRepSeeds).word_at(static_cast<std::uint64_t>(rep));
}

}  // namespace

Eigen::VectorXd model_signal(const TrueModel& truth, const Eigen::MatrixXd& x) {
  Eigen::VectorXd s = Eigen::VectorXd::Constant(x.rows(), truth.beta0);
  for (const auto& [j, v] : truth.beta) s += v * x.col(j);
  for (const auto& [kl, v] : truth.gamma)
    s += v * x.col(kl.first).cwiseProduct(x.col(kl.second)).eval();
  return s;
}

GeneratedData generate(const SimModel& model, int n, int p, std::uint64_t seed,
                       const GenerateOptions& opts) {
  if (p <= model.truth.max_index())
    throw InputError("p is too small for the model's index pattern");
  if (n < 3) throw InputError("need at least 3 rows");
  const CovarianceModel cov = model.cov.materialize(p);
  const CounterRng base(seed);

  GeneratedData out;
  out.truth = model.truth;
  out.train = make_split(model, cov, n, base, kTrainX, kTrainNoise,
                         kTrainPerturb, opts.noiseless, &out.train_noise);
  if (opts.test_n > 0)
    out.test = make_split(model, cov, opts.test_n, base, kTestX, kTestNoise,
                          kTestPerturb, opts.noiseless, &out.test_noise);
  return out;
}

// ---------------------------------------------------------------------------
// Summary statistics

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = 1.0 + (double(values.size()) - 1.0) * q;  // 1-based position
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - double(lo);
  if (lo >= values.size()) return values.back();
  if (frac == 0.0) return values[lo - 1];
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double rsd(std::vector<double> values) {
  if (values.size() < 2) throw InputError("RSD needs at least 2 values");
  const double q1 = quantile(values, 0.25);
  const double q3 = quantile(values, 0.75);
  return (q3 - q1) / 1.34;
}

// ---------------------------------------------------------------------------
// Spec serialization

json experiment_spec_to_json(const ExperimentSpec& spec) {
  json truth;
  truth["beta0"] = spec.model.truth.beta0;
  json beta = json::object();
  for (const auto& [j, v] : spec.model.truth.beta)
    beta[std::to_string(j + 1)] = v;
  truth["beta"] = beta;
  json gamma = json::array();
  for (const auto& [kl, v] : spec.model.truth.gamma)
    gamma.push_back({kl.first + 1, kl.second + 1, v});
  truth["gamma"] = gamma;

  const auto cov_name = [](CovKind k) {
    switch (k) {
      case CovKind::identity: return "identity";
      case CovKind::ar1: return "ar1";
      case CovKind::equicorr: return "equicorr";
      case CovKind::tridiagonal: return "tridiagonal";
      case CovKind::dense: return "dense";
    }
    return "identity";
  };

  json model;
  model["name"] = spec.model.name;
  model["covariance"] = {{"kind", cov_name(spec.model.cov.kind)},
                         {"rho", spec.model.cov.rho}};
  model["truth"] = truth;
  model["error"] =
      spec.model.error == ErrorLaw::normal ? "normal" : "student_t";
  model["sigma"] = spec.model.sigma;
  model["t_df"] = spec.model.t_df;
  model["perturb_half_width"] = spec.model.perturb_half_width;

  json j;
  j["model"] = model;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["replications"] = spec.replications;
  j["seed"] = spec.seed;
  j["methods"] = spec.methods;
  j["budget_c"] = spec.budget_c;
  j["test_n"] = spec.test_n;
  j["cv_folds"] = spec.cv_folds;
  j["interactions_from_m_hat"] = spec.interactions_from_m_hat;
  return j;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::ordered_json& j) {
  ExperimentSpec spec;
  const auto& model = j.at("model");
  spec.model.name = model.at("name").get<std::string>();
  const std::string cov = model.at("covariance").at("kind").get<std::string>();
  if (cov == "identity")
    spec.model.cov.kind = CovKind::identity;
  else if (cov == "ar1")
    spec.model.cov.kind = CovKind::ar1;
  else if (cov == "equicorr")
    spec.model.cov.kind = CovKind::equicorr;
  else if (cov == "tridiagonal")
    spec.model.cov.kind = CovKind::tridiagonal;
  else
    throw InputError("unknown covariance kind '" + cov + "'");
  spec.model.cov.rho = model.at("covariance").at("rho").get<double>();

  const auto& truth = model.at("truth");
  spec.model.truth.beta0 = truth.value("beta0", 0.0);
  for (const auto& [key, v] : truth.at("beta").items())
    spec.model.truth.set_beta(std::stoi(key) - 1, v.get<double>());
  for (const auto& g : truth.at("gamma"))
    spec.model.truth.set_gamma(g.at(0).get<int>() - 1, g.at(1).get<int>() - 1,
                               g.at(2).get<double>());

  const std::string err = model.at("error").get<std::string>();
  if (err == "normal")
    spec.model.error = ErrorLaw::normal;
  else if (err == "student_t")
    spec.model.error = ErrorLaw::student_t;
  else
    throw InputError("unknown error law '" + err + "'");
  spec.model.sigma = model.value("sigma", 1.0);
  spec.model.t_df = model.value("t_df", 0);
  spec.model.perturb_half_width = model.value("perturb_half_width", 0.0);

  spec.n = j.at("n").get<int>();
  spec.p = j.at("p").get<int>();
  spec.replications = j.at("replications").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.methods = j.at("methods").get<std::vector<std::string>>();
  spec.budget_c = j.value("budget_c", 1.0);
  spec.test_n = j.value("test_n", 10000);
  spec.cv_folds = j.value("cv_folds", 5);
  spec.interactions_from_m_hat = j.value("interactions_from_m_hat", false);
  return spec;
}

// ---------------------------------------------------------------------------
// Summary table

json SummaryTable::metadata() const {
  json m;
  m["specs"] = spec_echo;
  if (!failures.empty()) {
    json f = json::object();
    for (const auto& [method, count] : failures) f[method] = count;
    m["failures"] = f;
  }
  return m;
}

double SummaryTable::Row::at(const std::string& metric) const {
  for (const auto& [label, v] : values)
    if (label == metric) return v;
  throw InputError("no metric '" + metric + "' in row " + model + "/" + method);
}

const SummaryTable::Row& SummaryTable::row(const std::string& model,
                                           const std::string& method) const {
  for (const auto& r : rows)
    if (r.model == model && r.method == method) return r;
  throw InputError("no row " + model + "/" + method);
}

std::string SummaryTable::to_csv() const {
  std::ostringstream out;
  out << "# " << metadata().dump() << '\n';
  out << "model,method,metric,value\n";
  for (const auto& r : rows)
    for (const auto& [label, v] : r.values)
      out << r.model << ',' << r.method << ',' << label << ','
          << format_double(v) << '\n';
  return out.str();
}

json SummaryTable::to_json() const {
  json j;
  j["kind"] = kind == Kind::screening ? "screening" : "selection";
  json rs = json::array();
  for (const auto& r : rows) {
    json row;
    row["model"] = r.model;
    row["method"] = r.method;
    json vals = json::object();
    for (const auto& [label, v] : r.values) vals[label] = v;
    row["values"] = vals;
    rs.push_back(row);
  }
  j["rows"] = rs;
  j["metadata"] = metadata();
  return j;
}

void SummaryTable::append(const SummaryTable& other) {
  if (rows.empty()) {
    *this = other;
    return;
  }
  if (other.kind != kind)
    throw InputError("cannot append tables of different kinds");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  spec_echo.insert(spec_echo.end(), other.spec_echo.begin(),
                   other.spec_echo.end());
  failures.insert(failures.end(), other.failures.begin(),
                  other.failures.end());
}

// ---------------------------------------------------------------------------
// Screening experiment

namespace {

void check_methods(const std::vector<std::string>& methods,
                   const std::set<std::string>& allowed) {
  if (methods.empty()) throw InputError("no methods requested");
  for (const auto& m : methods)
    if (!allowed.count(m)) throw InputError("unknown method '" + m + "'");
}

bool contains(const std::vector<int>& sorted_set, int v) {
  return std::binary_search(sorted_set.begin(), sorted_set.end(), v);
}

bool retained(const Target& target, const std::vector<int>& mains,
              const std::vector<std::pair<int, int>>& pairs,
              const std::vector<int>& pair_vars) {
  if (target.feature.is_main())
    return contains(mains, target.feature.main_index());
  const auto kl = target.feature.interaction_pair();
  if (!pairs.empty())
    return std::binary_search(pairs.begin(), pairs.end(), kl);
  return contains(pair_vars, kl.first) && contains(pair_vars, kl.second);
}

}  // namespace

SummaryTable run_screening_experiment(const ExperimentSpec& spec) {
  check_methods(spec.methods, {"IP", "SIS2", "DC-SIS2"});
  if (spec.replications < 1) throw InputError("replications must be >= 1");
  const auto targets = model_targets(spec.model.name);
  const int d = std::min(default_top_d(spec.n, spec.budget_c), spec.p);
  const int ncols = static_cast<int>(targets.size()) + 1;
  const int nmethods = static_cast<int>(spec.methods.size());

  // retain[rep][method*ncols + target]
  std::vector<std::vector<char>> retain(
      spec.replications, std::vector<char>(nmethods * ncols, 0));

  std::vector<char> rep_failed(spec.replications, 0);
#pragma omp parallel for schedule(dynamic) num_threads(ip::num_threads())
  for (int r = 0; r < spec.replications; ++r) {
   try {
    GenerateOptions gen;
    gen.test_n = 0;
    const GeneratedData data =
        generate(spec.model, spec.n, spec.p, rep_seed(spec.seed, r), gen);

    ScreenOptions so;
    so.rule_a = SelectionRule::top_d(d);
    so.rule_b = SelectionRule::top_d(d);
    so.interactions_from_m_hat = spec.interactions_from_m_hat;
    const ScreeningResult ip_res = ip_screen(data.train, so);
    const auto budget = SelectionRule::top_d(std::clamp<int>(
        static_cast<int>(ip_res.m_hat.size()), 1, spec.p));

    for (int mi = 0; mi < nmethods; ++mi) {
      const std::string& method = spec.methods[mi];
      std::vector<int> mains, pair_vars;
      std::vector<std::pair<int, int>> pairs;
      if (method == "IP") {
        mains = ip_res.m_hat;
        pairs = ip_res.i_hat;
      } else if (method == "SIS2") {
        mains = sis_screen(data.train, budget);
        pair_vars = mains;
      } else {
        mains = dcsis_screen(data.train, budget);
        pair_vars = mains;
      }
      bool all = true;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const bool hit = retained(targets[t], mains, pairs, pair_vars);
        retain[r][mi * ncols + static_cast<int>(t)] = hit;
        all = all && hit;
      }
      retain[r][mi * ncols + ncols - 1] = all;
    }
   } catch (const std::exception&) {
    rep_failed[r] = 1;
   }
  }
  for (int r = 0; r < spec.replications; ++r)
    if (rep_failed[r])
      throw std::runtime_error("replication " + std::to_string(r) +
                               " failed during screening");

  SummaryTable table;
  table.kind = SummaryTable::Kind::screening;
  for (int mi = 0; mi < nmethods; ++mi) {
    SummaryTable::Row row;
    row.model = spec.model.name;
    row.method = spec.methods[mi];
    for (int c = 0; c < ncols; ++c) {
      double sum = 0.0;
      for (int r = 0; r < spec.replications; ++r)
        sum += retain[r][mi * ncols + c];
      const std::string label =
          c + 1 == ncols ? "All" : targets[static_cast<std::size_t>(c)].label;
      row.values.emplace_back(label, sum / double(spec.replications));
    }
    table.rows.push_back(row);
  }
  table.spec_echo.push_back(experiment_spec_to_json(spec));
  return table;
}

// ---------------------------------------------------------------------------
// Selection experiment

double streaming_test_pe(const SimModel& model, int p, std::uint64_t seed,
                         int test_n, const FitResult& fit,
                         const StandardizeParams& transform,
                         const TrueModel& truth) {
  const CovarianceModel cov = model.cov.materialize(p);
  const CounterRng base(seed);
  const CounterRng x_rng = base.split(kTestX);
  const CounterRng noise_rng = base.split(kTestNoise);
  const CounterRng perturb_rng = base.split(kTestPerturb);

  std::set<int> needed_set;
  for (const auto& [j, v] : truth.beta) needed_set.insert(j);
  for (const auto& [kl, v] : truth.gamma) {
    needed_set.insert(kl.first);
    needed_set.insert(kl.second);
  }
  for (const auto& [f, v] : fit.theta) {
    needed_set.insert(f.first());
    if (f.is_interaction()) needed_set.insert(f.second());
  }
  const std::vector<int> needed(needed_set.begin(), needed_set.end());
  std::vector<int> slot(p, -1);
  for (std::size_t i = 0; i < needed.size(); ++i) slot[needed[i]] = int(i);

  const bool by_column = cov.independent_columns();
  Eigen::VectorXd full_row(by_column ? 0 : p);
  Eigen::VectorXd raw(needed.size()), std_row(needed.size());

  double acc = 0.0;
  for (int i = 0; i < test_n; ++i) {
    if (by_column) {
      for (std::size_t c = 0; c < needed.size(); ++c)
        raw[c] = cov.sample_entry(x_rng, i, needed[c]);
    } else {
      cov.sample_row(x_rng, i, full_row);
      for (std::size_t c = 0; c < needed.size(); ++c)
        raw[c] = full_row[needed[c]];
    }
    if (model.perturb_half_width > 0.0)
      for (std::size_t c = 0; c < needed.size(); ++c)
        raw[c] += perturb_at(perturb_rng, model.perturb_half_width, i,
                             needed[c], p);

    double y = truth.beta0;
    for (const auto& [j, v] : truth.beta) y += v * raw[slot[j]];
    for (const auto& [kl, v] : truth.gamma)
      y += v * raw[slot[kl.first]] * raw[slot[kl.second]];
    y += noise_at(noise_rng, model, i);

    for (std::size_t c = 0; c < needed.size(); ++c)
      std_row[c] =
          (raw[c] - transform.mean[needed[c]]) / transform.sd[needed[c]];
    double pred = fit.intercept;
    for (const auto& [f, v] : fit.theta) {
      if (f.is_main())
        pred += v * std_row[slot[f.main_index()]];
      else
        pred += v * std_row[slot[f.first()]] * std_row[slot[f.second()]];
    }
    const double e = y - pred;
    acc += e * e;
  }
  return acc / double(test_n);
}

namespace {

struct MethodPlan {
  std::string screen;   // "IP", "SIS2", "DC-SIS2", "Oracle"
  std::string penalty;  // "Lasso", "L1+SICA", "OLS"
};

MethodPlan parse_method(const std::string& name) {
  if (name == "Oracle") return {"Oracle", "OLS"};
  const auto dash = name.rfind('-');
  if (dash != std::string::npos) {
    const std::string screen = name.substr(0, dash);
    const std::string pen = name.substr(dash + 1);
    if ((screen == "IP" || screen == "SIS2" || screen == "DC-SIS2") &&
        (pen == "Lasso" || pen == "L1+SICA"))
      return {screen, pen};
  }
  throw InputError("unknown method '" + name + "'");
}

}  // namespace

SummaryTable run_selection_experiment(const ExperimentSpec& spec) {
  check_methods(spec.methods,
                {"IP-Lasso", "IP-L1+SICA", "SIS2-Lasso", "SIS2-L1+SICA",
                 "DC-SIS2-Lasso", "DC-SIS2-L1+SICA", "Oracle"});
  if (spec.replications < 1) throw InputError("replications must be >= 1");
  std::vector<MethodPlan> plans;
  for (const auto& m : spec.methods) plans.push_back(parse_method(m));
  const int nmethods = static_cast<int>(plans.size());
  const int d = std::min(default_top_d(spec.n, spec.budget_c), spec.p);

  struct RepResult {
    std::vector<std::optional<Metrics>> per_method;
  };
  std::vector<RepResult> results(spec.replications);

#pragma omp parallel for schedule(dynamic) num_threads(ip::num_threads())
  for (int r = 0; r < spec.replications; ++r) {
    results[r].per_method.resize(nmethods);
    const std::uint64_t seed_r = rep_seed(spec.seed, r);
    GenerateOptions gen;
    gen.test_n = 0;  // test rows are streamed during evaluation
    GeneratedData data;
    ScreeningResult ip_res;
    StandardizeParams transform;
    Dataset std_train;
    try {
      data = generate(spec.model, spec.n, spec.p, seed_r, gen);
      std::tie(std_train, transform) = standardize(data.train);
      ScreenOptions so;
      so.rule_a = SelectionRule::top_d(d);
      so.rule_b = SelectionRule::top_d(d);
      so.standardize = false;  // already standardized above
      so.interactions_from_m_hat = spec.interactions_from_m_hat;
      ip_res = ip_screen(std_train, so);
    } catch (const std::exception&) {
      continue;  // counted below as a failure for every method
    }
    const auto budget = SelectionRule::top_d(std::clamp<int>(
        static_cast<int>(ip_res.m_hat.size()), 1, spec.p));

    for (int mi = 0; mi < nmethods; ++mi) {
      const MethodPlan& plan = plans[mi];
      try {
        std::vector<FeatureId> features;
        if (plan.screen == "Oracle") {
          features = data.truth.support();
        } else {
          std::vector<int> mains;
          std::vector<std::pair<int, int>> pairs;
          if (plan.screen == "IP") {
            mains = ip_res.m_hat;
            pairs = ip_res.i_hat;
          } else if (plan.screen == "SIS2") {
            mains = sis_screen(std_train, budget, /*standardize=*/false);
            pairs = build_interactions(mains);
          } else {
            mains = dcsis_screen(std_train, budget, /*standardize=*/false);
            pairs = build_interactions(mains);
          }
          for (int j : mains) features.push_back(FeatureId::main(j));
          for (const auto& kl : pairs)
            features.push_back(FeatureId::interaction(kl.first, kl.second));
        }

        const AugmentedDesign design = build_design(std_train, features);
        FitResult fit_res;
        if (plan.penalty == "OLS") {
          fit_res = fit_ols(design);
        } else if (plan.penalty == "Lasso") {
          CvOptions cv;
          cv.folds = spec.cv_folds;
          cv.seed = CounterRng(seed_r, kCv).word_at(0);
          fit_res = tune_cv(design, cv).second;
        } else {
          fit_res = tune_bic(design, default_bic_grid(design, spec.p)).second;
        }

        Metrics m;
        count_errors(fit_res, data.truth, &m);
        m.pe = streaming_test_pe(spec.model, spec.p, seed_r, spec.test_n,
                                 fit_res, transform, data.truth);
        results[r].per_method[mi] = m;
      } catch (const std::exception&) {
        results[r].per_method[mi] = std::nullopt;
      }
    }
  }

  SummaryTable table;
  table.kind = SummaryTable::Kind::selection;
  const std::vector<std::string> labels = {"pe_median", "pe_rsd", "fp_median",
                                           "fp_rsd", "fn_median", "fn_rsd"};
  for (int mi = 0; mi < nmethods; ++mi) {
    std::vector<double> pe, fp, fn;
    int failed = 0;
    for (int r = 0; r < spec.replications; ++r) {
      const auto& m = results[r].per_method[mi];
      if (!m) {
        ++failed;
        continue;
      }
      pe.push_back(m->pe);
      fp.push_back(double(m->fp));
      fn.push_back(double(m->fn));
    }
    std::vector<double> vals(6, std::nan(""));
    if (pe.size() >= 2) {
      vals = {median(pe), rsd(pe), median(fp), rsd(fp), median(fn), rsd(fn)};
    } else if (pe.size() == 1) {
      vals = {pe[0], 0.0, double(fp[0]), 0.0, double(fn[0]), 0.0};
    }
    SummaryTable::Row row;
    row.model = spec.model.name;
    row.method = spec.methods[mi];
    for (int c = 0; c < 6; ++c) row.values.emplace_back(labels[c], vals[c]);
    table.rows.push_back(row);
    if (failed > 0) table.failures.emplace_back(spec.methods[mi], failed);
  }
  table.spec_echo.push_back(experiment_spec_to_json(spec));
  return table;
}

}  // namespace ip
