// Command-line front end: screening, selection, oracle queries, and
// reproduction of the simulation tables.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ip/dataset.hpp"
#include "ip/design.hpp"
#include "ip/gaussian.hpp"
#include "ip/json_io.hpp"
#include "ip/parallel.hpp"
#include "ip/screening.hpp"
#include "ip/selection.hpp"
#include "ip/simulation.hpp"

namespace {

using json = nlohmann::ordered_json;

struct GlobalOptions {
  std::uint64_t seed = 12345;
  int threads = 0;
  std::string output;
  std::string format = "json";
};

std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("IP_OUTPUT_DIR");
  if (!dir || !*dir || path.empty()) return path;
  if (path.front() == '/') return path;
  return std::string(dir) + "/" + path;
}

void write_file(const std::string& path, const std::string& content) {
  const std::string resolved = resolve_output(path);
  std::ofstream out(resolved);
  if (!out) throw ip::InputError("cannot write file '" + resolved + "'");
  out << content;
  if (!out) throw ip::InputError("failed writing '" + resolved + "'");
}

void emit(const GlobalOptions& g, const std::string& content) {
  if (g.output.empty())
    std::cout << content;
  else
    write_file(g.output, content);
}

// --- screen ---------------------------------------------------------------

struct ScreenArgs {
  std::string input;
  std::string response = "y";
  bool no_header = false;
  std::string method = "ip";
  std::string top_d = "auto";
  double budget_c = 1.0;
  double threshold = -1.0;
  std::string interactions_from = "ahat";
  bool no_standardize = false;
  bool iterative = false;
  int max_features = 0;
};

ip::SelectionRule make_rule(const ScreenArgs& a, Eigen::Index n,
                            Eigen::Index p) {
  if (a.threshold >= 0.0) return ip::SelectionRule::threshold(a.threshold);
  int d;
  if (a.top_d == "auto") {
    d = std::min<int>(ip::default_top_d(n, a.budget_c), int(p));
  } else {
    try {
      d = std::stoi(a.top_d);
    } catch (...) {
      throw ip::InputError("--top-d must be an integer or 'auto'");
    }
  }
  if (d <= 0) throw ip::InputError("budget must be positive");
  if (d > p) throw ip::InputError("budget exceeds the covariate count");
  return ip::SelectionRule::top_d(d);
}

int run_screen(const GlobalOptions& g, const ScreenArgs& a) {
  ip::CsvOptions copts;
  copts.has_header = !a.no_header;
  const ip::LoadedCsv loaded = ip::load_csv(a.input, a.response, copts);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  const ip::Dataset& d = loaded.data;
  const ip::SelectionRule rule = make_rule(a, d.n(), d.p());

  if (a.method == "ip") {
    ip::ScreenOptions so;
    so.rule_a = rule;
    so.rule_b = rule;
    so.standardize = !a.no_standardize;
    so.interactions_from_m_hat = a.interactions_from == "mhat";
    ip::ScreeningResult res;
    if (a.iterative) {
      ip::IterativeOptions io;
      io.base = so;
      io.max_features = a.max_features;
      res = ip::iterative_ip(d, io);
    } else {
      res = ip::ip_screen(d, so);
    }
    emit(g, g.format == "csv" ? ip::screening_result_to_csv(res)
                              : ip::screening_result_to_json(res).dump(2) + "\n");
    return 0;
  }

  if (a.method != "sis" && a.method != "dcsis")
    throw ip::InputError("--method must be ip, sis, or dcsis");
  ip::Dataset ds = a.no_standardize ? d : ip::standardize(d).first;
  const Eigen::VectorXd util =
      a.method == "sis" ? ip::omega_star_utilities(ds, !a.no_standardize)
                        : ip::dcsis_utilities(ds);
  const std::vector<int> sel = ip::select(util, rule);
  if (g.format == "csv") {
    std::ostringstream out;
    out << "index,utility,selected\n";
    for (Eigen::Index k = 0; k < util.size(); ++k)
      out << (k + 1) << ',' << ip::format_double(util[k]) << ','
          << std::binary_search(sel.begin(), sel.end(), int(k)) << '\n';
    emit(g, out.str());
  } else {
    json j;
    j["method"] = a.method;
    j["utility"] = std::vector<double>(util.begin(), util.end());
    std::vector<int> sel1;
    for (int k : sel) sel1.push_back(k + 1);
    j["selected"] = sel1;
    j["rule"] = ip::selection_rule_to_json(rule);
    emit(g, j.dump(2) + "\n");
  }
  return 0;
}

// --- select ---------------------------------------------------------------

struct SelectArgs {
  std::string input;
  std::string response = "y";
  bool no_header = false;
  std::string screening_file;
  std::string screen_method = "ip";
  std::string top_d = "auto";
  double budget_c = 1.0;
  double threshold = -1.0;
  std::string interactions_from = "ahat";
  std::string penalty = "l1sica";
  std::string tune = "auto";
  int folds = 5;
  double lambda0 = -1.0;
  double lambda = -1.0;
  double alpha = 0.5;
  double sica_a = 0.5;
};

int run_select(const GlobalOptions& g, const SelectArgs& a) {
  ip::CsvOptions copts;
  copts.has_header = !a.no_header;
  const ip::LoadedCsv loaded = ip::load_csv(a.input, a.response, copts);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  auto [ds, transform] = ip::standardize(loaded.data);

  std::string tune = a.tune;
  if (tune == "auto") tune = a.penalty == "l1sica" ? "bic" : "cv";
  if (a.penalty == "l1sica" && tune == "cv")
    throw ip::InputError("BIC required for l1sica");
  if (a.penalty != "l1sica" && tune == "bic")
    throw ip::InputError("BIC tuning applies to l1sica only");

  // Retained features: from a stored screening result or a fresh screen.
  std::vector<ip::FeatureId> features;
  if (!a.screening_file.empty()) {
    std::ifstream in(a.screening_file);
    if (!in)
      throw ip::InputError("cannot open file '" + a.screening_file + "'");
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ip::InputError("cannot parse screening file: " +
                           std::string(e.what()));
    }
    const ip::ScreeningResult res = ip::screening_result_from_json(j);
    for (int m : res.m_hat) features.push_back(ip::FeatureId::main(m));
    for (const auto& [k, l] : res.i_hat)
      features.push_back(ip::FeatureId::interaction(k, l));
  } else {
    ScreenArgs sa;
    sa.top_d = a.top_d;
    sa.budget_c = a.budget_c;
    sa.threshold = a.threshold;
    const ip::SelectionRule rule = make_rule(sa, ds.n(), ds.p());
    if (a.screen_method == "ip") {
      ip::ScreenOptions so;
      so.rule_a = rule;
      so.rule_b = rule;
      so.standardize = false;  // already standardized
      so.interactions_from_m_hat = a.interactions_from == "mhat";
      const ip::ScreeningResult res = ip::ip_screen(ds, so);
      for (int m : res.m_hat) features.push_back(ip::FeatureId::main(m));
      for (const auto& [k, l] : res.i_hat)
        features.push_back(ip::FeatureId::interaction(k, l));
    } else if (a.screen_method == "sis2" || a.screen_method == "dcsis2") {
      const std::vector<int> set =
          a.screen_method == "sis2" ? ip::sis_screen(ds, rule, false)
                                    : ip::dcsis_screen(ds, rule, false);
      for (int m : set) features.push_back(ip::FeatureId::main(m));
      for (const auto& [k, l] : ip::build_interactions(set))
        features.push_back(ip::FeatureId::interaction(k, l));
    } else {
      throw ip::InputError("--screen-method must be ip, sis2, or dcsis2");
    }
  }

  const ip::AugmentedDesign design = ip::build_design(ds, features);
  ip::FitResult fit;

  if (tune == "none") {
    ip::PenaltySpec pen = ip::PenaltySpec::lasso(0.0);
    if (a.penalty == "lasso") {
      if (a.lambda0 < 0) throw ip::InputError("--lambda0 required with --tune none");
      pen = ip::PenaltySpec::lasso(a.lambda0);
    } else if (a.penalty == "enet") {
      if (a.lambda < 0) throw ip::InputError("--lambda required with --tune none");
      pen = ip::PenaltySpec::elastic_net(a.lambda, a.alpha);
    } else if (a.penalty == "l1sica") {
      if (a.lambda0 < 0 || a.lambda < 0)
        throw ip::InputError("--lambda0 and --lambda required with --tune none");
      pen = ip::PenaltySpec::l1_sica(a.lambda0, a.lambda, a.sica_a);
    } else {
      throw ip::InputError("--penalty must be lasso, enet, or l1sica");
    }
    fit = ip::fit(design, pen);
  } else if (tune == "cv") {
    ip::CvOptions cv;
    cv.folds = a.folds;
    cv.seed = g.seed;
    cv.alpha = a.penalty == "enet" ? a.alpha : 1.0;
    cv.family = a.penalty == "enet" ? ip::PenaltySpec::Kind::elastic_net
                                    : ip::PenaltySpec::Kind::lasso;
    fit = ip::tune_cv(design, cv).second;
  } else if (tune == "bic") {
    ip::BicGrid grid = ip::default_bic_grid(design, int(ds.p()));
    if (a.lambda0 >= 0) grid.lambda0s = {a.lambda0};
    grid.as = {a.sica_a};
    fit = ip::tune_bic(design, grid).second;
  } else {
    throw ip::InputError("--tune must be bic, cv, or none");
  }

  emit(g, g.format == "csv" ? ip::fit_result_to_csv(fit)
                            : ip::fit_result_to_json(fit).dump(2) + "\n");
  return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string name;
  std::string spec_file;
  int reps = 100;
  std::vector<std::string> methods;
  std::vector<std::string> models;
  double budget_c = 1.0;
  int folds = 5;
  int test_n = 10000;
};

struct NamedExperiment {
  bool screening = true;
  int example = 1;
  int n = 200, p = 2000;
  double rho = 0.0;
  std::vector<std::string> models;
};

NamedExperiment lookup_experiment(const std::string& name) {
  NamedExperiment e;
  const auto setting = [&](int s) {
    e.n = (s <= 2) ? 200 : 300;
    e.p = (s <= 2) ? 2000 : 5000;
    e.rho = (s % 2 == 0) ? 0.5 : 0.0;
  };
  const std::vector<std::string> m14 = {"M1", "M2", "M3", "M4"};
  if (name.rfind("table1-setting", 0) == 0 ||
      name.rfind("table2-setting", 0) == 0 ||
      name.rfind("table4-setting", 0) == 0 ||
      name.rfind("table5-setting", 0) == 0) {
    const int table = name[5] - '0';
    const int s = name.back() - '0';
    if (s < 1 || s > 4) throw ip::InputError("setting must be 1..4");
    setting(s);
    e.models = m14;
    e.example = (table == 2 || table == 5) ? 2 : 1;
    e.screening = (table == 1 || table == 2);
    return e;
  }
  if (name == "tableA3") {  // main-effects-only model
    setting(1);
    e.models = {"M5"};
    return e;
  }
  if (name == "tableA4") {  // equicorrelation variants
    setting(1);
    e.models = {"M3p", "M4p"};
    return e;
  }
  throw ip::InputError(
      "unknown experiment '" + name +
      "'; valid: table1-setting1..4, table2-setting1..4, table4-setting1..4, "
      "table5-setting1..4, tableA3, tableA4");
}

int run_simulate(const GlobalOptions& g, const SimulateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  ip::SummaryTable table;

  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    if (!in) throw ip::InputError("cannot open file '" + a.spec_file + "'");
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ip::InputError("cannot parse spec file: " + std::string(e.what()));
    }
    ip::ExperimentSpec spec = ip::experiment_spec_from_json(j);
    const bool screening =
        !spec.methods.empty() &&
        std::all_of(spec.methods.begin(), spec.methods.end(),
                    [](const std::string& m) {
                      return m == "IP" || m == "SIS2" || m == "DC-SIS2";
                    });
    table = screening ? ip::run_screening_experiment(spec)
                      : ip::run_selection_experiment(spec);
  } else {
    if (a.name.empty())
      throw ip::InputError("give an experiment name or --spec-file");
    const NamedExperiment e = lookup_experiment(a.name);
    std::vector<std::string> methods = a.methods;
    if (methods.empty()) {
      methods = e.screening
                    ? std::vector<std::string>{"IP", "SIS2", "DC-SIS2"}
                    : std::vector<std::string>{
                          "SIS2-Lasso", "SIS2-L1+SICA", "DC-SIS2-Lasso",
                          "DC-SIS2-L1+SICA", "IP-Lasso", "IP-L1+SICA",
                          "Oracle"};
    }
    const std::vector<std::string> models =
        a.models.empty() ? e.models : a.models;
    for (const auto& model : models) {
      ip::ExperimentSpec spec;
      spec.model = ip::builtin_model(model, e.example, e.rho);
      spec.n = e.n;
      spec.p = e.p;
      spec.replications = a.reps;
      spec.seed = g.seed;
      spec.methods = methods;
      spec.budget_c = a.budget_c;
      spec.test_n = a.test_n;
      spec.cv_folds = a.folds;
      ip::SummaryTable t = e.screening ? ip::run_screening_experiment(spec)
                                       : ip::run_selection_experiment(spec);
      table.append(t);
    }
  }

  emit(g, g.format == "json" ? table.to_json().dump(2) + "\n" : table.to_csv());
  const std::chrono::duration<double> wall =
      std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "wall time: %.1f s\n", wall.count());
  return 0;
}

// --- oracle -----------------------------------------------------------------

struct OracleArgs {
  std::string model;
  int example = 1;
  double rho = 0.0;
  std::string cov = "identity";
  int p = 0;
  std::string beta;
  std::string gamma;
  double error_var = 1.0;
  std::string query = "snr";
  int j = 0;
  std::string feature = "overall";
  std::string indices;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ip::GaussianSpec oracle_spec(const OracleArgs& a) {
  ip::GaussianSpec spec;
  if (!a.model.empty()) {
    const ip::SimModel m = ip::builtin_model(a.model, a.example, a.rho);
    if (m.error != ip::ErrorLaw::normal)
      throw ip::InputError("the analytic oracle covers Gaussian models only");
    const int p = a.p > 0 ? a.p : m.truth.max_index() + 1;
    spec.cov = m.cov.materialize(p);
    spec.model = m.truth;
    spec.error_variance = m.error_variance();
    return spec;
  }
  if (a.p <= 0) throw ip::InputError("--p is required");
  ip::CovStructure cs;
  if (a.cov == "identity")
    cs.kind = ip::CovKind::identity;
  else if (a.cov == "ar1")
    cs.kind = ip::CovKind::ar1;
  else if (a.cov == "equicorr")
    cs.kind = ip::CovKind::equicorr;
  else if (a.cov == "tridiag" || a.cov == "tridiagonal")
    cs.kind = ip::CovKind::tridiagonal;
  else
    throw ip::InputError("--cov must be identity, ar1, equicorr, or tridiag");
  cs.rho = a.rho;
  spec.cov = cs.materialize(a.p);

  for (const auto& entry : split_list(a.beta, ',')) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw ip::InputError("--beta entries look like '1=2'");
    spec.model.set_beta(std::stoi(entry.substr(0, eq)) - 1,
                        std::stod(entry.substr(eq + 1)));
  }
  for (const auto& entry : split_list(a.gamma, ',')) {
    const auto eq = entry.find('=');
    const auto colon = entry.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon > eq)
      throw ip::InputError("--gamma entries look like '1:5=3'");
    spec.model.set_gamma(std::stoi(entry.substr(0, colon)) - 1,
                         std::stoi(entry.substr(colon + 1, eq - colon - 1)) - 1,
                         std::stod(entry.substr(eq + 1)));
  }
  spec.error_variance = a.error_var;
  return spec;
}

int run_oracle(const GlobalOptions& g, const OracleArgs& a) {
  const ip::GaussianSpec spec = oracle_spec(a);
  double value = 0.0;
  if (a.query == "cov-xsq-ysq") {
    if (a.j < 1) throw ip::InputError("--j (1-based) is required");
    value = ip::cov_xsq_ysq(spec, a.j - 1);
  } else if (a.query == "snr") {
    if (a.feature == "overall")
      value = ip::snr_overall(spec);
    else
      value = ip::snr_individual(spec, ip::FeatureId::parse(a.feature));
  } else if (a.query == "moment") {
    std::vector<int> idx;
    for (const auto& s : split_list(a.indices, ','))
      idx.push_back(std::stoi(s) - 1);
    value = ip::isserlis_moment(spec.cov, idx);
  } else {
    throw ip::InputError("--query must be cov-xsq-ysq, snr, or moment");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g\n", value);
  emit(g, buf);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage screening and regularized selection for "
               "high-dimensional interaction models"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);
  app.allow_config_extras(false);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base seed for all randomness");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--output", g.output, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  ScreenArgs sa;
  CLI::App* screen = app.add_subcommand("screen", "Rank and retain features");
  screen->add_option("--input", sa.input, "CSV dataset")->required();
  screen->add_option("--response", sa.response, "Response column (name or 1-based index)");
  screen->add_flag("--no-header", sa.no_header, "CSV has no header row");
  screen->add_option("--method", sa.method, "ip, sis, or dcsis")
      ->check(CLI::IsMember({"ip", "sis", "dcsis"}));
  screen->add_option("--top-d", sa.top_d, "Budget per retained set, or 'auto'");
  screen->add_option("--budget-c", sa.budget_c, "Multiplier c in d = floor(c n/log n)");
  screen->add_option("--threshold", sa.threshold, "Absolute-utility threshold (overrides --top-d)");
  screen->add_option("--interactions-from", sa.interactions_from, "ahat or mhat")
      ->check(CLI::IsMember({"ahat", "mhat"}));
  screen->add_flag("--no-standardize", sa.no_standardize, "Skip empirical standardization");
  screen->add_flag("--iterative", sa.iterative, "Iterative screening on residuals");
  screen->add_option("--max-features", sa.max_features, "Iterative feature budget (default n-1)");

  SelectArgs la;
  CLI::App* select = app.add_subcommand("select", "Screen, then fit a regularized model");
  select->add_option("--input", la.input, "CSV dataset")->required();
  select->add_option("--response", la.response, "Response column (name or 1-based index)");
  select->add_flag("--no-header", la.no_header, "CSV has no header row");
  select->add_option("--screening", la.screening_file, "Reuse a stored screening result (JSON)");
  select->add_option("--screen-method", la.screen_method, "ip, sis2, or dcsis2");
  select->add_option("--top-d", la.top_d, "Budget per retained set, or 'auto'");
  select->add_option("--budget-c", la.budget_c, "Multiplier c in d = floor(c n/log n)");
  select->add_option("--threshold", la.threshold, "Absolute-utility threshold");
  select->add_option("--interactions-from", la.interactions_from, "ahat or mhat")
      ->check(CLI::IsMember({"ahat", "mhat"}));
  select->add_option("--penalty", la.penalty, "lasso, enet, or l1sica")
      ->check(CLI::IsMember({"lasso", "enet", "l1sica"}));
  select->add_option("--tune", la.tune, "bic, cv, or none")
      ->check(CLI::IsMember({"auto", "bic", "cv", "none"}));
  select->add_option("--folds", la.folds, "CV folds");
  select->add_option("--lambda0", la.lambda0, "L1 weight (fixed-penalty fits)");
  select->add_option("--lambda", la.lambda, "Concave/elastic-net weight");
  select->add_option("--alpha", la.alpha, "Elastic-net mixing in [0,1]");
  select->add_option("--sica-a", la.sica_a, "SICA shape parameter");

  SimulateArgs ma;
  CLI::App* simulate = app.add_subcommand("simulate", "Reproduce a simulation table");
  simulate->add_option("name", ma.name, "Named experiment (e.g. table1-setting1)");
  simulate->add_option("--spec-file", ma.spec_file, "Experiment spec (JSON)");
  simulate->add_option("--reps", ma.reps, "Replications");
  simulate->add_option("--methods", ma.methods, "Methods subset")->delimiter(',');
  simulate->add_option("--models", ma.models, "Models subset")->delimiter(',');
  simulate->add_option("--budget-c", ma.budget_c, "Screening budget multiplier");
  simulate->add_option("--folds", ma.folds, "CV folds for Lasso methods");
  simulate->add_option("--test-n", ma.test_n, "Test rows per replication");

  OracleArgs oa;
  CLI::App* oracle = app.add_subcommand("oracle", "Analytic Gaussian-moment queries");
  oracle->add_option("--model", oa.model, "Builtin model (M1..M5, M3p, M4p)");
  oracle->add_option("--example", oa.example, "Builtin error variant (1 or 2)");
  oracle->add_option("--rho", oa.rho, "Correlation parameter");
  oracle->add_option("--cov", oa.cov, "identity, ar1, equicorr, or tridiag");
  oracle->add_option("--p", oa.p, "Covariate dimension");
  oracle->add_option("--beta", oa.beta, "Main effects, e.g. '1=2,5=2'");
  oracle->add_option("--gamma", oa.gamma, "Interactions, e.g. '1:5=3,10:15=3'");
  oracle->add_option("--error-var", oa.error_var, "Error variance");
  oracle->add_option("--query", oa.query, "cov-xsq-ysq, snr, or moment")->required();
  oracle->add_option("--j", oa.j, "Covariate index (1-based) for cov-xsq-ysq");
  oracle->add_option("--feature", oa.feature, "'overall', 'x1', or 'x1:x5' for snr");
  oracle->add_option("--indices", oa.indices, "Comma-separated indices for moment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ip::set_num_threads(g.threads);
  try {
    if (screen->parsed()) return run_screen(g, sa);
    if (select->parsed()) return run_select(g, la);
    if (simulate->parsed()) return run_simulate(g, ma);
    if (oracle->parsed()) return run_oracle(g, oa);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ip::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
