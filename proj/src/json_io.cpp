#include "ip/json_io.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "ip/dataset.hpp"

namespace ip {

using json = nlohmann::ordered_json;

nlohmann::ordered_json selection_rule_to_json(const SelectionRule& r) {
  json j;
  if (r.kind == SelectionRule::Kind::top_d) {
    j["kind"] = "top_d";
    j["d"] = r.d;
  } else {
    j["kind"] = "threshold";
    j["tau"] = r.tau;
  }
  return j;
}

SelectionRule selection_rule_from_json(const nlohmann::ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "top_d") return SelectionRule::top_d(j.at("d").get<int>());
  if (kind == "threshold")
    return SelectionRule::threshold(j.at("tau").get<double>());
  throw InputError("unknown selection rule '" + kind + "'");
}

nlohmann::ordered_json screening_result_to_json(const ScreeningResult& r) {
  json j;
  j["omega"] = std::vector<double>(r.omega.begin(), r.omega.end());
  j["omega_star"] =
      std::vector<double>(r.omega_star.begin(), r.omega_star.end());
  const auto one_based = [](const std::vector<int>& v) {
    std::vector<int> out;
    out.reserve(v.size());
    for (int k : v) out.push_back(k + 1);
    return out;
  };
  j["a_hat"] = one_based(r.a_hat);
  j["b_hat"] = one_based(r.b_hat);
  json pairs = json::array();
  for (const auto& [k, l] : r.i_hat) pairs.push_back({k + 1, l + 1});
  j["i_hat"] = pairs;
  j["m_hat"] = one_based(r.m_hat);
  j["rule"] = {{"a", selection_rule_to_json(r.rule_a)},
               {"b", selection_rule_to_json(r.rule_b)}};
  return j;
}

ScreeningResult screening_result_from_json(const nlohmann::ordered_json& j) {
  ScreeningResult r;
  const auto omega = j.at("omega").get<std::vector<double>>();
  const auto omega_star = j.at("omega_star").get<std::vector<double>>();
  r.omega = Eigen::Map<const Eigen::VectorXd>(omega.data(), omega.size());
  r.omega_star =
      Eigen::Map<const Eigen::VectorXd>(omega_star.data(), omega_star.size());
  const auto zero_based = [](std::vector<int> v) {
    for (int& k : v) {
      if (k < 1) throw InputError("indices in files are 1-based");
      --k;
    }
    return v;
  };
  r.a_hat = zero_based(j.at("a_hat").get<std::vector<int>>());
  r.b_hat = zero_based(j.at("b_hat").get<std::vector<int>>());
  r.m_hat = zero_based(j.at("m_hat").get<std::vector<int>>());
  for (const auto& kl : j.at("i_hat"))
    r.i_hat.emplace_back(kl.at(0).get<int>() - 1, kl.at(1).get<int>() - 1);
  r.rule_a = selection_rule_from_json(j.at("rule").at("a"));
  r.rule_b = selection_rule_from_json(j.at("rule").at("b"));
  return r;
}

std::string screening_result_to_csv(const ScreeningResult& r) {
  std::ostringstream out;
  out << "index,omega,omega_star,in_a_hat,in_b_hat,in_m_hat\n";
  const auto has = [](const std::vector<int>& v, int k) {
    return std::binary_search(v.begin(), v.end(), k);
  };
  for (Eigen::Index k = 0; k < r.omega.size(); ++k) {
    out << (k + 1) << ',' << format_double(r.omega[k]) << ','
        << format_double(r.omega_star[k]) << ',' << has(r.a_hat, int(k)) << ','
        << has(r.b_hat, int(k)) << ',' << has(r.m_hat, int(k)) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json fit_result_to_json(const FitResult& f) {
  json j;
  j["intercept"] = f.intercept;
  json coefs = json::array();
  for (const auto& [feature, value] : f.theta) {
    json c;
    c["feature"] = feature.name();
    c["value"] = value;
    coefs.push_back(c);
  }
  j["coefficients"] = coefs;
  j["objective"] = f.objective;
  j["converged"] = f.converged;
  j["kkt_max_violation"] = f.kkt_max_violation;
  return j;
}

std::string fit_result_to_csv(const FitResult& f) {
  std::ostringstream out;
  out << "feature,value\n";
  out << "(intercept)," << format_double(f.intercept) << '\n';
  for (const auto& [feature, value] : f.theta)
    out << feature.name() << ',' << format_double(value) << '\n';
  return out.str();
}

}  // namespace ip
