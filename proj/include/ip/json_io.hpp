#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ip/screening.hpp"
#include "ip/selection.hpp"

namespace ip {

// All indices are 1-based in serialized form.
nlohmann::ordered_json screening_result_to_json(const ScreeningResult& r);
ScreeningResult screening_result_from_json(const nlohmann::ordered_json& j);
std::string screening_result_to_csv(const ScreeningResult& r);

nlohmann::ordered_json fit_result_to_json(const FitResult& f);
std::string fit_result_to_csv(const FitResult& f);

nlohmann::ordered_json selection_rule_to_json(const SelectionRule& r);
SelectionRule selection_rule_from_json(const nlohmann::ordered_json& j);

}  // namespace ip
