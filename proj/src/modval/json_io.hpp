#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "modval/meter.hpp"
#include "modval/scenarios.hpp"

namespace modval {

// Locale-independent, shortest round-trip decimal form.
std::string format_double(double value);

nlohmann::json to_json(Complex z);
nlohmann::json to_json(const Ket& k);
nlohmann::json to_json(const Operator& op);
nlohmann::json to_json(const TwoLevelCoeffs& coeffs);
nlohmann::json to_json(const SumRuleReport& report);
nlohmann::json to_json(const ProductRuleReport& report);
nlohmann::json to_json(const ProductImpliesSumReport& report);
nlohmann::json to_json(const MeterOutcome& outcome);
nlohmann::json to_json(const ShotRecord& record);
nlohmann::json to_json(const ModularEstimate& estimate);
nlohmann::json to_json(const ScenarioReport& report);

struct SweepRow {
    double g;
    Complex modular;
    Complex weak;
};

// Header: g,re_mod,im_mod,abs_mod,re_weak,im_weak
std::string sweep_csv(std::span<const SweepRow> rows);

} // namespace modval
