#include "modval/json_io.hpp"

#include <charconv>

namespace modval {

using nlohmann::json;

std::string format_double(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw Error("format_double: conversion failed");
    return std::string(buf, end);
}

json to_json(Complex z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json to_json(const Ket& k) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < k.amplitudes().size(); ++i) {
        amps.push_back(k.amplitudes()(i).real());
        amps.push_back(k.amplitudes()(i).imag());
    }
    return json{{"dims", k.shape().dims()}, {"amplitudes", std::move(amps)}};
}

json to_json(const Operator& op) {
    json entries = json::array();
    for (Eigen::Index r = 0; r < op.matrix().rows(); ++r)
        for (Eigen::Index c = 0; c < op.matrix().cols(); ++c) {
            entries.push_back(op.matrix()(r, c).real());
            entries.push_back(op.matrix()(r, c).imag());
        }
    return json{{"dims", op.shape().dims()},
                {"entries", std::move(entries)},
                {"hermitian", op.is_hermitian()}};
}

json to_json(const TwoLevelCoeffs& coeffs) {
    return json{{"a", to_json(coeffs.a)},
                {"b", to_json(coeffs.b)},
                {"lambda1", coeffs.lambda1},
                {"lambda2", coeffs.lambda2},
                {"g", coeffs.g}};
}

json to_json(const SumRuleReport& report) {
    json terms = json::array();
    for (const auto& term : report.per_term)
        terms.push_back(json{{"site", term.site},
                             {"weak", to_json(term.weak)},
                             {"modular", to_json(term.modular)}});
    return json{{"g", report.g},
                {"mod_of_sum", to_json(report.mod_of_sum)},
                {"sum_of_mods", to_json(report.sum_of_mods)},
                {"gap", to_json(report.gap)},
                {"per_term", std::move(terms)}};
}

json to_json(const ProductRuleReport& report) {
    return json{{"joint_weak", to_json(report.joint_weak)},
                {"product_of_weaks", to_json(report.product_of_weaks)},
                {"gap", to_json(report.gap)}};
}

json to_json(const ProductImpliesSumReport& report) {
    return json{{"premise", to_json(report.premise)},
                {"premise_holds", report.premise_holds},
                {"premise_eps", report.premise_eps},
                {"mod_of_sum", to_json(report.mod_of_sum)},
                {"expansion", to_json(report.expansion)},
                {"product_of_mods", to_json(report.product_of_mods)}};
}

json to_json(const MeterOutcome& outcome) {
    json extracted = json::object();
    for (const auto& [label, value] : outcome.extracted)
        extracted[label] = to_json(value);
    return json{{"meter_ket", to_json(outcome.meter_ket)},
                {"post_selection_amplitude", to_json(outcome.post_selection_amplitude)},
                {"post_selection_probability", outcome.post_selection_probability},
                {"extracted", std::move(extracted)}};
}

json to_json(const ShotRecord& record) {
    json counts = json::object();
    for (const auto& [label, count] : record.counts)
        counts[label] = count;
    return json{{"shots", record.shots},
                {"basis", record.basis},
                {"seed", record.seed},
                {"counts", std::move(counts)}};
}

json to_json(const ModularEstimate& estimate) {
    return json{{"value", to_json(estimate.value)}, {"std_error", estimate.std_error}};
}

json to_json(const ScenarioReport& report) {
    auto labeled_complex = [](const std::vector<std::pair<std::string, Complex>>& entries) {
        json obj = json::object();
        for (const auto& [label, value] : entries)
            obj[label] = to_json(value);
        return obj;
    };

    json out{{"name", report.name},
             {"g", report.g},
             {"dims", report.dims},
             {"pre", report.pre},
             {"post", report.post},
             {"overlap", to_json(report.overlap)},
             {"weak_values", labeled_complex(report.weak_values)},
             {"modular_values", labeled_complex(report.modular_values)},
             {"notes", report.notes}};
    if (report.theta)
        out["theta"] = *report.theta;
    if (!report.scalars.empty()) {
        json scalars = json::object();
        for (const auto& [label, value] : report.scalars)
            scalars[label] = value;
        out["scalars"] = std::move(scalars);
    }
    if (!report.meter_extracted.empty())
        out["meter_extracted"] = labeled_complex(report.meter_extracted);
    if (report.sum_rule)
        out["sum_rule"] = to_json(*report.sum_rule);
    if (report.product_rule)
        out["product_rule"] = to_json(*report.product_rule);
    return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "g,re_mod,im_mod,abs_mod,re_weak,im_weak\n";
    for (const auto& row : rows) {
        out += format_double(row.g);
        out += ',';
        out += format_double(row.modular.real());
        out += ',';
        out += format_double(row.modular.imag());
        out += ',';
        out += format_double(std::abs(row.modular));
        out += ',';
        out += format_double(row.weak.real());
        out += ',';
        out += format_double(row.weak.imag());
        out += '\n';
    }
    return out;
}

} // namespace modval
