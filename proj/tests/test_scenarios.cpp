#include "support.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "modval/json_io.hpp"
#include "modval/scenarios.hpp"

using namespace modval;
using testutil::kI;

namespace {

const double kPi = std::acos(-1.0);

Complex labeled(const std::vector<std::pair<std::string, Complex>>& entries,
                const std::string& label) {
    for (const auto& [key, value] : entries)
        if (key == label)
            return value;
    FAIL("missing label '", label, "'");
    return {};
}

// Structural comparison with a numeric tolerance, so regenerated fixtures
// survive harmless last-digit changes.
void compare_json(const nlohmann::json& got, const nlohmann::json& want,
                  const std::string& path) {
    if (want.is_number()) {
        REQUIRE_MESSAGE(got.is_number(), path, ": expected a number");
        CHECK_MESSAGE(std::abs(got.get<double>() - want.get<double>()) <= 1e-9, path, ": ",
                      got.dump(), " != ", want.dump());
        return;
    }
    if (want.is_object()) {
        REQUIRE_MESSAGE(got.is_object(), path, ": expected an object");
        CHECK_MESSAGE(got.size() == want.size(), path, ": key sets differ");
        for (const auto& [key, value] : want.items()) {
            REQUIRE_MESSAGE(got.contains(key), path, ": missing key '", key, "'");
            compare_json(got.at(key), value, path + "." + key);
        }
        return;
    }
    if (want.is_array()) {
        REQUIRE_MESSAGE(got.is_array(), path, ": expected an array");
        REQUIRE_MESSAGE(got.size() == want.size(), path, ": length differs");
        for (std::size_t k = 0; k < want.size(); ++k)
            compare_json(got.at(k), want.at(k), path + "[" + std::to_string(k) + "]");
        return;
    }
    CHECK_MESSAGE(got == want, path, ": ", got.dump(), " != ", want.dump());
}

void check_against_golden(const ScenarioReport& report, const std::string& file) {
    std::string full = std::string(MODVAL_GOLDEN_DIR) + "/" + file;
    std::ifstream in(full);
    REQUIRE_MESSAGE(in.good(), "golden fixture ", full, " is missing");
    nlohmann::json want = nlohmann::json::parse(in);
    compare_json(to_json(report), want, file);
}

} // namespace

TEST_CASE("spin-pair scenario") {
    double g = 0.7;
    ScenarioReport report = run_scenario("epr", g);
    CHECK(report.name == "epr");
    CHECK(report.dims == std::vector<std::size_t>{2, 2});
    CHECK_CPLX(report.overlap, Complex(1.0, 1.0) / (2.0 * std::sqrt(2.0)), 1e-13);

    CHECK_CPLX(labeled(report.weak_values, "sigma_x(1)"), -1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "sigma_y(2)"), -1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "sigma_x(1) sigma_y(2)"), -1.0, 1e-13);

    Complex e_ig = std::exp(kI * g);
    CHECK_CPLX(labeled(report.modular_values, "sigma_x(1)"), e_ig, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "sigma_y(2)"), e_ig, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "sigma_x(1)+sigma_y(2)"),
               1.0 + kI * std::sin(2.0 * g), 1e-12);

    REQUIRE(report.sum_rule.has_value());
    CHECK_CPLX(report.sum_rule->gap, 1.0 + kI * std::sin(2.0 * g) - 2.0 * e_ig, 1e-12);
    REQUIRE(report.product_rule.has_value());
    CHECK_CPLX(report.product_rule->gap, -2.0, 1e-12);  // -1 - (-1)(-1)

    check_against_golden(report, "epr.json");
}

TEST_CASE("overlapping-interferometer scenario") {
    double g = 0.7;
    ScenarioReport report = run_scenario("hardy", g);
    CHECK_CPLX(report.overlap, -1.0 / (2.0 * std::sqrt(3.0)), 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "Pi_O(+)"), 1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "Pi_O(-)"), 1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "Pi_O(+) Pi_O(-)"), 0.0, 1e-13);

    Complex e_mig = std::exp(-kI * g);
    CHECK_CPLX(labeled(report.modular_values, "Pi_O(+)"), e_mig, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "Pi_O(+)+Pi_O(-)"), 2.0 * e_mig - 1.0, 1e-12);
    REQUIRE(report.sum_rule.has_value());
    CHECK_CPLX(report.sum_rule->gap, -1.0, 1e-12);
    REQUIRE(report.product_rule.has_value());
    CHECK_CPLX(report.product_rule->gap, -1.0, 1e-13);

    check_against_golden(report, "hardy.json");
}

TEST_CASE("separating-photon scenario") {
    double g = 0.7;
    ScenarioReport report = run_scenario("cheshire", g);
    CHECK_CPLX(report.overlap, -0.5, 1e-14);

    CHECK_CPLX(labeled(report.weak_values, "Pi_L"), 1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "Pi_R"), 0.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "S"), 1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "S Pi_L"), 1.0, 1e-13);
    CHECK_CPLX(labeled(report.weak_values, "S Pi_R"), 0.0, 1e-13);

    Complex e_mig = std::exp(-kI * g);
    CHECK_CPLX(labeled(report.modular_values, "Pi_L"), e_mig, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "S"), e_mig, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "S+Pi_L"), e_mig * e_mig, 1e-12);

    // Here the product rule holds, so the sum's modular value factorizes.
    REQUIRE(report.product_rule.has_value());
    CHECK(std::abs(report.product_rule->gap) < 1e-13);
    CHECK_CPLX(labeled(report.modular_values, "S+Pi_L"),
               labeled(report.modular_values, "S") * labeled(report.modular_values, "Pi_L"),
               1e-12);

    CHECK_CPLX(labeled(report.meter_extracted, "HH"), 1.0, 1e-12);
    CHECK_CPLX(labeled(report.meter_extracted, "VH"), e_mig, 1e-12);
    CHECK_CPLX(labeled(report.meter_extracted, "HV"), e_mig, 1e-12);
    CHECK_CPLX(labeled(report.meter_extracted, "VV"), e_mig * e_mig, 1e-12);

    check_against_golden(report, "cheshire.json");
}

TEST_CASE("controlled-rz scenario") {
    double theta = 1.8;
    double g = theta / 2.0;
    ScenarioReport report = run_scenario("crz", theta);
    REQUIRE(report.theta.has_value());
    CHECK(*report.theta == theta);
    CHECK(report.g == g);
    CHECK_CPLX(report.overlap, std::sin(kPi / 8.0), 1e-13);

    const double silver = 1.0 + std::sqrt(2.0);
    CHECK_CPLX(labeled(report.weak_values, "sigma_z"), silver, 1e-12);
    Complex expect = std::cos(g) - kI * silver * std::sin(g);
    CHECK_CPLX(labeled(report.modular_values, "sigma_z"), expect, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "sigma_z_circuit"), expect, 1e-12);
    CHECK_CPLX(labeled(report.modular_values, "sigma_z_linearized"), 1.0 - kI * g * silver,
               1e-12);
    CHECK_CPLX(labeled(report.meter_extracted, "1"), expect, 1e-12);

    bool found_abs = false;
    for (const auto& [key, value] : report.scalars)
        if (key == "abs_modular") {
            found_abs = true;
            CHECK(value == doctest::Approx(std::abs(expect)).epsilon(1e-12));
        }
    CHECK(found_abs);

    check_against_golden(report, "crz.json");
}

TEST_CASE("scenario dispatch rejects unknown names") {
    CHECK_THROWS_AS(run_scenario("bell", 0.5), DomainError);
    CHECK_THROWS_AS(scenario_sweep("bell", 0.0, 1.0, 3), DomainError);
    CHECK_THROWS_AS(scenario_sweep("epr", 0.0, 1.0, 0), DomainError);
}

TEST_CASE("scenario sweeps trace the closed-form curves") {
    auto points = scenario_sweep("epr", -1.0, 1.0, 9);
    REQUIRE(points.size() == 9);
    CHECK(points.front().g == doctest::Approx(-1.0));
    CHECK(points.back().g == doctest::Approx(1.0));
    for (const auto& p : points) {
        CHECK_CPLX(p.modular, 1.0 + kI * std::sin(2.0 * p.g), 1e-12);
        CHECK_CPLX(p.weak, -2.0, 1e-12);  // sum of the two weak values
    }

    auto hardy = scenario_sweep("hardy", 0.2, 1.4, 4);
    for (const auto& p : hardy)
        CHECK_CPLX(p.modular, 2.0 * std::exp(-kI * p.g) - 1.0, 1e-12);

    // crz sweeps theta; each point records g = theta / 2.
    auto crz = scenario_sweep("crz", 0.0, 2.0 * kPi, 5);
    REQUIRE(crz.size() == 5);
    CHECK(crz[2].g == doctest::Approx(kPi / 2.0));
    const double silver = 1.0 + std::sqrt(2.0);
    CHECK(std::abs(crz[2].modular) == doctest::Approx(silver).epsilon(1e-12));
    CHECK(std::abs(crz[0].modular) == doctest::Approx(1.0).epsilon(1e-12));

    auto single = scenario_sweep("epr", 0.4, 9.9, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].g == doctest::Approx(0.4));
}
