#include "modval/scenarios.hpp"

#include <cmath>

namespace modval {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

// Meter amplitude used for the worked readouts; small enough to be in the
// weak-coupling spirit, large enough to keep the numbers readable.
constexpr double kScenarioGammaBar = 0.1;

Ket qubit0() { return basis_ket(2, 0); }
Ket qubit1() { return basis_ket(2, 1); }

Operator pi0() { return projector(basis_ket(2, 0)); }

SiteObservable two_level(std::size_t site, const Operator& local) {
    return SiteObservable::with_eigenvalues(site, local);
}

} // namespace

PrePostEnsemble epr_ensemble() {
    Ket up = qubit0(), dn = qubit1();
    Ket pre = scale(kInvSqrt2, tensor_kets({up, dn}) - tensor_kets({dn, up}));
    Ket up_y = scale(kInvSqrt2, up + scale(kI, dn));
    Ket up_x = scale(kInvSqrt2, up + dn);
    return PrePostEnsemble(pre, tensor_kets({up_y, up_x}));
}

ScenarioReport scenario_epr(double g) {
    PrePostEnsemble ens = epr_ensemble();
    SiteObservable sx1 = two_level(0, sigma_x());
    SiteObservable sy2 = two_level(1, sigma_y());

    ScenarioReport report;
    report.name = "epr";
    report.g = g;
    report.dims = ens.shape().dims();
    report.pre = "(|up> kron |dn> - |dn> kron |up>) / sqrt(2)";
    report.post = "((|up> + i |dn>) / sqrt(2)) kron ((|up> + |dn>) / sqrt(2))";
    report.overlap = ens.overlap();

    report.weak_values = {
        {"sigma_x(1)", weak_value(embed(sx1, ens.shape()), ens)},
        {"sigma_y(2)", weak_value(embed(sy2, ens.shape()), ens)},
        {"sigma_x(1) sigma_y(2)", weak_joint(sx1, sy2, ens)},
    };
    report.modular_values = {
        {"sigma_x(1)", modular_value(embed(sx1, ens.shape()), g, ens)},
        {"sigma_y(2)", modular_value(embed(sy2, ens.shape()), g, ens)},
        {"sigma_x(1)+sigma_y(2)", modular_of_sum(ObservableSum(ens.shape(), {sx1, sy2}), g, ens)},
    };
    report.sum_rule = sum_rule_report(ObservableSum(ens.shape(), {sx1, sy2}), g, ens);
    report.product_rule = product_rule_report(sx1, sy2, ens);
    report.notes = {
        "All three weak values equal -1, so the product rule fails: "
        "<AB>_w = -1 but <A>_w <B>_w = +1.",
        "The sum-rule gap stays nonzero for every coupling g.",
    };
    return report;
}

PrePostEnsemble hardy_ensemble() {
    Ket o = qubit0(), no = qubit1();
    Ket pre = scale(1.0 / std::sqrt(3.0), tensor_kets({o, no}) + tensor_kets({no, o}) +
                                              tensor_kets({no, no}));
    Ket minus = o - no;
    Ket post = scale(0.5, tensor_kets({minus, minus}));
    return PrePostEnsemble(pre, post);
}

ScenarioReport scenario_hardy(double g) {
    PrePostEnsemble ens = hardy_ensemble();
    SiteObservable pi_pos = two_level(0, pi0());
    SiteObservable pi_ele = two_level(1, pi0());

    ScenarioReport report;
    report.name = "hardy";
    report.g = g;
    report.dims = ens.shape().dims();
    report.pre = "(|O> kron |NO> + |NO> kron |O> + |NO> kron |NO>) / sqrt(3)";
    report.post = "((|O> - |NO>) kron (|O> - |NO>)) / 2";
    report.overlap = ens.overlap();

    report.weak_values = {
        {"Pi_O(+)", weak_value(embed(pi_pos, ens.shape()), ens)},
        {"Pi_O(-)", weak_value(embed(pi_ele, ens.shape()), ens)},
        {"Pi_O(+) Pi_O(-)", weak_joint(pi_pos, pi_ele, ens)},
    };
    report.modular_values = {
        {"Pi_O(+)", modular_value(embed(pi_pos, ens.shape()), g, ens)},
        {"Pi_O(-)", modular_value(embed(pi_ele, ens.shape()), g, ens)},
        {"Pi_O(+)+Pi_O(-)",
         modular_of_sum(ObservableSum(ens.shape(), {pi_pos, pi_ele}), g, ens)},
    };
    report.sum_rule = sum_rule_report(ObservableSum(ens.shape(), {pi_pos, pi_ele}), g, ens);
    report.product_rule = product_rule_report(pi_pos, pi_ele, ens);
    report.notes = {
        "Each particle is weakly in the overlap region (weak value 1) yet the "
        "joint weak value vanishes.",
        "The sum-rule gap equals -1 for every coupling g.",
    };
    return report;
}

PrePostEnsemble cheshire_ensemble() {
    Ket h = qubit0(), v = qubit1(), l = qubit0(), r = qubit1();
    Ket pre = scale(kInvSqrt2, tensor_kets({h, scale(kI, l) + r}));
    Ket post = scale(-kI * kInvSqrt2, tensor_kets({h, l}) + tensor_kets({v, r}));
    return PrePostEnsemble(pre, post);
}

ScenarioReport scenario_cheshire(double g) {
    PrePostEnsemble ens = cheshire_ensemble();
    SiteObservable stokes = two_level(0, sigma_z());  // S = |H><H| - |V><V|
    SiteObservable pi_l = two_level(1, pi0());
    SiteObservable pi_r = two_level(1, projector(basis_ket(2, 1)));

    ScenarioReport report;
    report.name = "cheshire";
    report.g = g;
    report.dims = ens.shape().dims();
    report.pre = "(|H> kron (i |L> + |R>)) / sqrt(2)";
    report.post = "(0 - i) * (|H> kron |L> + |V> kron |R>) / sqrt(2)";
    report.overlap = ens.overlap();

    report.weak_values = {
        {"Pi_L", weak_value(embed(pi_l, ens.shape()), ens)},
        {"Pi_R", weak_value(embed(pi_r, ens.shape()), ens)},
        {"S", weak_value(embed(stokes, ens.shape()), ens)},
        {"S Pi_L", weak_joint(stokes, pi_l, ens)},
        {"S Pi_R", weak_joint(stokes, pi_r, ens)},
    };
    report.modular_values = {
        {"Pi_L", modular_value(embed(pi_l, ens.shape()), g, ens)},
        {"S", modular_value(embed(stokes, ens.shape()), g, ens)},
        {"S+Pi_L", modular_of_sum(ObservableSum(ens.shape(), {stokes, pi_l}), g, ens)},
    };
    report.scalars = {{"meter_gamma_bar", kScenarioGammaBar}};

    TwoQubitMeterPrep prep(kScenarioGammaBar);
    MeterOutcome outcome = run_two_qubit_meter(stokes, pi_l, g, ens, prep);
    for (const auto& [label, value] : outcome.extracted)
        report.meter_extracted.emplace_back(label, value);

    report.sum_rule = sum_rule_report(ObservableSum(ens.shape(), {stokes, pi_l}), g, ens);
    report.product_rule = product_rule_report(stokes, pi_l, ens);
    report.notes = {
        "The path projectors put the particle in the left arm while the joint "
        "weak values put all of its polarization signal there too: with these "
        "states and S diagonal in H/V, S Pi_L has weak value 1 and S Pi_R has 0; "
        "the values are a {0, 1} pair that sums to <S>_w.",
        "S couples to the first meter qubit and Pi_L to the second, so the S "
        "value reads out at VH, the Pi_L value at HV, and their sum at VV.",
        "The product rule happens to hold for (S, Pi_L) here, so the modular "
        "value of the sum factorizes into the product of modular values.",
    };
    return report;
}

PrePostEnsemble crz_ensemble() {
    Ket up = qubit0(), dn = qubit1();
    Ket pre = scale(kInvSqrt2, up + dn);
    Ket post = scale(0.5, scale(std::sqrt(2.0 + std::sqrt(2.0)), up) -
                              scale(std::sqrt(2.0 - std::sqrt(2.0)), dn));
    return PrePostEnsemble(pre, post);
}

ScenarioReport scenario_crz(double theta) {
    PrePostEnsemble ens = crz_ensemble();
    const double g = theta / 2.0;
    SiteObservable sz = two_level(0, sigma_z());

    ScenarioReport report;
    report.name = "crz";
    report.g = g;
    report.theta = theta;
    report.dims = ens.shape().dims();
    report.pre = "(|up> + |dn>) / sqrt(2)";
    report.post = "(sqrt(2 + sqrt(2)) |up> - sqrt(2 - sqrt(2)) |dn>) / 2";
    report.overlap = ens.overlap();

    Complex weak = weak_value(embed(sz, ens.shape()), ens);
    Complex modular = modular_value(embed(sz, ens.shape()), g, ens);
    const double thetas[] = {theta};
    Complex circuit = crz_sweep(ens, MeterPrep(kScenarioGammaBar), thetas)[0].modular;

    report.weak_values = {{"sigma_z", weak}};
    report.modular_values = {
        {"sigma_z", modular},
        {"sigma_z_circuit", circuit},
        {"sigma_z_linearized", Complex(1.0, 0.0) - kI * g * weak},
    };
    report.scalars = {
        {"abs_modular", std::abs(modular)},
        {"meter_gamma_bar", kScenarioGammaBar},
    };

    MeterOutcome outcome =
        run_single_meter(sz, g, ens, MeterPrep(kScenarioGammaBar));
    for (const auto& [label, value] : outcome.extracted)
        report.meter_extracted.emplace_back(label, value);

    report.sum_rule.reset();
    report.product_rule.reset();
    report.notes = {
        "The controlled-Rz(theta) gate realizes the coupling exp(-i g sigma_z x "
        "|1><1|) with g = theta / 2.",
        "|(sigma_z)_mod| runs between 1 and the weak value 1 + sqrt(2), peaking "
        "at theta = pi.",
        "As theta -> 0 the modular value tends to 1, not to the weak value; the "
        "first-order calibration 1 - i g <sigma_z>_w recovers it.",
    };
    return report;
}

ScenarioReport run_scenario(const std::string& name, double coupling) {
    if (name == "epr")
        return scenario_epr(coupling);
    if (name == "hardy")
        return scenario_hardy(coupling);
    if (name == "cheshire")
        return scenario_cheshire(coupling);
    if (name == "crz")
        return scenario_crz(coupling);
    throw DomainError("run_scenario: unknown scenario '" + name +
                      "' (expected epr, hardy, cheshire or crz)");
}

std::vector<ScenarioSweepPoint> scenario_sweep(const std::string& name, double start, double stop,
                                               std::size_t count) {
    if (count == 0)
        throw DomainError("scenario_sweep: need at least one point");
    std::vector<double> couplings(count);
    for (std::size_t k = 0; k < count; ++k)
        couplings[k] = count == 1 ? start
                                  : start + (stop - start) * static_cast<double>(k) /
                                                static_cast<double>(count - 1);

    std::vector<ScenarioSweepPoint> points;
    points.reserve(count);
    if (name == "crz") {
        auto rows = crz_sweep(crz_ensemble(), MeterPrep(kScenarioGammaBar), couplings);
        for (const auto& row : rows)
            points.push_back({row.theta / 2.0, row.modular, row.weak});
        return points;
    }

    PrePostEnsemble ens = name == "epr"     ? epr_ensemble()
                          : name == "hardy" ? hardy_ensemble()
                          : name == "cheshire"
                              ? cheshire_ensemble()
                              : throw DomainError("scenario_sweep: unknown scenario '" + name +
                                                  "' (expected epr, hardy, cheshire or crz)");
    std::vector<SiteObservable> terms;
    if (name == "epr")
        terms = {two_level(0, sigma_x()), two_level(1, sigma_y())};
    else if (name == "hardy")
        terms = {two_level(0, pi0()), two_level(1, pi0())};
    else
        terms = {two_level(0, sigma_z()), two_level(1, pi0())};

    ObservableSum sum(ens.shape(), terms);
    Complex weak = 0;
    for (const auto& term : terms)
        weak += weak_value(embed(term, ens.shape()), ens);
    for (double g : couplings)
        points.push_back({g, modular_of_sum(sum, g, ens), weak});
    return points;
}

} // namespace modval
