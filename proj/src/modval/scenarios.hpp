#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modval/composite.hpp"
#include "modval/meter.hpp"

namespace modval {

// Worked pre-/post-selected ensembles where the failure of the modular-value
// sum rule explains a paradox.  Every number in a report is computed through
// the library; nothing is hard-coded.  State descriptions use the expression
// language understood by parse()/evaluate().
struct ScenarioReport {
    std::string name;
    double g = 0.0;
    std::optional<double> theta;  // crz only; g = theta / 2
    std::vector<std::size_t> dims;
    std::string pre;
    std::string post;
    Complex overlap;
    std::vector<std::pair<std::string, Complex>> weak_values;
    std::vector<std::pair<std::string, Complex>> modular_values;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::pair<std::string, Complex>> meter_extracted;
    std::optional<SumRuleReport> sum_rule;
    std::optional<ProductRuleReport> product_rule;
    std::vector<std::string> notes;
};

// Singlet pair post-selected on |up_y> |up_x>; sigma_x on particle 1 and
// sigma_y on particle 2 all have weak value -1, breaking the product rule.
PrePostEnsemble epr_ensemble();
ScenarioReport scenario_epr(double g);

// Crossed interferometers post-selected on coincident clicks; both
// overlap-region projectors have weak value 1 but their product 0.
PrePostEnsemble hardy_ensemble();
ScenarioReport scenario_hardy(double g);

// Polarization (factor 0) and path (factor 1) of one photon separate under
// post-selection; includes the two-qubit-meter readout.
PrePostEnsemble cheshire_ensemble();
ScenarioReport scenario_cheshire(double g);

// Single qubit coupled through a controlled-Rz(theta) gate, g = theta / 2.
// The weak value 1 + sqrt(2) sits at the theta = pi peak of |(sigma_z)_mod|.
PrePostEnsemble crz_ensemble();
ScenarioReport scenario_crz(double theta);

// Dispatch by name ("epr", "hardy", "cheshire", "crz"); for crz the coupling
// argument is theta, otherwise it is g.
ScenarioReport run_scenario(const std::string& name, double coupling);

struct ScenarioSweepPoint {
    double g;
    Complex modular;
    Complex weak;
};

// Sweep the scenario's headline observable (the sum observable; sigma_z for
// crz) over `count` evenly spaced couplings.  For crz the range is in theta
// and each point records g = theta / 2.
std::vector<ScenarioSweepPoint> scenario_sweep(const std::string& name, double start,
                                               double stop, std::size_t count);

} // namespace modval
