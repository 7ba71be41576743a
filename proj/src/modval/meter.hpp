#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "modval/pps.hpp"

namespace modval {

// Qubit-meter readout of modular values.  The meter starts in
// gamma |0> + gamma_bar |1>, the system couples through U = exp(-i g A x |1><1|),
// and post-selecting the system on |phi> leaves the (unnormalized) meter state
//
//   <phi|psi> [ gamma |0> + gamma_bar (A)_mod |1> ].
//
// The modular value is recovered from the meter alone: with Bloch components
// (x, y, z) of the normalized meter qubit,
//
//   (A)_mod = (gamma / gamma_bar) (x + i y) / (1 + z).

// Meter amplitudes gamma |0> + gamma_bar |1>, gamma^2 + gamma_bar^2 = 1.
struct MeterPrep {
    double gamma;
    double gamma_bar;

    explicit MeterPrep(double gamma_bar);   // gamma = sqrt(1 - gamma_bar^2)
    MeterPrep(double gamma, double gamma_bar);

    Ket ket() const;
};

// Two-qubit meter gamma |00> + gamma_bar (|01> + |10> + |11>),
// gamma^2 + 3 gamma_bar^2 = 1.
struct TwoQubitMeterPrep {
    double gamma;
    double gamma_bar;

    explicit TwoQubitMeterPrep(double gamma_bar);
    TwoQubitMeterPrep(double gamma, double gamma_bar);

    Ket ket() const;
};

struct MeterOutcome {
    Ket meter_ket;                         // unnormalized, conditioned on post-selection
    Complex post_selection_amplitude;      // <phi|psi>
    double post_selection_probability;     // ||meter_ket||^2
    std::map<std::string, Complex> extracted;  // meter basis label -> modular value
};

struct ShotRecord {
    std::uint64_t shots;
    std::string basis;  // one of X, Y, Z per meter qubit
    std::uint64_t seed;
    std::map<std::string, std::uint64_t> counts;  // outcome bitstring -> count
};

struct ModularEstimate {
    Complex value;
    double std_error;  // first-order propagation through the Bloch inversion
};

// Couple A (embedded in the ensemble's space) to a fresh meter qubit and
// post-select.  `extracted` has keys "0" (always 1) and "1" ((A)_mod).
MeterOutcome run_single_meter(const SiteObservable& obs, double g, const PrePostEnsemble& ens,
                              const MeterPrep& prep);

// Couple two observables on distinct sites to their own meter qubits
// (factors appended in that order).  Keys of `extracted`, with H = |0> and
// V = |1>: "HH" -> 1, "VH" -> (A)_mod, "HV" -> (B)_mod, "VV" -> (A+B)_mod.
// Note the first observable's value appears where *its* meter reads V.
MeterOutcome run_two_qubit_meter(const SiteObservable& obs_a, const SiteObservable& obs_b,
                                 double g, const PrePostEnsemble& ens,
                                 const TwoQubitMeterPrep& prep);

// Measure every meter qubit of `outcome.meter_ket` in the given Pauli basis
// (string of X/Y/Z, one per factor).  Outcomes are labeled by bitstrings,
// bit b meaning eigenvalue 1 - 2b.
ShotRecord sample_meter(const MeterOutcome& outcome, const std::string& basis,
                        std::uint64_t shots, std::uint64_t seed);

// Invert exact Bloch components of a single meter qubit.
ModularEstimate estimate_modular_from_bloch(double x, double y, double z, const MeterPrep& prep);

// Invert empirical Bloch components from X, Y and Z shot records of a
// single meter qubit.
ModularEstimate estimate_modular_from_shots(const ShotRecord& x_rec, const ShotRecord& y_rec,
                                            const ShotRecord& z_rec, const MeterPrep& prep);

// Controlled-Rz circuit on system qubit x meter qubit:
// U = |0><0|_m I + |1><1|_m Rz(theta), equal to exp(-i (theta/2) sigma_z x |1><1|),
// i.e. a modular-value coupling with g = theta / 2.
Operator build_crz_circuit(double theta);

struct CrzSweepPoint {
    double theta;
    Complex modular;   // (sigma_z)_mod extracted from the circuit
    Complex weak;      // <sigma_z>_w (theta-independent)
};

std::vector<CrzSweepPoint> crz_sweep(const PrePostEnsemble& ens, const MeterPrep& prep,
                                     std::span<const double> thetas);

} // namespace modval
