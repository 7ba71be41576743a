#include "modval/meter.hpp"

#include <cmath>

#include "modval/rng.hpp"

namespace modval {

namespace {

constexpr double kAmplitudeTol = 1e-10;

void check_amplitudes(double gamma, double gamma_bar, double weight, const char* who) {
    if (!(gamma > 0.0) || !(gamma_bar > 0.0))
        throw DomainError(std::string(who) + ": both meter amplitudes must be positive");
    double sum = gamma * gamma + weight * gamma_bar * gamma_bar;
    if (std::abs(sum - 1.0) > kAmplitudeTol)
        throw DomainError(std::string(who) + ": amplitudes are not normalized");
}

// Contract the system factors of `out` (system x meter ordering) against the
// post-selected state, leaving the unnormalized meter amplitudes.
Vector project_onto_post(const Vector& out, const Vector& post, std::size_t meter_dim) {
    const auto md = static_cast<Eigen::Index>(meter_dim);
    Vector meter = Vector::Zero(md);
    for (Eigen::Index s = 0; s < post.size(); ++s)
        for (Eigen::Index m = 0; m < md; ++m)
            meter(m) += std::conj(post(s)) * out(s * md + m);
    return meter;
}

// Rows are the bras of the single-qubit measurement basis for X, Y or Z.
Matrix basis_rotation(char axis) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix r(2, 2);
    switch (axis) {
    case 'X':
        r << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
        return r;
    case 'Y':
        r << inv_sqrt2, Complex(0, -inv_sqrt2), inv_sqrt2, Complex(0, inv_sqrt2);
        return r;
    case 'Z':
        return Matrix::Identity(2, 2);
    default:
        throw DomainError(std::string("sample_meter: basis axis '") + axis +
                          "' is not one of X, Y, Z");
    }
}

double record_mean(const ShotRecord& rec, char expected_axis) {
    if (rec.basis.size() != 1 || rec.basis[0] != expected_axis)
        throw DomainError(std::string("estimate_modular_from_shots: expected a ") + expected_axis +
                          "-basis record, got basis '" + rec.basis + "'");
    if (rec.shots == 0)
        throw DomainError("estimate_modular_from_shots: record has no shots");
    std::int64_t diff = 0;
    std::uint64_t total = 0;
    for (const auto& [label, count] : rec.counts) {
        if (label != "0" && label != "1")
            throw DomainError("estimate_modular_from_shots: unexpected outcome label '" + label +
                              "'");
        diff += (label == "0") ? static_cast<std::int64_t>(count)
                               : -static_cast<std::int64_t>(count);
        total += count;
    }
    if (total != rec.shots)
        throw DomainError("estimate_modular_from_shots: counts do not add up to the shot total");
    return static_cast<double>(diff) / static_cast<double>(rec.shots);
}

} // namespace

MeterPrep::MeterPrep(double gamma_bar_) : gamma_bar(gamma_bar_) {
    if (!(gamma_bar > 0.0) || !(gamma_bar < 1.0))
        throw DomainError("MeterPrep: gamma_bar must lie in (0, 1)");
    gamma = std::sqrt(1.0 - gamma_bar * gamma_bar);
}

MeterPrep::MeterPrep(double gamma_, double gamma_bar_) : gamma(gamma_), gamma_bar(gamma_bar_) {
    check_amplitudes(gamma, gamma_bar, 1.0, "MeterPrep");
}

Ket MeterPrep::ket() const {
    Vector v(2);
    v << gamma, gamma_bar;
    return Ket(HilbertShape({2}), std::move(v));
}

TwoQubitMeterPrep::TwoQubitMeterPrep(double gamma_bar_) : gamma_bar(gamma_bar_) {
    if (!(gamma_bar > 0.0) || !(gamma_bar < 1.0 / std::sqrt(3.0)))
        throw DomainError("TwoQubitMeterPrep: gamma_bar must lie in (0, 1/sqrt(3))");
    gamma = std::sqrt(1.0 - 3.0 * gamma_bar * gamma_bar);
}

TwoQubitMeterPrep::TwoQubitMeterPrep(double gamma_, double gamma_bar_)
    : gamma(gamma_), gamma_bar(gamma_bar_) {
    check_amplitudes(gamma, gamma_bar, 3.0, "TwoQubitMeterPrep");
}

Ket TwoQubitMeterPrep::ket() const {
    Vector v(4);
    v << gamma, gamma_bar, gamma_bar, gamma_bar;
    return Ket(HilbertShape({2, 2}), std::move(v));
}

MeterOutcome run_single_meter(const SiteObservable& obs, double g, const PrePostEnsemble& ens,
                              const MeterPrep& prep) {
    const HilbertShape& sys = ens.shape();
    Operator exp_a = exp_spectral(embed(obs, sys), g);
    Operator p0 = projector(basis_ket(2, 0));
    Operator p1 = projector(basis_ket(2, 1));
    Operator u = tensor_ops({identity_op(sys), p0}) + tensor_ops({exp_a, p1});

    Ket joint = tensor_kets({ens.pre(), prep.ket()});
    Ket out = apply(u, joint);
    Vector meter = project_onto_post(out.amplitudes(), ens.post().amplitudes(), 2);

    MeterOutcome result{Ket(HilbertShape({2}), meter), ens.overlap(), meter.squaredNorm(), {}};
    result.extracted["0"] = meter(0) / (prep.gamma * ens.overlap());
    result.extracted["1"] = meter(1) / (prep.gamma_bar * ens.overlap());
    return result;
}

MeterOutcome run_two_qubit_meter(const SiteObservable& obs_a, const SiteObservable& obs_b,
                                 double g, const PrePostEnsemble& ens,
                                 const TwoQubitMeterPrep& prep) {
    if (obs_a.site == obs_b.site)
        throw ShapeError("run_two_qubit_meter: observables must act on distinct sites");
    const HilbertShape& sys = ens.shape();
    Operator exp_a = exp_spectral(embed(obs_a, sys), g);
    Operator exp_b = exp_spectral(embed(obs_b, sys), g);
    Operator p0 = projector(basis_ket(2, 0));
    Operator p1 = projector(basis_ket(2, 1));
    Operator id2 = identity_op(HilbertShape({2}));
    Operator id_sys = identity_op(sys);

    // Each observable couples to its own meter qubit; the two couplings
    // commute.
    Operator u_a = tensor_ops({id_sys, p0, id2}) + tensor_ops({exp_a, p1, id2});
    Operator u_b = tensor_ops({id_sys, id2, p0}) + tensor_ops({exp_b, id2, p1});

    Ket joint = tensor_kets({ens.pre(), prep.ket()});
    Ket out = apply(matmul(u_a, u_b), joint);
    Vector meter = project_onto_post(out.amplitudes(), ens.post().amplitudes(), 4);

    MeterOutcome result{Ket(HilbertShape({2, 2}), meter), ens.overlap(), meter.squaredNorm(), {}};
    const Complex ov = ens.overlap();
    result.extracted["HH"] = meter(0) / (prep.gamma * ov);
    result.extracted["HV"] = meter(1) / (prep.gamma_bar * ov);  // (B)_mod
    result.extracted["VH"] = meter(2) / (prep.gamma_bar * ov);  // (A)_mod
    result.extracted["VV"] = meter(3) / (prep.gamma_bar * ov);  // (A+B)_mod
    return result;
}

ShotRecord sample_meter(const MeterOutcome& outcome, const std::string& basis,
                        std::uint64_t shots, std::uint64_t seed) {
    const Ket& meter = outcome.meter_ket;
    const std::size_t factors = meter.shape().factors();
    if (basis.size() != factors)
        throw DomainError("sample_meter: basis '" + basis + "' does not name one axis per meter "
                          "qubit (" + std::to_string(factors) + " expected)");
    for (std::size_t d : meter.shape().dims())
        if (d != 2)
            throw DomainError("sample_meter: meter factors must be qubits");
    if (meter.norm() == 0.0)
        throw DomainError("sample_meter: meter state has zero norm");

    std::vector<Operator> rotations;
    rotations.reserve(factors);
    for (char axis : basis)
        rotations.push_back(Operator(HilbertShape({2}), basis_rotation(axis)));
    Vector rotated = apply(tensor_ops(rotations), meter.normalized()).amplitudes();

    const std::size_t dim = meter.dim();
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        acc += std::norm(rotated(static_cast<Eigen::Index>(k)));
        cdf[k] = acc;
    }

    ShotRecord record{shots, basis, seed, {}};
    std::vector<std::string> labels(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::string label(factors, '0');
        for (std::size_t f = 0; f < factors; ++f)
            label[f] = ((k >> (factors - 1 - f)) & 1) ? '1' : '0';
        labels[k] = label;
        record.counts[label] = 0;
    }

    SplitMix64 rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        double u = rng.uniform() * acc;
        std::size_t k = 0;
        while (k + 1 < dim && u >= cdf[k])
            ++k;
        ++record.counts[labels[k]];
    }
    return record;
}

ModularEstimate estimate_modular_from_bloch(double x, double y, double z, const MeterPrep& prep) {
    double denom = 1.0 + z;
    if (denom < 1e-12)
        throw DomainError("estimate_modular: meter |0> population vanishes, the Bloch "
                          "inversion is undefined");
    Complex value = (prep.gamma / prep.gamma_bar) * Complex(x, y) / denom;
    return ModularEstimate{value, 0.0};
}

ModularEstimate estimate_modular_from_shots(const ShotRecord& x_rec, const ShotRecord& y_rec,
                                            const ShotRecord& z_rec, const MeterPrep& prep) {
    double x = record_mean(x_rec, 'X');
    double y = record_mean(y_rec, 'Y');
    double z = record_mean(z_rec, 'Z');
    ModularEstimate est = estimate_modular_from_bloch(x, y, z, prep);

    // First-order error propagation through (x + i y) / (1 + z), with the
    // plug-in binomial variance for each Pauli mean.
    double var_x = (1.0 - x * x) / static_cast<double>(x_rec.shots);
    double var_y = (1.0 - y * y) / static_cast<double>(y_rec.shots);
    double var_z = (1.0 - z * z) / static_cast<double>(z_rec.shots);
    double denom = 1.0 + z;
    double k = prep.gamma / prep.gamma_bar;
    double var_re = (var_x + x * x * var_z / (denom * denom)) / (denom * denom);
    double var_im = (var_y + y * y * var_z / (denom * denom)) / (denom * denom);
    est.std_error = k * std::sqrt(var_re + var_im);
    return est;
}

Operator build_crz_circuit(double theta) {
    if (!std::isfinite(theta))
        throw DomainError("build_crz_circuit: theta must be finite");
    Complex lower = std::exp(Complex(0, -theta / 2));
    Complex raise = std::exp(Complex(0, theta / 2));
    Matrix u = Matrix::Zero(4, 4);
    u(0, 0) = 1.0;    // |s=0, m=0>
    u(1, 1) = lower;  // |s=0, m=1>
    u(2, 2) = 1.0;    // |s=1, m=0>
    u(3, 3) = raise;  // |s=1, m=1>
    return Operator(HilbertShape({2, 2}), std::move(u));
}

std::vector<CrzSweepPoint> crz_sweep(const PrePostEnsemble& ens, const MeterPrep& prep,
                                     std::span<const double> thetas) {
    if (ens.shape().total_dim() != 2)
        throw ShapeError("crz_sweep: the system must be a single qubit");
    Complex weak = weak_value(
        Operator(ens.shape(), sigma_z().matrix(), true), ens);

    std::vector<CrzSweepPoint> points;
    points.reserve(thetas.size());
    Ket joint = tensor_kets({ens.pre(), prep.ket()});
    for (double theta : thetas) {
        Ket out = apply(build_crz_circuit(theta), joint);
        Vector meter = project_onto_post(out.amplitudes(), ens.post().amplitudes(), 2);
        Complex modular = meter(1) / (prep.gamma_bar * ens.overlap());
        points.push_back({theta, modular, weak});
    }
    return points;
}

} // namespace modval
