#include "modval/pps.hpp"

#include <cmath>

namespace modval {

namespace {

void require_finite_coupling(double g) {
    if (!std::isfinite(g))
        throw DomainError("coupling g must be finite");
}

// Largest |entry| of (A - l1) ... (A - lk); zero iff the given values cover
// the spectrum of a diagonalizable A.
double annihilation_residual(const Matrix& m, std::span<const double> eigenvalues) {
    const Eigen::Index n = m.rows();
    Matrix prod = Matrix::Identity(n, n);
    for (double l : eigenvalues)
        prod = prod * (m - l * Matrix::Identity(n, n));
    return prod.cwiseAbs().maxCoeff();
}

double spectral_scale(const Matrix& m, std::span<const double> eigenvalues) {
    double s = m.cwiseAbs().maxCoeff();
    for (double l : eigenvalues)
        s = std::max(s, std::abs(l));
    return std::max(s, 1.0);
}

} // namespace

PrePostEnsemble::PrePostEnsemble(const Ket& pre, const Ket& post, double overlap_eps)
    : pre_(pre.normalized()), post_(post.normalized()) {
    if (pre_.shape() != post_.shape())
        throw ShapeError("PrePostEnsemble: pre shape " + pre_.shape().to_string() +
                         " and post shape " + post_.shape().to_string() + " differ");
    overlap_ = inner(post_, pre_);
    if (std::abs(overlap_) <= overlap_eps)
        throw OrthogonalSelectionError(
            "PrePostEnsemble: |<phi|psi>| = " + std::to_string(std::abs(overlap_)) +
            " is below the orthogonality threshold " + std::to_string(overlap_eps));
}

Complex weak_value(const Operator& obs, const PrePostEnsemble& ens) {
    return inner(ens.post(), apply(obs, ens.pre())) / ens.overlap();
}

Operator exp_spectral(const Operator& obs, double g) {
    require_finite_coupling(g);
    if (!obs.is_hermitian() && !is_hermitian_matrix(obs.matrix()))
        throw NotHermitianError("exp_spectral: observable must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(obs.matrix());
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    Vector phases(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k)
        phases(k) = std::exp(Complex(0, -g * values(k)));
    Matrix u = vectors * phases.asDiagonal() * vectors.adjoint();
    return Operator(obs.shape(), std::move(u));
}

Operator exp_lagrange(const Operator& obs, std::span<const double> eigenvalues, double g,
                      double degen_eps) {
    require_finite_coupling(g);
    if (eigenvalues.empty())
        throw DomainError("exp_lagrange: need at least one eigenvalue");
    for (std::size_t j = 0; j < eigenvalues.size(); ++j)
        for (std::size_t k = j + 1; k < eigenvalues.size(); ++k)
            if (std::abs(eigenvalues[j] - eigenvalues[k]) <= degen_eps)
                throw DegenerateSpectrumError(
                    "exp_lagrange: eigenvalues " + std::to_string(eigenvalues[j]) + " and " +
                    std::to_string(eigenvalues[k]) + " closer than " + std::to_string(degen_eps));

    double residual = annihilation_residual(obs.matrix(), eigenvalues);
    double scale = std::pow(spectral_scale(obs.matrix(), eigenvalues),
                            static_cast<double>(eigenvalues.size()));
    if (residual > 1e-9 * scale)
        throw DomainError("exp_lagrange: the given eigenvalues do not cover the spectrum "
                          "(annihilation residual " + std::to_string(residual) + ")");

    const Eigen::Index n = obs.matrix().rows();
    const Matrix identity = Matrix::Identity(n, n);
    Matrix u = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        Matrix basis = identity;
        for (std::size_t l = 0; l < eigenvalues.size(); ++l) {
            if (l == k)
                continue;
            basis = basis * (obs.matrix() - eigenvalues[l] * identity) /
                    (eigenvalues[k] - eigenvalues[l]);
        }
        u += std::exp(Complex(0, -g * eigenvalues[k])) * basis;
    }
    return Operator(obs.shape(), std::move(u));
}

TwoLevelCoeffs two_level_coeffs(double lambda1, double lambda2, double g, double degen_eps) {
    require_finite_coupling(g);
    double gap = lambda1 - lambda2;
    if (std::abs(gap) <= degen_eps)
        throw DegenerateSpectrumError("two_level_coeffs: |l1 - l2| = " +
                                      std::to_string(std::abs(gap)) + " is below " +
                                      std::to_string(degen_eps));
    Complex e1 = std::exp(Complex(0, -g * lambda1));
    Complex e2 = std::exp(Complex(0, -g * lambda2));
    Complex a = (e1 - e2) / gap;
    Complex b = -(lambda2 * e1 - lambda1 * e2) / gap;
    return TwoLevelCoeffs{a, b, lambda1, lambda2, g};
}

Complex modular_value(const Operator& obs, double g, const PrePostEnsemble& ens) {
    Operator u = exp_spectral(obs, g);
    return inner(ens.post(), apply(u, ens.pre())) / ens.overlap();
}

Complex modular_value_closed(const Operator& obs, double lambda1, double lambda2, double g,
                             const PrePostEnsemble& ens) {
    const double pair[] = {lambda1, lambda2};
    double residual = annihilation_residual(obs.matrix(), pair);
    double scale = spectral_scale(obs.matrix(), pair);
    if (residual > 1e-9 * scale * scale)
        throw DomainError("modular_value_closed: observable spectrum is not {l1, l2}");
    TwoLevelCoeffs coeffs = two_level_coeffs(lambda1, lambda2, g);
    return modular_from_weak(weak_value(obs, ens), coeffs);
}

Complex modular_from_weak(Complex weak, const TwoLevelCoeffs& coeffs) {
    return coeffs.a * weak + coeffs.b;
}

Complex weak_from_modular(Complex modular, const TwoLevelCoeffs& coeffs, double coeff_eps) {
    if (std::abs(coeffs.a) <= coeff_eps)
        throw DomainError("weak_from_modular: coefficient a vanishes at this coupling "
                          "(g (l1 - l2) is a multiple of 2 pi), the map is not invertible");
    return (modular - coeffs.b) / coeffs.a;
}

} // namespace modval
