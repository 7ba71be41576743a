#pragma once

#include <span>

#include "modval/tensor.hpp"

namespace modval {

// Conventions used throughout:
//
//   weak value      <A>_w   = <phi|A|psi> / <phi|psi>
//   modular value   (A)_mod = <phi|exp(-i g A)|psi> / <phi|psi>
//
// i.e. the coupling unitary is U = exp(-i g A).  For an observable with two
// eigenvalues l1 != l2, Lagrange interpolation gives
//
//   exp(-i g A) = a A + b I
//   a = (e^{-i g l1} - e^{-i g l2}) / (l1 - l2)
//   b = -(l2 e^{-i g l1} - l1 e^{-i g l2}) / (l1 - l2)
//
// so (A)_mod = a <A>_w + b, invertible whenever a != 0 (a vanishes exactly
// when g (l1 - l2) is a multiple of 2 pi).

inline constexpr double kDefaultOverlapEps = 1e-10;
inline constexpr double kDefaultDegenEps = 1e-8;
inline constexpr double kDefaultCoeffEps = 1e-10;

// A pre-selected state |psi> and post-selected state |phi> on the same
// space.  Both are normalized on construction; the overlap <phi|psi> is
// cached and must exceed `overlap_eps` in magnitude.
class PrePostEnsemble {
public:
    PrePostEnsemble(const Ket& pre, const Ket& post, double overlap_eps = kDefaultOverlapEps);

    const Ket& pre() const { return pre_; }
    const Ket& post() const { return post_; }
    const HilbertShape& shape() const { return pre_.shape(); }
    Complex overlap() const { return overlap_; }

private:
    Ket pre_;
    Ket post_;
    Complex overlap_;
};

// Interpolation coefficients for one two-level observable at coupling g.
struct TwoLevelCoeffs {
    Complex a;
    Complex b;
    double lambda1;
    double lambda2;
    double g;
};

Complex weak_value(const Operator& obs, const PrePostEnsemble& ens);

// exp(-i g A) by diagonalization; `obs` must be Hermitian.
Operator exp_spectral(const Operator& obs, double g);

// exp(-i g A) assembled from the Lagrange basis polynomials of the given
// eigenvalues.  The eigenvalues must be pairwise separated by more than
// `degen_eps` and must cover the spectrum of `obs`.
Operator exp_lagrange(const Operator& obs, std::span<const double> eigenvalues, double g,
                      double degen_eps = kDefaultDegenEps);

TwoLevelCoeffs two_level_coeffs(double lambda1, double lambda2, double g,
                                double degen_eps = kDefaultDegenEps);

Complex modular_value(const Operator& obs, double g, const PrePostEnsemble& ens);

// Two-level closed form: a <A>_w + b.  `obs` must have spectrum {l1, l2}.
Complex modular_value_closed(const Operator& obs, double lambda1, double lambda2, double g,
                             const PrePostEnsemble& ens);

Complex modular_from_weak(Complex weak, const TwoLevelCoeffs& coeffs);

// Inverse map; requires |a| > coeff_eps.
Complex weak_from_modular(Complex modular, const TwoLevelCoeffs& coeffs,
                          double coeff_eps = kDefaultCoeffEps);

} // namespace modval
