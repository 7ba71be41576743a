#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modval/errors.hpp"

namespace modval {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Hard cap on the composite dimension; enough for a handful of qubits plus
// meters, small enough that dense matrices stay cheap.
inline constexpr std::size_t kMaxTotalDim = 4096;

inline constexpr double kHermitianTol = 1e-12;

// Ordered list of tensor-factor dimensions.  Basis states of the composite
// space are ordered row-major in the factor indices: for dims (2,2) the
// order is |00>, |01>, |10>, |11>, i.e. the last factor varies fastest.
class HilbertShape {
public:
    explicit HilbertShape(std::vector<std::size_t> dims);

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t factors() const { return dims_.size(); }
    std::size_t dim(std::size_t site) const;
    std::size_t total_dim() const { return total_; }

    // Composite index of a basis state given one index per factor.
    std::size_t flat_index(std::span<const std::size_t> indices) const;

    // Shape with `other`'s factors appended after this one's.
    HilbertShape extended(const HilbertShape& other) const;

    bool operator==(const HilbertShape& other) const { return dims_ == other.dims_; }
    bool operator!=(const HilbertShape& other) const { return !(*this == other); }

    std::string to_string() const;

private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 0;
};

// State vector over a HilbertShape.  Amplitudes are stored in the composite
// basis order defined by the shape; they are not forced to be normalized.
class Ket {
public:
    Ket(HilbertShape shape, Vector amplitudes);

    const HilbertShape& shape() const { return shape_; }
    const Vector& amplitudes() const { return amps_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

    double norm() const { return amps_.norm(); }
    Ket normalized() const;

private:
    HilbertShape shape_;
    Vector amps_;
};

// Linear operator over a HilbertShape.  `hermitian` may be asserted at
// construction, in which case it is verified against kHermitianTol.
class Operator {
public:
    Operator(HilbertShape shape, Matrix matrix, bool hermitian = false);

    const HilbertShape& shape() const { return shape_; }
    const Matrix& matrix() const { return mat_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    bool is_hermitian() const { return hermitian_; }

private:
    HilbertShape shape_;
    Matrix mat_;
    bool hermitian_;
};

// A local observable acting on one factor of a larger space.  `eigenvalues`
// is optional metadata used by the two-level closed forms; when supplied it
// is checked against the actual spectrum of `local`.
struct SiteObservable {
    std::size_t site;
    Operator local;
    std::optional<std::pair<double, double>> eigenvalues;

    SiteObservable(std::size_t site, Operator local,
                   std::optional<std::pair<double, double>> eigenvalues = std::nullopt);

    // Convenience: compute and attach the eigenvalues of a Hermitian 2x2 local.
    static SiteObservable with_eigenvalues(std::size_t site, Operator local);
};

// --- composition ---------------------------------------------------------

Ket tensor_kets(std::span<const Ket> parts);
Operator tensor_ops(std::span<const Operator> parts);
Ket tensor_kets(std::initializer_list<Ket> parts);
Operator tensor_ops(std::initializer_list<Operator> parts);

// Embed a local observable into the full space: I x ... x local x ... x I.
Operator embed(const SiteObservable& obs, const HilbertShape& shape);

// --- algebra --------------------------------------------------------------

// <bra|ket>, conjugate-linear in the first argument.
Complex inner(const Ket& bra, const Ket& ket);

Ket apply(const Operator& op, const Ket& k);
Operator matmul(const Operator& a, const Operator& b);
Operator adjoint(const Operator& a);

Ket scale(Complex c, const Ket& k);
Operator scale(Complex c, const Operator& a);
Ket add(const Ket& a, const Ket& b);
Operator add(const Operator& a, const Operator& b);
Ket sub(const Ket& a, const Ket& b);
Operator sub(const Operator& a, const Operator& b);

inline Ket operator*(const Operator& op, const Ket& k) { return apply(op, k); }
inline Operator operator*(const Operator& a, const Operator& b) { return matmul(a, b); }
inline Ket operator*(Complex c, const Ket& k) { return scale(c, k); }
inline Operator operator*(Complex c, const Operator& a) { return scale(c, a); }
inline Ket operator+(const Ket& a, const Ket& b) { return add(a, b); }
inline Operator operator+(const Operator& a, const Operator& b) { return add(a, b); }
inline Ket operator-(const Ket& a, const Ket& b) { return sub(a, b); }
inline Operator operator-(const Operator& a, const Operator& b) { return sub(a, b); }

// --- standard building blocks ---------------------------------------------

// |index> in a single factor of the given dimension.
Ket basis_ket(std::size_t dim, std::size_t index);

Operator identity_op(const HilbertShape& shape);
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();

// |k><k| / <k|k>; throws DomainError on the zero vector.
Operator projector(const Ket& k);

bool is_hermitian_matrix(const Matrix& m, double tol = kHermitianTol);

} // namespace modval
