#include "modval/tensor.hpp"

#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace modval {

namespace {

std::string shape_mismatch(const char* what, const HilbertShape& a, const HilbertShape& b) {
    std::ostringstream os;
    os << what << ": shapes " << a.to_string() << " and " << b.to_string() << " differ";
    return os.str();
}

} // namespace

HilbertShape::HilbertShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
        throw ShapeError("HilbertShape: need at least one factor");
    total_ = 1;
    for (std::size_t d : dims_) {
        if (d < 1)
            throw ShapeError("HilbertShape: factor dimensions must be >= 1");
        if (d > kMaxTotalDim || total_ > kMaxTotalDim / d)
            throw DimensionLimitError("HilbertShape: composite dimension exceeds " +
                                      std::to_string(kMaxTotalDim));
        total_ *= d;
    }
}

std::size_t HilbertShape::dim(std::size_t site) const {
    if (site >= dims_.size())
        throw ShapeError("HilbertShape: site " + std::to_string(site) + " out of range (" +
                         std::to_string(dims_.size()) + " factors)");
    return dims_[site];
}

std::size_t HilbertShape::flat_index(std::span<const std::size_t> indices) const {
    if (indices.size() != dims_.size())
        throw ShapeError("flat_index: expected one index per factor");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (indices[k] >= dims_[k])
            throw ShapeError("flat_index: index out of range at factor " + std::to_string(k));
        flat = flat * dims_[k] + indices[k];
    }
    return flat;
}

HilbertShape HilbertShape::extended(const HilbertShape& other) const {
    std::vector<std::size_t> dims = dims_;
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    return HilbertShape(std::move(dims));
}

std::string HilbertShape::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims_.size(); ++k)
        os << (k ? "," : "") << dims_[k];
    os << ')';
    return os.str();
}

Ket::Ket(HilbertShape shape, Vector amplitudes)
    : shape_(std::move(shape)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != shape_.total_dim())
        throw ShapeError("Ket: " + std::to_string(amps_.size()) + " amplitudes for shape " +
                         shape_.to_string());
}

Ket Ket::normalized() const {
    double n = norm();
    if (n == 0.0)
        throw DomainError("Ket::normalized: zero vector");
    return Ket(shape_, amps_ / n);
}

Operator::Operator(HilbertShape shape, Matrix matrix, bool hermitian)
    : shape_(std::move(shape)), mat_(std::move(matrix)), hermitian_(hermitian) {
    const auto n = static_cast<Eigen::Index>(shape_.total_dim());
    if (mat_.rows() != n || mat_.cols() != n)
        throw ShapeError("Operator: matrix is " + std::to_string(mat_.rows()) + "x" +
                         std::to_string(mat_.cols()) + " but shape " + shape_.to_string() +
                         " needs " + std::to_string(n) + "x" + std::to_string(n));
    if (hermitian_) {
        double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
        if (dev > kHermitianTol)
            throw NotHermitianError("Operator: asserted Hermitian but |M - M^dag| = " +
                                    std::to_string(dev));
    }
}

SiteObservable::SiteObservable(std::size_t site_, Operator local_,
                               std::optional<std::pair<double, double>> eigenvalues_)
    : site(site_), local(std::move(local_)), eigenvalues(eigenvalues_) {
    if (local.shape().factors() != 1)
        throw ShapeError("SiteObservable: local operator must act on a single factor");
    if (eigenvalues) {
        if (local.dim() != 2)
            throw ShapeError("SiteObservable: eigenvalue metadata is for 2x2 locals only");
        if (!local.is_hermitian())
            throw NotHermitianError("SiteObservable: eigenvalue metadata requires a Hermitian local");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(local.matrix());
        double lo = solver.eigenvalues()(0), hi = solver.eigenvalues()(1);
        double a = eigenvalues->first, b = eigenvalues->second;
        double dev = std::min(std::abs(a - lo) + std::abs(b - hi),
                              std::abs(a - hi) + std::abs(b - lo));
        if (dev > 1e-10)
            throw DomainError("SiteObservable: stated eigenvalues do not match the local spectrum");
    }
}

SiteObservable SiteObservable::with_eigenvalues(std::size_t site, Operator local) {
    if (local.dim() != 2)
        throw ShapeError("with_eigenvalues: local operator must be 2x2");
    if (!local.is_hermitian())
        throw NotHermitianError("with_eigenvalues: local operator must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(local.matrix());
    auto pair = std::make_pair(solver.eigenvalues()(0), solver.eigenvalues()(1));
    return SiteObservable(site, std::move(local), pair);
}

Ket tensor_kets(std::span<const Ket> parts) {
    if (parts.empty())
        throw ShapeError("tensor_kets: empty factor list");
    HilbertShape shape = parts[0].shape();
    Vector amps = parts[0].amplitudes();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        shape = shape.extended(parts[k].shape()); // enforces the dimension cap
        amps = Eigen::kroneckerProduct(amps, parts[k].amplitudes()).eval();
    }
    return Ket(std::move(shape), std::move(amps));
}

Operator tensor_ops(std::span<const Operator> parts) {
    if (parts.empty())
        throw ShapeError("tensor_ops: empty factor list");
    HilbertShape shape = parts[0].shape();
    Matrix mat = parts[0].matrix();
    bool herm = parts[0].is_hermitian();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        shape = shape.extended(parts[k].shape());
        mat = Eigen::kroneckerProduct(mat, parts[k].matrix()).eval();
        herm = herm && parts[k].is_hermitian();
    }
    return Operator(std::move(shape), std::move(mat), herm);
}

Ket tensor_kets(std::initializer_list<Ket> parts) {
    return tensor_kets(std::span<const Ket>(parts.begin(), parts.size()));
}

Operator tensor_ops(std::initializer_list<Operator> parts) {
    return tensor_ops(std::span<const Operator>(parts.begin(), parts.size()));
}

Operator embed(const SiteObservable& obs, const HilbertShape& shape) {
    if (obs.site >= shape.factors())
        throw ShapeError("embed: site " + std::to_string(obs.site) + " out of range for shape " +
                         shape.to_string());
    if (obs.local.dim() != shape.dim(obs.site))
        throw ShapeError("embed: local dimension " + std::to_string(obs.local.dim()) +
                         " does not match factor " + std::to_string(obs.site) + " of " +
                         shape.to_string());
    std::size_t before = 1, after = 1;
    for (std::size_t k = 0; k < obs.site; ++k)
        before *= shape.dim(k);
    for (std::size_t k = obs.site + 1; k < shape.factors(); ++k)
        after *= shape.dim(k);
    const auto nb = static_cast<Eigen::Index>(before);
    const auto na = static_cast<Eigen::Index>(after);
    Matrix full = Eigen::kroneckerProduct(
        Matrix::Identity(nb, nb),
        Eigen::kroneckerProduct(obs.local.matrix(), Matrix::Identity(na, na)).eval());
    return Operator(shape, std::move(full), obs.local.is_hermitian());
}

Complex inner(const Ket& bra, const Ket& ket) {
    if (bra.shape() != ket.shape())
        throw ShapeError(shape_mismatch("inner", bra.shape(), ket.shape()));
    return bra.amplitudes().dot(ket.amplitudes());
}

Ket apply(const Operator& op, const Ket& k) {
    if (op.shape() != k.shape())
        throw ShapeError(shape_mismatch("apply", op.shape(), k.shape()));
    return Ket(k.shape(), op.matrix() * k.amplitudes());
}

Operator matmul(const Operator& a, const Operator& b) {
    if (a.shape() != b.shape())
        throw ShapeError(shape_mismatch("matmul", a.shape(), b.shape()));
    return Operator(a.shape(), a.matrix() * b.matrix());
}

Operator adjoint(const Operator& a) {
    return Operator(a.shape(), a.matrix().adjoint(), a.is_hermitian());
}

Ket scale(Complex c, const Ket& k) {
    return Ket(k.shape(), c * k.amplitudes());
}

Operator scale(Complex c, const Operator& a) {
    bool herm = a.is_hermitian() && c.imag() == 0.0;
    return Operator(a.shape(), c * a.matrix(), herm);
}

Ket add(const Ket& a, const Ket& b) {
    if (a.shape() != b.shape())
        throw ShapeError(shape_mismatch("add", a.shape(), b.shape()));
    return Ket(a.shape(), a.amplitudes() + b.amplitudes());
}

Operator add(const Operator& a, const Operator& b) {
    if (a.shape() != b.shape())
        throw ShapeError(shape_mismatch("add", a.shape(), b.shape()));
    return Operator(a.shape(), a.matrix() + b.matrix(), a.is_hermitian() && b.is_hermitian());
}

Ket sub(const Ket& a, const Ket& b) {
    if (a.shape() != b.shape())
        throw ShapeError(shape_mismatch("sub", a.shape(), b.shape()));
    return Ket(a.shape(), a.amplitudes() - b.amplitudes());
}

Operator sub(const Operator& a, const Operator& b) {
    if (a.shape() != b.shape())
        throw ShapeError(shape_mismatch("sub", a.shape(), b.shape()));
    return Operator(a.shape(), a.matrix() - b.matrix(), a.is_hermitian() && b.is_hermitian());
}

Ket basis_ket(std::size_t dim, std::size_t index) {
    if (index >= dim)
        throw ShapeError("basis_ket: index " + std::to_string(index) + " out of range for dim " +
                         std::to_string(dim));
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return Ket(HilbertShape({dim}), std::move(v));
}

Operator identity_op(const HilbertShape& shape) {
    const auto n = static_cast<Eigen::Index>(shape.total_dim());
    return Operator(shape, Matrix::Identity(n, n), true);
}

namespace {

Operator pauli(std::initializer_list<Complex> entries) {
    Matrix m(2, 2);
    auto it = entries.begin();
    m << *it, *(it + 1), *(it + 2), *(it + 3);
    return Operator(HilbertShape({2}), std::move(m), true);
}

} // namespace

Operator sigma_x() { return pauli({0, 1, 1, 0}); }
Operator sigma_y() { return pauli({0, Complex(0, -1), Complex(0, 1), 0}); }
Operator sigma_z() { return pauli({1, 0, 0, -1}); }

bool is_hermitian_matrix(const Matrix& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator projector(const Ket& k) {
    double n2 = k.amplitudes().squaredNorm();
    if (n2 == 0.0)
        throw DomainError("projector: zero vector has no direction");
    Matrix m = (k.amplitudes() * k.amplitudes().adjoint()) / n2;
    // Round off the tiny asymmetry so the Hermitian assertion is exact.
    m = ((m + m.adjoint()) / 2.0).eval();
    return Operator(k.shape(), std::move(m), true);
}

} // namespace modval
