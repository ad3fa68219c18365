#include "gcce/spin_algebra.hpp"

#include <cmath>
#include <string>

#include "gcce/error.hpp"

namespace gcce {

const CMatrix& SpinOperators::component(int axis) const {
    switch (axis) {
    case 0: return sx;
    case 1: return sy;
    default: return sz;
    }
}

int spin_dimension(double s) {
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (!(std::abs(twice - rounded) < 1e-12) || rounded < 1.0)
        throw InvalidSpinError("spin quantum number must be a positive half-integer, got " + std::to_string(s));
    return static_cast<int>(rounded) + 1;
}

int level_index(double s, double m) {
    const int dim = spin_dimension(s);
    const double k = s - m;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-9 || rounded < 0 || rounded >= dim)
        throw InvalidSpinError("m = " + std::to_string(m) + " is not a level of spin " + std::to_string(s));
    return static_cast<int>(rounded);
}

SpinOperators spin_operators(double s) {
    const int dim = spin_dimension(s);
    SpinOperators ops;
    ops.s = s;
    CMatrix raise = CMatrix::Zero(dim, dim);
    ops.sz = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double m = s - k;
        ops.sz(k, k) = m;
        if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    const CMatrix lower = raise.adjoint();
    ops.sx = 0.5 * (raise + lower);
    ops.sy = Complex(0.0, -0.5) * (raise - lower);
    return ops;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix embed(const CMatrix& op, std::size_t site, std::span<const int> dims) {
    if (site >= dims.size())
        throw ShapeError("embed: site " + std::to_string(site) + " out of range");
    if (op.rows() != dims[site] || op.cols() != dims[site])
        throw ShapeError("embed: operator dimension " + std::to_string(op.rows()) + " does not match factor dimension " +
                         std::to_string(dims[site]));
    Eigen::Index before = 1, after = 1;
    for (std::size_t k = 0; k < site; ++k) before *= dims[k];
    for (std::size_t k = site + 1; k < dims.size(); ++k) after *= dims[k];

    const Eigen::Index d = op.rows();
    const Eigen::Index total = before * d * after;
    CMatrix out = CMatrix::Zero(total, total);
    for (Eigen::Index b = 0; b < before; ++b)
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                const Complex v = op(i, j);
                if (v == Complex(0.0)) continue;
                const Eigen::Index row0 = (b * d + i) * after;
                const Eigen::Index col0 = (b * d + j) * after;
                for (Eigen::Index a = 0; a < after; ++a) out(row0 + a, col0 + a) = v;
            }
    return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

HermitianMatrix::HermitianMatrix(CMatrix m, double rel_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw ShapeError("Hermitian matrix must be square");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if (!is_hermitian(m_, rel_tol * scale)) throw ContractViolation("matrix is not Hermitian within tolerance");
}

HermitianMatrix HermitianMatrix::zero(int dim) { return HermitianMatrix(CMatrix::Zero(dim, dim)); }

SpectralPropagator::SpectralPropagator(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

CMatrix SpectralPropagator::propagator(double t) const {
    CVector phases(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) phases(k) = std::polar(1.0, -values_(k) * t);
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

CMatrix expm_hermitian(const HermitianMatrix& h, double t) { return SpectralPropagator(h).propagator(t); }

} // namespace gcce
