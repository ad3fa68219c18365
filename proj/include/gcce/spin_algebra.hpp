#pragma once

#include <span>
#include <vector>

#include "gcce/types.hpp"

namespace gcce {

// Angular momentum matrices (hbar = 1) in the |s, m> basis ordered m = s, s-1, ..., -s.
struct SpinOperators {
    double s = 0.5;
    CMatrix sx;
    CMatrix sy;
    CMatrix sz;

    int dim() const { return static_cast<int>(sz.rows()); }
    const CMatrix& component(int axis) const;
};

// Throws InvalidSpinError unless 2s is a positive integer.
SpinOperators spin_operators(double s);

// Number of Zeeman levels, 2s+1.
int spin_dimension(double s);

// Index of magnetic quantum number m in the ordering used by spin_operators.
int level_index(double s, double m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Places op on factor `site` of a tensor product with the given factor dimensions.
CMatrix embed(const CMatrix& op, std::size_t site, std::span<const int> dims);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);

// Dense complex matrix checked to be Hermitian at construction.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    // Relative tolerance against the largest entry; throws ContractViolation.
    explicit HermitianMatrix(CMatrix m, double rel_tol = 1e-10);

    static HermitianMatrix zero(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

// Eigendecomposition of a Hermitian generator reused for many evolution times.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const HermitianMatrix& h);

    // exp(-i h t).
    CMatrix propagator(double t) const;

    const Eigen::VectorXd& eigenvalues() const { return values_; }
    const CMatrix& eigenvectors() const { return vectors_; }

private:
    Eigen::VectorXd values_;
    CMatrix vectors_;
};

// U = exp(-i h t) for h in rad/ms and t in ms.
CMatrix expm_hermitian(const HermitianMatrix& h, double t);

} // namespace gcce
