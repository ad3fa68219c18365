#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "gcce/hamiltonian.hpp"
#include "gcce/structure.hpp"
#include "gcce/types.hpp"
#include "gcce/units.hpp"

namespace testing {

using namespace gcce;

// Truncated Taylor series of exp(-i h t) with scaling and squaring.
inline CMatrix taylor_expm(const CMatrix& h, double t) {
    const CMatrix a = h * Complex(0.0, -t);
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
    const CMatrix b = a / std::pow(2.0, squarings);
    CMatrix result = CMatrix::Identity(h.rows(), h.cols());
    CMatrix term = result;
    for (int k = 1; k < 30; ++k) {
        term = term * b / static_cast<double>(k);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Bare spin-1/2 electron along z with an isotropic g.
inline CentralSystem free_electron(double field_gauss = 3000.0) {
    CentralSystem cs;
    cs.g_tensor = Mat3::Identity() * 2.0023;
    cs.field = Vec3(0.0, 0.0, field_gauss);
    cs.qubit_levels = {0, 1};
    return cs;
}

inline SpinSpecies proton() { return {"H", 0.5, 26.7522, 0.0, 1.0}; }

inline BathSpin spin_at(const Vec3& r, const SpinSpecies& species = proton()) {
    BathSpin b;
    b.position = r;
    b.species = species;
    return b;
}

} // namespace testing
