#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gcce {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Complex samples of one coherence function on a shared time grid.
using ComplexCurve = std::vector<Complex>;

} // namespace gcce
