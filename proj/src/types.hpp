#pragma once

#include <complex>

#include <Eigen/Core>

namespace dmbl {

using cplx = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Largest chain handled anywhere in the library; full-space vectors are 2^L.
inline constexpr int kMaxSites = 20;

}  // namespace dmbl
