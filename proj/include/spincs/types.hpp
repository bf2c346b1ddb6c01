#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace spincs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Unnormalized angle triple. Used for paths, velocities and displacements
// where folding into the canonical chart would break continuity.
struct AngleTriple {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
};

} // namespace spincs
