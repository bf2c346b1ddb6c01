#pragma once

#include <vector>

#include "spincs/propagator.hpp"

namespace spincs {

// m * (phidot, thetadot, psidot) = b with rows
//   hbar [W, 0, A1]          = -dH/dtheta
//   hbar [0, W, -A4 sin]     =  dH/dphi
//   hbar [A4 sin, A1, 0]     =  dH/dpsi
// where W = A0 sin(theta) + A1 cos(theta).
struct VelocitySystem {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    int rank = 0;
    double residual = 0.0;

    // Rows reordered to (phi, theta, psi) and the first row negated; the
    // result is antisymmetric and the system reads F qdot = grad H.
    Eigen::Matrix3d antisymmetric_form() const;
};

struct SystemOptions {
    double hbar = 1.0;
    double fd_step = 1e-6;
    // Analytic gradient when every monomial has degree <= 1.
    bool analytic_linear = true;
    // Drops the A1 and A4 couplings (regression comparison only).
    bool drop_interweaving = false;
};

struct VelocitySolution {
    AngleTriple omega_dot;
    int rank = 0;
    double residual = 0.0;
    bool consistent = true;
};

// Gradient (dH/dphi, dH/dtheta, dH/dpsi) of h_expectation.
Eigen::Vector3d energy_gradient(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega,
                                double t, const SystemOptions& options = {});

VelocitySystem build_system(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega, double t,
                            const SystemOptions& options = {});
VelocitySystem build_system(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega, double t,
                            const SystemOptions& options = {});

// Minimum-norm least-squares solve. Throws InconsistentSystem when the
// residual exceeds 1e-8 |b| unless `throw_on_inconsistent` is false.
VelocitySolution solve_velocities(const VelocitySystem& sys, bool throw_on_inconsistent = true);

struct TrajectoryPoint {
    double t = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double energy = 0.0;
    int rank = 0;
    double residual = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    // Max angle difference at the final time against a half-step run.
    double error_estimate = 0.0;
};

struct TrajectoryOptions {
    SystemOptions system;
    bool throw_on_inconsistent = true;
    bool estimate_error = true;
};

// Fixed-step RK4 over [t0, t1]; the step is adjusted to divide the span evenly.
Trajectory integrate_trajectory(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega0,
                                double t0, double t1, double dt, const TrajectoryOptions& options = {});

} // namespace spincs
