#pragma once

#include <cmath>
#include <vector>

#include "spincs/coherent.hpp"

namespace spincs {

// kappa = k_phi dphi + k_theta dtheta + k_psi dpsi.
struct OneForm {
    double k_phi = 0.0;
    double k_theta = 0.0;
    double k_psi = 0.0;

    double contract(const AngleTriple& d) const { return k_phi * d.phi + k_theta * d.theta + k_psi * d.psi; }
};

// dkappa = w_theta_phi dtheta^dphi + w_phi_psi dphi^dpsi + w_psi_theta dpsi^dtheta.
struct TwoForm {
    double w_theta_phi = 0.0;
    double w_phi_psi = 0.0;
    double w_psi_theta = 0.0;
};

// Components in the orthogonal frame (theta, xi, eta), xi = phi + psi,
// eta = phi - psi, with unit-vector line element
// dn = (dtheta, cos(theta/2) dxi, sin(theta/2) deta) / 2.
struct GaugePotential {
    double a_theta = 0.0;
    double a_xi = 0.0;
    double a_eta = 0.0;

    double contract(double theta, double dtheta, double dxi, double deta) const {
        return 0.5 * (a_theta * dtheta + a_xi * std::cos(0.5 * theta) * dxi + a_eta * std::sin(0.5 * theta) * deta);
    }
};

struct PathSample {
    double t = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
};

using Path = std::vector<PathSample>;

OneForm one_form(const FiducialVector& fv, const EulerAngles& omega);
OneForm one_form(const FiducialVector& fv, const AngleTriple& omega);
TwoForm two_form(const FiducialVector& fv, const EulerAngles& omega);
TwoForm two_form(const FiducialVector& fv, const AngleTriple& omega);

GaugePotential gauge_potential(const FiducialVector& fv, double theta, double xi, double eta);

// <Omega| i d/dt |Omega> = A0 (phidot cos(theta) + psidot) + A3.
double kinetic_term(const FiducialVector& fv, const EulerAngles& omega, const AngleTriple& omega_dot);
double kinetic_term(const FiducialVector& fv, const AngleTriple& omega, const AngleTriple& omega_dot);

// Second-order finite-difference velocities at each sample (non-uniform spacing allowed).
std::vector<AngleTriple> path_velocities(const Path& path);

// Trapezoid integral of the kinetic term along the sampled path.
double geometric_phase(const FiducialVector& fv, const Path& path);

} // namespace spincs
