#pragma once

#include "spincs/coherent.hpp"

namespace spincs {

// Gaussian-decomposition chart; |z_plus| = |z_minus| on the group.
struct ZCoords {
    Complex z_plus;
    Complex z_minus;
};

// First column of the SU(2) matrix; |a1|^2 + |a2|^2 = 1.
struct ACoords {
    Complex a1;
    Complex a2;
};

ZCoords omega_to_z(const EulerAngles& omega);
ZCoords omega_to_z(const AngleTriple& omega);
EulerAngles z_to_omega(const ZCoords& z);
// z3 recovered from (z_plus, z_minus); fixed up to the double-cover branch,
// so only exp(-z3) is chart independent.
Complex z3_from_z(const ZCoords& z);

ACoords omega_to_a(const EulerAngles& omega);
ACoords omega_to_a(const AngleTriple& omega);
Su2Lift a_to_omega(const ACoords& a);

// Density of the invariant measure on the z constraint surface. The first
// is the coefficient of delta(|z+| - |z-|) d^2z+ d^2z-; the second is the
// resolved density with respect to d|z+| darg(z+) darg(z-).
double z_measure_weight(const ZCoords& z, Spin spin);
double z_surface_density(const ZCoords& z, Spin spin);
// Density with respect to the unit-S^3 surface measure (total area 2 pi^2).
double a_measure_weight(const ACoords& a, Spin spin);

double kinetic_term_z(const FiducialVector& fv, const ZCoords& z, const ZCoords& z_dot);
double kinetic_term_a(const FiducialVector& fv, const ACoords& a, const ACoords& a_dot);

// Resolution-of-unity residual on S^3 through the a chart: the Euler grid
// with psi extended over [0, 4 pi) covers the sphere once.
double a_sphere_resolution_residual(const FiducialVector& fv, const QuadratureGrid& grid);

} // namespace spincs
