#include "spincs/geometry.hpp"

#include <array>
#include <cmath>

namespace spincs {

OneForm one_form(const FiducialVector& fv, const AngleTriple& omega) {
    const MatrixElementSet e = matrix_element_set(fv, omega.phi, omega.theta, omega.psi);
    return {e.a0 * std::cos(omega.theta) - e.a1 * std::sin(omega.theta), e.a4, e.a0};
}

OneForm one_form(const FiducialVector& fv, const EulerAngles& omega) {
    return one_form(fv, omega.triple());
}

TwoForm two_form(const FiducialVector& fv, const AngleTriple& omega) {
    const MatrixElementSet e = matrix_element_set(fv, omega.phi, omega.theta, omega.psi);
    const double ct = std::cos(omega.theta);
    const double st = std::sin(omega.theta);
    return {-(e.a0 * st + e.a1 * ct), -e.a4 * st, e.a1};
}

TwoForm two_form(const FiducialVector& fv, const EulerAngles& omega) {
    return two_form(fv, omega.triple());
}

GaugePotential gauge_potential(const FiducialVector& fv, double theta, double xi, double eta) {
    const double psi = 0.5 * (xi - eta);
    const double phi = 0.5 * (xi + eta);
    const MatrixElementSet e = matrix_element_set(fv, phi, theta, psi);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    return {2.0 * e.a4, 2.0 * e.a0 * c - 2.0 * e.a1 * s, -2.0 * e.a0 * s - 2.0 * e.a1 * c};
}

double kinetic_term(const FiducialVector& fv, const AngleTriple& omega, const AngleTriple& omega_dot) {
    return one_form(fv, omega).contract(omega_dot);
}

double kinetic_term(const FiducialVector& fv, const EulerAngles& omega, const AngleTriple& omega_dot) {
    return kinetic_term(fv, omega.triple(), omega_dot);
}

std::vector<AngleTriple> path_velocities(const Path& path) {
    const std::size_t n = path.size();
    if (n < 2) throw Error(ErrorKind::PathTooShort, "path needs at least two samples");
    auto get = [&](std::size_t i) { return std::array<double, 3>{path[i].phi, path[i].theta, path[i].psi}; };
    std::vector<AngleTriple> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 3> v{};
        if (n == 2) {
            const double h = path[1].t - path[0].t;
            for (int k = 0; k < 3; ++k) v[k] = (get(1)[k] - get(0)[k]) / h;
        } else {
            // Three-point Lagrange derivative on the nearest stencil.
            const std::size_t j = i == 0 ? 1 : (i == n - 1 ? n - 2 : i);
            const double t0 = path[j - 1].t;
            const double t1 = path[j].t;
            const double t2 = path[j + 1].t;
            const double x = path[i].t;
            const double w0 = (2 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
            const double w2 = (2 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
            // The weights sum to zero; differences keep constant paths exact.
            for (int k = 0; k < 3; ++k) v[k] = w0 * (get(j - 1)[k] - get(j)[k]) + w2 * (get(j + 1)[k] - get(j)[k]);
        }
        out[i] = {v[0], v[1], v[2]};
    }
    return out;
}

double geometric_phase(const FiducialVector& fv, const Path& path) {
    const std::vector<AngleTriple> vel = path_velocities(path);
    double total = 0.0;
    double prev = kinetic_term(fv, AngleTriple{path[0].phi, path[0].theta, path[0].psi}, vel[0]);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double cur = kinetic_term(fv, AngleTriple{path[i].phi, path[i].theta, path[i].psi}, vel[i]);
        total += 0.5 * (path[i].t - path[i - 1].t) * (prev + cur);
        prev = cur;
    }
    return total;
}

} // namespace spincs
