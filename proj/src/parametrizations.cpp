#include "spincs/parametrizations.hpp"

#include <cmath>

namespace spincs {

namespace {

constexpr double kSubsidiaryTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kOriginTol = 1e-9;

void check_normalized(const ACoords& a) {
    if (std::abs(std::norm(a.a1) + std::norm(a.a2) - 1.0) > kNormTol) {
        throw Error(ErrorKind::NotNormalized, "|a1|^2 + |a2|^2 != 1");
    }
}

void check_subsidiary(const ZCoords& z) {
    const double r1 = std::abs(z.z_plus);
    const double r2 = std::abs(z.z_minus);
    if (std::abs(r1 - r2) > kSubsidiaryTol * std::max(1.0, r1)) {
        throw Error(ErrorKind::SubsidiaryViolation, "|z+| != |z-|");
    }
}

// sum_m f(s,m) c_m c_{m-1}^*
Complex ladder_moment_conj(const FiducialVector& fv) { return std::conj(ladder_moment(fv)); }

double a0_of(const FiducialVector& fv) {
    return matrix_element_set(fv, 0.0, 0.0, 0.0).a0;
}

} // namespace

ZCoords omega_to_z(const AngleTriple& omega) {
    const GaussianParams g = gaussian_decompose(omega.phi, omega.theta, omega.psi);
    return {g.z_plus, g.z_minus};
}

ZCoords omega_to_z(const EulerAngles& omega) { return omega_to_z(omega.triple()); }

EulerAngles z_to_omega(const ZCoords& z) {
    check_subsidiary(z);
    const double r = std::abs(z.z_plus);
    if (r == 0.0) return EulerAngles(0.0, 0.0, 0.0);
    const double theta = 2.0 * std::atan(r);
    const double phi = -std::arg(-z.z_plus);
    const double psi = -std::arg(z.z_minus);
    return EulerAngles(phi, theta, psi);
}

Complex z3_from_z(const ZCoords& z) {
    check_subsidiary(z);
    const double r2 = std::norm(z.z_plus);
    if (std::sqrt(r2) < kOriginTol) {
        throw Error(ErrorKind::ZOriginSingular, "z3 is undetermined at z+ = 0");
    }
    const Complex inner = std::conj(z.z_plus) * std::conj(z.z_minus) / (r2 * (1.0 + r2));
    return -2.0 * std::log(kI * std::sqrt(inner));
}

ACoords omega_to_a(const AngleTriple& omega) {
    return {std::cos(0.5 * omega.theta) * std::polar(1.0, -0.5 * (omega.phi + omega.psi)),
            std::sin(0.5 * omega.theta) * std::polar(1.0, 0.5 * (omega.phi - omega.psi))};
}

ACoords omega_to_a(const EulerAngles& omega) { return omega_to_a(omega.triple()); }

Su2Lift a_to_omega(const ACoords& a) {
    check_normalized(a);
    Eigen::Matrix2cd u;
    u << a.a1, -std::conj(a.a2), a.a2, std::conj(a.a1);
    return euler_from_su2(u);
}

double z_measure_weight(const ZCoords& z, Spin spin) {
    check_subsidiary(z);
    const double r = std::abs(z.z_plus);
    return spin.dim() / (2.0 * kPi * kPi) / (r * (1.0 + r * r) * (1.0 + r * r));
}

double z_surface_density(const ZCoords& z, Spin spin) {
    check_subsidiary(z);
    const double r = std::abs(z.z_plus);
    return spin.dim() / (2.0 * kPi * kPi) * r / ((1.0 + r * r) * (1.0 + r * r));
}

double a_measure_weight(const ACoords& a, Spin spin) {
    check_normalized(a);
    return spin.dim() / (2.0 * kPi * kPi);
}

double kinetic_term_z(const FiducialVector& fv, const ZCoords& z, const ZCoords& z_dot) {
    check_subsidiary(z);
    const double r2 = std::norm(z.z_plus);
    // Both the A0 and the A3 pieces carry 1/|z+|^2.
    if (std::sqrt(r2) < kOriginTol) {
        throw Error(ErrorKind::ZOriginSingular, "z-chart kinetic term is singular at z+ = 0");
    }
    auto im_part = [](Complex w, Complex wdot) { return std::conj(w) * wdot - std::conj(wdot) * w; };
    const Complex a0_part = a0_of(fv) / (2.0 * r2) *
                            ((1.0 - r2) / (1.0 + r2) * im_part(z.z_plus, z_dot.z_plus) + im_part(z.z_minus, z_dot.z_minus));
    const Complex x = ladder_moment_conj(fv) * z.z_plus * std::conj(z_dot.z_plus) * z.z_minus;
    const Complex a3 = (x - std::conj(x)) / (r2 * (1.0 + r2));
    return (kI * (a0_part + a3)).real();
}

double kinetic_term_a(const FiducialVector& fv, const ACoords& a, const ACoords& a_dot) {
    check_normalized(a);
    auto im_part = [](Complex w, Complex wdot) { return std::conj(w) * wdot - std::conj(wdot) * w; };
    const Complex a0_part = a0_of(fv) * (im_part(a.a1, a_dot.a1) + im_part(a.a2, a_dot.a2));
    const Complex x = ladder_moment_conj(fv) * (a.a1 * a_dot.a2 - a_dot.a1 * a.a2);
    return (kI * (a0_part + x - std::conj(x))).real();
}

double a_sphere_resolution_residual(const FiducialVector& fv, const QuadratureGrid& grid) {
    const Spin spin = fv.spin();
    const int n = spin.dim();
    CMatrix sum = CMatrix::Zero(n, n);
    for (const GridNode& node : grid.nodes()) {
        // Each Euler node covers two points of S^3: psi and psi + 2 pi.
        for (int sheet = 0; sheet < 2; ++sheet) {
            const double psi = node.psi + sheet * kTwoPi;
            const ACoords a = omega_to_a(AngleTriple{node.phi, node.theta, psi});
            // dS^3 = (1/8) sin(theta) dtheta dphi dpsi, psi in [0, 4 pi).
            const double w = a_measure_weight(a, spin) * node.weight / 8.0;
            const Su2Lift lift = a_to_omega(a);
            StateVector v = coherent_amplitudes(fv, lift.angles.phi(), lift.angles.theta(), lift.angles.psi());
            v *= lift.phase(spin);
            sum.noalias() += w * (v * v.adjoint());
        }
    }
    return operator_norm(sum - CMatrix::Identity(n, n));
}

} // namespace spincs
