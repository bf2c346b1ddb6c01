#pragma once

#include "spincs/errors.hpp"
#include "spincs/types.hpp"

namespace spincs {

// Spin quantum number stored as the integer 2s. Basis index i runs over
// m = s - i (m-descending).
class Spin {
public:
    explicit Spin(int two_s);

    int two_s() const noexcept { return two_s_; }
    int dim() const noexcept { return two_s_ + 1; }
    double s() const noexcept { return 0.5 * two_s_; }
    // 2m of basis row `index`.
    int two_m(int index) const noexcept { return two_s_ - 2 * index; }
    double m(int index) const noexcept { return 0.5 * two_m(index); }
    int index_of(int two_m) const;

    bool operator==(const Spin&) const = default;

private:
    int two_s_;
};

// f(s, m) = sqrt((s+m)(s-m+1)), the S+ matrix element <m|S+|m-1>.
double ladder_factor(Spin spin, int two_m);

// Euler angles folded into phi, psi in [0, 2pi), theta in [0, pi].
class EulerAngles {
public:
    EulerAngles() = default;
    EulerAngles(double phi, double theta, double psi);

    double phi() const noexcept { return phi_; }
    double theta() const noexcept { return theta_; }
    double psi() const noexcept { return psi_; }
    AngleTriple triple() const noexcept { return {phi_, theta_, psi_}; }

    // SU(2) sign picked up by folding: R^(1/2)(raw) = sign * R^(1/2)(normalized).
    static int fold_sign(double phi, double theta, double psi);

private:
    double phi_ = 0.0;
    double theta_ = 0.0;
    double psi_ = 0.0;
};

// Euler angles plus the SU(2) lift sign: the s=1/2 matrix of `angles`
// times `sign` is the exact group element.
struct Su2Lift {
    EulerAngles angles;
    int sign = 1;

    // Phase relating R^(s)(angles) to the exact representation: sign^(2s).
    double phase(Spin spin) const noexcept {
        return (sign < 0 && (spin.two_s() & 1)) ? -1.0 : 1.0;
    }
};

RMatrix little_d(Spin spin, double theta);
// Single entry r_{mm'}(theta); cheap for columns near the extremal weights.
double little_d_entry(Spin spin, int two_m, int two_mp, double theta);

CMatrix big_r(Spin spin, const EulerAngles& omega);
// Same formula on raw angles; no folding.
CMatrix rotation_matrix(Spin spin, double phi, double theta, double psi);

Eigen::Matrix2cd su2_matrix(double phi, double theta, double psi);

Su2Lift compose_euler(const EulerAngles& omega2, const EulerAngles& omega1);
Su2Lift invert_euler(const EulerAngles& omega);
Su2Lift euler_from_su2(const Eigen::Matrix2cd& u);

// Residual of the closed-form two-rotation relations (cos of the composite
// polar angle and the two complex half-angle relations) for a composition.
double tworots_residual(const EulerAngles& omega2, const EulerAngles& omega1, const Su2Lift& result);

// Closed-form cos(theta') for R(omega2) R(omega) R(omega1).
double trirots_cos_theta(const EulerAngles& omega2, const EulerAngles& omega, const EulerAngles& omega1);

struct GaussianParams {
    Complex z_plus;
    Complex z3;
    Complex z_minus;
};

GaussianParams gaussian_decompose(const EulerAngles& omega);
GaussianParams gaussian_decompose(double phi, double theta, double psi);

struct SpinOperators {
    Spin spin{0};
    CMatrix s3;
    CMatrix s_plus;
    CMatrix s_minus;

    CMatrix s1() const { return 0.5 * (s_plus + s_minus); }
    CMatrix s2() const { return Complex(0.0, -0.5) * (s_plus - s_minus); }
};

SpinOperators spin_operators(Spin spin);
// R^dagger S R, via closed forms in the original operators.
SpinOperators conjugate_spin_ops(const EulerAngles& omega, Spin spin);

} // namespace spincs
