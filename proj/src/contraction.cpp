#include "spincs/contraction.hpp"

#include <cmath>

#include "spincs/parametrizations.hpp"
#include "spincs/propagator.hpp"

namespace spincs {

FockVector FockVector::make(const CVector& raw, double tail) {
    if (raw.size() < 1) throw Error(ErrorKind::LengthMismatch, "Fock vector needs at least one level");
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::ZeroVector, "Fock vector has zero norm");
    return FockVector(raw / norm, tail);
}

FockVector FockVector::vacuum(int n_max) {
    CVector c = CVector::Zero(n_max + 1);
    c(0) = 1.0;
    return make(c);
}

int FockVector::degree() const {
    for (Eigen::Index n = coeffs_.size() - 1; n >= 0; --n) {
        if (std::abs(coeffs_(n)) > 0.0) return static_cast<int>(n);
    }
    return 0;
}

CMatrix annihilation_matrix(int n_max) {
    CMatrix a = CMatrix::Zero(n_max + 1, n_max + 1);
    for (int k = 1; k <= n_max; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

CMatrix displacement_matrix(Complex alpha, int n_max) {
    if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
    const CMatrix a = annihilation_matrix(n_max);
    const CMatrix x = alpha * a.adjoint() - std::conj(alpha) * a;
    // exp(X) = exp(-i (iX)) with iX Hermitian.
    return unitary_exp(kI * x, 1.0);
}

CVector dns_amplitudes(Complex alpha, int n, int n_max) {
    if (n < 0 || n > n_max) throw Error(ErrorKind::InvalidArgument, "need 0 <= n <= n_max");
    const double x = std::norm(alpha);
    const double pre = std::exp(-0.5 * x);
    CVector out(n_max + 1);
    for (int m = 0; m <= n_max; ++m) {
        if (m <= n) {
            const double ratio = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
            out(m) = pre * ratio * std::pow(-std::conj(alpha), n - m) *
                     std::assoc_laguerre(static_cast<unsigned>(m), static_cast<unsigned>(n - m), x);
        } else {
            const double ratio = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
            out(m) = pre * ratio * std::pow(alpha, m - n) *
                     std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(m - n), x);
        }
    }
    return out;
}

CanonicalCS canonical_cs(Complex alpha, const FockVector& fv, int n_max) {
    CVector amp = CVector::Zero(n_max + 1);
    for (int n = 0; n <= std::min(fv.n_max(), n_max); ++n) {
        if (fv.coeffs()(n) != Complex(0.0)) amp += fv.coeffs()(n) * dns_amplitudes(alpha, n, n_max);
    }
    return {alpha, fv, amp};
}

double dns_number_check(Complex alpha, int n, int n_max) {
    const CMatrix a = annihilation_matrix(n_max);
    const CMatrix id = CMatrix::Identity(n_max + 1, n_max + 1);
    const CVector v = dns_amplitudes(alpha, n, n_max);
    const CVector lhs = (a.adjoint() - std::conj(alpha) * id) * ((a - alpha * id) * v);
    return (lhs - static_cast<double>(n) * v).norm();
}

double ccs_eigen_check(Complex alpha, const FockVector& fv, int n_max) {
    const CMatrix a = annihilation_matrix(n_max);
    const CMatrix shifted = a - alpha * CMatrix::Identity(n_max + 1, n_max + 1);
    CVector v = canonical_cs(alpha, fv, n_max).amplitudes;
    for (int k = 0; k <= fv.degree(); ++k) v = shifted * v;
    return v.norm();
}

FockVector reindex_to_fock(const FiducialVector& fv_spin) {
    const Spin spin = fv_spin.spin();
    CVector c(spin.dim());
    // Row i holds m = s - i, so n = m + s = 2s - i.
    for (int i = 0; i < spin.dim(); ++i) c(spin.two_s() - i) = fv_spin.coeffs()(i);
    return FockVector::make(c);
}

FockVector hp_contract_state(const FiducialVector& fv_spin, Complex alpha, Spin spin, int n_max) {
    if (fv_spin.spin() != spin) throw Error(ErrorKind::SpinMismatch, "fiducial vector spin differs");
    if (spin.two_s() == 0) throw Error(ErrorKind::PoleMargin, "contraction needs s > 0");
    const Complex z_plus = alpha / std::sqrt(static_cast<double>(spin.two_s()));
    const double theta = 2.0 * std::atan(std::abs(z_plus));
    if (kPi - theta < 1e-6) throw Error(ErrorKind::PoleMargin, "|alpha| / sqrt(2s) too close to the tan pole");
    // z- = -conj(z+) gives psi = -phi; raw angles keep the chart continuous.
    const double phi = std::abs(z_plus) > 0.0 ? -std::arg(-z_plus) : 0.0;
    const StateVector amp = coherent_amplitudes(fv_spin, phi, theta, -phi);
    const int top = n_max < 0 ? spin.two_s() : std::min(n_max, spin.two_s());
    CVector c(top + 1);
    for (int n = 0; n <= top; ++n) c(n) = amp(spin.two_s() - n);
    const double kept = c.squaredNorm();
    return FockVector::make(c, std::max(0.0, 1.0 - kept));
}

double ccs_kinetic_term(Complex alpha, Complex alpha_dot, const FockVector& fv, double hbar) {
    const CVector& c = fv.coeffs();
    Complex a_term = 0.0;
    for (int n = 1; n <= fv.n_max(); ++n) {
        a_term += std::sqrt(static_cast<double>(n)) *
                  (alpha_dot * std::conj(c(n)) * c(n - 1) - std::conj(alpha_dot) * c(n) * std::conj(c(n - 1)));
    }
    a_term *= 2.0;
    const Complex base = std::conj(alpha) * alpha_dot - std::conj(alpha_dot) * alpha;
    return (0.5 * kI * hbar * (base + a_term)).real();
}

double spin_kinetic_along_alpha(const FiducialVector& fv_spin, Complex alpha, Complex alpha_dot, double hbar) {
    const double root = std::sqrt(static_cast<double>(fv_spin.spin().two_s()));
    const Complex zp = alpha / root;
    const Complex zp_dot = alpha_dot / root;
    return hbar * kinetic_term_z(fv_spin, ZCoords{zp, -std::conj(zp)}, ZCoords{zp_dot, -std::conj(zp_dot)});
}

CcsResolution ccs_resolution_residual(const FockVector& fv, double radial_max, int n_r, int n_phi, int n_levels,
                                      int n_max, double tol) {
    if (n_levels > n_max + 1) throw Error(ErrorKind::InvalidArgument, "n_levels exceeds the truncated space");
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(n_r, x, w);
    CMatrix sum = CMatrix::Zero(n_levels, n_levels);
    const double dphi = kTwoPi / n_phi;
    for (int i = 0; i < n_r; ++i) {
        const double r = 0.5 * radial_max * (x[i] + 1.0);
        const double wr = 0.5 * radial_max * w[i] * r;
        for (int j = 0; j < n_phi; ++j) {
            const CVector v = canonical_cs(std::polar(r, j * dphi), fv, n_max).amplitudes.head(n_levels);
            sum.noalias() += (wr * dphi / kPi) * (v * v.adjoint());
        }
    }
    CcsResolution out;
    out.residual = operator_norm(sum - CMatrix::Identity(n_levels, n_levels));
    out.flagged = out.residual > tol;
    return out;
}

Complex ccs_canonical_rhs(Complex alpha, const std::vector<FockMonomial>& terms, const FockVector& fv, int n_max,
                         double hbar) {
    const CMatrix a = annihilation_matrix(n_max);
    CMatrix h = CMatrix::Zero(n_max + 1, n_max + 1);
    for (const FockMonomial& t : terms) {
        CMatrix m = CMatrix::Identity(n_max + 1, n_max + 1);
        for (int k = 0; k < t.p; ++k) m = m * a.adjoint();
        for (int k = 0; k < t.q; ++k) m = m * a;
        h += t.coeff * m;
    }
    auto energy = [&](Complex al) {
        const CVector v = canonical_cs(al, fv, n_max).amplitudes;
        return v.dot(h * v).real();
    };
    const double step = 1e-6;
    const double dx = (energy(alpha + step) - energy(alpha - step)) / (2.0 * step);
    const double dy = (energy(alpha + kI * step) - energy(alpha - kI * step)) / (2.0 * step);
    const Complex d_conj = 0.5 * Complex(dx, dy);
    return -kI * d_conj / hbar;
}

double spin_alpha_density(double r, Spin spin) {
    const double two_s = spin.two_s();
    const double q = 1.0 + r * r / two_s;
    return (two_s + 1.0) / two_s * r / (kPi * q * q);
}

double ccs_alpha_density(double r) { return r / kPi; }

} // namespace spincs
