#pragma once

#include <vector>

#include "spincs/coherent.hpp"

namespace spincs {

// Truncated Fock-space coefficients c_0..c_{n_max}, normalized.
class FockVector {
public:
    static FockVector make(const CVector& raw, double tail = 0.0);
    static FockVector vacuum(int n_max = 0);

    int n_max() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const CVector& coeffs() const noexcept { return coeffs_; }
    // Largest n with a nonzero coefficient.
    int degree() const;
    // Weight discarded by truncation before renormalization.
    double tail() const noexcept { return tail_; }

private:
    FockVector(CVector c, double tail) : coeffs_(std::move(c)), tail_(tail) {}

    CVector coeffs_;
    double tail_ = 0.0;
};

struct CanonicalCS {
    Complex alpha;
    FockVector fv;
    CVector amplitudes;
};

// Ladder operator a on the truncated space of dimension n_max + 1.
CMatrix annihilation_matrix(int n_max);

CMatrix displacement_matrix(Complex alpha, int n_max);
// <m| D(alpha) |n> for m = 0..n_max by the closed Laguerre form.
CVector dns_amplitudes(Complex alpha, int n, int n_max);
CanonicalCS canonical_cs(Complex alpha, const FockVector& fv, int n_max);

// || (a^+ - alpha^*)(a - alpha)|alpha, n> - n |alpha, n> ||
double dns_number_check(Complex alpha, int n, int n_max);
// || (a - alpha)^(N+1) |alpha> ||, N the degree of fv.
double ccs_eigen_check(Complex alpha, const FockVector& fv, int n_max);

// c_m -> c_n with n = m + s.
FockVector reindex_to_fock(const FiducialVector& fv_spin);

// Spin coherent state at z+ = alpha / sqrt(2s), z- = -conj(z+), reindexed
// onto Fock levels. n_max < 0 keeps all 2s + 1 levels.
FockVector hp_contract_state(const FiducialVector& fv_spin, Complex alpha, Spin spin, int n_max = -1);

// (i hbar / 2) [(alpha^* alphadot - c.c.) + A].
double ccs_kinetic_term(Complex alpha, Complex alpha_dot, const FockVector& fv, double hbar = 1.0);
// Spin-side kinetic term along the contraction chart z+ = alpha / sqrt(2s), z- = -conj(z+).
double spin_kinetic_along_alpha(const FiducialVector& fv_spin, Complex alpha, Complex alpha_dot, double hbar = 1.0);

struct CcsResolution {
    double residual = 0.0;
    bool flagged = false;
};

// (1/pi) int_{|alpha| <= radial_max} |alpha><alpha| d^2 alpha on the first
// n_levels Fock levels, Gauss-Legendre in |alpha| times uniform in arg(alpha).
CcsResolution ccs_resolution_residual(const FockVector& fv, double radial_max, int n_r, int n_phi, int n_levels = 20,
                                      int n_max = 40, double tol = 1e-6);

// a^+^p a^q with a complex coefficient.
struct FockMonomial {
    int p = 0;
    int q = 0;
    Complex coeff;
};

// alphadot = -(i / hbar) dH/dalpha^*, H = <alpha|H|alpha> on the truncated space.
Complex ccs_canonical_rhs(Complex alpha, const std::vector<FockMonomial>& terms, const FockVector& fv, int n_max = 60,
                          double hbar = 1.0);

// Radial densities in |alpha| after integrating the remaining angles.
double spin_alpha_density(double r, Spin spin);
double ccs_alpha_density(double r);

} // namespace spincs
