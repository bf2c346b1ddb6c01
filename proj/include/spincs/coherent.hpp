#pragma once

#include <random>
#include <span>
#include <vector>

#include "spincs/spin_core.hpp"

namespace spincs {

// Normalized fiducial vector, coefficients in m-descending order. The first
// nonzero coefficient is real and positive.
class FiducialVector {
public:
    Spin spin() const noexcept { return spin_; }
    const CVector& coeffs() const noexcept { return coeffs_; }
    Complex coeff(int two_m) const { return coeffs_(spin_.index_of(two_m)); }

    static FiducialVector basis(Spin spin, int two_m);
    static FiducialVector random(Spin spin, std::mt19937_64& rng);

private:
    FiducialVector(Spin spin, CVector coeffs) : spin_(spin), coeffs_(std::move(coeffs)) {}
    friend FiducialVector make_fiducial(Spin spin, const CVector& raw);

    Spin spin_;
    CVector coeffs_;
};

FiducialVector make_fiducial(Spin spin, const CVector& raw);
FiducialVector make_fiducial(Spin spin, std::span<const Complex> raw);

struct CoherentState {
    FiducialVector fv;
    EulerAngles omega;
    StateVector amplitudes;
};

CoherentState coherent_state(const FiducialVector& fv, const EulerAngles& omega);
// R(phi, theta, psi) applied to the coefficients, angles taken as given.
StateVector coherent_amplitudes(const FiducialVector& fv, double phi, double theta, double psi);

Complex overlap(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1);
// <Psi0| R(omega3) |Psi0> with omega3 = omega2^-1 omega1, lift sign applied.
Complex overlap_composition(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1);

struct MatrixElementSet {
    double a0 = 0.0;
    double a1 = 0.0;
    Complex a2;
    double a4 = 0.0;
};

// P = sum_m f(s,m) c_m^* c_{m-1}; A1 and A4 are Re and Im of P e^{i psi}.
Complex ladder_moment(const FiducialVector& fv);
MatrixElementSet matrix_element_set(const FiducialVector& fv, double phi, double theta, double psi);

struct MatrixElements {
    double s3_expect = 0.0;
    Complex s_plus_expect;
    Complex s_minus_expect;
    MatrixElementSet elems;
};

MatrixElements matrix_elements(const FiducialVector& fv, const EulerAngles& omega);
MatrixElements matrix_elements(const FiducialVector& fv, double phi, double theta, double psi);

// <omega2| e^{z+ S+} e^{z3 S3} e^{z- S-} |omega1>.
Complex generating_function(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1,
                            Complex z_plus, Complex z3, Complex z_minus);

struct GridNode {
    double phi;
    double theta;
    double psi;
    double weight;
    int theta_index;
};

// Gauss-Legendre in cos(theta) times uniform phi and psi; total weight 8 pi^2.
class QuadratureGrid {
public:
    static QuadratureGrid product(int n_theta, int n_phi, int n_psi);

    int n_theta() const noexcept { return n_theta_; }
    int n_phi() const noexcept { return n_phi_; }
    int n_psi() const noexcept { return n_psi_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& theta_nodes() const noexcept { return theta_; }

    // Largest 2s for which the grid integrates |Omega><Omega| exactly:
    // n_theta >= 2s+1 and n_phi, n_psi >= 4s+1.
    int exact_two_s() const noexcept;
    bool exact_for(Spin spin) const noexcept { return spin.two_s() <= exact_two_s(); }
    double total_weight() const;

private:
    int n_theta_ = 0;
    int n_phi_ = 0;
    int n_psi_ = 0;
    std::vector<double> theta_;
    std::vector<GridNode> nodes_;
};

QuadratureGrid build_grid(Spin spin_max, double oversample = 1.2);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Coherent-state amplitudes at every grid node, one column per node.
CMatrix grid_states(const FiducialVector& fv, const QuadratureGrid& grid, int threads = 1);

struct ResolutionResult {
    double residual = 0.0;
    bool grid_too_coarse = false;
};

// Operator norm of (2s+1)/(8 pi^2) sum_grid w |Omega><Omega| - 1.
ResolutionResult resolution_residual(const FiducialVector& fv, const QuadratureGrid& grid, int threads = 1);

double operator_norm(const CMatrix& m);

} // namespace spincs
