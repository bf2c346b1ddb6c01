#pragma once

#include <limits>
#include <vector>

#include "spincs/geometry.hpp"

namespace spincs {

struct TimeProfile {
    enum class Kind { Constant, Cosine, LinearRamp };

    Kind kind = Kind::Constant;
    double omega = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double slope = 0.0;

    static TimeProfile constant() { return {}; }
    static TimeProfile cosine(double omega, double phase) { return {Kind::Cosine, omega, phase, 0.0, 0.0}; }
    static TimeProfile linear_ramp(double offset, double slope) { return {Kind::LinearRamp, 0.0, 0.0, offset, slope}; }

    double value(double t) const;
};

// coeff * profile(t) * S+^p S3^q S-^r
struct Monomial {
    int p = 0;
    int q = 0;
    int r = 0;
    Complex coeff;
    TimeProfile profile;

    int degree() const { return p + q + r; }
};

class HamiltonianSpec {
public:
    // Validates Hermiticity of H(t) at a fixed set of sample times.
    static HamiltonianSpec create(Spin spin, std::vector<Monomial> terms);
    static HamiltonianSpec zero(Spin spin) { return create(spin, {}); }

    Spin spin() const noexcept { return spin_; }
    const std::vector<Monomial>& terms() const noexcept { return terms_; }
    bool time_independent() const;
    int max_degree() const;

private:
    HamiltonianSpec(Spin spin, std::vector<Monomial> terms) : spin_(spin), terms_(std::move(terms)) {}
    friend CMatrix hamiltonian_matrix(const HamiltonianSpec& spec, double t);

    Spin spin_;
    std::vector<Monomial> terms_;
    std::vector<CMatrix> operators_;
};

CMatrix hamiltonian_matrix(const HamiltonianSpec& spec, double t);

double h_expectation(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega, double t);
double h_expectation(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega, double t);
// <omega2|H|omega1> / <omega2|omega1>.
Complex h_ratio(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega2,
                const EulerAngles& omega1, double t);
Complex h_ratio(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega2,
                const AngleTriple& omega1, double t);

// exp(-i H dt) for Hermitian H via eigendecomposition.
CMatrix unitary_exp(const CMatrix& h, double dt);

// Midpoint (second-order Magnus) product with a fixed number of steps.
CMatrix magnus_propagator(const HamiltonianSpec& spec, double t_i, double t_f, int n_steps, double hbar = 1.0);

// Time-ordered exponential; steps are doubled until successive results agree to tol.
CMatrix exact_propagator(const HamiltonianSpec& spec, double t_i, double t_f, double tol, double hbar = 1.0);

enum class KernelMode {
    MatrixElement,  // <j| (1 - i eps H / hbar) |j-1>
    OverlapRatio,   // <j|j-1> (1 - i eps H(j, j-1) / hbar)
    Exponentiated,  // exp(ln <j|j-1>) exp(-i eps H(j, j-1) / hbar)
};

const char* to_string(KernelMode mode);
KernelMode kernel_mode_from_string(const std::string& name);

struct CspiOptions {
    KernelMode mode = KernelMode::MatrixElement;
    double hbar = 1.0;
    int threads = 1;
    bool compare_oracle = false;
    double oracle_tol = 1e-12;
    // Grid-space chains (overlap-ratio and exponentiated modes) hold a G x G kernel.
    std::size_t max_grid_points = 5000;
};

struct PropagatorResult {
    Complex amplitude;
    int n_slices = 0;
    KernelMode mode = KernelMode::MatrixElement;
    int grid_n_theta = 0;
    int grid_n_phi = 0;
    int grid_n_psi = 0;
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
    Complex oracle = std::numeric_limits<double>::quiet_NaN();
    long long zeroed_entries = 0;
};

// Discrete coherent-state path integral with n_slices short-time kernels
// (n_slices - 1 intermediate grid integrations, eps = (t_f - t_i) / n_slices).
PropagatorResult discrete_cspi(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega_i,
                               const EulerAngles& omega_f, double t_i, double t_f, int n_slices,
                               const QuadratureGrid& grid, const CspiOptions& options = {});

// Endpoint states integrated against the grid as well.
PropagatorResult transition_amplitude(const FiducialVector& fv, const HamiltonianSpec& spec, const StateVector& ket_i,
                                      const StateVector& ket_f, double t_i, double t_f, int n_slices,
                                      const QuadratureGrid& grid, const CspiOptions& options = {});

// Trapezoid integral of hbar * kinetic_term - H along the path.
double action_along_path(const FiducialVector& fv, const HamiltonianSpec& spec, const Path& path, double hbar = 1.0);

// Sum over consecutive samples of hbar * kappa(Omega_j)(Delta_j) - eps_j Re H(Omega_j, Omega_{j-1}; t_{j-1}).
double discrete_action(const FiducialVector& fv, const HamiltonianSpec& spec, const Path& path, double hbar = 1.0);

// First-order expansion of <Omega + delta|Omega>.
Complex infinitesimal_overlap(const FiducialVector& fv, const AngleTriple& omega, const AngleTriple& delta);
Complex infinitesimal_overlap(const FiducialVector& fv, const EulerAngles& omega, const AngleTriple& delta);

} // namespace spincs
