#include "spincs/propagator.hpp"

#include <cmath>

#include "spincs/parallel.hpp"

namespace spincs {

double TimeProfile::value(double t) const {
    switch (kind) {
    case Kind::Constant: return 1.0;
    case Kind::Cosine: return std::cos(omega * t + phase);
    case Kind::LinearRamp: return offset + slope * t;
    }
    return 1.0;
}

HamiltonianSpec HamiltonianSpec::create(Spin spin, std::vector<Monomial> terms) {
    HamiltonianSpec spec(spin, std::move(terms));
    const SpinOperators ops = spin_operators(spin);
    const int n = spin.dim();
    auto power = [n](const CMatrix& m, int k) {
        CMatrix out = CMatrix::Identity(n, n);
        for (int i = 0; i < k; ++i) out = out * m;
        return out;
    };
    for (const Monomial& term : spec.terms_) {
        if (term.p < 0 || term.q < 0 || term.r < 0) {
            throw Error(ErrorKind::InvalidArgument, "monomial exponents must be non-negative");
        }
        spec.operators_.push_back(power(ops.s_plus, term.p) * power(ops.s3, term.q) * power(ops.s_minus, term.r));
    }
    for (double t : {0.0, 0.3711, 1.2345, -2.71, 7.389}) {
        const CMatrix h = hamiltonian_matrix(spec, t);
        const double scale = std::max(1.0, h.norm());
        if ((h - h.adjoint()).norm() > 1e-12 * scale) {
            throw Error(ErrorKind::NotHermitian, "H(t) is not Hermitian at t=" + std::to_string(t));
        }
    }
    return spec;
}

bool HamiltonianSpec::time_independent() const {
    for (const Monomial& term : terms_) {
        if (term.profile.kind == TimeProfile::Kind::Cosine && term.profile.omega != 0.0) return false;
        if (term.profile.kind == TimeProfile::Kind::LinearRamp && term.profile.slope != 0.0) return false;
    }
    return true;
}

int HamiltonianSpec::max_degree() const {
    int d = 0;
    for (const Monomial& term : terms_) d = std::max(d, term.degree());
    return d;
}

CMatrix hamiltonian_matrix(const HamiltonianSpec& spec, double t) {
    const int n = spec.spin().dim();
    CMatrix h = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < spec.terms_.size(); ++k) {
        h += (spec.terms_[k].coeff * spec.terms_[k].profile.value(t)) * spec.operators_[k];
    }
    return h;
}

namespace {

void require_same_spin(const FiducialVector& fv, const HamiltonianSpec& spec) {
    if (fv.spin() != spec.spin()) throw Error(ErrorKind::SpinMismatch, "fiducial vector and Hamiltonian differ in spin");
}

StateVector amplitudes(const FiducialVector& fv, const AngleTriple& o) {
    return coherent_amplitudes(fv, o.phi, o.theta, o.psi);
}

} // namespace

double h_expectation(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega, double t) {
    require_same_spin(fv, spec);
    const StateVector v = amplitudes(fv, omega);
    return v.dot(hamiltonian_matrix(spec, t) * v).real();
}

double h_expectation(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega, double t) {
    return h_expectation(fv, spec, omega.triple(), t);
}

Complex h_ratio(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega2,
                const AngleTriple& omega1, double t) {
    require_same_spin(fv, spec);
    const StateVector v2 = amplitudes(fv, omega2);
    const StateVector v1 = amplitudes(fv, omega1);
    const Complex ov = v2.dot(v1);
    if (std::abs(ov) <= 1e-12) throw Error(ErrorKind::OrthogonalPair, "overlap vanishes");
    return v2.dot(hamiltonian_matrix(spec, t) * v1) / ov;
}

Complex h_ratio(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega2,
                const EulerAngles& omega1, double t) {
    return h_ratio(fv, spec, omega2.triple(), omega1.triple(), t);
}

CMatrix unitary_exp(const CMatrix& h, double dt) {
    const CMatrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    CVector phases(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) phases(i) = std::polar(1.0, -lam(i) * dt);
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix magnus_propagator(const HamiltonianSpec& spec, double t_i, double t_f, int n_steps, double hbar) {
    const int n = spec.spin().dim();
    const double dt = (t_f - t_i) / n_steps;
    CMatrix u = CMatrix::Identity(n, n);
    for (int k = 0; k < n_steps; ++k) {
        const double mid = t_i + (k + 0.5) * dt;
        u = unitary_exp(hamiltonian_matrix(spec, mid), dt / hbar) * u;
    }
    return u;
}

CMatrix exact_propagator(const HamiltonianSpec& spec, double t_i, double t_f, double tol, double hbar) {
    if (t_f < t_i) throw Error(ErrorKind::InvalidArgument, "t_f must not precede t_i");
    const int n = spec.spin().dim();
    if (spec.time_independent()) return unitary_exp(hamiltonian_matrix(spec, t_i), (t_f - t_i) / hbar);
    CMatrix prev = magnus_propagator(spec, t_i, t_f, 1, hbar);
    int steps = 1;
    for (int halving = 1; halving <= 24; ++halving) {
        steps *= 2;
        CMatrix next = magnus_propagator(spec, t_i, t_f, steps, hbar);
        if (operator_norm(next - prev) < tol) {
            // Roundoff in a product of `steps` unitaries grows with the step count.
            const double drift = std::max(tol, 1e-15 * steps);
            if (operator_norm(next.adjoint() * next - CMatrix::Identity(n, n)) > drift) {
                throw Error(ErrorKind::NoConvergence, "propagator lost unitarity");
            }
            return next;
        }
        prev = std::move(next);
    }
    throw Error(ErrorKind::NoConvergence, "time-ordered exponential did not converge after 24 halvings");
}

const char* to_string(KernelMode mode) {
    switch (mode) {
    case KernelMode::MatrixElement: return "M1";
    case KernelMode::OverlapRatio: return "M2";
    case KernelMode::Exponentiated: return "M3";
    }
    return "M1";
}

KernelMode kernel_mode_from_string(const std::string& name) {
    if (name == "M1") return KernelMode::MatrixElement;
    if (name == "M2") return KernelMode::OverlapRatio;
    if (name == "M3") return KernelMode::Exponentiated;
    throw Error(ErrorKind::InvalidArgument, "unknown kernel mode '" + name + "'");
}

namespace {

constexpr double kOrthogonalCut = 1e-12;

struct Chain {
    const FiducialVector& fv;
    const HamiltonianSpec& spec;
    const QuadratureGrid& grid;
    const CspiOptions& opt;
    double t_i;
    double eps;
    int n_slices;
    long long zeroed = 0;

    double mu() const { return fv.spin().dim() / (8.0 * kPi * kPi); }
    double slice_time(int j) const { return t_i + (j - 1) * eps; }  // left endpoint of kernel j

    // Kernel value for a single pair from its overlap and matrix element.
    Complex kernel(Complex ov, Complex hm) {
        const double a = eps / opt.hbar;
        if (opt.mode == KernelMode::MatrixElement) return ov - kI * a * hm;
        if (std::abs(ov) < kOrthogonalCut) {
            ++zeroed;
            return 0.0;
        }
        if (opt.mode == KernelMode::OverlapRatio) return ov * (1.0 - kI * a * (hm / ov));
        return std::exp(std::log(ov)) * std::exp(-kI * a * (hm / ov));
    }

    // Grid-space kernel matrix K[l, k] = k(Omega_l, Omega_k) at time t.
    CMatrix kernel_matrix(const CMatrix& states, const CMatrix& overlaps, double t) {
        const CMatrix hm = states.adjoint() * (hamiltonian_matrix(spec, t) * states);
        const Eigen::Index g = overlaps.rows();
        CMatrix k(g, g);
        for (Eigen::Index col = 0; col < g; ++col) {
            for (Eigen::Index row = 0; row < g; ++row) k(row, col) = kernel(overlaps(row, col), hm(row, col));
        }
        return k;
    }

    // Column kernel k(Omega_l, ket) for all grid points l.
    CVector kernel_from(const CMatrix& states, const StateVector& ket, double t) {
        const CVector ov = states.adjoint() * ket;
        const CVector hm = states.adjoint() * (hamiltonian_matrix(spec, t) * ket);
        CVector out(ov.size());
        for (Eigen::Index l = 0; l < ov.size(); ++l) out(l) = kernel(ov(l), hm(l));
        return out;
    }

    CVector weights(const CMatrix& states) const {
        CVector w(states.cols());
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = mu() * grid.nodes()[static_cast<std::size_t>(k)].weight;
        return w;
    }

    CVector apply(const CMatrix& k, const CVector& u) const {
        CVector out(k.rows());
        parallel_for(static_cast<std::size_t>(k.rows()), opt.threads, [&](std::size_t l) {
            out(static_cast<Eigen::Index>(l)) = k.row(static_cast<Eigen::Index>(l)).transpose().cwiseProduct(u).sum();
        });
        return out;
    }

    // Sweeps kernels j = first..last over the grid; u holds grid amplitudes
    // (already weighted) before kernel `first`.
    CVector sweep(const CMatrix& states, const CVector& w, CVector u, int first, int last) {
        if (first > last) return u;
        const CMatrix overlaps = states.adjoint() * states;
        const bool constant = spec.time_independent();
        CMatrix k;
        for (int j = first; j <= last; ++j) {
            if (!constant || j == first) {
                k = kernel_matrix(states, overlaps, slice_time(j));
            } else if (opt.mode != KernelMode::MatrixElement) {
                zeroed += count_zero(k);
            }
            u = w.cwiseProduct(apply(k, u));
        }
        return u;
    }

    static long long count_zero(const CMatrix& k) {
        long long c = 0;
        for (Eigen::Index i = 0; i < k.size(); ++i) c += k.data()[i] == Complex(0.0) ? 1 : 0;
        return c;
    }
};

CMatrix grid_projector(const CMatrix& states, const QuadratureGrid& grid, double mu, int threads) {
    const Eigen::Index n = states.rows();
    const CMatrix zero = CMatrix::Zero(n, n);
    CMatrix p = pairwise_sum(grid.size(), 64, threads, zero, [&](std::size_t k, CMatrix& acc) {
        const auto v = states.col(static_cast<Eigen::Index>(k));
        acc.noalias() += grid.nodes()[k].weight * (v * v.adjoint());
    });
    return mu * p;
}

void validate_chain(const FiducialVector& fv, const HamiltonianSpec& spec, int n_slices, const QuadratureGrid& grid,
                    const CspiOptions& options) {
    require_same_spin(fv, spec);
    if (n_slices < 1) throw Error(ErrorKind::InvalidArgument, "n_slices must be >= 1");
    if (!grid.exact_for(fv.spin())) {
        throw Error(ErrorKind::GridTooCoarse, "quadrature grid is not exact for spin " +
                                                  std::to_string(fv.spin().two_s()) + "/2");
    }
    if (options.mode != KernelMode::MatrixElement && grid.size() > options.max_grid_points) {
        throw Error(ErrorKind::InvalidArgument, "grid has " + std::to_string(grid.size()) +
                                                    " points; grid-space chains are capped at " +
                                                    std::to_string(options.max_grid_points));
    }
}

PropagatorResult make_result(int n_slices, const QuadratureGrid& grid, const CspiOptions& options) {
    PropagatorResult r;
    r.n_slices = n_slices;
    r.mode = options.mode;
    r.grid_n_theta = grid.n_theta();
    r.grid_n_phi = grid.n_phi();
    r.grid_n_psi = grid.n_psi();
    return r;
}

} // namespace

PropagatorResult discrete_cspi(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega_i,
                               const EulerAngles& omega_f, double t_i, double t_f, int n_slices,
                               const QuadratureGrid& grid, const CspiOptions& options) {
    validate_chain(fv, spec, n_slices, grid, options);
    PropagatorResult result = make_result(n_slices, grid, options);
    Chain chain{fv, spec, grid, options, t_i, (t_f - t_i) / n_slices, n_slices};
    const StateVector vi = amplitudes(fv, omega_i.triple());
    const StateVector vf = amplitudes(fv, omega_f.triple());
    const double a = chain.eps / options.hbar;

    if (options.mode == KernelMode::MatrixElement) {
        const CMatrix states = n_slices > 1 ? grid_states(fv, grid, options.threads) : CMatrix();
        const CMatrix p = n_slices > 1 ? grid_projector(states, grid, chain.mu(), options.threads) : CMatrix();
        StateVector v = vi;
        for (int j = 1; j <= n_slices; ++j) {
            v = v - kI * a * (hamiltonian_matrix(spec, chain.slice_time(j)) * v);
            if (j < n_slices) v = p * v;
        }
        result.amplitude = vf.dot(v);
    } else if (n_slices == 1) {
        result.amplitude = chain.kernel(vf.dot(vi), vf.dot(hamiltonian_matrix(spec, t_i) * vi));
    } else {
        const CMatrix states = grid_states(fv, grid, options.threads);
        const CVector w = chain.weights(states);
        CVector u = w.cwiseProduct(chain.kernel_from(states, vi, chain.slice_time(1)));
        u = chain.sweep(states, w, u, 2, n_slices - 1);
        // Last kernel k(Omega_f, Omega_l) for every grid point l.
        const CVector ov = states.adjoint() * vf;
        const CVector hm = states.adjoint() * (hamiltonian_matrix(spec, chain.slice_time(n_slices)).adjoint() * vf);
        Complex amp = 0.0;
        for (Eigen::Index l = 0; l < u.size(); ++l) amp += chain.kernel(std::conj(ov(l)), std::conj(hm(l))) * u(l);
        result.amplitude = amp;
    }
    result.zeroed_entries = chain.zeroed;

    if (options.compare_oracle) {
        const CMatrix u = exact_propagator(spec, t_i, t_f, options.oracle_tol, options.hbar);
        result.oracle = vf.dot(u * vi);
        result.error_estimate = std::abs(result.amplitude - result.oracle);
    }
    return result;
}

PropagatorResult transition_amplitude(const FiducialVector& fv, const HamiltonianSpec& spec, const StateVector& ket_i,
                                      const StateVector& ket_f, double t_i, double t_f, int n_slices,
                                      const QuadratureGrid& grid, const CspiOptions& options) {
    validate_chain(fv, spec, n_slices, grid, options);
    for (const StateVector* ket : {&ket_i, &ket_f}) {
        if (ket->size() != fv.spin().dim()) throw Error(ErrorKind::LengthMismatch, "endpoint state has wrong dimension");
        if (std::abs(ket->norm() - 1.0) > 1e-10) throw Error(ErrorKind::NotNormalized, "endpoint state is not normalized");
    }
    PropagatorResult result = make_result(n_slices, grid, options);
    Chain chain{fv, spec, grid, options, t_i, (t_f - t_i) / n_slices, n_slices};
    const CMatrix states = grid_states(fv, grid, options.threads);
    const double a = chain.eps / options.hbar;

    if (options.mode == KernelMode::MatrixElement) {
        const CMatrix p = grid_projector(states, grid, chain.mu(), options.threads);
        StateVector v = p * ket_i;
        for (int j = 1; j <= n_slices; ++j) {
            v = v - kI * a * (hamiltonian_matrix(spec, chain.slice_time(j)) * v);
            v = p * v;
        }
        result.amplitude = ket_f.dot(v);
    } else {
        const CVector w = chain.weights(states);
        CVector u = w.cwiseProduct(states.adjoint() * ket_i);
        u = chain.sweep(states, w, u, 1, n_slices);
        result.amplitude = (states.adjoint() * ket_f).dot(u);
    }
    result.zeroed_entries = chain.zeroed;

    if (options.compare_oracle) {
        const CMatrix u = exact_propagator(spec, t_i, t_f, options.oracle_tol, options.hbar);
        result.oracle = ket_f.dot(u * ket_i);
        result.error_estimate = std::abs(result.amplitude - result.oracle);
    }
    return result;
}

double action_along_path(const FiducialVector& fv, const HamiltonianSpec& spec, const Path& path, double hbar) {
    require_same_spin(fv, spec);
    const std::vector<AngleTriple> vel = path_velocities(path);
    auto lagrangian = [&](std::size_t i) {
        const AngleTriple o{path[i].phi, path[i].theta, path[i].psi};
        return hbar * kinetic_term(fv, o, vel[i]) - h_expectation(fv, spec, o, path[i].t);
    };
    double total = 0.0;
    double prev = lagrangian(0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double cur = lagrangian(i);
        total += 0.5 * (path[i].t - path[i - 1].t) * (prev + cur);
        prev = cur;
    }
    return total;
}

double discrete_action(const FiducialVector& fv, const HamiltonianSpec& spec, const Path& path, double hbar) {
    require_same_spin(fv, spec);
    if (path.size() < 2) throw Error(ErrorKind::PathTooShort, "path needs at least two samples");
    double total = 0.0;
    for (std::size_t j = 1; j < path.size(); ++j) {
        const AngleTriple cur{path[j].phi, path[j].theta, path[j].psi};
        const AngleTriple prev{path[j - 1].phi, path[j - 1].theta, path[j - 1].psi};
        const AngleTriple delta{cur.phi - prev.phi, cur.theta - prev.theta, cur.psi - prev.psi};
        const double eps = path[j].t - path[j - 1].t;
        total += hbar * one_form(fv, cur).contract(delta) - eps * h_ratio(fv, spec, cur, prev, path[j - 1].t).real();
    }
    return total;
}

Complex infinitesimal_overlap(const FiducialVector& fv, const AngleTriple& omega, const AngleTriple& delta) {
    const Spin spin = fv.spin();
    const CVector& c = fv.coeffs();
    double a0 = 0.0;
    for (int i = 0; i < spin.dim(); ++i) a0 += spin.m(i) * std::norm(c(i));
    const double st = std::sin(omega.theta);
    const Complex ep = std::polar(1.0, omega.psi);
    Complex sum = 0.0;
    // Row i holds m, row i + 1 holds m - 1.
    for (int i = 0; i + 1 < spin.dim(); ++i) {
        const double f = ladder_factor(spin, spin.two_m(i));
        sum += f * (c(i) * std::conj(c(i + 1)) * std::conj(ep) * Complex(delta.theta, delta.phi * st) -
                    std::conj(c(i)) * c(i + 1) * ep * Complex(delta.theta, -delta.phi * st));
    }
    return 1.0 + kI * a0 * (delta.phi * std::cos(omega.theta) + delta.psi) - 0.5 * sum;
}

Complex infinitesimal_overlap(const FiducialVector& fv, const EulerAngles& omega, const AngleTriple& delta) {
    return infinitesimal_overlap(fv, omega.triple(), delta);
}

} // namespace spincs
