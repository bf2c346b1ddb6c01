#include "spincs/coherent.hpp"

#include <cmath>

#include "spincs/parallel.hpp"

namespace spincs {

FiducialVector make_fiducial(Spin spin, const CVector& raw) {
    if (raw.size() != spin.dim()) {
        throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(spin.dim()) + " coefficients, got " +
                                                   std::to_string(raw.size()));
    }
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorKind::ZeroVector, "fiducial vector has zero norm");
    }
    CVector c = raw / norm;
    const double cutoff = 1e-14;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (std::abs(c(i)) > cutoff) {
            c *= std::polar(1.0, -std::arg(c(i)));
            c(i) = std::abs(c(i));
            break;
        }
    }
    return FiducialVector(spin, std::move(c));
}

FiducialVector make_fiducial(Spin spin, std::span<const Complex> raw) {
    CVector v(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) v(static_cast<Eigen::Index>(i)) = raw[i];
    return make_fiducial(spin, v);
}

FiducialVector FiducialVector::basis(Spin spin, int two_m) {
    CVector v = CVector::Zero(spin.dim());
    v(spin.index_of(two_m)) = 1.0;
    return make_fiducial(spin, v);
}

FiducialVector FiducialVector::random(Spin spin, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(spin.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = Complex(re, im);
    }
    return make_fiducial(spin, v);
}

namespace {

StateVector rotate_with_d(const FiducialVector& fv, const RMatrix& d, double phi, double psi) {
    const Spin spin = fv.spin();
    const int n = spin.dim();
    CVector right(n);
    for (int j = 0; j < n; ++j) right(j) = std::polar(1.0, -psi * spin.m(j)) * fv.coeffs()(j);
    StateVector out = d.cast<Complex>() * right;
    for (int i = 0; i < n; ++i) out(i) *= std::polar(1.0, -phi * spin.m(i));
    return out;
}

} // namespace

StateVector coherent_amplitudes(const FiducialVector& fv, double phi, double theta, double psi) {
    const Spin spin = fv.spin();
    const int n = spin.dim();
    // Only columns with nonzero coefficients are needed; this keeps large-s
    // states built from near-extremal weights cheap and accurate.
    CVector right(n);
    StateVector out = StateVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        const Complex c = fv.coeffs()(j);
        if (c == Complex(0.0)) continue;
        const Complex cj = std::polar(1.0, -psi * spin.m(j)) * c;
        for (int i = 0; i < n; ++i) out(i) += little_d_entry(spin, spin.two_m(i), spin.two_m(j), theta) * cj;
    }
    for (int i = 0; i < n; ++i) out(i) *= std::polar(1.0, -phi * spin.m(i));
    return out;
}

CoherentState coherent_state(const FiducialVector& fv, const EulerAngles& omega) {
    return {fv, omega, coherent_amplitudes(fv, omega.phi(), omega.theta(), omega.psi())};
}

Complex overlap(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1) {
    const StateVector a2 = coherent_amplitudes(fv, omega2.phi(), omega2.theta(), omega2.psi());
    const StateVector a1 = coherent_amplitudes(fv, omega1.phi(), omega1.theta(), omega1.psi());
    return a2.dot(a1);
}

Complex overlap_composition(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1) {
    const Su2Lift inv = invert_euler(omega2);
    Su2Lift omega3 = compose_euler(inv.angles, omega1);
    const double phase = inv.phase(fv.spin()) * omega3.phase(fv.spin());
    const StateVector a3 = coherent_amplitudes(fv, omega3.angles.phi(), omega3.angles.theta(), omega3.angles.psi());
    return phase * fv.coeffs().dot(a3);
}

Complex ladder_moment(const FiducialVector& fv) {
    const Spin spin = fv.spin();
    const CVector& c = fv.coeffs();
    Complex p = 0.0;
    for (int i = 0; i + 1 < spin.dim(); ++i) {
        p += ladder_factor(spin, spin.two_m(i)) * std::conj(c(i)) * c(i + 1);
    }
    return p;
}

MatrixElementSet matrix_element_set(const FiducialVector& fv, double phi, double theta, double psi) {
    const Spin spin = fv.spin();
    MatrixElementSet e;
    for (int i = 0; i < spin.dim(); ++i) e.a0 += spin.m(i) * std::norm(fv.coeffs()(i));
    const Complex p = ladder_moment(fv);
    const Complex pe = p * std::polar(1.0, psi);
    e.a1 = pe.real();
    e.a4 = pe.imag();
    const double ct = std::cos(theta);
    e.a2 = 0.5 * std::polar(1.0, phi) * ((1.0 + ct) * pe - (1.0 - ct) * std::conj(pe));
    return e;
}

MatrixElements matrix_elements(const FiducialVector& fv, double phi, double theta, double psi) {
    MatrixElements out;
    out.elems = matrix_element_set(fv, phi, theta, psi);
    out.s3_expect = out.elems.a0 * std::cos(theta) - out.elems.a1 * std::sin(theta);
    out.s_plus_expect = out.elems.a0 * std::sin(theta) * std::polar(1.0, phi) + out.elems.a2;
    out.s_minus_expect = std::conj(out.s_plus_expect);
    return out;
}

MatrixElements matrix_elements(const FiducialVector& fv, const EulerAngles& omega) {
    return matrix_elements(fv, omega.phi(), omega.theta(), omega.psi());
}

namespace {

// exp(z L) for a nilpotent ladder matrix L; the series terminates.
CMatrix nilpotent_exp(const CMatrix& ladder, Complex z) {
    const Eigen::Index n = ladder.rows();
    CMatrix sum = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        term = (term * ladder) * (z / static_cast<double>(k));
        sum += term;
    }
    return sum;
}

} // namespace

Complex generating_function(const FiducialVector& fv, const EulerAngles& omega2, const EulerAngles& omega1,
                            Complex z_plus, Complex z3, Complex z_minus) {
    const Spin spin = fv.spin();
    const SpinOperators ops = spin_operators(spin);
    CMatrix middle = nilpotent_exp(ops.s_plus, z_plus);
    for (int j = 0; j < spin.dim(); ++j) middle.col(j) *= std::exp(z3 * spin.m(j));
    middle = middle * nilpotent_exp(ops.s_minus, z_minus);
    const StateVector a2 = coherent_amplitudes(fv, omega2.phi(), omega2.theta(), omega2.psi());
    const StateVector a1 = coherent_amplitudes(fv, omega1.phi(), omega1.theta(), omega1.psi());
    return a2.dot(middle * a1);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

QuadratureGrid QuadratureGrid::product(int n_theta, int n_phi, int n_psi) {
    if (n_theta < 1 || n_phi < 1 || n_psi < 1) {
        throw Error(ErrorKind::InvalidArgument, "grid dimensions must be positive");
    }
    QuadratureGrid g;
    g.n_theta_ = n_theta;
    g.n_phi_ = n_phi;
    g.n_psi_ = n_psi;
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(n_theta, x, w);
    g.theta_.resize(n_theta);
    const double dphi = kTwoPi / n_phi;
    const double dpsi = kTwoPi / n_psi;
    g.nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi * n_psi);
    for (int a = 0; a < n_theta; ++a) {
        g.theta_[a] = std::acos(x[a]);
        for (int b = 0; b < n_phi; ++b) {
            for (int c = 0; c < n_psi; ++c) {
                g.nodes_.push_back({b * dphi, g.theta_[a], c * dpsi, w[a] * dphi * dpsi, a});
            }
        }
    }
    return g;
}

int QuadratureGrid::exact_two_s() const noexcept {
    return std::min({n_theta_ - 1, (n_phi_ - 1) / 2, (n_psi_ - 1) / 2});
}

double QuadratureGrid::total_weight() const {
    return pairwise_sum(nodes_.size(), 256, 1, 0.0,
                        [&](std::size_t i, double& acc) { acc += nodes_[i].weight; });
}

QuadratureGrid build_grid(Spin spin_max, double oversample) {
    if (!(oversample >= 1.0)) throw Error(ErrorKind::InvalidArgument, "oversample must be >= 1");
    // Guard against 1.2 * 5 = 6.000000000000001 rounding up.
    auto count = [&](double base) { return static_cast<int>(std::ceil(oversample * base - 1e-9)); };
    const int n_theta = count(spin_max.two_s() + 2.0);
    const int n_angle = count(2.0 * spin_max.two_s() + 3.0);
    return QuadratureGrid::product(n_theta, n_angle, n_angle);
}

CMatrix grid_states(const FiducialVector& fv, const QuadratureGrid& grid, int threads) {
    const Spin spin = fv.spin();
    std::vector<RMatrix> d(grid.n_theta());
    for (int a = 0; a < grid.n_theta(); ++a) d[a] = little_d(spin, grid.theta_nodes()[a]);
    CMatrix states(spin.dim(), static_cast<Eigen::Index>(grid.size()));
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        const GridNode& node = grid.nodes()[k];
        states.col(static_cast<Eigen::Index>(k)) = rotate_with_d(fv, d[node.theta_index], node.phi, node.psi);
    });
    return states;
}

double operator_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

ResolutionResult resolution_residual(const FiducialVector& fv, const QuadratureGrid& grid, int threads) {
    const Spin spin = fv.spin();
    const int n = spin.dim();
    const CMatrix states = grid_states(fv, grid, threads);
    const CMatrix zero = CMatrix::Zero(n, n);
    CMatrix sum = pairwise_sum(grid.size(), 64, threads, zero, [&](std::size_t k, CMatrix& acc) {
        const auto v = states.col(static_cast<Eigen::Index>(k));
        acc.noalias() += grid.nodes()[k].weight * (v * v.adjoint());
    });
    sum *= static_cast<double>(n) / (8.0 * kPi * kPi);
    sum -= CMatrix::Identity(n, n);
    return {operator_norm(sum), !grid.exact_for(spin)};
}

} // namespace spincs
