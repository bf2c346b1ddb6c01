#include "spincs/semiclassical.hpp"

#include <cmath>
#include <cstdio>

namespace spincs {

Eigen::Matrix3d VelocitySystem::antisymmetric_form() const {
    Eigen::Matrix3d f;
    f.row(0) = m.row(1);
    f.row(1) = -m.row(0);
    f.row(2) = m.row(2);
    return f;
}

namespace {

// Gradient of <S3> and <S+> in (phi, theta, psi).
void linear_gradients(const FiducialVector& fv, const AngleTriple& o, Eigen::Vector3d& g3, Eigen::Vector3cd& gp,
                      Complex& s_plus) {
    const MatrixElements me = matrix_elements(fv, o.phi, o.theta, o.psi);
    const MatrixElementSet& e = me.elems;
    const double ct = std::cos(o.theta);
    const double st = std::sin(o.theta);
    const Complex ef = std::polar(1.0, o.phi);
    const Complex pe(e.a1, e.a4);
    g3 << 0.0, -e.a0 * st - e.a1 * ct, e.a4 * st;
    s_plus = me.s_plus_expect;
    gp << kI * s_plus, ef * (e.a0 * ct - e.a1 * st), 0.5 * ef * kI * ((1.0 + ct) * pe + (1.0 - ct) * std::conj(pe));
}

} // namespace

Eigen::Vector3d energy_gradient(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega,
                                double t, const SystemOptions& options) {
    if (options.analytic_linear && spec.max_degree() <= 1) {
        Eigen::Vector3d g3;
        Eigen::Vector3cd gp;
        Complex s_plus;
        linear_gradients(fv, omega, g3, gp, s_plus);
        Eigen::Vector3cd total = Eigen::Vector3cd::Zero();
        for (const Monomial& term : spec.terms()) {
            const Complex k = term.coeff * term.profile.value(t);
            if (term.p == 1) total += k * gp;
            else if (term.q == 1) total += k * g3.cast<Complex>();
            else if (term.r == 1) total += k * gp.conjugate();
        }
        return total.real();
    }
    const double h = options.fd_step;
    Eigen::Vector3d g;
    for (int k = 0; k < 3; ++k) {
        AngleTriple plus = omega;
        AngleTriple minus = omega;
        double* pp = k == 0 ? &plus.phi : (k == 1 ? &plus.theta : &plus.psi);
        double* pm = k == 0 ? &minus.phi : (k == 1 ? &minus.theta : &minus.psi);
        *pp += h;
        *pm -= h;
        g(k) = (h_expectation(fv, spec, plus, t) - h_expectation(fv, spec, minus, t)) / (2.0 * h);
    }
    return g;
}

VelocitySystem build_system(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega, double t,
                            const SystemOptions& options) {
    MatrixElementSet e = matrix_element_set(fv, omega.phi, omega.theta, omega.psi);
    if (options.drop_interweaving) e.a1 = e.a4 = 0.0;
    const double ct = std::cos(omega.theta);
    const double st = std::sin(omega.theta);
    const double w = e.a0 * st + e.a1 * ct;
    const double hb = options.hbar;

    VelocitySystem sys;
    sys.m << hb * w, 0.0, hb * e.a1,
             0.0, hb * w, -hb * e.a4 * st,
             hb * e.a4 * st, hb * e.a1, 0.0;
    const Eigen::Vector3d g = energy_gradient(fv, spec, omega, t, options);
    sys.b << -g(1), g(0), g(2);
    const VelocitySolution sol = solve_velocities(sys, false);
    sys.rank = sol.rank;
    sys.residual = sol.residual;
    return sys;
}

VelocitySystem build_system(const FiducialVector& fv, const HamiltonianSpec& spec, const EulerAngles& omega, double t,
                            const SystemOptions& options) {
    return build_system(fv, spec, omega.triple(), t, options);
}

VelocitySolution solve_velocities(const VelocitySystem& sys, bool throw_on_inconsistent) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(sys.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const Eigen::Vector3d x = svd.solve(sys.b);
    VelocitySolution out;
    out.omega_dot = {x(0), x(1), x(2)};
    out.rank = static_cast<int>(svd.rank());
    out.residual = (sys.m * x - sys.b).norm();
    out.consistent = out.residual <= 1e-8 * sys.b.norm();
    if (!out.consistent && throw_on_inconsistent) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "residual %.3e exceeds 1e-8 |b| = %.3e", out.residual, 1e-8 * sys.b.norm());
        throw Error(ErrorKind::InconsistentSystem, buf);
    }
    return out;
}

namespace {

struct Rk4Run {
    const FiducialVector& fv;
    const HamiltonianSpec& spec;
    const TrajectoryOptions& opt;

    Eigen::Vector3d rate(const Eigen::Vector3d& y, double t) const {
        const VelocitySystem sys = build_system(fv, spec, AngleTriple{y(0), y(1), y(2)}, t, opt.system);
        try {
            const VelocitySolution s = solve_velocities(sys, opt.throw_on_inconsistent);
            return {s.omega_dot.phi, s.omega_dot.theta, s.omega_dot.psi};
        } catch (const Error& err) {
            throw Error(err.kind(), err.detail() + " at t=" + std::to_string(t));
        }
    }

    std::vector<Eigen::Vector3d> run(const Eigen::Vector3d& y0, double t0, double h, int n) const {
        std::vector<Eigen::Vector3d> ys{y0};
        Eigen::Vector3d y = y0;
        for (int k = 0; k < n; ++k) {
            const double t = t0 + k * h;
            const Eigen::Vector3d k1 = rate(y, t);
            const Eigen::Vector3d k2 = rate(y + 0.5 * h * k1, t + 0.5 * h);
            const Eigen::Vector3d k3 = rate(y + 0.5 * h * k2, t + 0.5 * h);
            const Eigen::Vector3d k4 = rate(y + h * k3, t + h);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ys.push_back(y);
        }
        return ys;
    }
};

} // namespace

Trajectory integrate_trajectory(const FiducialVector& fv, const HamiltonianSpec& spec, const AngleTriple& omega0,
                                double t0, double t1, double dt, const TrajectoryOptions& options) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    if (t1 < t0) throw Error(ErrorKind::InvalidArgument, "t1 must not precede t0");
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / n;
    const Rk4Run rk{fv, spec, options};
    const Eigen::Vector3d y0(omega0.phi, omega0.theta, omega0.psi);
    const std::vector<Eigen::Vector3d> ys = rk.run(y0, t0, h, n);

    Trajectory traj;
    traj.points.reserve(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const AngleTriple o{ys[k](0), ys[k](1), ys[k](2)};
        const VelocitySystem sys = build_system(fv, spec, o, t, options.system);
        traj.points.push_back({t, o.phi, o.theta, o.psi, h_expectation(fv, spec, o, t), sys.rank, sys.residual});
    }
    if (options.estimate_error) {
        const std::vector<Eigen::Vector3d> fine = rk.run(y0, t0, 0.5 * h, 2 * n);
        traj.error_estimate = (fine.back() - ys.back()).cwiseAbs().maxCoeff();
    }
    return traj;
}

} // namespace spincs
