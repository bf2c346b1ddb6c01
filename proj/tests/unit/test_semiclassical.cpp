#include <doctest.h>

#include <cmath>

#include <spincs/semiclassical.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace spincs;
using namespace testutil;

namespace {

// H = w (S3 + g (S+ + S-)), i.e. a precession about a tilted axis.
HamiltonianSpec tilted(Spin s, double w, double g) {
    return HamiltonianSpec::create(s, {{0, 1, 0, w, {}}, {1, 0, 0, w * g, {}}, {0, 0, 1, w * g, {}}});
}

CMatrix tilted_matrix(int two_s, double w, double g) {
    const oracle::Ops ops = oracle::spin_ops(two_s);
    return w * (ops.s3 + g * (ops.sp + ops.sm));
}

CVector oracle_state(const FiducialVector& fv, double phi, double theta, double psi) {
    return oracle::rotation(fv.spin().two_s(), phi, theta, psi) * fv.coeffs();
}

struct SpinMean {
    double s3;
    Complex sp;
};

SpinMean mean(int two_s, const CVector& v) {
    const oracle::Ops ops = oracle::spin_ops(two_s);
    return {v.dot(ops.s3 * v).real(), v.dot(ops.sp * v)};
}

} // namespace

TEST_CASE("lowest weight fiducial reduces to the two sphere rows") {
    std::mt19937_64 rng(61);
    for (int two_s = 1; two_s <= 6; ++two_s) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::basis(s, -two_s);
        const AngleTriple o = random_angles(rng, 0.2);
        const VelocitySystem sys = build_system(fv, tilted(s, 1.0, 0.2), o, 0.0);
        const double w = -0.5 * two_s * std::sin(o.theta);
        CHECK(sys.m(0, 0) == doctest::Approx(w));
        CHECK(sys.m(1, 1) == doctest::Approx(w));
        CHECK(std::abs(sys.m(0, 2)) < 1e-12);
        CHECK(std::abs(sys.m(1, 2)) < 1e-12);
        CHECK(sys.m.row(2).norm() < 1e-12);
        CHECK(std::abs(sys.b(2)) < 1e-12);
        CHECK(sys.rank == 2);
    }
}

TEST_CASE("precession about S3 moves phi at the field frequency") {
    const double w = 1.7;
    for (int two_s : {1, 2, 5}) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::basis(s, -two_s);
        const HamiltonianSpec h = HamiltonianSpec::create(s, {{0, 1, 0, w, {}}});
        const VelocitySolution v = solve_velocities(build_system(fv, h, AngleTriple{0.3, 1.1, 0.4}, 0.0));
        CHECK(v.omega_dot.phi == doctest::Approx(w).epsilon(1e-12));
        CHECK(std::abs(v.omega_dot.theta) < 1e-12);
        CHECK(std::abs(v.omega_dot.psi) < 1e-12);
        CHECK(v.rank == 2);

        const double period = kTwoPi / w;
        const Trajectory tr = integrate_trajectory(fv, h, AngleTriple{0.3, 1.1, 0.4}, 0.0, period, period / 200);
        for (const TrajectoryPoint& p : tr.points) {
            CHECK(p.phi == doctest::Approx(0.3 + w * p.t).epsilon(1e-10));
            CHECK(p.theta == doctest::Approx(1.1).epsilon(1e-12));
            CHECK(p.psi == doctest::Approx(0.4).epsilon(1e-12));
        }
    }
}

TEST_CASE("antisymmetric form is antisymmetric") {
    std::mt19937_64 rng(62);
    for (int two_s = 1; two_s <= 7; ++two_s) {
        const Spin s(two_s);
        for (int rep = 0; rep < 5; ++rep) {
            const FiducialVector fv = FiducialVector::random(s, rng);
            const VelocitySystem sys = build_system(fv, tilted(s, 0.8, 0.3), random_angles(rng, 0.1), 0.0);
            const Eigen::Matrix3d f = sys.antisymmetric_form();
            CHECK((f + f.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("full rank systems solve directly") {
    std::mt19937_64 rng(63);
    for (int rep = 0; rep < 20; ++rep) {
        VelocitySystem sys;
        sys.m = Eigen::Matrix3d::Random() + 2.0 * Eigen::Matrix3d::Identity();
        sys.b = Eigen::Vector3d::Random();
        const VelocitySolution v = solve_velocities(sys);
        CHECK(v.rank == 3);
        CHECK(v.residual <= 1e-12);
        const Eigen::Vector3d x(v.omega_dot.phi, v.omega_dot.theta, v.omega_dot.psi);
        CHECK((sys.m * x - sys.b).norm() <= 1e-12);
    }
}

TEST_CASE("single m fiducial gives rank two and a frozen psi") {
    std::mt19937_64 rng(64);
    for (int two_s = 1; two_s <= 6; ++two_s) {
        const Spin s(two_s);
        for (int i = 0; i < s.dim(); ++i) {
            if (s.two_m(i) == 0) continue;
            const FiducialVector fv = FiducialVector::basis(s, s.two_m(i));
            const AngleTriple o = random_angles(rng, 0.2);
            const VelocitySystem sys = build_system(fv, tilted(s, 1.0, 0.4), o, 0.0);
            CHECK(sys.rank == 2);
            const VelocitySolution v = solve_velocities(sys);
            CHECK(std::abs(v.omega_dot.psi) < 1e-12);
        }
    }
}

TEST_CASE("an inconsistent system is reported") {
    VelocitySystem sys;
    sys.m << 0, 1, 0, -1, 0, 0, 0, 0, 0;
    sys.b << 0.2, 0.1, 1.0;
    try {
        solve_velocities(sys);
        FAIL("expected InconsistentSystem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InconsistentSystem);
    }
    const VelocitySolution v = solve_velocities(sys, false);
    CHECK_FALSE(v.consistent);
    CHECK(v.residual == doctest::Approx(1.0));
}

TEST_CASE("zero Hamiltonian leaves the path constant") {
    std::mt19937_64 rng(65);
    const Spin s(3);
    const FiducialVector fv = FiducialVector::random(s, rng);
    const AngleTriple o{0.7, 1.3, 2.1};
    const Trajectory tr = integrate_trajectory(fv, HamiltonianSpec::zero(s), o, 0.0, 5.0, 0.1);
    for (const TrajectoryPoint& p : tr.points) {
        CHECK(p.phi == 0.7);
        CHECK(p.theta == 1.3);
        CHECK(p.psi == 2.1);
    }
}

TEST_CASE("energy is conserved for a static Hamiltonian") {
    std::mt19937_64 rng(66);
    for (int two_s : {1, 2, 4}) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::random(s, rng);
        const HamiltonianSpec h = tilted(s, 1.0, 0.15);
        const Trajectory tr = integrate_trajectory(fv, h, AngleTriple{0.4, 1.0, 0.9}, 0.0, kTwoPi, 0.01);
        double drift = 0.0;
        for (const TrajectoryPoint& p : tr.points) drift = std::max(drift, std::abs(p.energy - tr.points[0].energy));
        CHECK(drift <= 1e-8);
        CHECK(tr.error_estimate < 1e-8);
    }
}

TEST_CASE("trajectory reproduces the quantum spin expectation") {
    // For a Hamiltonian linear in the generators the exact evolution stays
    // inside the coherent family, so <S> along the classical path must match
    // the Schroedinger evolution. Without the A1/A4 couplings it does not.
    std::mt19937_64 rng(67);
    const double w = 1.0;
    const double g = 0.15;
    for (int two_s : {2, 3}) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::random(s, rng);
        const AngleTriple o0{0.4, 1.0, 0.9};
        const HamiltonianSpec h = tilted(s, w, g);
        const CMatrix hm = tilted_matrix(two_s, w, g);
        const CVector v0 = oracle_state(fv, o0.phi, o0.theta, o0.psi);

        TrajectoryOptions opt;
        opt.estimate_error = false;
        const Trajectory full = integrate_trajectory(fv, h, o0, 0.0, kTwoPi, 0.01, opt);
        double dev = 0.0;
        for (std::size_t k = 0; k < full.points.size(); k += 64) {
            const TrajectoryPoint& p = full.points[k];
            const CVector exact = oracle::expm_taylor(Complex(0, -p.t) * hm) * v0;
            const SpinMean a = mean(two_s, exact);
            const SpinMean b = mean(two_s, oracle_state(fv, p.phi, p.theta, p.psi));
            dev = std::max({dev, std::abs(a.s3 - b.s3), std::abs(a.sp - b.sp)});
        }
        CHECK(dev <= 1e-8);

        opt.throw_on_inconsistent = false;
        opt.system.drop_interweaving = true;
        const Trajectory cut = integrate_trajectory(fv, h, o0, 0.0, kTwoPi, 0.01, opt);
        const TrajectoryPoint& p = cut.points.back();
        const CVector exact = oracle::expm_taylor(Complex(0, -p.t) * hm) * v0;
        const SpinMean a = mean(two_s, exact);
        const SpinMean b = mean(two_s, oracle_state(fv, p.phi, p.theta, p.psi));
        CHECK(std::abs(a.s3 - b.s3) + std::abs(a.sp - b.sp) > 1e-3);
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937_64 rng(68);
    for (int two_s = 1; two_s <= 5; ++two_s) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::random(s, rng);
        const HamiltonianSpec h = HamiltonianSpec::create(
            s, {{0, 1, 0, 0.7, TimeProfile::cosine(1.3, 0.2)}, {1, 0, 0, Complex(0.2, 0.5), {}},
                {0, 0, 1, Complex(0.2, -0.5), {}}});
        const AngleTriple o = random_angles(rng, 0.1);
        SystemOptions fd;
        fd.analytic_linear = false;
        const Eigen::Vector3d ga = energy_gradient(fv, h, o, 0.6);
        const Eigen::Vector3d gf = energy_gradient(fv, h, o, 0.6, fd);
        CHECK((ga - gf).cwiseAbs().maxCoeff() < 1e-8);

        // Independent central difference on oracle states.
        const CMatrix hm = hamiltonian_matrix(h, 0.6);
        auto e = [&](double phi, double theta, double psi) {
            const CVector v = oracle_state(fv, phi, theta, psi);
            return v.dot(hm * v).real();
        };
        const double d = 1e-5;
        CHECK(ga(0) == doctest::Approx((e(o.phi + d, o.theta, o.psi) - e(o.phi - d, o.theta, o.psi)) / (2 * d)).epsilon(1e-7));
        CHECK(ga(1) == doctest::Approx((e(o.phi, o.theta + d, o.psi) - e(o.phi, o.theta - d, o.psi)) / (2 * d)).epsilon(1e-7));
        CHECK(ga(2) == doctest::Approx((e(o.phi, o.theta, o.psi + d) - e(o.phi, o.theta, o.psi - d)) / (2 * d)).epsilon(1e-7));
    }
}
