#include <doctest.h>

#include <cmath>
#include <vector>

#include <spincs/coherent.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace spincs;
using namespace testutil;

namespace {

CVector dense_state(const FiducialVector& fv, const AngleTriple& a) {
    return oracle::rotation(fv.spin().two_s(), a.phi, a.theta, a.psi) * fv.coeffs();
}

} // namespace

TEST_CASE("fiducial vector construction") {
    CVector raw(2);
    raw << 0.0, 1.0;
    FiducialVector fv = make_fiducial(Spin(1), raw);
    CHECK(fv.coeff(-1) == Complex(1.0));
    CHECK(fv.coeff(1) == Complex(0.0));

    CVector r3(3);
    r3 << 2.0, 0.0, 0.0;
    fv = make_fiducial(Spin(2), r3);
    CHECK(std::abs(fv.coeffs()(0) - Complex(1.0)) < 1e-15);

    raw << Complex(0.0, 3.0), Complex(0.0, -3.0);
    fv = make_fiducial(Spin(1), raw);
    CHECK(std::norm(fv.coeffs()(0)) == doctest::Approx(0.5));
    CHECK(std::norm(fv.coeffs()(1)) == doctest::Approx(0.5));
    CHECK(fv.coeffs()(0).imag() == 0.0);
    CHECK(fv.coeffs()(0).real() > 0.0);

    CHECK_THROWS_AS(make_fiducial(Spin(1), CVector::Zero(2)), Error);
    CHECK_THROWS_AS(make_fiducial(Spin(2), raw), Error);
}

TEST_CASE("coherent amplitudes") {
    std::mt19937_64 rng(21);
    const FiducialVector fv = FiducialVector::random(Spin(3), rng);
    CHECK(max_abs(coherent_amplitudes(fv, 0, 0, 0) - fv.coeffs()) < 1e-15);

    const FiducialVector low = FiducialVector::basis(Spin(1), -1);
    const StateVector a = coherent_amplitudes(low, 0.0, 0.8, 0.0);
    CHECK(a(0).real() == doctest::Approx(-std::sin(0.4)));
    CHECK(a(1).real() == doctest::Approx(std::cos(0.4)));

    for (int k = 0; k < 20; ++k) {
        const FiducialVector f = FiducialVector::random(Spin(4), rng);
        const AngleTriple o = random_angles(rng);
        CHECK(max_abs(coherent_amplitudes(f, o.phi, o.theta, o.psi) - dense_state(f, o)) < 1e-12);
    }
}

TEST_CASE("norm preservation") {
    std::mt19937_64 rng(22);
    for (int two_s = 0; two_s <= 12; ++two_s) {
        for (int k = 0; k < 10; ++k) {
            const FiducialVector f = FiducialVector::random(Spin(two_s), rng);
            const CoherentState cs = coherent_state(f, random_euler(rng));
            CHECK(std::abs(cs.amplitudes.norm() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("overlaps") {
    std::mt19937_64 rng(23);
    const FiducialVector f = FiducialVector::random(Spin(3), rng);
    const EulerAngles o(0.3, 1.2, 4.0);
    CHECK(std::abs(overlap(f, o, o) - Complex(1.0)) < 1e-14);

    for (int two_s : {1, 2, 3}) {
        const FiducialVector low = FiducialVector::basis(Spin(two_s), -two_s);
        const Complex v = overlap(low, EulerAngles(0, 0.9, 0), EulerAngles(0, 0, 0));
        CHECK(std::abs(v - std::pow(std::cos(0.45), two_s)) < 1e-14);
    }

    for (int k = 0; k < 200; ++k) {
        const FiducialVector g = FiducialVector::random(Spin(k % 7), rng);
        const EulerAngles a = random_euler(rng), b = random_euler(rng);
        const Complex direct = overlap(g, a, b);
        CHECK(std::abs(direct) <= 1.0 + 1e-14);
        CHECK(std::abs(direct - overlap_composition(g, a, b)) <= 1e-10);
        const Complex dense = dense_state(g, a.triple()).dot(dense_state(g, b.triple()));
        CHECK(std::abs(direct - dense) <= 1e-12);
    }
}

TEST_CASE("matrix elements") {
    for (int two_s : {1, 2, 5}) {
        const FiducialVector low = FiducialVector::basis(Spin(two_s), -two_s);
        const MatrixElements e = matrix_elements(low, EulerAngles(0.4, 1.3, 0.2));
        CHECK(e.s3_expect == doctest::Approx(-0.5 * two_s * std::cos(1.3)));
        CHECK(e.elems.a1 == 0.0);
    }
    CVector raw(2);
    raw << 1.0, 1.0;
    const FiducialVector half = make_fiducial(Spin(1), raw);
    const MatrixElements e = matrix_elements(half, EulerAngles(0, 0, 0));
    CHECK(e.elems.a0 == doctest::Approx(0.0));
    CHECK(e.elems.a1 == doctest::Approx(0.5));
    CHECK(std::abs(e.s3_expect) < 1e-15);

    std::mt19937_64 rng(24);
    for (int k = 0; k < 50; ++k) {
        const int two_s = 1 + k % 6;
        const FiducialVector f = FiducialVector::random(Spin(two_s), rng);
        const AngleTriple o = random_angles(rng);
        const oracle::Ops ops = oracle::spin_ops(two_s);
        const CVector v = dense_state(f, o);
        const MatrixElements m = matrix_elements(f, o.phi, o.theta, o.psi);
        CHECK(std::abs(m.s3_expect - v.dot(ops.s3 * v).real()) <= 1e-11);
        CHECK(std::abs(m.s_plus_expect - v.dot(ops.sp * v)) <= 1e-11);
        CHECK(std::abs(m.s_minus_expect - v.dot(ops.sm * v)) <= 1e-11);
    }
}

TEST_CASE("A0 bounds") {
    std::mt19937_64 rng(25);
    for (int two_s = 1; two_s <= 6; ++two_s) {
        const Spin s(two_s);
        for (int k = 0; k < 20; ++k) {
            const double a0 = matrix_element_set(FiducialVector::random(s, rng), 0, 0, 0).a0;
            CHECK(a0 > -s.s());
            CHECK(a0 < s.s());
        }
        CHECK(matrix_element_set(FiducialVector::basis(s, two_s), 0, 0, 0).a0 == doctest::Approx(s.s()));
        CHECK(matrix_element_set(FiducialVector::basis(s, -two_s), 0, 0, 0).a0 == doctest::Approx(-s.s()));
    }
}

TEST_CASE("generating function") {
    std::mt19937_64 rng(26);
    const FiducialVector f = FiducialVector::random(Spin(3), rng);
    const EulerAngles a = random_euler(rng), b = random_euler(rng);
    CHECK(std::abs(generating_function(f, a, b, 0, 0, 0) - overlap(f, a, b)) < 1e-14);

    const FiducialVector low = FiducialVector::basis(Spin(3), -3);
    const EulerAngles id(0, 0, 0);
    const Complex z3(0.3, -0.2);
    CHECK(std::abs(generating_function(low, id, id, 0, z3, 0) - std::exp(-1.5 * z3)) < 1e-14);

    const double h = 1e-5;
    const Complex fd = (generating_function(f, a, b, 0, h, 0) - generating_function(f, a, b, 0, -h, 0)) / (2 * h);
    const oracle::Ops ops = oracle::spin_ops(3);
    const Complex exact = dense_state(f, a.triple()).dot(ops.s3 * dense_state(f, b.triple()));
    CHECK(std::abs(fd - exact) < 1e-7);
}

TEST_CASE("quadrature grid") {
    const QuadratureGrid g = build_grid(Spin(1), 1.0);
    CHECK(g.n_theta() == 3);
    CHECK(g.n_phi() == 5);
    CHECK(g.n_psi() == 5);
    CHECK(g.exact_two_s() == 2);
    const QuadratureGrid h = build_grid(Spin(5), 1.2);
    CHECK(h.n_theta() == 9);
    CHECK(std::abs(h.total_weight() - 8 * kPi * kPi) < 1e-12);

    std::vector<double> x, w;
    gauss_legendre(6, x, w);
    double sum = 0.0, x10 = 0.0;
    for (int i = 0; i < 6; ++i) {
        sum += w[i];
        x10 += w[i] * std::pow(x[i], 10);
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(x10 == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("orthogonality relation on the grid") {
    const QuadratureGrid g = build_grid(Spin(4), 1.2);
    for (int two_s = 0; two_s <= 4; ++two_s) {
        const int d = two_s + 1;
        CMatrix acc = CMatrix::Zero(d * d, d * d);
        for (const GridNode& n : g.nodes()) {
            const CMatrix r = oracle::rotation(two_s, n.phi, n.theta, n.psi);
            const CVector v = Eigen::Map<const CVector>(r.data(), d * d);
            acc += n.weight * (v.conjugate() * v.transpose());
        }
        const CMatrix expect = (8 * kPi * kPi / d) * identity(d * d);
        CHECK(max_abs(acc - expect) <= 1e-10);
    }
}

TEST_CASE("resolution of unity") {
    const QuadratureGrid g1 = build_grid(Spin(1));
    CHECK(resolution_residual(FiducialVector::basis(Spin(1), -1), g1).residual <= 1e-12);

    std::mt19937_64 rng(27);
    const QuadratureGrid g = build_grid(Spin(4));
    for (int k = 0; k < 20; ++k) {
        const ResolutionResult r = resolution_residual(FiducialVector::random(Spin(4), rng), g, 3);
        CHECK(r.residual <= 1e-10);
        CHECK_FALSE(r.grid_too_coarse);
    }

    const QuadratureGrid coarse = QuadratureGrid::product(2, 9, 9);
    const ResolutionResult bad = resolution_residual(FiducialVector::random(Spin(4), rng), coarse);
    CHECK(bad.residual > 1e-3);
    CHECK(bad.grid_too_coarse);
}

TEST_CASE("grid states are independent of the thread count") {
    std::mt19937_64 rng(28);
    const FiducialVector f = FiducialVector::random(Spin(6), rng);
    const QuadratureGrid g = build_grid(Spin(6));
    CHECK(grid_states(f, g, 1) == grid_states(f, g, 4));
    CHECK(resolution_residual(f, g, 1).residual == resolution_residual(f, g, 5).residual);
}
