#include <doctest.h>

#include <cmath>

#include <spincs/contraction.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace spincs;
using namespace testutil;

namespace {

CMatrix ladder(int n_max) {
    CMatrix a = CMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// exp(alpha a^+ - alpha^* a) on a generous truncation, cut back to n_max + 1 rows.
CMatrix oracle_displacement(Complex alpha, int n_max) {
    const int big = n_max + 60;
    const CMatrix a = ladder(big);
    const CMatrix d = oracle::expm_taylor(alpha * CMatrix(a.adjoint()) - std::conj(alpha) * a);
    return d.topLeftCorner(n_max + 1, n_max + 1);
}

CVector poisson(Complex alpha, int n_max) {
    CVector v(n_max + 1);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    for (int k = 0; k <= n_max; ++k) {
        v(k) = term;
        term *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    return v;
}

} // namespace

TEST_CASE("displacement of the vacuum is Poissonian") {
    CHECK(max_abs(displacement_matrix(0.0, 20) - identity(21)) < 1e-14);
    const Complex alpha(1.3, 0.0);
    const CMatrix d = displacement_matrix(alpha, 64);
    CHECK(std::abs(d(0, 0) - std::exp(-0.5 * std::norm(alpha))) < 1e-12);
    CHECK(max_abs(d.col(0) - poisson(alpha, 64)) < 1e-10);
    const Complex beta(-0.4, 0.9);
    CHECK(max_abs(displacement_matrix(beta, 64).col(0) - poisson(beta, 64)) < 1e-10);
}

TEST_CASE("displaced number states match the matrix exponential") {
    const Complex alpha(0.7, 0.0);
    const int n_max = 30;
    const CMatrix d = oracle_displacement(alpha, n_max);
    CHECK(max_abs(dns_amplitudes(alpha, 2, n_max) - d.col(2)) < 1e-9);
    const Complex beta(0.3, -0.8);
    const CMatrix db = oracle_displacement(beta, n_max);
    for (int n : {0, 1, 3, 5}) CHECK(max_abs(dns_amplitudes(beta, n, n_max) - db.col(n)) < 1e-9);
    CHECK(max_abs(dns_amplitudes(alpha, 0, n_max) - poisson(alpha, n_max)) < 1e-12);
    for (int n = 0; n <= 4; ++n) {
        CVector e = CVector::Zero(n_max + 1);
        e(n) = 1.0;
        CHECK(max_abs(dns_amplitudes(0.0, n, n_max) - e) < 1e-15);
    }
}

TEST_CASE("displaced number states are number eigenstates about alpha") {
    CHECK(dns_number_check(1.0, 0, 96) <= 1e-10);
    CHECK(dns_number_check(1.0, 3, 96) <= 1e-8);
    CHECK(dns_number_check(Complex(0.4, -1.1), 2, 96) <= 1e-8);
}

TEST_CASE("finite degree fiducial is annihilated by a power of the shifted ladder") {
    CVector raw(3);
    raw << 0.6, Complex(0.2, -0.5), 0.4;
    const FockVector fv = FockVector::make(raw);
    CHECK(fv.degree() == 2);
    CHECK(ccs_eigen_check(Complex(0.8, -0.6), fv, 80) <= 1e-8);

    // Independent: (a - alpha)^3 applied to D(alpha) fv.
    const Complex alpha(0.5, 0.3);
    const int n_max = 60;
    const CVector state = canonical_cs(alpha, fv, n_max).amplitudes;
    const CMatrix shifted = ladder(n_max) - alpha * identity(n_max + 1);
    CHECK((shifted * shifted * shifted * state).norm() <= 1e-8);
    CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("contracted spin coherent state approaches the canonical one") {
    const Complex alpha(1.0, 0.0);
    {
        const Spin s(40);
        const FockVector v = hp_contract_state(FiducialVector::basis(s, -40), 0.0, s);
        CHECK(std::abs(std::abs(v.coeffs()(0)) - 1.0) < 1e-14);
        CHECK(v.coeffs().tail(v.n_max()).norm() < 1e-14);
    }
    double prev = 1.0;
    for (int two_s : {50, 100, 200, 400}) {
        const Spin s(two_s);
        const FockVector v = hp_contract_state(FiducialVector::basis(s, -two_s), alpha, s, 60);
        const CVector ref = poisson(alpha, 60);
        const double dev = (v.coeffs().head(61) - ref).cwiseAbs().maxCoeff();
        CHECK(dev < prev);
        prev = dev;
        if (two_s == 200) CHECK(dev <= 0.01);
    }
}

TEST_CASE("canonical kinetic term") {
    const FockVector vac = FockVector::vacuum(10);
    const Complex alpha(0.8, -0.3);
    const Complex adot(0.2, 0.5);
    CHECK(ccs_kinetic_term(alpha, adot, vac) == doctest::Approx(-std::imag(std::conj(alpha) * adot)));
    CHECK(ccs_kinetic_term(alpha, 0.0, vac) == 0.0);
    CHECK(ccs_kinetic_term(alpha, adot, vac, 2.0) == doctest::Approx(-2.0 * std::imag(std::conj(alpha) * adot)));

    // Spin and canonical kinetic terms differ at order 1/s.
    std::vector<double> gaps;
    for (int two_s : {100, 200, 400}) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::basis(s, -two_s);
        gaps.push_back(std::abs(spin_kinetic_along_alpha(fv, alpha, adot) - ccs_kinetic_term(alpha, adot, vac)));
        CHECK(spin_kinetic_along_alpha(fv, alpha, 0.0) == doctest::Approx(0.0));
    }
    CHECK(gaps[1] / gaps[0] == doctest::Approx(0.5).epsilon(0.1));
    CHECK(gaps[2] / gaps[1] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("canonical resolution of identity") {
    const CcsResolution vac = ccs_resolution_residual(FockVector::vacuum(0), 9.0, 96, 64, 20, 170);
    CHECK(vac.residual <= 1e-6);
    CHECK_FALSE(vac.flagged);
    CVector raw(3);
    raw << 0.6, Complex(0.2, -0.5), 0.4;
    const CcsResolution other = ccs_resolution_residual(FockVector::make(raw), 9.0, 96, 64, 20, 170);
    CHECK(other.residual <= 1e-6);
    const CcsResolution small = ccs_resolution_residual(FockVector::vacuum(0), 2.0, 96, 64, 20, 170);
    CHECK(small.flagged);
    CHECK(small.residual > 1e-6);
}

TEST_CASE("canonical equation of motion") {
    const FockVector vac = FockVector::vacuum(0);
    const double w = 1.4;
    const Complex alpha(0.6, 0.2);
    CHECK(std::abs(ccs_canonical_rhs(alpha, {{1, 1, w}}, vac) - Complex(0, -w) * alpha) < 1e-8);
    CHECK(std::abs(ccs_canonical_rhs(alpha, {}, vac)) == 0.0);
    CHECK(std::abs(ccs_canonical_rhs(alpha, {{1, 1, w}}, vac, 60, 2.0) - Complex(0, -w / 2.0) * alpha) < 1e-8);
}

TEST_CASE("ladder factor approaches the boson value") {
    for (int two_s : {100, 400}) {
        const Spin s(two_s);
        for (int n = 1; n <= 10; ++n) {
            const double f = ladder_factor(s, 2 * n - two_s) / std::sqrt(static_cast<double>(two_s));
            const double rel = std::abs(f - std::sqrt(static_cast<double>(n))) / std::sqrt(static_cast<double>(n));
            CHECK(rel <= n / (4.0 * s.s()));
        }
    }
}

TEST_CASE("reindexing maps the mean weight onto the number") {
    std::mt19937_64 rng(71);
    for (int two_s : {1, 4, 9}) {
        const Spin s(two_s);
        const FiducialVector fv = FiducialVector::random(s, rng);
        const FockVector f = reindex_to_fock(fv);
        double a0 = 0.0, number = 0.0;
        for (int i = 0; i < s.dim(); ++i) a0 += s.m(i) * std::norm(fv.coeffs()(i));
        for (int n = 0; n <= f.n_max(); ++n) number += n * std::norm(f.coeffs()(n));
        CHECK(a0 == doctest::Approx(number - s.s()).epsilon(1e-12));
    }
}

TEST_CASE("radial measures agree at large spin") {
    std::vector<double> devs;
    for (int two_s : {100, 200, 400}) {
        const Spin s(two_s);
        double dev = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double r = 2.0 * k / 200.0;
            dev = std::max(dev, std::abs(spin_alpha_density(r, s) - ccs_alpha_density(r)));
        }
        devs.push_back(dev);
    }
    CHECK(devs[1] / devs[0] == doctest::Approx(0.5).epsilon(0.1));
    CHECK(devs[2] / devs[1] == doctest::Approx(0.5).epsilon(0.1));
}
