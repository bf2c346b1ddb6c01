#include "spincs/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

namespace spincs {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::DecompositionPole: return "DecompositionPole";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SpinMismatch: return "SpinMismatch";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::PathTooShort: return "PathTooShort";
    case ErrorKind::SubsidiaryViolation: return "SubsidiaryViolation";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZOriginSingular: return "ZOriginSingular";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::OrthogonalPair: return "OrthogonalPair";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::PoleMargin: return "PoleMargin";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Spin::Spin(int two_s) : two_s_(two_s) {
    if (two_s < 0) {
        throw Error(ErrorKind::InvalidArgument, "two_s must be non-negative");
    }
}

int Spin::index_of(int two_m) const {
    if (two_m < -two_s_ || two_m > two_s_ || ((two_s_ - two_m) & 1)) {
        throw Error(ErrorKind::InvalidArgument, "2m=" + std::to_string(two_m) + " outside spin " +
                                                    std::to_string(two_s_) + "/2");
    }
    return (two_s_ - two_m) / 2;
}

double ladder_factor(Spin spin, int two_m) {
    const double a = spin.two_s() + two_m;
    const double b = spin.two_s() - two_m + 2;
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return 0.5 * std::sqrt(a * b);
}

namespace {

// Reduces x into [0, 2pi); returns the number of whole turns removed.
long wrap_turns(double& x) {
    const double k = std::floor(x / kTwoPi);
    x -= k * kTwoPi;
    long turns = static_cast<long>(k);
    if (x >= kTwoPi) {
        x -= kTwoPi;
        ++turns;
    }
    if (x < 0.0) x = 0.0;
    return turns;
}

int normalize_angles(double& phi, double& theta, double& psi) {
    long turns = wrap_turns(theta);
    if (theta > kPi) {
        theta = kTwoPi - theta;
        phi += kPi;
        psi += kPi;
    }
    turns += wrap_turns(phi);
    turns += wrap_turns(psi);
    return (turns & 1) ? -1 : 1;
}

} // namespace

EulerAngles::EulerAngles(double phi, double theta, double psi) : phi_(phi), theta_(theta), psi_(psi) {
    normalize_angles(phi_, theta_, psi_);
}

int EulerAngles::fold_sign(double phi, double theta, double psi) {
    return normalize_angles(phi, theta, psi);
}

namespace {

double binomial_exact(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
    return static_cast<double>(r);
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// x^k with 0^0 = 1, in log form for large exponents.
struct SignedLog {
    double log_abs;
    int sign;
    bool zero;
};

SignedLog signed_pow(double x, int k) {
    if (k == 0) return {0.0, 1, false};
    if (x == 0.0) return {0.0, 1, true};
    return {k * std::log(std::abs(x)), (x < 0.0 && (k & 1)) ? -1 : 1, false};
}

constexpr int kExactLimit = 30; // two_s up to 30, i.e. s <= 15

// Single term of the t-sum; its range is one point on the outer rows and
// columns, where the log form keeps full relative precision.
double tsum_entry(int two_s, int two_m, int two_mp, double theta) {
    const int a = (two_s + two_m) / 2;
    const int b = (two_s - two_m) / 2;
    const int c = (two_s + two_mp) / 2;
    const int d = (two_s - two_mp) / 2;
    const double ch = std::cos(0.5 * theta);
    const double sh = std::sin(0.5 * theta);
    const int t_lo = std::max(0, a - c);
    const int t_hi = std::min(a, d);
    double sum = 0.0;
    for (int t = t_lo; t <= t_hi; ++t) {
        const int pc = two_s + (two_m - two_mp) / 2 - 2 * t;
        const int ps = 2 * t - (two_m - two_mp) / 2;
        const int sign = (t & 1) ? -1 : 1;
        if (two_s <= kExactLimit) {
            const double n = std::sqrt(binomial_exact(a, t)) * std::sqrt(binomial_exact(b, d - t)) *
                             std::sqrt(binomial_exact(c, a - t)) * std::sqrt(binomial_exact(d, t));
            const double cp = pc == 0 ? 1.0 : std::pow(ch, pc);
            const double sp = ps == 0 ? 1.0 : std::pow(sh, ps);
            sum += sign * n * cp * sp;
        } else {
            const SignedLog cp = signed_pow(ch, pc);
            const SignedLog sp = signed_pow(sh, ps);
            if (cp.zero || sp.zero) continue;
            const double log_n = 0.5 * (log_binomial(a, t) + log_binomial(b, d - t) +
                                        log_binomial(c, a - t) + log_binomial(d, t));
            sum += sign * cp.sign * sp.sign * std::exp(log_n + cp.log_abs + sp.log_abs);
        }
    }
    return sum;
}

bool single_term(int two_s, int two_m, int two_mp) {
    const int a = (two_s + two_m) / 2;
    const int c = (two_s + two_mp) / 2;
    const int d = (two_s - two_mp) / 2;
    return std::max(0, a - c) == std::min(a, d);
}

// Above kExactLimit the alternating t-sum cancels catastrophically. There
// exp(-i theta S2) = exp(-i pi/2 S3) exp(-i theta S1) exp(i pi/2 S3) with
// S1 real symmetric tridiagonal, diagonalized once per spin.
struct S1Spectrum {
    Eigen::VectorXd lambda;
    RMatrix v;
};

const S1Spectrum& s1_spectrum(int two_s) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<const S1Spectrum>> cache;
    const std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[two_s];
    if (!slot) {
        const Spin spin(two_s);
        const int n = spin.dim();
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub(std::max(0, n - 1));
        for (int i = 1; i < n; ++i) sub(i - 1) = 0.5 * ladder_factor(spin, spin.two_m(i - 1));
        Eigen::SelfAdjointEigenSolver<RMatrix> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        slot = std::make_unique<const S1Spectrum>(S1Spectrum{es.eigenvalues(), es.eigenvectors()});
    }
    return *slot;
}

// Re[exp(-i pi (m_i - m_j) / 2) (c + i s)] with m_i - m_j = j - i.
double quarter_phase(int i, int j, double c, double s) {
    switch (((j - i) % 4 + 4) % 4) {
    case 0: return c;
    case 1: return s;
    case 2: return -c;
    default: return -s;
    }
}

} // namespace

double little_d_entry(Spin spin, int two_m, int two_mp, double theta) {
    const int two_s = spin.two_s();
    if (two_s <= kExactLimit || single_term(two_s, two_m, two_mp)) return tsum_entry(two_s, two_m, two_mp, theta);
    const S1Spectrum& sp = s1_spectrum(two_s);
    const int i = spin.index_of(two_m);
    const int j = spin.index_of(two_mp);
    double c = 0.0;
    double s = 0.0;
    for (int k = 0; k < sp.lambda.size(); ++k) {
        const double w = sp.v(i, k) * sp.v(j, k);
        c += w * std::cos(theta * sp.lambda(k));
        s -= w * std::sin(theta * sp.lambda(k));
    }
    return quarter_phase(i, j, c, s);
}

RMatrix little_d(Spin spin, double theta) {
    const int n = spin.dim();
    RMatrix r(n, n);
    if (spin.two_s() <= kExactLimit) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = tsum_entry(spin.two_s(), spin.two_m(i), spin.two_m(j), theta);
        return r;
    }
    const S1Spectrum& sp = s1_spectrum(spin.two_s());
    const Eigen::ArrayXd arg = theta * sp.lambda.array();
    const RMatrix c = sp.v * arg.cos().matrix().asDiagonal() * sp.v.transpose();
    const RMatrix s = sp.v * (-arg.sin()).matrix().asDiagonal() * sp.v.transpose();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            r(i, j) = single_term(spin.two_s(), spin.two_m(i), spin.two_m(j))
                          ? tsum_entry(spin.two_s(), spin.two_m(i), spin.two_m(j), theta)
                          : quarter_phase(i, j, c(i, j), s(i, j));
        }
    }
    return r;
}

CMatrix rotation_matrix(Spin spin, double phi, double theta, double psi) {
    const int n = spin.dim();
    const RMatrix r = little_d(spin, theta);
    CMatrix out(n, n);
    for (int i = 0; i < n; ++i) {
        const Complex left = std::polar(1.0, -phi * spin.m(i));
        for (int j = 0; j < n; ++j) {
            out(i, j) = left * r(i, j) * std::polar(1.0, -psi * spin.m(j));
        }
    }
    return out;
}

CMatrix big_r(Spin spin, const EulerAngles& omega) {
    return rotation_matrix(spin, omega.phi(), omega.theta(), omega.psi());
}

Eigen::Matrix2cd su2_matrix(double phi, double theta, double psi) {
    const Complex a1 = std::cos(0.5 * theta) * std::polar(1.0, -0.5 * (phi + psi));
    const Complex a2 = std::sin(0.5 * theta) * std::polar(1.0, 0.5 * (phi - psi));
    Eigen::Matrix2cd u;
    u << a1, -std::conj(a2), a2, std::conj(a1);
    return u;
}

Su2Lift euler_from_su2(const Eigen::Matrix2cd& u) {
    const double unitarity = (u.adjoint() * u - Eigen::Matrix2cd::Identity()).norm();
    const double det_err = std::abs(u.determinant() - 1.0);
    if (unitarity > 1e-10 || det_err > 1e-10) {
        throw Error(ErrorKind::NotUnitary, "matrix is not in SU(2)");
    }
    const Complex a1 = u(0, 0);
    const Complex a2 = u(1, 0);
    const double theta = 2.0 * std::atan2(std::abs(a2), std::abs(a1));
    double phi = 0.0;
    double psi = 0.0;
    if (std::abs(a2) < 1e-14) {
        psi = -2.0 * std::arg(a1);
    } else if (std::abs(a1) < 1e-14) {
        psi = -2.0 * std::arg(a2);
    } else {
        phi = std::arg(a2) - std::arg(a1);
        psi = -std::arg(a1) - std::arg(a2);
    }
    Su2Lift lift{EulerAngles(phi, theta, psi), 1};
    const Eigen::Matrix2cd v = su2_matrix(lift.angles.phi(), lift.angles.theta(), lift.angles.psi());
    lift.sign = (v - u).norm() <= (v + u).norm() ? 1 : -1;
    return lift;
}

Su2Lift compose_euler(const EulerAngles& omega2, const EulerAngles& omega1) {
    const Eigen::Matrix2cd u2 = su2_matrix(omega2.phi(), omega2.theta(), omega2.psi());
    const Eigen::Matrix2cd u1 = su2_matrix(omega1.phi(), omega1.theta(), omega1.psi());
    return euler_from_su2(u2 * u1);
}

Su2Lift invert_euler(const EulerAngles& omega) {
    const double phi = -omega.psi();
    const double theta = -omega.theta();
    const double psi = -omega.phi();
    return {EulerAngles(phi, theta, psi), EulerAngles::fold_sign(phi, theta, psi)};
}

double tworots_residual(const EulerAngles& omega2, const EulerAngles& omega1, const Su2Lift& result) {
    const double t1 = omega1.theta();
    const double t2 = omega2.theta();
    const double x = omega1.phi() + omega2.psi();
    const double tt = result.angles.theta();
    const double pt = result.angles.phi();
    const double st = result.angles.psi();

    const double cos_rel = std::cos(t1) * std::cos(t2) - std::sin(t1) * std::sin(t2) * std::cos(x);
    double res = std::abs(std::cos(tt) - cos_rel);

    const Complex lhs2 = std::sin(tt) * std::polar(1.0, pt);
    const Complex rhs2 = std::polar(1.0, omega2.phi()) *
                         Complex(std::cos(t1) * std::sin(t2) + std::sin(t1) * std::cos(t2) * std::cos(x),
                                 std::sin(t1) * std::sin(x));
    res = std::max(res, std::abs(lhs2 - rhs2));

    const Complex lhs3 = static_cast<double>(result.sign) * std::cos(0.5 * tt) * std::polar(1.0, 0.5 * (pt + st));
    const Complex rhs3 = std::polar(1.0, 0.5 * (omega2.phi() + omega1.psi())) *
                         (std::cos(0.5 * t1) * std::cos(0.5 * t2) * std::polar(1.0, 0.5 * x) -
                          std::sin(0.5 * t1) * std::sin(0.5 * t2) * std::polar(1.0, -0.5 * x));
    return std::max(res, std::abs(lhs3 - rhs3));
}

double trirots_cos_theta(const EulerAngles& omega2, const EulerAngles& omega, const EulerAngles& omega1) {
    const double t1 = omega1.theta();
    const double t = omega.theta();
    const double t2 = omega2.theta();
    const double x = omega1.phi() + omega.psi();
    const double y = omega.phi() + omega2.psi();
    return (std::cos(t1) * std::cos(t) - std::sin(t1) * std::sin(t) * std::cos(x)) * std::cos(t2) +
           (std::sin(t1) * (std::sin(x) * std::sin(y) - std::cos(x) * std::cos(t) * std::cos(y)) -
            std::cos(t1) * std::sin(t) * std::cos(y)) *
               std::sin(t2);
}

GaussianParams gaussian_decompose(double phi, double theta, double psi) {
    const double ch = std::cos(0.5 * theta);
    if (std::abs(ch) < std::sin(0.5e-9)) {
        throw Error(ErrorKind::DecompositionPole, "theta is at the tan(theta/2) pole");
    }
    const double tn = std::tan(0.5 * theta);
    return {-tn * std::polar(1.0, -phi), -2.0 * std::log(ch * std::polar(1.0, 0.5 * (phi + psi))),
            tn * std::polar(1.0, -psi)};
}

GaussianParams gaussian_decompose(const EulerAngles& omega) {
    return gaussian_decompose(omega.phi(), omega.theta(), omega.psi());
}

SpinOperators spin_operators(Spin spin) {
    const int n = spin.dim();
    SpinOperators ops;
    ops.spin = spin;
    ops.s3 = CMatrix::Zero(n, n);
    ops.s_plus = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        ops.s3(i, i) = spin.m(i);
        if (i + 1 < n) ops.s_plus(i, i + 1) = ladder_factor(spin, spin.two_m(i));
    }
    ops.s_minus = ops.s_plus.adjoint();
    return ops;
}

SpinOperators conjugate_spin_ops(const EulerAngles& omega, Spin spin) {
    const SpinOperators ops = spin_operators(spin);
    const double ct = std::cos(omega.theta());
    const double st = std::sin(omega.theta());
    const Complex ep = std::polar(1.0, omega.psi());
    const Complex ef = std::polar(1.0, omega.phi());

    SpinOperators out;
    out.spin = spin;
    out.s3 = ct * ops.s3 - 0.5 * st * (ep * ops.s_plus + std::conj(ep) * ops.s_minus);
    out.s_plus = ef * (st * ops.s3 + 0.5 * ((ct + 1.0) * ep * ops.s_plus + (ct - 1.0) * std::conj(ep) * ops.s_minus));
    out.s_minus = out.s_plus.adjoint();
    return out;
}

} // namespace spincs
