#include "oracles.hpp"

#include <cmath>

namespace oracle {

CMatrix expm_taylor(const CMatrix& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const CMatrix b = a / std::ldexp(1.0, squarings);
    CMatrix term = CMatrix::Identity(a.rows(), a.cols());
    CMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * b / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

Ops spin_ops(int two_s) {
    const int d = two_s + 1;
    const double s = 0.5 * two_s;
    Ops o;
    o.s3 = CMatrix::Zero(d, d);
    o.sp = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = s - i;
        o.s3(i, i) = m;
        // S+ |m-1> = sqrt(s(s+1) - m(m-1)) |m>; row i holds m, row i+1 holds m-1.
        if (i + 1 < d) o.sp(i, i + 1) = std::sqrt(s * (s + 1) - m * (m - 1));
    }
    o.sm = o.sp.adjoint();
    o.s1 = 0.5 * (o.sp + o.sm);
    o.s2 = Complex(0.0, -0.5) * (o.sp - o.sm);
    return o;
}

CMatrix rotation(int two_s, double phi, double theta, double psi) {
    const Ops o = spin_ops(two_s);
    const Complex mi(0.0, -1.0);
    return expm_taylor(mi * phi * o.s3) * expm_taylor(mi * theta * o.s2) * expm_taylor(mi * psi * o.s3);
}

} // namespace oracle
