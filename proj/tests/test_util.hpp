#pragma once

#include <random>

#include <Eigen/SVD>
#include <spincs/coherent.hpp>

namespace testutil {

using namespace spincs;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline AngleTriple random_angles(std::mt19937_64& rng, double margin = 0.0) {
    return {uniform(rng, 0.0, kTwoPi), uniform(rng, margin, kPi - margin), uniform(rng, 0.0, kTwoPi)};
}

inline EulerAngles random_euler(std::mt19937_64& rng, double margin = 0.0) {
    const AngleTriple a = random_angles(rng, margin);
    return EulerAngles(a.phi, a.theta, a.psi);
}

inline double op_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline CMatrix identity(int d) { return CMatrix::Identity(d, d); }

} // namespace testutil
