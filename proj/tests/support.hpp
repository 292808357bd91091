#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cloe/lti.hpp"

namespace cloe::testing {

/// G(s) = 1 / (s + 1).
inline StateSpaceModel first_order_lag()
{
    return StateSpaceModel(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
}

/// G(s) = 2 / (s^2 + 0.4 s + 4), a single lightly damped mode at 2 rad/s.
inline StateSpaceModel second_order_resonance()
{
    Matrix A(2, 2);
    A << 0.0, 1.0, -4.0, -0.4;
    Matrix B(2, 1);
    B << 0.0, 2.0;
    Matrix C(1, 2);
    C << 1.0, 0.0;
    return StateSpaceModel(A, B, C);
}

inline CMatrix random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> dist;
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
}

inline double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline std::vector<FrequencySample> sample_at(const StateSpaceModel& g, const std::vector<double>& omegas)
{
    std::vector<FrequencySample> out;
    for (const double w : omegas) out.push_back({w, evaluate_transfer(g, w)});
    return out;
}

} // namespace cloe::testing

namespace cloe::testing {

/// Random minimal real model of order n: floor(n/2) resonant modes plus a
/// real pole when n is odd, poles spread over [0.1, 10] rad/s.
inline StateSpaceModel random_minimal_model(std::uint64_t seed, int n, int m, int p)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logw(-1.0, 1.0);
    std::uniform_real_distribution<double> zeta(0.02, 0.3);
    std::uniform_real_distribution<double> gain(-1.0, 1.0);
    Matrix A = Matrix::Zero(n, n);
    int k = 0;
    for (; k + 1 < n; k += 2) {
        const double w = std::pow(10.0, logw(rng));
        A(k, k + 1) = w;
        A(k + 1, k) = -w;
        A(k + 1, k + 1) = -2.0 * zeta(rng) * w;
    }
    if (k < n) A(k, k) = -std::pow(10.0, logw(rng));
    Matrix B(n, p);
    Matrix C(m, n);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = gain(rng);
    for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = gain(rng);
    return StateSpaceModel(A, B, C);
}

inline std::vector<double> log_points(double lo, double hi, int n)
{
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1)));
    return out;
}

} // namespace cloe::testing
