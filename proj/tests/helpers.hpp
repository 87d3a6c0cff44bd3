#pragma once

#include <algorithm>
#include <random>

#include "tds/delay_system.hpp"
#include "tds/legendre.hpp"
#include "tds/numerics.hpp"

namespace tds::testing {

// x'(t) = x(t) - 2 x(t-h); critical delay pi/(3 sqrt 3) ~= 0.60460
inline TimeDelaySystem example1(double h) {
    Matrix A(1, 1), Ad(1, 1);
    A << 1.0;
    Ad << -2.0;
    return {A, Ad, h};
}

// Coupled oscillator pair with delayed restoring gain K on the first state.
inline TimeDelaySystem example2(double K, double h) {
    Matrix A(4, 4), Ad(4, 4);
    A << 0, 0, 1, 0,
         0, 0, 0, 1,
         -10.0 - K, 10, 0, 0,
         5, -15, 0, -0.25;
    Ad.setZero();
    Ad(2, 0) = K;
    return {A, Ad, h};
}

// Relative error floored at a fraction of the table scale S: entries whose
// magnitude decays below roundoff of S are compared absolutely against S/1000.
inline double mixed_error(const Matrix& a, const Matrix& b, double scale) {
    const double denom = std::max({a.norm(), b.norm(), 1e-3 * scale});
    return (a - b).norm() / denom;
}

inline Matrix random_matrix(std::mt19937& rng, int m, double amp) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    Matrix out(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = dist(rng);
    return out;
}

// Draw a delay system with Hurwitz-shifted A and small Ad until the operator
// matrix M is comfortably invertible and ||h M|| <= hM_cap.
inline TimeDelaySystem random_candidate(std::mt19937& rng, double hM_cap) {
    std::uniform_int_distribution<int> mdist(1, 3);
    std::uniform_real_distribution<double> hdist(0.05, 1.5);
    for (;;) {
        const int m = mdist(rng);
        Matrix A = random_matrix(rng, m, 1.0);
        A -= (spectral_norm(A) + 0.3) * Matrix::Identity(m, m);
        Matrix Ad = random_matrix(rng, m, 1.0);
        const double r = spectral_norm(A) + spectral_norm(Ad);
        if (spectral_norm(Ad) > 0.45 * spectral_norm(A)) continue;
        const double h = hdist(rng);
        if (h * r > 3.0) continue;
        TimeDelaySystem sys{A, Ad, h};
        try {
            const LyapunovOperatorData data = build_MN(sys);
            if (h * spectral_norm(data.M) > hM_cap) continue;
            if (rcond_estimate(data.M) < 1e-2) continue;
            return sys;
        } catch (const Error&) {
            continue;
        }
    }
}

}  // namespace tds::testing
