#pragma once

#include <optional>
#include <vector>

#include "tds/delay_system.hpp"
#include "tds/numerics.hpp"

namespace tds {

// First delay at which x'(t) = a x(t) + b x(t-h) loses stability:
//   |b| > |a|, a+b < 0  ->  arccos(-a/b)/sqrt(b^2-a^2)
//   a+b >= 0            ->  0        (no stable delay)
//   otherwise           ->  nullopt  (stable for every delay, needs a < 0)
// Throws NotScalar for m != 1.
std::optional<double> scalar_critical_delay(double a, double b);
std::optional<double> scalar_critical_delay(const TimeDelaySystem& sys);

struct SimTrace {
    std::vector<double> times;
    std::vector<Vector> states;
    double step = 0.0;
    double growth_estimate = 0.0;  // least-squares slope of log||x|| over the trailing half
    bool diverged = false;         // norm exceeded the divergence threshold
};

// Method-of-steps integration with fixed-step RK4; the delayed argument is
// read from the stored trajectory with cubic interpolation.  The constant
// initial history is `phi` on [-h, 0].
SimTrace simulate_dde(const TimeDelaySystem& sys, const Vector& phi, double horizon, double step,
                      double diverged_norm = 1e12);

}  // namespace tds
