#include "tds/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace tds {

std::optional<double> scalar_critical_delay(double a, double b) {
    if (a + b >= 0.0) return 0.0;  // unstable regardless of delay
    if (std::abs(b) > std::abs(a))
        return std::acos(-a / b) / std::sqrt(b * b - a * a);
    return std::nullopt;  // a < 0 and the delayed term cannot destabilize
}

std::optional<double> scalar_critical_delay(const TimeDelaySystem& sys) {
    if (sys.m() != 1) throw NotScalar("scalar_critical_delay: system must be one-dimensional");
    return scalar_critical_delay(sys.A(0, 0), sys.Ad(0, 0));
}

namespace {

// Cubic Lagrange interpolation over four consecutive samples; `u` is the
// query position in units of the step, relative to states[0].
Vector interp(const std::vector<Vector>& states, double u) {
    const int last = static_cast<int>(states.size()) - 1;
    const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, last);
    if (std::abs(u - i0) < 1e-12) return states[i0];
    const int base = std::clamp(i0 - 1, 0, std::max(0, last - 3));
    const double xi = u - base;
    Vector out = Vector::Zero(states[0].size());
    for (int p = 0; p <= 3 && base + p <= last; ++p) {
        double w = 1.0;
        for (int q = 0; q <= 3 && base + q <= last; ++q)
            if (q != p) w *= (xi - q) / (p - q);
        out += w * states[base + p];
    }
    return out;
}

}  // namespace

SimTrace simulate_dde(const TimeDelaySystem& sys, const Vector& phi, double horizon, double step,
                      double diverged_norm) {
    sys.validate();
    if (phi.size() != sys.m()) throw DimensionMismatch("simulate_dde: history size mismatch");
    if (!(step > 0.0) || step > sys.h / 10.0)
        throw InvalidInput("simulate_dde: step must be positive and at most h/10");
    if (horizon < 10.0 * sys.h) throw InvalidInput("simulate_dde: horizon must be at least 10 h");

    // Snap the step so the delay is an exact number of steps.
    const int per_delay = std::max(10, static_cast<int>(std::lround(sys.h / step)));
    const double s = sys.h / per_delay;
    const int total = per_delay + static_cast<int>(std::ceil(horizon / s));

    SimTrace trace;
    trace.step = s;
    trace.times.reserve(total + 1);
    trace.states.reserve(total + 1);
    for (int i = 0; i <= per_delay; ++i) {  // constant history on [-h, 0]
        trace.times.push_back(-sys.h + i * s);
        trace.states.push_back(phi);
    }

    auto delayed = [&](double idx) { return interp(trace.states, idx); };
    auto f = [&](const Vector& x, const Vector& xd) { return sys.A * x + sys.Ad * xd; };

    for (int gi = per_delay; gi < total; ++gi) {
        const Vector& x = trace.states[gi];
        const double d0 = gi - per_delay;  // index of t - h
        const Vector k1 = f(x, trace.states[static_cast<int>(d0)]);
        const Vector k2 = f(x + 0.5 * s * k1, delayed(d0 + 0.5));
        const Vector k3 = f(x + 0.5 * s * k2, delayed(d0 + 0.5));
        const Vector k4 = f(x + s * k3, delayed(d0 + 1.0));
        Vector next = x + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        trace.times.push_back(trace.times.back() + s);
        trace.states.push_back(next);
        if (!next.allFinite() || next.norm() > diverged_norm) {
            trace.diverged = true;
            break;
        }
    }

    // Least-squares slope of log||x|| over the trailing half of the
    // integrated span (transients discarded).
    const double t_end = trace.times.back();
    const double t_from = 0.5 * std::max(0.0, t_end);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < t_from) continue;
        const double nrm = trace.states[i].norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
        const double y = std::log(nrm);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++cnt;
    }
    const double denom = cnt * sxx - sx * sx;
    trace.growth_estimate = (cnt >= 2 && denom != 0.0) ? (cnt * sxy - sx * sy) / denom : 0.0;
    return trace;
}

}  // namespace tds
