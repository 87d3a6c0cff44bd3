#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tds/certificate.hpp"
#include "tds/oracles.hpp"

using namespace tds;
using tds::testing::example1;
using tds::testing::example2;

TEST_CASE("scalar critical delay branches") {
    // a = 1, b = -2: arccos(1/2)/sqrt(3) = pi/(3 sqrt 3)
    const auto hc = scalar_critical_delay(1.0, -2.0);
    REQUIRE(hc);
    CHECK(*hc == doctest::Approx(M_PI / (3.0 * std::sqrt(3.0))).epsilon(1e-12));

    const auto pure = scalar_critical_delay(0.0, -1.0);
    REQUIRE(pure);
    CHECK(*pure == doctest::Approx(M_PI / 2).epsilon(1e-12));

    const auto neg = scalar_critical_delay(-1.0, -2.0);
    REQUIRE(neg);
    CHECK(*neg == doctest::Approx(std::acos(-0.5) / std::sqrt(3.0)).epsilon(1e-12));

    CHECK(!scalar_critical_delay(-2.0, 1.0));        // delay-independent
    CHECK(!scalar_critical_delay(-1.0, 0.0));        // plain stable ODE
    CHECK(scalar_critical_delay(1.0, -1.0) == 0.0);  // a + b = 0: no stable delay
    CHECK(scalar_critical_delay(2.0, 1.0) == 0.0);

    CHECK_THROWS_AS(scalar_critical_delay(example2(10.0, 0.5)), NotScalar);
    const auto via_sys = scalar_critical_delay(example1(0.3));
    REQUIRE(via_sys);
    CHECK(*via_sys == doctest::Approx(M_PI / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("simulator validates its discretization") {
    const TimeDelaySystem sys = example1(0.5);
    const Vector phi = Vector::Ones(1);
    CHECK_THROWS_AS(simulate_dde(sys, phi, 10.0, 0.2), InvalidInput);   // step > h/10
    CHECK_THROWS_AS(simulate_dde(sys, phi, 2.0, 0.001), InvalidInput);  // horizon < 10h
    Vector bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(simulate_dde(sys, bad, 10.0, 0.001), DimensionMismatch);
}

TEST_CASE("pure ODE growth rate is recovered exactly") {
    TimeDelaySystem sys{-Matrix::Identity(1, 1), Matrix::Zero(1, 1), 0.5};
    const SimTrace trace = simulate_dde(sys, Vector::Ones(1), 20.0, 0.01);
    CHECK(!trace.diverged);
    CHECK(trace.growth_estimate == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("first-interval solution matches the closed form") {
    // on [0, h]: x' = a x + b with x(0) = 1 -> x = (1 + b/a) e^{a t} - b/a
    const double a = 1.0, b = -2.0, h = 0.4;
    const TimeDelaySystem sys = example1(h);
    const SimTrace trace = simulate_dde(sys, Vector::Ones(1), 10.0, h / 100.0);
    for (size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < 0.0 || t > h) continue;
        const double exact = (1.0 + b / a) * std::exp(a * t) - b / a;
        CHECK(trace.states[i](0) == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("growth sign tracks the verdict across the critical delay") {
    const SimTrace stable = simulate_dde(example1(0.55), Vector::Ones(1), 16.5, 0.55 / 1000);
    CHECK(!stable.diverged);
    CHECK(stable.growth_estimate < -1e-3);

    const SimTrace unstable = simulate_dde(example1(0.7), Vector::Ones(1), 21.0, 0.7 / 1000);
    CHECK(unstable.growth_estimate > 1e-3);

    CHECK(theorem_test(example1(0.55)).kind == VerdictKind::Stable);
    CHECK(theorem_test(example1(0.7)).kind == VerdictKind::Unstable);
}

TEST_CASE("simulation agrees with the certificate on the 4x4 example") {
    const SimTrace stable =
        simulate_dde(example2(10.0, 0.4), Vector::Ones(4), 12.0, 0.4 / 1000);
    CHECK(!stable.diverged);
    CHECK(stable.growth_estimate < 0.0);

    const SimTrace unstable =
        simulate_dde(example2(10.0, 0.7), Vector::Ones(4), 21.0, 0.7 / 1000);
    CHECK(unstable.growth_estimate > 0.0);
}

TEST_CASE("divergence is flagged and the trace stays finite") {
    const SimTrace t = simulate_dde(example1(2.0), Vector::Ones(1), 60.0, 0.002, 1e6);
    CHECK(t.diverged);
    CHECK(t.growth_estimate > 0.0);
    for (const Vector& x : t.states) CHECK(std::isfinite(x.norm()));
}
