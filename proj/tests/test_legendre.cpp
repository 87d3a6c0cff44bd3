#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "tds/delay_system.hpp"
#include "tds/legendre.hpp"

using namespace tds;
using tds::testing::example1;
using tds::testing::mixed_error;

TEST_CASE("shifted Legendre basis endpoints, orthogonality, gram diagonal") {
    const LegendreBasis basis{0.7, 8};
    for (int k = 0; k < basis.n; ++k) {
        CHECK(legendre_eval(basis, k, 0.0) == doctest::Approx(1.0));
        CHECK(legendre_eval(basis, k, -basis.h) == doctest::Approx(k % 2 == 0 ? 1.0 : -1.0));
    }
    const auto gram = gram_diagonal(basis);
    REQUIRE(static_cast<int>(gram.size()) == basis.n);
    for (int k = 0; k < basis.n; ++k)
        CHECK(gram[k] == doctest::Approx(basis.h / (2 * k + 1)).epsilon(1e-14));

    const QuadratureRule rule = gauss_legendre(32, -basis.h, 0.0);
    for (int j = 0; j < basis.n; ++j)
        for (int k = 0; k < basis.n; ++k) {
            double ip = 0.0;
            for (size_t i = 0; i < rule.nodes.size(); ++i)
                ip += rule.weights[i] * legendre_eval(basis, j, rule.nodes[i]) *
                      legendre_eval(basis, k, rule.nodes[i]);
            const double expect = j == k ? basis.h / (2 * k + 1) : 0.0;
            CHECK(std::abs(ip - expect) <= 1e-13);
        }
    CHECK_THROWS_AS(legendre_eval(basis, 8, -0.1), OutOfRange);
    CHECK_THROWS_AS(legendre_eval(basis, 2, 0.2), OutOfRange);
}

TEST_CASE("quadrature route closed forms at M = 0") {
    const Matrix M0 = Matrix::Zero(2, 2);
    const double h = 0.9;
    CHECK((quadrature_gamma(M0, h, 0) - h * Matrix::Identity(2, 2)).norm() <= 1e-13);
    CHECK(quadrature_gamma(M0, h, 1).norm() <= 1e-13);
    CHECK(quadrature_gamma(M0, h, 5).norm() <= 1e-13);
    // triangle integral of l_0 l_0 = h^2/2; of l_0(tau1) l_1(tau2) = -h^2/6
    CHECK((quadrature_gamma_bar(M0, h, 0, 0) - 0.5 * h * h * Matrix::Identity(2, 2)).norm() <=
          1e-12);
    CHECK((quadrature_gamma_bar(M0, h, 0, 1) + h * h / 6.0 * Matrix::Identity(2, 2)).norm() <=
          1e-12);
}

TEST_CASE("first moments match their closed forms on the scalar example") {
    const LyapunovOperatorData data = build_MN(example1(0.604));
    const double h = 0.604;
    const Config cfg;
    const LegendreTable table(data.M, h, 13, cfg);
    CHECK(table.source() == LegendreTable::Source::recursion);

    const Matrix E = mat_exp(h * data.M);
    const Matrix Minv = data.M.inverse();
    const Matrix g0 = Minv * (E - Matrix::Identity(2, 2));
    const Matrix g1 = Minv * (E + Matrix::Identity(2, 2)) - (2.0 / h) * Minv * g0;
    CHECK((table.gamma(0) - g0).norm() <= 1e-12 * g0.norm());
    CHECK((table.gamma(1) - g1).norm() <= 1e-12 * (1.0 + g1.norm()));

    const Matrix gb00 = Minv * (g0 - h * Matrix::Identity(2, 2));
    CHECK((table.gamma_bar(0, 0) - gb00).norm() <= 1e-12 * (1.0 + gb00.norm()));
}

TEST_CASE("recursion agrees with quadrature on the scalar example table") {
    const LyapunovOperatorData data = build_MN(example1(0.604));
    const Config cfg;
    const LegendreTable rec(data.M, 0.604, 13, cfg);

    Config qcfg;
    qcfg.table_digits_cap = -1;  // force the quadrature route
    const LegendreTable quad(data.M, 0.604, 13, qcfg);
    CHECK(quad.source() == LegendreTable::Source::quadrature);

    double sg = 0.0, sb = 0.0;
    for (int k = 0; k < 13; ++k) sg = std::max(sg, quad.gamma(k).norm());
    for (int j = 0; j < 13; ++j)
        for (int k = 0; k < 13; ++k) sb = std::max(sb, quad.gamma_bar(j, k).norm());

    for (int k = 0; k < 13; ++k) CHECK(mixed_error(rec.gamma(k), quad.gamma(k), sg) <= 1e-9);
    for (int j = 0; j < 13; ++j)
        for (int k = 0; k < 13; ++k)
            CHECK(mixed_error(rec.gamma_bar(j, k), quad.gamma_bar(j, k), sb) <= 1e-8);

    // moments decay supergeometrically: the high tail sits below the
    // comparison floor, which is why the error metric carries one
    CHECK(rec.gamma(12).norm() < 1e-10 * sg);
}

TEST_CASE("parity identities hold on both routes") {
    const LyapunovOperatorData data = build_MN(example1(0.5));
    const Config cfg;
    const LegendreTable table(data.M, 0.5, 6, cfg);
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) {
            const double sign = (j + k) % 2 == 0 ? 1.0 : -1.0;
            // flat variant of the stored table
            CHECK((table.gamma_flat(j, k) - sign * table.gamma_bar(j, k)).norm() == 0.0);
            // symmetric pair within the stored table
            CHECK((table.gamma_bar(j, k) - sign * table.gamma_bar(k, j)).norm() == 0.0);
        }
    // the same identities through the defining integrals, no recursion involved
    double scale = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            scale = std::max(scale, quadrature_gamma_bar(data.M, 0.5, j, k).norm());
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            const double sign = (j + k) % 2 == 0 ? 1.0 : -1.0;
            const Matrix qbar = quadrature_gamma_bar(data.M, 0.5, j, k);
            const Matrix qflat = quadrature_gamma_flat(data.M, 0.5, j, k);
            const Matrix qswap = quadrature_gamma_bar(data.M, 0.5, k, j);
            CHECK(mixed_error(qflat, sign * qbar, scale) <= 1e-8);
            CHECK(mixed_error(qswap, sign * qbar, scale) <= 1e-8);
        }
}

TEST_CASE("near-singular M falls back to quadrature") {
    const Matrix M0 = Matrix::Zero(2, 2);
    const Config cfg;
    const LegendreTable table(M0, 0.8, 3, cfg);
    CHECK(table.source() == LegendreTable::Source::quadrature);
    CHECK((table.gamma(0) - 0.8 * Matrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK(table.gamma(1).norm() <= 1e-12);
    CHECK((table.gamma_bar(0, 0) - 0.5 * 0.64 * Matrix::Identity(2, 2)).norm() <= 1e-11);
    CHECK_NOTHROW(table.validate(cfg));
}

TEST_CASE("precision tiers escalate with the order") {
    const LyapunovOperatorData data = build_MN(example1(0.604));
    const Config cfg;
    CHECK(required_digits(data.M, 0.604, 4) < required_digits(data.M, 0.604, 13));
    CHECK(required_digits(data.M, 0.604, 13) < required_digits(data.M, 0.604, 30));
    const LegendreTable small(data.M, 0.604, 4, cfg);
    const LegendreTable large(data.M, 0.604, 30, cfg);
    CHECK(small.digits_used() <= large.digits_used());
    CHECK(large.source() == LegendreTable::Source::recursion);
    // shared low-order entries agree across table sizes
    CHECK((small.gamma(2) - large.gamma(2)).norm() <= 1e-12 * (1.0 + large.gamma(2).norm()));
    CHECK((small.gamma_bar(1, 2) - large.gamma_bar(1, 2)).norm() <=
          1e-12 * (1.0 + large.gamma_bar(1, 2).norm()));
}

TEST_CASE("validate raises PrecisionLoss for an unreachable tolerance") {
    const LyapunovOperatorData data = build_MN(example1(0.604));
    Config cfg;
    const LegendreTable table(data.M, 0.604, 8, cfg);
    CHECK_NOTHROW(table.validate(cfg));
    cfg.validate_tol = 1e-18;  // below any double-precision cross-check floor
    CHECK_THROWS_AS(table.validate(cfg), PrecisionLoss);
}

TEST_CASE("table bounds checking") {
    const LyapunovOperatorData data = build_MN(example1(0.3));
    const LegendreTable table(data.M, 0.3, 4, Config{});
    CHECK_THROWS_AS(table.gamma(4), OutOfRange);
    CHECK_THROWS_AS(table.gamma(-1), OutOfRange);
    CHECK_THROWS_AS(table.gamma_bar(0, 4), OutOfRange);
    CHECK_THROWS_AS(LegendreTable(data.M, -0.3, 4, Config{}), InvalidInput);
    CHECK_THROWS_AS(LegendreTable(data.M, 0.3, 0, Config{}), InvalidInput);
}

TEST_CASE("auto node count grows with order and h||M||") {
    const Matrix I2 = Matrix::Identity(2, 2);
    CHECK(quadrature_auto_nodes(I2, 0.5, 4, 64) == 64);       // configured floor
    CHECK(quadrature_auto_nodes(I2, 0.5, 80, 64) >= 92);      // order-driven
    CHECK(quadrature_auto_nodes(40.0 * I2, 2.0, 4, 64) >= 80);  // ||hM||-driven
    CHECK(quadrature_auto_nodes(I2, 0.5, 5000, 64) == 2048);  // hard cap
}

TEST_CASE("recursion agrees with quadrature on a random 3x3 system") {
    std::mt19937 rng(11);
    const TimeDelaySystem sys = tds::testing::random_candidate(rng, 10.0);
    const LyapunovOperatorData data = build_MN(sys);
    const int n = 10;
    const LegendreTable rec(data.M, sys.h, n, Config{});
    Config qcfg;
    qcfg.table_digits_cap = -1;
    const LegendreTable quad(data.M, sys.h, n, qcfg);

    double sg = 0.0, sb = 0.0;
    for (int k = 0; k < n; ++k) sg = std::max(sg, quad.gamma(k).norm());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) sb = std::max(sb, quad.gamma_bar(j, k).norm());
    for (int k = 0; k < n; ++k) CHECK(mixed_error(rec.gamma(k), quad.gamma(k), sg) <= 1e-8);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            CHECK(mixed_error(rec.gamma_bar(j, k), quad.gamma_bar(j, k), sb) <= 1e-7);
}
