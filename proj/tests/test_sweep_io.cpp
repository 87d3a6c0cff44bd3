#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "tds/sweep.hpp"
#include "tds/system_io.hpp"

using namespace tds;

namespace {

const char* kScalarTemplate = R"({
  "name": "scalar",
  "h": 0.1,
  "A": [[1.0]],
  "Ad": [[-2.0]]
})";

const char* kParamTemplate = R"({
  "name": "param",
  "h": 0.5,
  "A": [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    ["-10-K", 10.0, 0.0, 0.0],
    [5.0, -15.0, 0.0, -0.25]
  ],
  "Ad": [
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    ["K", 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0]
  ]
})";

}  // namespace

TEST_CASE("expression grammar") {
    const std::map<std::string, double> params{{"K", 10.0}, {"w", 0.5}};
    CHECK(eval_expression("2*(3+4)-5/2", {}) == doctest::Approx(11.5));
    CHECK(eval_expression("-10-K", params) == doctest::Approx(-20.0));
    CHECK(eval_expression("K", params) == doctest::Approx(10.0));
    CHECK(eval_expression("2*K+1", params) == doctest::Approx(21.0));
    CHECK(eval_expression("-(w*4)", params) == doctest::Approx(-2.0));
    CHECK(eval_expression("1e-3", {}) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(eval_expression("Q+1", params), InvalidInput);
    CHECK_THROWS_AS(eval_expression("1++", {}), InvalidInput);
    CHECK_THROWS_AS(eval_expression("2 3", {}), InvalidInput);
    CHECK_THROWS_AS(eval_expression("(1", {}), InvalidInput);
    CHECK_THROWS_AS(eval_expression("", {}), InvalidInput);
}

TEST_CASE("system JSON parsing") {
    const SystemTemplate tmpl = parse_system_json(kScalarTemplate);
    CHECK(tmpl.name == "scalar");
    CHECK(!tmpl.has_parameters());
    const TimeDelaySystem sys = tmpl.instantiate();
    CHECK(sys.h == 0.1);
    CHECK(sys.A(0, 0) == 1.0);
    CHECK(sys.Ad(0, 0) == -2.0);

    CHECK_THROWS_AS(parse_system_json("not json"), InvalidInput);
    CHECK_THROWS_AS(parse_system_json(R"({"A": [[1.0]], "Ad": [[0.0]]})"), InvalidInput);
    CHECK_THROWS_AS(parse_system_json(R"({"h": -1, "A": [[1.0]], "Ad": [[0.0]]})"),
                    InvalidInput);
    CHECK_THROWS_AS(parse_system_json(R"({"h": 1, "A": [[1.0, 2.0]], "Ad": [[0.0]]})"),
                    InvalidInput);
    CHECK_THROWS_AS(
        parse_system_json(R"({"h": 1, "A": [[1.0]], "Ad": [[0.0, 0.0], [0.0, 0.0]]})"),
        DimensionMismatch);
}

TEST_CASE("parameterized template instantiation") {
    const SystemTemplate tmpl = parse_system_json(kParamTemplate);
    CHECK(tmpl.has_parameters());
    CHECK_THROWS_AS(tmpl.instantiate(), InvalidInput);  // unbound K
    const TimeDelaySystem sys = tmpl.instantiate({{"K", 10.0}});
    CHECK(sys.A(2, 0) == doctest::Approx(-20.0));
    CHECK(sys.Ad(2, 0) == doctest::Approx(10.0));
    CHECK(sys.m() == 4);
}

TEST_CASE("system file loading") {
    const std::string path = "/tmp/tds_test_system.json";
    {
        std::ofstream out(path);
        out << kScalarTemplate;
    }
    const SystemTemplate tmpl = load_system_file(path);
    CHECK(tmpl.name == "scalar");
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_system_file("/tmp/does_not_exist_tds.json"), InvalidInput);
}

TEST_CASE("sweep spec parsing") {
    const SweepSpec values = parse_sweep_spec_json(
        R"({"mode": "theorem", "parameters": [{"target": "h", "values": [0.1, 0.2]}]})");
    CHECK(values.mode == SweepSpec::Mode::theorem);
    REQUIRE(values.parameters.size() == 1);
    CHECK(values.parameters[0].target == "h");
    CHECK(values.parameters[0].values == std::vector<double>{0.1, 0.2});

    const SweepSpec lin = parse_sweep_spec_json(
        R"({"parameters": [{"target": "K", "min": 1.0, "max": 3.0, "count": 5}]})");
    CHECK(lin.mode == SweepSpec::Mode::sweep);
    CHECK(lin.n_max == 5);
    REQUIRE(lin.parameters[0].values.size() == 5);
    CHECK(lin.parameters[0].values.front() == doctest::Approx(1.0));
    CHECK(lin.parameters[0].values.back() == doctest::Approx(3.0));
    CHECK(lin.parameters[0].values[2] == doctest::Approx(2.0));

    CHECK_THROWS_AS(parse_sweep_spec_json(R"({"mode": "x", "parameters": []})"), InvalidInput);
    CHECK_THROWS_AS(parse_sweep_spec_json(R"({"parameters": []})"), InvalidInput);
    CHECK_THROWS_AS(parse_sweep_spec_json(R"({"parameters": [
        {"target": "a", "values": [1]},
        {"target": "b", "values": [1]},
        {"target": "c", "values": [1]}]})"),
                    InvalidInput);
    CHECK_THROWS_AS(
        parse_sweep_spec_json(
            R"({"n_max": 0, "parameters": [{"target": "h", "values": [0.1]}]})"),
        InvalidInput);
    CHECK_THROWS_AS(
        parse_sweep_spec_json(
            R"({"parameters": [{"target": "h", "min": 1.0, "max": 2.0, "count": 1}]})"),
        InvalidInput);
}

TEST_CASE("one-dimensional theorem sweep over the delay") {
    const SystemTemplate tmpl = parse_system_json(kScalarTemplate);
    SweepSpec spec;
    spec.mode = SweepSpec::Mode::theorem;
    spec.parameters.push_back({"h", {0.1, 0.604, 0.605, 2.0}});
    Config cfg;
    cfg.sweep_threads = 2;
    const SweepResult result = run_sweep(tmpl, spec, cfg);

    REQUIRE(result.rows.size() == 4);
    CHECK(!result.two_dimensional);
    CHECK(result.columns == std::vector<std::string>{"h", "status", "verdict", "n_star",
                                                     "first_failing_order", "margin"});
    const std::vector<std::string> expect{"Stable", "Stable", "Unstable", "Unstable"};
    const std::vector<int> nstar{4, 13, 13, 23};
    for (size_t i = 0; i < 4; ++i) {
        CHECK(result.rows[i].status == "ok");
        CHECK(result.rows[i].verdict == expect[i]);
        CHECK(result.rows[i].n_star == nstar[i]);
        CHECK(result.rows[i].values[0] == spec.parameters[0].values[i]);
    }
}

TEST_CASE("two-dimensional sweep measures membership per order") {
    const SystemTemplate tmpl = parse_system_json(kParamTemplate);
    SweepSpec spec;
    spec.mode = SweepSpec::Mode::sweep;
    spec.n_max = 3;
    spec.parameters.push_back({"K", {10.0}});
    spec.parameters.push_back({"h", {0.3, 1.5}});
    const SweepResult result = run_sweep(tmpl, spec, Config{});

    REQUIRE(result.rows.size() == 2);
    CHECK(result.two_dimensional);
    CHECK(result.columns.back() == "U3");
    for (const SweepRow& row : result.rows) {
        CHECK(row.status == "ok");
        REQUIRE(row.membership.size() == 3);
        for (size_t k = 0; k + 1 < row.membership.size(); ++k)
            CHECK(row.membership[k] <= row.membership[k + 1]);  // genuine inclusion
        if (row.verdict == "Unstable") {
            REQUIRE(row.first_failing_order);
            CHECK(row.margin < 0.0);
            CHECK(row.membership.back() == 1);
        }
    }
    // (K=10, h=1.5) is deep in the unstable region; order 1 already certifies it
    CHECK(result.rows[1].verdict == "Unstable");
    CHECK(result.rows[1].membership[0] == 1);
}

TEST_CASE("per-point failures land in the status column") {
    SystemTemplate zero;
    zero.name = "zero";
    zero.h = 1.0;
    zero.A = {{0.0}};
    zero.Ad = {{0.0}};
    SweepSpec spec;
    spec.mode = SweepSpec::Mode::theorem;
    spec.parameters.push_back({"h", {1.0}});
    const SweepResult result = run_sweep(zero, spec, Config{});
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].status == "LyapunovConditionViolated");
    CHECK(result.rows[0].verdict.empty());
}

TEST_CASE("CSV serialization round-trips 17 significant digits") {
    const SystemTemplate tmpl = parse_system_json(kScalarTemplate);
    SweepSpec spec;
    spec.mode = SweepSpec::Mode::theorem;
    spec.parameters.push_back({"h", {0.1, 0.605}});
    const SweepResult result = run_sweep(tmpl, spec, Config{});
    std::ostringstream out;
    write_csv(result, out);
    std::istringstream in(out.str());
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "h,status,verdict,n_star,first_failing_order,margin");
    CHECK(row0.rfind("0.10000000000000001,ok,Stable,4,,", 0) == 0);
    CHECK(row1.rfind("0.60499999999999998,ok,Unstable,13,13,-", 0) == 0);
    const double margin = std::stod(row0.substr(row0.rfind(',') + 1));
    CHECK(margin == doctest::Approx(1.429206e-2).epsilon(1e-5));
}
