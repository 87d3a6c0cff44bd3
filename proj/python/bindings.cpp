#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "tds/certificate.hpp"
#include "tds/config.hpp"
#include "tds/delay_system.hpp"
#include "tds/legendre.hpp"
#include "tds/oracles.hpp"

namespace py = pybind11;

namespace {

tds::TimeDelaySystem make_system(const tds::Matrix& A, const tds::Matrix& Ad, double h) {
    tds::TimeDelaySystem sys{A, Ad, h};
    sys.validate();
    return sys;
}

py::dict verdict_dict(const tds::StabilityVerdict& v) {
    py::dict d;
    d["verdict"] = std::string(tds::to_string(v.kind));
    d["n_star"] = v.n_star;
    d["first_failing_order"] =
        v.first_failing_order ? py::object(py::int_(*v.first_failing_order)) : py::none();
    d["margin"] = v.margin;
    py::dict c;
    c["r"] = v.constants.r;
    c["mu"] = v.constants.mu;
    c["rho"] = v.constants.rho;
    c["b0"] = v.constants.b0;
    c["eta0"] = v.constants.eta0;
    c["kappa1"] = v.constants.kappa1;
    c["kappa2"] = v.constants.kappa2;
    c["eps_star"] = v.constants.eps_star;
    d["constants"] = c;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exponential stability certificates for linear time-delay systems "
              "x'(t) = A x(t) + Ad x(t - h)";

    py::register_exception<tds::Error>(m, "TdsError");

    m.def(
        "analyze",
        [](const tds::Matrix& A, const tds::Matrix& Ad, double h, const std::string& mode) {
            const tds::TimeDelaySystem sys = make_system(A, Ad, h);
            const tds::StabilityVerdict v = mode == "sweep" ? tds::hierarchical_sweep(sys)
                                                            : tds::theorem_test(sys);
            return verdict_dict(v);
        },
        py::arg("A"), py::arg("Ad"), py::arg("h"), py::arg("mode") = "theorem",
        "Decide exponential stability; mode is 'theorem' (single test at the "
        "guaranteed order) or 'sweep' (orders 1..n*).");

    m.def(
        "order",
        [](const tds::Matrix& A, const tds::Matrix& Ad, double h) {
            const tds::TimeDelaySystem sys = make_system(A, Ad, h);
            const tds::LyapunovOperatorData data = tds::build_MN(sys);
            const tds::BoundConstants c = tds::compute_n_star(sys, data);
            py::dict d;
            d["r"] = c.r;
            d["mu"] = c.mu;
            d["rho"] = c.rho;
            d["b0"] = c.b0;
            d["eta0"] = c.eta0;
            d["kappa1"] = c.kappa1;
            d["kappa2"] = c.kappa2;
            d["eps_star"] = c.eps_star;
            d["n_star"] = c.n_star;
            return d;
        },
        py::arg("A"), py::arg("Ad"), py::arg("h"),
        "Constants chain and guaranteed certificate order n* without assembling P.");

    m.def(
        "certificate",
        [](const tds::Matrix& A, const tds::Matrix& Ad, double h, int n) {
            const tds::TimeDelaySystem sys = make_system(A, Ad, h);
            const tds::Config cfg;
            const tds::LyapunovOperatorData data = tds::build_MN(sys, cfg);
            const tds::LegendreTable table(data.M, h, n, cfg);
            const tds::UCoefficients coeffs = tds::u_coefficients(data, table, n);
            const tds::CertificateMatrix cert = tds::assemble_P(sys, data, coeffs, n);
            return py::make_tuple(cert.P, cert.min_eig);
        },
        py::arg("A"), py::arg("Ad"), py::arg("h"), py::arg("n"),
        "Assemble the block certificate matrix P_n; returns (P, lambda_min).");

    m.def(
        "lyapunov_matrix",
        [](const tds::Matrix& A, const tds::Matrix& Ad, double h, double tau) {
            const tds::TimeDelaySystem sys = make_system(A, Ad, h);
            const tds::LyapunovOperatorData data = tds::build_MN(sys);
            return tds::eval_U(data, tau);
        },
        py::arg("A"), py::arg("Ad"), py::arg("h"), py::arg("tau"),
        "Evaluate the delay Lyapunov matrix U(tau) on [-h, h].");

    m.def(
        "critical_delay",
        [](double a, double b) { return tds::scalar_critical_delay(a, b); },
        py::arg("a"), py::arg("b"),
        "Smallest destabilizing delay of x'(t) = a x(t) + b x(t-h); None when "
        "stability holds for every delay.");

    m.def(
        "simulate",
        [](const tds::Matrix& A, const tds::Matrix& Ad, double h, const tds::Vector& phi,
           double horizon, double step) {
            const tds::TimeDelaySystem sys = make_system(A, Ad, h);
            const tds::SimTrace trace = tds::simulate_dde(sys, phi, horizon, step);
            py::dict d;
            d["growth_estimate"] = trace.growth_estimate;
            d["diverged"] = trace.diverged;
            d["step"] = trace.step;
            return d;
        },
        py::arg("A"), py::arg("Ad"), py::arg("h"), py::arg("phi"), py::arg("horizon"),
        py::arg("step"),
        "Integrate the delay system from a constant history and report the "
        "fitted exponential growth rate.");
}
