#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tds/certificate.hpp"
#include "tds/config.hpp"
#include "tds/oracles.hpp"
#include "tds/sweep.hpp"
#include "tds/system_io.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

int exit_code_for(const tds::Error& e) {
    switch (e.code()) {
        case tds::Error::Code::invalid_input:
        case tds::Error::Code::dimension_mismatch:
        case tds::Error::Code::out_of_range:
            return 2;
        case tds::Error::Code::lyapunov_condition_violated:
            return 3;
        case tds::Error::Code::order_too_large:
            return 4;
        default:
            return 5;
    }
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    bool deterministic = false;
};

tds::Config make_config(const CommonOpts& opts) {
    tds::Config cfg;
    if (!opts.config_path.empty()) {
        tds::load_config_file(cfg, opts.config_path);
    } else if (const char* env = std::getenv("TDS_CONFIG"); env && *env) {
        tds::load_config_file(cfg, env);
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw tds::InvalidInput("--set expects key=value, got '" + kv + "'");
        tds::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.deterministic) cfg.deterministic = true;
    return cfg;
}

ordered_json constants_json(const tds::BoundConstants& c) {
    return ordered_json{{"r", c.r},           {"mu", c.mu},       {"rho", c.rho},
                        {"b0", c.b0},         {"eta0", c.eta0},   {"kappa1", c.kappa1},
                        {"kappa2", c.kappa2}, {"eps_star", c.eps_star}};
}

ordered_json verdict_json(const std::string& name, double h, const tds::StabilityVerdict& v) {
    ordered_json out;
    out["name"] = name;
    out["h"] = h;
    out["verdict"] = tds::to_string(v.kind);
    out["n_star"] = v.n_star;
    if (v.first_failing_order) out["first_failing_order"] = *v.first_failing_order;
    else out["first_failing_order"] = nullptr;
    out["margin"] = v.margin;
    out["constants"] = constants_json(v.constants);
    out["table_source"] =
        v.table_source == tds::LegendreTable::Source::recursion ? "recursion" : "quadrature";
    return out;
}

void print_verdict_text(const ordered_json& j, std::ostream& os) {
    os << "system:   " << j["name"].get<std::string>() << "\n"
       << "h:        " << j["h"].get<double>() << "\n"
       << "verdict:  " << j["verdict"].get<std::string>() << "\n"
       << "n*:       " << j["n_star"].get<int>() << "\n";
    if (!j["first_failing_order"].is_null())
        os << "first failing order: " << j["first_failing_order"].get<int>() << "\n";
    os << "margin:   " << j["margin"].get<double>() << "\n";
    const auto& c = j["constants"];
    os << "constants: r=" << c["r"].get<double>() << " mu=" << c["mu"].get<double>()
       << " b0=" << c["b0"].get<double>() << " eta0=" << c["eta0"].get<double>()
       << " kappa1=" << c["kappa1"].get<double>() << " kappa2=" << c["kappa2"].get<double>()
       << " eps*=" << c["eps_star"].get<double>() << "\n";
}

int cmd_analyze(const std::string& path, const std::string& mode, bool text,
                const CommonOpts& opts) {
    const tds::Config cfg = make_config(opts);
    const tds::SystemTemplate tmpl = tds::load_system_file(path);
    const tds::TimeDelaySystem sys = tmpl.instantiate();
    const auto t0 = std::chrono::steady_clock::now();
    const tds::StabilityVerdict v = mode == "sweep" ? tds::hierarchical_sweep(sys, cfg)
                                                    : tds::theorem_test(sys, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ordered_json out = verdict_json(tmpl.name, sys.h, v);
    if (!cfg.deterministic) out["wall_time"] = wall;
    if (text) print_verdict_text(out, std::cout);
    else std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_order(const std::string& path, const CommonOpts& opts) {
    const tds::Config cfg = make_config(opts);
    const tds::SystemTemplate tmpl = tds::load_system_file(path);
    const tds::TimeDelaySystem sys = tmpl.instantiate();
    const tds::LyapunovOperatorData data = tds::build_MN(sys, cfg);
    const tds::BoundConstants c = tds::compute_n_star(sys, data, cfg);
    ordered_json out;
    out["name"] = tmpl.name;
    out["h"] = sys.h;
    out["constants"] = constants_json(c);
    out["n_star"] = c.n_star;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& spec_path, const std::string& out_path,
              const CommonOpts& opts) {
    const tds::Config cfg = make_config(opts);
    const tds::SystemTemplate tmpl = tds::load_system_file(path);
    const tds::SweepSpec spec = tds::load_sweep_spec_file(spec_path);
    const tds::SweepResult result = tds::run_sweep(tmpl, spec, cfg);
    if (out_path == "-") {
        tds::write_csv(result, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw tds::InvalidInput("sweep: cannot open output '" + out_path + "'");
        tds::write_csv(result, out);
    }
    return 0;
}

int cmd_oracle(const std::string& path, bool critical, bool simulate, double horizon, double step,
               const CommonOpts& opts) {
    const tds::Config cfg = make_config(opts);
    const tds::SystemTemplate tmpl = tds::load_system_file(path);
    const tds::TimeDelaySystem sys = tmpl.instantiate();
    if (!critical && !simulate) critical = simulate = true;

    ordered_json out;
    out["name"] = tmpl.name;
    out["h"] = sys.h;

    if (critical) {
        ordered_json rec;
        try {
            const auto hc = tds::scalar_critical_delay(sys);
            rec["status"] = "ok";
            if (hc) rec["h_critical"] = *hc;
            else rec["h_critical"] = nullptr;  // stable for every delay
        } catch (const tds::NotScalar& e) {
            rec["status"] = "NotScalar";
        }
        out["critical_delay"] = rec;
    }
    if (simulate) {
        const double st = step > 0.0 ? step : sys.h / cfg.sim_step_divisor;
        const double hz = horizon > 0.0 ? horizon : cfg.sim_horizon_delays * sys.h;
        const tds::SimTrace trace = tds::simulate_dde(
            sys, tds::Vector::Ones(sys.m()), hz, st, cfg.sim_diverged_norm);
        out["simulation"] = ordered_json{{"growth_estimate", trace.growth_estimate},
                                         {"diverged", trace.diverged},
                                         {"step", trace.step}};
    }
    try {
        const tds::StabilityVerdict v = tds::theorem_test(sys, cfg);
        out["certificate"] = verdict_json(tmpl.name, sys.h, v);
    } catch (const tds::Error& e) {
        out["certificate"] = ordered_json{{"status", e.what()}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential stability certificates for linear time-delay systems"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "key=value configuration file");
    app.add_option("--set", opts.overrides, "override a single configuration key (key=value)");
    app.add_flag("--deterministic", opts.deterministic,
                 "omit wall-clock fields for byte-identical reruns");

    std::string sys_path, mode = "theorem", spec_path, out_path = "-";
    bool text = false, json_flag = false;
    bool critical = false, simulate = false;
    double horizon = 0.0, step = 0.0;

    auto* analyze = app.add_subcommand("analyze", "run the positivity certificate");
    analyze->add_option("system", sys_path, "system JSON file")->required();
    analyze->add_option("--mode", mode, "theorem (single test at n*) or sweep (orders 1..n*)")
        ->check(CLI::IsMember({"theorem", "sweep"}));
    analyze->add_flag("--text", text, "human-readable output");
    analyze->add_flag("--json", json_flag, "JSON output (default)");

    auto* order = app.add_subcommand("order", "compute the constants chain and n* only");
    order->add_option("system", sys_path, "system JSON file")->required();

    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid to CSV");
    sweep->add_option("template", sys_path, "system template JSON file")->required();
    sweep->add_option("--spec", spec_path, "sweep specification JSON")->required();
    sweep->add_option("-o,--output", out_path, "output CSV path ('-' for stdout)");

    auto* oracle = app.add_subcommand("oracle", "independent checks next to the certificate");
    oracle->add_option("system", sys_path, "system JSON file")->required();
    oracle->add_flag("--critical-delay", critical, "scalar critical delay");
    oracle->add_flag("--simulate", simulate, "time-domain simulation");
    oracle->add_option("--horizon", horizon, "simulation horizon (default 30 h)");
    oracle->add_option("--step", step, "simulation step (default h/1000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(sys_path, mode, text, opts);
        if (app.got_subcommand(order)) return cmd_order(sys_path, opts);
        if (app.got_subcommand(sweep)) return cmd_sweep(sys_path, spec_path, out_path, opts);
        if (app.got_subcommand(oracle))
            return cmd_oracle(sys_path, critical, simulate, horizon, step, opts);
    } catch (const tds::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 2;
}
