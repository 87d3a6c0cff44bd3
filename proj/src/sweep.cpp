#include "tds/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace tds {

namespace {

using json = nlohmann::json;

const char* error_status(const Error& e) {
    switch (e.code()) {
        case Error::Code::lyapunov_condition_violated: return "LyapunovConditionViolated";
        case Error::Code::order_too_large: return "OrderTooLarge";
        case Error::Code::precision_loss: return "PrecisionLoss";
        case Error::Code::singular_matrix: return "SingularMatrix";
        case Error::Code::invalid_input: return "InvalidInput";
        default: return "NumericalError";
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SweepSpec parse_sweep_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("sweep spec: invalid JSON: ") + e.what());
    }
    SweepSpec spec;
    const std::string mode = j.value("mode", "sweep");
    if (mode == "theorem") spec.mode = SweepSpec::Mode::theorem;
    else if (mode == "sweep") spec.mode = SweepSpec::Mode::sweep;
    else throw InvalidInput("sweep spec: mode must be 'theorem' or 'sweep'");
    spec.n_max = j.value("n_max", 5);
    if (spec.n_max < 1) throw InvalidInput("sweep spec: n_max must be positive");
    if (!j.contains("parameters") || !j["parameters"].is_array())
        throw InvalidInput("sweep spec: missing 'parameters' array");
    for (const auto& p : j["parameters"]) {
        SweepParameter param;
        if (!p.contains("target") || !p["target"].is_string())
            throw InvalidInput("sweep spec: each parameter needs a string 'target'");
        param.target = p["target"].get<std::string>();
        if (p.contains("values")) {
            for (const auto& v : p["values"]) {
                if (!v.is_number()) throw InvalidInput("sweep spec: 'values' must be numeric");
                param.values.push_back(v.get<double>());
            }
        } else if (p.contains("min") && p.contains("max") && p.contains("count")) {
            const double lo = p["min"].get<double>();
            const double hi = p["max"].get<double>();
            const int count = p["count"].get<int>();
            if (!(lo < hi) || count < 2)
                throw InvalidInput(
                    "sweep spec: need min < max and count >= 2 (use 'values' for a single point)");
            for (int i = 0; i < count; ++i)
                param.values.push_back(lo + (hi - lo) * i / (count - 1));
        } else {
            throw InvalidInput("sweep spec: parameter needs 'values' or min/max/count");
        }
        if (param.values.empty()) throw InvalidInput("sweep spec: empty value list");
        spec.parameters.push_back(std::move(param));
    }
    if (spec.parameters.empty() || spec.parameters.size() > 2)
        throw InvalidInput("sweep spec: one or two swept parameters are supported");
    return spec;
}

SweepSpec load_sweep_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("sweep spec: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec_json(ss.str());
}

SweepResult run_sweep(const SystemTemplate& tmpl, const SweepSpec& spec, const Config& cfg) {
    SweepResult result;
    result.two_dimensional = spec.parameters.size() == 2;
    result.n_max = spec.mode == SweepSpec::Mode::sweep ? spec.n_max : 0;

    for (const auto& p : spec.parameters) result.columns.push_back(p.target);
    result.columns.insert(result.columns.end(),
                          {"status", "verdict", "n_star", "first_failing_order", "margin"});
    if (result.two_dimensional)
        for (int k = 1; k <= result.n_max; ++k)
            result.columns.push_back("U" + std::to_string(k));

    const size_t count0 = spec.parameters[0].values.size();
    const size_t count1 = result.two_dimensional ? spec.parameters[1].values.size() : 1;
    result.rows.resize(count0 * count1);

    Config point_cfg = cfg;
    point_cfg.validate_table = cfg.sweep_validate_table;

    auto evaluate = [&](size_t idx) {
        SweepRow& row = result.rows[idx];
        const size_t i0 = idx / count1;
        const size_t i1 = idx % count1;
        std::map<std::string, double> params;
        row.values.push_back(spec.parameters[0].values[i0]);
        params[spec.parameters[0].target] = spec.parameters[0].values[i0];
        if (result.two_dimensional) {
            row.values.push_back(spec.parameters[1].values[i1]);
            params[spec.parameters[1].target] = spec.parameters[1].values[i1];
        }
        try {
            TimeDelaySystem sys = tmpl.instantiate(params);
            if (params.count("h")) sys.h = params["h"];
            sys.validate();
            if (spec.mode == SweepSpec::Mode::theorem) {
                const StabilityVerdict v = theorem_test(sys, point_cfg);
                row.status = "ok";
                row.verdict = to_string(v.kind);
                row.n_star = v.n_star;
                row.first_failing_order = v.first_failing_order;
                row.margin = v.margin;
            } else {
                // Every order is tested on its own so the membership columns
                // measure the certified-unstable sets, not the stop order.
                const CertificateSequence seq =
                    certificate_sequence(sys, point_cfg, spec.n_max);
                std::optional<int> ffo;
                for (int k = 1; k <= spec.n_max; ++k) {
                    const bool failed =
                        test_positivity(seq.orders[k - 1], point_cfg.positivity_theta) ==
                        Positivity::NotPositive;
                    if (result.two_dimensional) row.membership.push_back(failed ? 1 : 0);
                    if (failed && !ffo) ffo = k;
                }
                const int n_star = seq.constants.n_star;
                row.status = "ok";
                row.n_star = n_star;
                row.first_failing_order = ffo;
                if (ffo) {
                    row.verdict = to_string(VerdictKind::Unstable);
                    row.margin = seq.orders[*ffo - 1].min_eig;
                } else if (n_star <= spec.n_max &&
                           test_positivity(seq.orders[n_star - 1], point_cfg.positivity_theta) ==
                               Positivity::Positive) {
                    row.verdict = to_string(VerdictKind::Stable);
                    row.margin = seq.orders[n_star - 1].min_eig;
                } else {
                    row.verdict = to_string(VerdictKind::Inconclusive);
                    row.margin = seq.orders.back().min_eig;
                }
            }
        } catch (const Error& e) {
            row.status = error_status(e);
            if (result.two_dimensional) row.membership.assign(result.n_max, 0);
        } catch (const std::exception&) {
            row.status = "NumericalError";
            if (result.two_dimensional) row.membership.assign(result.n_max, 0);
        }
    };

    unsigned threads = cfg.sweep_threads > 0 ? static_cast<unsigned>(cfg.sweep_threads)
                                             : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, result.rows.size());
    if (threads <= 1) {
        for (size_t i = 0; i < result.rows.size(); ++i) evaluate(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= result.rows.size()) return;
                    evaluate(i);
                }
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    for (size_t c = 0; c < result.columns.size(); ++c)
        out << (c ? "," : "") << result.columns[c];
    out << "\n";
    for (const auto& row : result.rows) {
        std::string line;
        for (const double v : row.values) {
            line += fmt17(v);
            line += ',';
        }
        line += row.status + "," + row.verdict + ",";
        line += row.n_star >= 0 ? std::to_string(row.n_star) : std::string{};
        line += ',';
        line += row.first_failing_order ? std::to_string(*row.first_failing_order)
                                        : std::string{};
        line += ',';
        line += row.status == "ok" ? fmt17(row.margin) : std::string{};
        for (const int u : row.membership) {
            line += ',';
            line += std::to_string(u);
        }
        out << line << "\n";
    }
}

}  // namespace tds
