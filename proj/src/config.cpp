#include "tds/config.hpp"

#include <fstream>
#include <sstream>

#include "tds/errors.hpp"

namespace tds {

namespace {

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw InvalidInput("config: bad boolean value '" + v + "'");
}

double parse_double(const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("config: bad numeric value '" + v + "'");
    }
    if (pos != v.size()) throw InvalidInput("config: trailing characters in '" + v + "'");
    return out;
}

int parse_int(const std::string& v) {
    size_t pos = 0;
    int out;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("config: bad integer value '" + v + "'");
    }
    if (pos != v.size()) throw InvalidInput("config: trailing characters in '" + v + "'");
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    if (key == "rcond_min_N") cfg.rcond_min_N = parse_double(value);
    else if (key == "rcond_min_M") cfg.rcond_min_M = parse_double(value);
    else if (key == "kappa_grid") cfg.kappa_grid = parse_int(value);
    else if (key == "kappa_refresh_every") cfg.kappa_refresh_every = parse_int(value);
    else if (key == "bisect_tol") cfg.bisect_tol = parse_double(value);
    else if (key == "order_cap") cfg.order_cap = parse_int(value);
    else if (key == "positivity_theta") cfg.positivity_theta = parse_double(value);
    else if (key == "quad_nodes") cfg.quad_nodes = parse_int(value);
    else if (key == "validate_table") cfg.validate_table = parse_bool(value);
    else if (key == "validate_tol") cfg.validate_tol = parse_double(value);
    else if (key == "table_digits_cap") cfg.table_digits_cap = parse_int(value);
    else if (key == "sim_step_divisor") cfg.sim_step_divisor = parse_double(value);
    else if (key == "sim_horizon_delays") cfg.sim_horizon_delays = parse_double(value);
    else if (key == "sim_diverged_norm") cfg.sim_diverged_norm = parse_double(value);
    else if (key == "sweep_threads") cfg.sweep_threads = parse_int(value);
    else if (key == "sweep_validate_table") cfg.sweep_validate_table = parse_bool(value);
    else if (key == "deterministic") cfg.deterministic = parse_bool(value);
    else throw InvalidInput("config: unknown key '" + key + "'");
}

void load_config_file(Config& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config: line " + std::to_string(lineno) + " is not key=value");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

}  // namespace tds
