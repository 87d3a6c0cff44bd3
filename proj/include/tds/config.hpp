#pragma once

#include <string>

namespace tds {

// Every tunable constant in one place.  Defaults follow the documented
// contracts; the CLI can override any field from a key=value file
// (--config / TDS_CONFIG) and from individual flags.
struct Config {
    // linear algebra
    double rcond_min_N = 1e-13;        // below this the Lyapunov condition is declared violated
    double rcond_min_M = 1e-12;        // below this the moment recursions switch to quadrature

    // constants chain
    int kappa_grid = 2001;             // grid points per interval for the kappa maxima
    int kappa_refresh_every = 100;     // full matrix-exponential refresh period while stepping
    double bisect_tol = 1e-12;         // abscissa tolerance for the b0 root
    int order_cap = 5000;              // hard cap on n*

    // certificate
    double positivity_theta = 1e-10;   // relative threshold; |lambda_min| inside the band => Inconclusive

    // Legendre moment tables
    int quad_nodes = 64;               // Gauss-Legendre nodes per dimension (auto-raised with n and ||hM||)
    bool validate_table = true;        // cross-check rows {0, n/2, n-1} against quadrature
    double validate_tol = 1e-6;        // mixed relative/absolute tolerance for the row check
    int table_digits_cap = 1600;       // largest extended-precision tier; beyond it the build uses quadrature

    // simulator defaults
    double sim_step_divisor = 1000.0;  // step = h / divisor
    double sim_horizon_delays = 30.0;  // horizon = this * h
    double sim_diverged_norm = 1e12;

    // sweep engine
    int sweep_threads = 0;             // 0 = hardware concurrency
    bool sweep_validate_table = false; // per-point table validation inside grids

    // output
    bool deterministic = false;        // omit wall-clock fields for byte-identical reruns
};

// Parse a flat key=value file (one pair per line, '#' comments) into cfg.
// Unknown keys raise InvalidInput; values must parse fully.
void load_config_file(Config& cfg, const std::string& path);

// Apply one key=value assignment (shared by file parser and CLI overrides).
void apply_config_entry(Config& cfg, const std::string& key, const std::string& value);

}  // namespace tds
