#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tds/certificate.hpp"
#include "tds/config.hpp"
#include "tds/system_io.hpp"

namespace tds {

struct SweepParameter {
    std::string target;          // "h" or a parameter name used by the template
    std::vector<double> values;  // explicit list or expanded linear grid
};

struct SweepSpec {
    enum class Mode { theorem, sweep };
    Mode mode = Mode::sweep;
    int n_max = 5;  // order ceiling in sweep mode (also the number of membership columns in 2-D)
    std::vector<SweepParameter> parameters;  // 1 or 2
};

SweepSpec parse_sweep_spec_json(const std::string& text);
SweepSpec load_sweep_spec_file(const std::string& path);

struct SweepRow {
    std::vector<double> values;  // one per swept parameter, grid order
    std::string status;          // "ok" or the error category
    std::string verdict;         // Stable / Unstable / Inconclusive / ""
    int n_star = -1;
    std::optional<int> first_failing_order;
    double margin = 0.0;
    std::vector<int> membership;  // 2-D mode: u1..u_{n_max}, each order tested on its own
};

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
    int n_max = 0;
    bool two_dimensional = false;
};

// Evaluate the grid (outer product of the parameter value lists) with a
// worker pool; rows come back in deterministic grid order with per-point
// errors recorded in the status column.
SweepResult run_sweep(const SystemTemplate& tmpl, const SweepSpec& spec, const Config& cfg = {});

// UTF-8 CSV, comma separated, header row, floats at 17 significant digits.
void write_csv(const SweepResult& result, std::ostream& out);

}  // namespace tds
