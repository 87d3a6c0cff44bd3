#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "tds/delay_system.hpp"

namespace tds {

// A system file is a single JSON document:
//   { "name": "...", "h": 0.5, "A": [[...],...], "Ad": [[...],...] }
// Nested arrays are row-major.  Entries of A/Ad may be strings holding a
// linear expression in named parameters (e.g. "-10-K"), which makes the same
// file usable as a sweep template; such entries must be bound before the
// system can be built.
struct SystemTemplate {
    using Entry = std::variant<double, std::string>;
    std::string name;
    double h = 0.0;
    std::vector<std::vector<Entry>> A;
    std::vector<std::vector<Entry>> Ad;

    bool has_parameters() const;
    // Substitute parameter values into every expression entry.
    TimeDelaySystem instantiate(const std::map<std::string, double>& params = {}) const;
};

SystemTemplate parse_system_json(const std::string& text);
SystemTemplate load_system_file(const std::string& path);

// Evaluate a +-*/ expression with numeric literals, parentheses and named
// parameters.  Throws InvalidInput on unknown names or trailing garbage.
double eval_expression(const std::string& expr, const std::map<std::string, double>& params);

}  // namespace tds
