#include "tds/system_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tds {

namespace {

using json = nlohmann::json;

class ExprParser {
public:
    ExprParser(const std::string& s, const std::map<std::string, double>& params)
        : s_(s), params_(params) {}

    double parse() {
        const double v = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw InvalidInput("expression: trailing characters in '" + s_ + "'");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) v /= factor();
            else return v;
        }
    }

    double factor() {
        skip_ws();
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) throw InvalidInput("expression: missing ')' in '" + s_ + "'");
            return v;
        }
        if (pos_ >= s_.size()) throw InvalidInput("expression: unexpected end of '" + s_ + "'");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos_;
            while (end < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                ++end;
            const std::string name = s_.substr(pos_, end - pos_);
            pos_ = end;
            const auto it = params_.find(name);
            if (it == params_.end())
                throw InvalidInput("expression: unknown parameter '" + name + "'");
            return it->second;
        }
        throw InvalidInput(std::string("expression: unexpected character '") + c + "' in '" + s_ +
                           "'");
    }

    const std::string& s_;
    const std::map<std::string, double>& params_;
    size_t pos_ = 0;
};

std::vector<std::vector<SystemTemplate::Entry>> parse_matrix(const json& j, const char* label) {
    if (!j.is_array() || j.empty())
        throw InvalidInput(std::string("system file: ") + label + " must be a non-empty 2-D array");
    std::vector<std::vector<SystemTemplate::Entry>> rows;
    for (const auto& row : j) {
        if (!row.is_array() || row.empty())
            throw InvalidInput(std::string("system file: ") + label + " rows must be arrays");
        std::vector<SystemTemplate::Entry> out;
        for (const auto& e : row) {
            if (e.is_number()) out.emplace_back(e.get<double>());
            else if (e.is_string()) out.emplace_back(e.get<std::string>());
            else
                throw InvalidInput(std::string("system file: ") + label +
                                   " entries must be numbers or expression strings");
        }
        rows.push_back(std::move(out));
    }
    const size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n)
            throw InvalidInput(std::string("system file: ") + label + " must be square");
    return rows;
}

}  // namespace

double eval_expression(const std::string& expr, const std::map<std::string, double>& params) {
    return ExprParser(expr, params).parse();
}

bool SystemTemplate::has_parameters() const {
    auto any_string = [](const std::vector<std::vector<Entry>>& m) {
        for (const auto& row : m)
            for (const auto& e : row)
                if (std::holds_alternative<std::string>(e)) return true;
        return false;
    };
    return any_string(A) || any_string(Ad);
}

TimeDelaySystem SystemTemplate::instantiate(const std::map<std::string, double>& params) const {
    const auto n = static_cast<Eigen::Index>(A.size());
    TimeDelaySystem sys;
    sys.h = h;
    sys.A.resize(n, n);
    sys.Ad.resize(n, n);
    auto fill = [&](const std::vector<std::vector<Entry>>& src, Matrix& dst) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const Entry& e = src[i][j];
                dst(i, j) = std::holds_alternative<double>(e)
                                ? std::get<double>(e)
                                : eval_expression(std::get<std::string>(e), params);
            }
    };
    fill(A, sys.A);
    fill(Ad, sys.Ad);
    sys.validate();
    return sys;
}

SystemTemplate parse_system_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("system file: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("system file: top level must be an object");
    SystemTemplate t;
    t.name = j.value("name", std::string{});
    if (!j.contains("h") || !j["h"].is_number())
        throw InvalidInput("system file: missing numeric field 'h'");
    t.h = j["h"].get<double>();
    if (!(t.h > 0.0)) throw InvalidInput("system file: h must be positive");
    if (!j.contains("A") || !j.contains("Ad"))
        throw InvalidInput("system file: missing field 'A' or 'Ad'");
    t.A = parse_matrix(j["A"], "A");
    t.Ad = parse_matrix(j["Ad"], "Ad");
    if (t.A.size() != t.Ad.size())
        throw DimensionMismatch("system file: A and Ad must have equal size");
    return t;
}

SystemTemplate load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("system file: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system_json(ss.str());
}

}  // namespace tds
