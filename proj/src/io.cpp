#include "gapmodes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gapmodes::io {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string("potential descriptor: missing or non-numeric \"") +
                                    key + "\"");
    return j.at(key).get<double>();
}

}  // namespace

PeriodicPotential potential_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("potential descriptor: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("potential descriptor: top level must be an object");
    const double period = require_number(j, "period");
    if (!j.contains("cosine_coeffs") || !j.at("cosine_coeffs").is_array())
        throw std::invalid_argument("potential descriptor: missing array \"cosine_coeffs\"");
    std::vector<double> coeffs;
    for (const auto& c : j.at("cosine_coeffs")) {
        if (!c.is_number())
            throw std::invalid_argument("potential descriptor: non-numeric cosine coefficient");
        coeffs.push_back(c.get<double>());
    }
    double shift = 0.0;
    if (j.contains("shift")) shift = require_number(j, "shift");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "period" && k != "cosine_coeffs" && k != "shift")
            throw std::invalid_argument("potential descriptor: unknown field \"" + k + "\"");
    }
    return PeriodicPotential(period, std::move(coeffs), shift);
}

PeriodicPotential potential_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("potential descriptor: cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return potential_from_json_text(buf.str());
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0, step = 0;
    char tail = 0;
    const int got = std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail);
    if (got != 3)
        throw std::invalid_argument("grid: expected \"lo:hi:step\", got \"" + text + "\"");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || step <= 0 || hi < lo)
        throw std::invalid_argument("grid: need finite lo <= hi and step > 0");
    const double count = (hi - lo) / step;
    if (count > 2e6) throw std::invalid_argument("grid: more than 2e6 points");
    std::vector<double> out;
    const long n = static_cast<long>(count + 1e-9);
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

std::string render_csv(const CsvTable& table) {
    std::ostringstream out;
    out << "# gapmodes csv v1 cmd=" << table.command << " tol_profile=" << table.tol_profile
        << " tol_hash=" << table.tol_hash << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << ",";
    out << "tol_hash\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("csv: row width does not match column count");
        for (const auto& cell : row) out << cell << ",";
        out << table.tol_hash << "\n";
    }
    return out.str();
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    const std::string body = render_csv(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("output path not writable: \"" + path + "\"");
    out << body;
    out.flush();
    if (!out) throw std::invalid_argument("output path not writable: \"" + path + "\"");
}

std::string diagnostic_json(const std::string& kind, const std::string& message) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    return j.dump();
}

}  // namespace gapmodes::io
