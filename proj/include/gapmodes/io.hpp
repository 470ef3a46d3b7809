#pragma once

#include <string>
#include <vector>

#include "gapmodes/potential.hpp"

namespace gapmodes::io {

// JSON potential descriptor:
//   {"period": 10.0, "cosine_coeffs": [0.5, -0.5], "shift": 0.0}
// "shift" is optional and defaults to 0.  Malformed input throws
// std::invalid_argument with a message naming the offending field.
PeriodicPotential potential_from_json_text(const std::string& text);
PeriodicPotential potential_from_json_file(const std::string& path);

// canonical numeric cell rendering: 12 significant digits
std::string format_value(double v);

// uniform grid "lo:hi:step"; endpoints inclusive up to step rounding
std::vector<double> parse_grid(const std::string& text);

// One output table.  render_csv produces
//   # gapmodes csv v1 cmd=<command> tol_profile=<name> tol_hash=<hex>
//   col1,col2,...,tol_hash
//   <cells...>,<hex>
// so every data row carries the hash of the tolerance set that produced it.
struct CsvTable {
    std::string command;
    std::string tol_profile;
    std::string tol_hash;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

// single-line JSON diagnostic for stderr, e.g. {"error":"config",...}
std::string diagnostic_json(const std::string& kind, const std::string& message);

}  // namespace gapmodes::io
