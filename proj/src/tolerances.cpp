#include "gapmodes/tolerances.hpp"

#include <cstdio>

namespace gapmodes {

Tolerances tolerance_profile(const std::string& name) {
    Tolerances t;  // "default"
    if (name == "default") {
    } else if (name == "fast") {
        t.ode_tol = 1e-8;
        t.bisect_width = 1e-8;
        t.ratio_samples = 48;
        t.fd_periods = 20;
        t.fd_steps_per_period = 100;
        t.efn_samples_boundary = 1024;
    } else if (name == "tight") {
        t.ode_tol = 1e-12;
        t.bisect_width = 1e-12;
        t.ratio_samples = 192;
    } else {
        throw std::invalid_argument("unknown tolerance profile: " + name);
    }
    t.validate();
    return t;
}

std::uint64_t tolerance_hash(const Tolerances& t) {
    char buf[1024];
    int n = std::snprintf(
        buf, sizeof buf,
        "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%.17g|%.17g|%d|%d|%d|%d|%d|%d|%d",
        t.ode_tol, t.bisect_width, t.edge_margin, t.delta_margin,
        t.pole_threshold, t.closed_gap_width, t.edge_match_tol, t.scan_step_cap,
        t.ratio_samples, t.fd_bisect_width, t.localized_mass, t.fd_periods,
        t.fd_steps_per_period, t.efn_periods, t.efn_samples_per_period,
        t.efn_samples_boundary, t.monotonicity_grid, t.vbar_grid);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (int i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 1099511628211ull;
    }
    return h;
}

std::string tolerance_hash_hex(const Tolerances& t) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(tolerance_hash(t)));
    return std::string(buf);
}

}  // namespace gapmodes
