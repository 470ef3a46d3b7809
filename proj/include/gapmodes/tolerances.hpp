#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gapmodes {

// Every numeric knob used by the library lives here so that a run is fully
// reproducible from (inputs, profile).  The hash of the active profile is
// stamped into every CSV row the CLI emits.
struct Tolerances {
    // adaptive ODE integration: local error per unit length
    double ode_tol = 1e-10;
    // final bracket width for every bisection on lambda (eigenvalues, band
    // edges, interface roots, ratio poles)
    double bisect_width = 1e-10;
    // roots/poles closer than this to a gap edge are treated as absorbed
    // into the essential spectrum and dropped
    double edge_margin = 1e-8;
    // interior test: lambda counts as inside a gap only if |tr M| - 2
    // exceeds this
    double delta_margin = 1e-9;
    // |psi(0)| / ||state|| below this marks a pole of the ratio function
    double pole_threshold = 1e-9;
    // candidate gaps narrower than this are reported as closed and skipped
    double closed_gap_width = 1e-7;
    // band edges must coincide with a Dirichlet/Neumann eigenvalue within
    // this (scaled by max(1,|lambda|)) for edge certification
    double edge_match_tol = 1e-6;
    // coarse scan step cap for the discriminant sweep
    double scan_step_cap = 0.05;
    // number of lambda samples per gap when profiling ratio functions
    int ratio_samples = 96;
    // finite-difference oracle: bisection width on window eigenvalues
    double fd_bisect_width = 1e-8;
    // localization filter: max mass fraction in the outer 20% of the domain
    double localized_mass = 1e-4;
    // oracle defaults: half-width = fd_periods * period, step = period / fd_steps_per_period
    int fd_periods = 40;
    int fd_steps_per_period = 200;
    // assembled interface eigenfunctions: window half-width in periods and
    // samples per period
    int efn_periods = 8;
    int efn_samples_per_period = 256;
    // boundary eigenfunction samples per period
    int efn_samples_boundary = 4096;
    // grid for monotonicity classification and for the comparison-potential
    // domination check
    int monotonicity_grid = 2048;
    int vbar_grid = 4096;

    void validate() const {
        if (!(ode_tol > 0 && ode_tol < 1e-2))
            throw std::invalid_argument("tolerances: ode_tol out of range");
        if (!(bisect_width > 0) || !(fd_bisect_width > 0))
            throw std::invalid_argument("tolerances: bisection width must be positive");
        if (!(edge_margin > 0) || !(delta_margin > 0) || !(pole_threshold > 0))
            throw std::invalid_argument("tolerances: margins must be positive");
        if (ratio_samples < 8 || monotonicity_grid < 16 || vbar_grid < 16)
            throw std::invalid_argument("tolerances: grid sizes too small");
        if (fd_periods < 1 || fd_steps_per_period < 8)
            throw std::invalid_argument("tolerances: oracle grid too coarse");
        if (efn_periods < 1 || efn_samples_per_period < 4 || efn_samples_boundary < 16)
            throw std::invalid_argument("tolerances: eigenfunction sampling too coarse");
    }
};

// named profiles selectable from the CLI
Tolerances tolerance_profile(const std::string& name);

// FNV-1a over the canonical serialization of all fields; identifies the
// profile in CSV output
std::uint64_t tolerance_hash(const Tolerances& t);

std::string tolerance_hash_hex(const Tolerances& t);

}  // namespace gapmodes
