// gapmodes: band/gap structure of 1-D periodic Schrödinger operators and
// localized modes of interface (junction) operators glued from two periodic
// half-line potentials.  CSV out; every row is stamped with the hash of the
// tolerance set that produced it.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapmodes/bloch.hpp"
#include "gapmodes/fd_oracle.hpp"
#include "gapmodes/interface.hpp"
#include "gapmodes/io.hpp"
#include "gapmodes/potential.hpp"
#include "gapmodes/spectrum.hpp"
#include "gapmodes/tolerances.hpp"

namespace {

using namespace gapmodes;

struct Common {
    std::vector<std::string> potentials;
    std::string out;
    std::string tol_name = "default";
    std::vector<std::string> overrides;
    double lambda_max = 4.0;
    int workers = 1;
    unsigned seed = 12345;
};

void add_common(CLI::App* sub, Common& c, int max_potentials) {
    sub->add_option("--potential", c.potentials, "potential descriptor JSON path(s)")
        ->required()
        ->expected(1, max_potentials);
    sub->add_option("--out", c.out, "output path (default: stdout)");
    sub->add_option("--tol", c.tol_name, "tolerance profile: default|fast|tight")
        ->capture_default_str();
    sub->add_option("--set", c.overrides,
                    "tolerance override key=value (repeatable)");
    sub->add_option("--lambda-max", c.lambda_max, "spectral cutoff")
        ->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads for scans")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "inverse-iteration seed for the FD oracle")
        ->capture_default_str();
}

Tolerances make_tolerances(const Common& c) {
    Tolerances t = tolerance_profile(c.tol_name);
    for (const std::string& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("tolerance override must be key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        std::size_t used = 0;
        auto as_double = [&] {
            const double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("bad number: " + kv);
            return v;
        };
        auto as_int = [&] {
            const int v = std::stoi(val, &used);
            if (used != val.size()) throw std::invalid_argument("bad integer: " + kv);
            return v;
        };
        if (key == "ode_tol") t.ode_tol = as_double();
        else if (key == "bisect_width") t.bisect_width = as_double();
        else if (key == "edge_margin") t.edge_margin = as_double();
        else if (key == "delta_margin") t.delta_margin = as_double();
        else if (key == "pole_threshold") t.pole_threshold = as_double();
        else if (key == "closed_gap_width") t.closed_gap_width = as_double();
        else if (key == "edge_match_tol") t.edge_match_tol = as_double();
        else if (key == "scan_step_cap") t.scan_step_cap = as_double();
        else if (key == "fd_bisect_width") t.fd_bisect_width = as_double();
        else if (key == "localized_mass") t.localized_mass = as_double();
        else if (key == "ratio_samples") t.ratio_samples = as_int();
        else if (key == "fd_periods") t.fd_periods = as_int();
        else if (key == "fd_steps_per_period") t.fd_steps_per_period = as_int();
        else if (key == "efn_periods") t.efn_periods = as_int();
        else if (key == "efn_samples_per_period") t.efn_samples_per_period = as_int();
        else if (key == "efn_samples_boundary") t.efn_samples_boundary = as_int();
        else if (key == "monotonicity_grid") t.monotonicity_grid = as_int();
        else if (key == "vbar_grid") t.vbar_grid = as_int();
        else throw std::invalid_argument("unknown tolerance field: " + key);
    }
    t.validate();
    return t;
}

io::CsvTable new_table(const std::string& cmd, const Common& c, const Tolerances& t,
                       std::vector<std::string> columns) {
    io::CsvTable tab;
    tab.command = cmd;
    tab.tol_profile = c.tol_name;
    tab.tol_hash = tolerance_hash_hex(t);
    tab.columns = std::move(columns);
    return tab;
}

void emit(const io::CsvTable& tab, const Common& c) {
    if (c.out.empty())
        std::cout << io::render_csv(tab);
    else
        io::write_csv_file(c.out, tab);
}

std::string parity_label(ModeParity p) {
    switch (p) {
        case ModeParity::Even: return "even";
        case ModeParity::Odd: return "odd";
        default: return "none";
    }
}

char edge_letter(EdgeKind k) {
    switch (k) {
        case EdgeKind::Dirichlet: return 'D';
        case EdgeKind::Neumann: return 'N';
        default: return 'S';
    }
}

std::string efn_path(const std::string& base, int k) {
    const auto dot = base.find_last_of('.');
    if (dot == std::string::npos || base.find('/', dot) != std::string::npos)
        return base + "." + std::to_string(k);
    return base.substr(0, dot) + "." + std::to_string(k) + base.substr(dot);
}

void emit_eigenfunction(const std::string& path, const std::string& cmd,
                        const Common& c, const Tolerances& tol,
                        const std::vector<double>& x, const std::vector<double>& psi) {
    io::CsvTable tab = new_table(cmd, c, tol, {"x", "psi"});
    tab.rows.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        tab.rows.push_back({io::format_value(x[i]), io::format_value(psi[i])});
    io::write_csv_file(path, tab);
}

void append_mode_row(io::CsvTable& tab, double param, const InterfaceEigenvalue& m) {
    tab.rows.push_back({io::format_value(param), io::format_value(m.lambda),
                        std::to_string(m.left_gap_index), std::to_string(m.right_gap_index),
                        parity_label(m.parity), io::format_value(m.residual)});
}

// ---------------------------------------------------------------- commands

int run_bands(const Common& c, const Tolerances& tol) {
    const auto p = io::potential_from_json_file(c.potentials.at(0));
    const auto edges = band_edges(p, c.lambda_max, tol);
    io::CsvTable tab = new_table("bands", c, tol, {"kind", "index", "lambda"});
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const bool lower = i % 2 == 0;
        tab.rows.push_back({lower ? "band_lower" : "band_upper",
                            std::to_string(i / 2 + 1), io::format_value(edges[i])});
    }
    emit(tab, c);
    return 0;
}

int run_gaps(const Common& c, const Tolerances& tol) {
    const auto p = io::potential_from_json_file(c.potentials.at(0));
    std::vector<std::string> warnings;
    const auto gs = gaps(p, c.lambda_max, tol, &warnings);
    for (const auto& w : warnings) std::cerr << "# warning: " << w << "\n";
    io::CsvTable tab = new_table("gaps", c, tol, {"kind", "index", "lambda"});
    for (const auto& g : gs) {
        tab.rows.push_back({std::string("gap_lower_") + edge_letter(g.lower_kind),
                            std::to_string(g.index), io::format_value(g.lower)});
        tab.rows.push_back({std::string("gap_upper_") + edge_letter(g.upper_kind),
                            std::to_string(g.index), io::format_value(g.upper)});
    }
    emit(tab, c);
    return 0;
}

int run_boundary_eigs(const Common& c, const Tolerances& tol, int count,
                      const std::string& efn, const std::string& efn_kind,
                      int efn_index) {
    const auto p = io::potential_from_json_file(c.potentials.at(0));
    const auto mu = dirichlet_eigenvalues(p, count, tol);
    const auto nu = neumann_eigenvalues(p, count, tol);
    io::CsvTable tab = new_table("boundary-eigs", c, tol, {"kind", "index", "lambda"});
    for (const auto& e : mu)
        tab.rows.push_back({"dirichlet", std::to_string(e.index), io::format_value(e.lambda)});
    for (const auto& e : nu)
        tab.rows.push_back({"neumann", std::to_string(e.index), io::format_value(e.lambda)});
    emit(tab, c);
    if (!efn.empty()) {
        const auto& family = efn_kind == "neumann" ? nu : mu;
        if (efn_index < 1 || efn_index > static_cast<int>(family.size()))
            throw std::invalid_argument("--efn-index out of range");
        const auto& e = family[static_cast<std::size_t>(efn_index - 1)];
        emit_eigenfunction(efn, "boundary-eigs", c, tol, e.x, e.psi);
    }
    return 0;
}

int run_ratio_profile(const Common& c, const Tolerances& tol, int gap_index,
                      double t, const std::string& side_name) {
    const auto p = io::potential_from_json_file(c.potentials.at(0));
    const Side side = side_name == "-" ? Side::Left : Side::Right;
    const auto gs = gaps(p, c.lambda_max, tol);
    const SpectralGap* gap = nullptr;
    for (const auto& g : gs)
        if (g.index == gap_index) gap = &g;
    if (!gap)
        throw std::invalid_argument("gap " + std::to_string(gap_index) +
                                    " is not an open gap below lambda-max");
    const auto prof = ratio_profile(p, *gap, t, side, tol);
    io::CsvTable tab = new_table("ratio-profile", c, tol, {"lambda", "R", "is_pole"});
    bool pole_emitted = !prof.pole.has_value();
    for (std::size_t i = 0; i < prof.lambda.size(); ++i) {
        if (!pole_emitted && prof.lambda[i] > *prof.pole) {
            tab.rows.push_back({io::format_value(*prof.pole), "inf", "1"});
            pole_emitted = true;
        }
        if (prof.pole_flag[i]) continue;  // raw sample inside the pole cell
        tab.rows.push_back({io::format_value(prof.lambda[i]),
                            io::format_value(prof.value[i]), "0"});
    }
    if (!pole_emitted) tab.rows.push_back({io::format_value(*prof.pole), "inf", "1"});
    emit(tab, c);
    return 0;
}

// builds the interface problem selected by the flags; exactly one selection
InterfaceProblem select_problem(const Common& c, const CLI::Option* alpha_opt,
                                double alpha, const CLI::Option* t_opt, double t,
                                const std::string& mode) {
    const bool two = c.potentials.size() == 2;
    const bool has_alpha = alpha_opt->count() > 0;
    const bool has_t = t_opt->count() > 0;
    if (two + has_alpha + has_t != 1)
        throw std::invalid_argument(
            "select exactly one of: two --potential paths, --alpha, or --t with --mode");
    const auto base = io::potential_from_json_file(c.potentials.at(0));
    if (two)
        return InterfaceProblem::two_potential(
            base, io::potential_from_json_file(c.potentials.at(1)));
    if (has_alpha) return InterfaceProblem::additive(base, alpha);
    if (mode == "one-sided") return InterfaceProblem::dislocation_one_sided(base, t);
    return InterfaceProblem::dislocation_symmetric(base, t);
}

int run_interface(const Common& c, const Tolerances& tol, const InterfaceProblem& prob,
                  const std::string& efn) {
    io::CsvTable tab = new_table(
        "interface", c, tol,
        {"param", "lambda", "gap_left", "gap_right", "parity", "residual"});
    std::vector<InterfaceEigenvalue> modes;
    if (prob.kind() == InterfaceKind::DislocationSymmetric ||
        prob.kind() == InterfaceKind::DislocationOneSided) {
        for (const auto& g : gaps(prob.base(), c.lambda_max, tol))
            for (const auto& m : solve_dislocation(prob, g, tol)) modes.push_back(m);
        std::sort(modes.begin(), modes.end(),
                  [](const InterfaceEigenvalue& a, const InterfaceEigenvalue& b) {
                      return a.lambda < b.lambda;
                  });
    } else {
        const auto lg = gaps(prob.left(), c.lambda_max, tol);
        const auto rg = gaps(prob.right(), c.lambda_max, tol);
        for (const auto& pair : predict_two_potential(lg, rg, tol)) {
            const auto r = solve_two_potential(
                prob, lg[static_cast<std::size_t>(pair.left_index)],
                rg[static_cast<std::size_t>(pair.right_index)], tol);
            if (r) modes.push_back(*r);
        }
    }
    for (const auto& m : modes) append_mode_row(tab, prob.parameter(), m);
    emit(tab, c);
    if (!efn.empty()) {
        for (std::size_t k = 0; k < modes.size(); ++k)
            emit_eigenfunction(efn_path(efn, static_cast<int>(k)), "interface", c, tol,
                               modes[k].x, modes[k].psi);
    }
    return 0;
}

int run_additive_scan(const Common& c, const Tolerances& tol, const std::string& grid) {
    const auto base = io::potential_from_json_file(c.potentials.at(0));
    const auto alphas = io::parse_grid(grid);
    const auto rows = additive_scan(base, alphas, c.lambda_max, tol, c.workers);
    io::CsvTable tab = new_table(
        "additive-scan", c, tol,
        {"param", "lambda", "gap_left", "gap_right", "parity", "residual"});
    for (const auto& row : rows)
        for (const auto& r : row.results)
            if (r) append_mode_row(tab, row.alpha, *r);
    emit(tab, c);
    return 0;
}

int run_dislocation_scan(const Common& c, const Tolerances& tol,
                         const std::string& grid, const std::string& mode) {
    const auto base = io::potential_from_json_file(c.potentials.at(0));
    const auto ts = io::parse_grid(grid);
    const InterfaceKind kind = mode == "one-sided" ? InterfaceKind::DislocationOneSided
                                                   : InterfaceKind::DislocationSymmetric;
    const auto rows = dislocation_scan(base, kind, ts, c.lambda_max, tol, c.workers);
    io::CsvTable tab = new_table(
        "dislocation-scan", c, tol,
        {"param", "lambda", "gap_left", "gap_right", "parity", "residual"});
    for (const auto& row : rows)
        for (const auto& m : row.modes) append_mode_row(tab, row.t, m);
    emit(tab, c);
    return 0;
}

int run_oracle(const Common& c, const Tolerances& tol, const InterfaceProblem& prob,
               const std::string& window) {
    double lo = 0, hi = 0, h = 0;
    char tail = 0;
    if (std::sscanf(window.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &h, &tail) != 3)
        throw std::invalid_argument("--grid for oracle must be lo:hi:h");
    const double half_width = tol.fd_periods * prob.base().period();
    const auto res = oracle_window(prob, lo, hi, half_width, h, tol, c.seed);
    io::CsvTable tab = new_table(
        "oracle", c, tol,
        {"param", "lambda", "gap_left", "gap_right", "parity", "residual"});
    for (const auto& m : res.kept)
        tab.rows.push_back({io::format_value(prob.parameter()), io::format_value(m.lambda),
                            "-1", "-1", "none", io::format_value(m.richardson_gap)});
    emit(tab, c);
    return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyLog {
    std::ostringstream buf;
    int failures = 0;
    void report(bool ok, const std::string& name, const std::string& detail = "") {
        std::ostringstream line;
        line << (ok ? "ok " : "FAIL ") << name;
        if (!detail.empty()) line << ": " << detail;
        line << "\n";
        buf << line.str();
        std::cout << line.str() << std::flush;  // progressive: stages are slow
        if (!ok) ++failures;
    }
};

bool is_even_descriptor(const PeriodicPotential& p) {
    const double pi = std::acos(-1.0);
    for (std::size_t j = 1; j <= p.coeffs().size(); ++j)
        if (std::abs(std::sin(2.0 * pi * static_cast<double>(j) * p.shift() / p.period())) >
            1e-9)
            return false;
    return true;
}

// nearest distance from x to any entry of v (v may be empty)
double nearest(const std::vector<double>& v, double x) {
    double best = std::numeric_limits<double>::infinity();
    for (double y : v) best = std::min(best, std::abs(y - x));
    return best;
}

void verify_edges(const PeriodicPotential& p, double L, const Tolerances& tol,
                  VerifyLog& log) {
    const auto edges = band_edges(p, L, tol);
    int count = 8;
    auto mu = dirichlet_eigenvalues(p, count, tol);
    auto nu = neumann_eigenvalues(p, count, tol);
    while ((mu.back().lambda <= L || nu.back().lambda <= L) && count < 128) {
        count *= 2;
        mu = dirichlet_eigenvalues(p, count, tol);
        nu = neumann_eigenvalues(p, count, tol);
    }
    std::vector<double> all;
    for (const auto& e : mu) all.push_back(e.lambda);
    for (const auto& e : nu) all.push_back(e.lambda);
    int bad = 0;
    for (double s : edges)
        if (nearest(all, s) > tol.edge_match_tol * std::max(1.0, std::abs(s))) ++bad;
    log.report(bad == 0, "band-edges-are-boundary-eigenvalues",
               bad ? std::to_string(bad) + " uncertified edge(s)" : "");
    const bool s1_ok = edges.empty() ||
                       std::abs(edges.front() - nu.front().lambda) <= tol.edge_match_tol;
    log.report(s1_ok, "first-edge-equals-first-neumann-eigenvalue");

    const auto gs = gaps(p, L, tol);
    int gap_bad = 0;
    for (const auto& g : gs) {
        // edges above the cutoff are outside the discriminant scan; a gap the
        // cutoff lands inside still reports its true upper edge
        if (g.index > 0 && nearest(edges, g.lower) > 1e-6) ++gap_bad;
        if (g.upper <= L && nearest(edges, g.upper) > 1e-6) ++gap_bad;
        const bool dn = g.polarity == GapPolarity::DN;
        if (dn != (g.lower_kind != EdgeKind::Neumann)) ++gap_bad;
    }
    log.report(gap_bad == 0, "gap-edges-match-discriminant-crossings",
               gap_bad ? std::to_string(gap_bad) + " mismatch(es)" : "");
}

void verify_monotonicity(const PeriodicPotential& p, double L, const Tolerances& tol,
                         VerifyLog& log) {
    const auto gs = gaps(p, L, tol);
    int violations = 0;
    for (const auto& g : gs) {
        for (const Side side : {Side::Right, Side::Left}) {
            const auto prof = ratio_profile(p, g, 0.0, side, tol);
            const double dir = side == Side::Right ? 1.0 : -1.0;
            for (std::size_t i = 0; i + 1 < prof.lambda.size(); ++i) {
                if (prof.pole_flag[i] || prof.pole_flag[i + 1]) continue;
                if (prof.pole && *prof.pole > prof.lambda[i] &&
                    *prof.pole < prof.lambda[i + 1])
                    continue;
                if (dir * (prof.value[i + 1] - prof.value[i]) <= -1e-9) ++violations;
            }
        }
    }
    log.report(violations == 0, "ratio-monotone-across-gaps",
               violations ? std::to_string(violations) + " violation(s)" : "");

    if (!is_even_descriptor(p)) {
        log.report(true, "ratio-reflection-at-even-origin", "skipped: potential not even");
        return;
    }
    int refl_bad = 0;
    for (const auto& g : gs) {
        const double lo = g.index == 0 ? g.upper - 1.0 : g.lower;
        const double w = g.upper - lo;
        for (int k = 1; k <= 7; ++k) {
            const double lam = lo + w * static_cast<double>(k) / 8.0;
            RatioValue rp, rm;
            try {
                rp = ratio(p, lam, Side::Right, tol);
                rm = ratio(p, lam, Side::Left, tol);
            } catch (const std::runtime_error&) {
                continue;  // inside the delta-margin dead zone of a narrow gap
            }
            if (rp.is_pole || rm.is_pole) continue;
            if (std::abs(rp.value + rm.value) >
                1e-7 * std::max(1.0, std::abs(rp.value)))
                ++refl_bad;
        }
    }
    log.report(refl_bad == 0, "ratio-reflection-at-even-origin",
               refl_bad ? std::to_string(refl_bad) + " violation(s)" : "");
}

// cross-checks one finite lambda window against the FD oracle: every solver
// eigenvalue deep inside the window must be reproduced within 1e-4 and the
// oracle must not find extra localized modes there.  kappa_min is the
// weakest decay rate among the expected modes (infinity when none): the
// localization filter needs outer-region mass below tol.localized_mass, so
// the truncated domain must span several 1/kappa decay lengths.
void cross_check_window(const InterfaceProblem& prob, double lo, double hi,
                        const std::vector<double>& solver_lambdas, double kappa_min,
                        const Tolerances& tol, unsigned seed, int& disagreements) {
    const double d = prob.base().period();
    double half_width = tol.fd_periods * d;
    if (std::isfinite(kappa_min) && kappa_min > 0.0) {
        const double needed = 1.3 * std::log(1.0 / tol.localized_mass) / (0.8 * kappa_min);
        if (needed > half_width)
            half_width = d * std::ceil(needed / d);
    }
    if (half_width > 4000.0) return;  // mode too weakly localized to certify
    const double h = prob.base().period() / tol.fd_steps_per_period;
    const auto res = oracle_window(prob, lo, hi, half_width, h, tol, seed);
    for (double lam : solver_lambdas) {
        if (lam < lo + 2e-3 || lam > hi - 2e-3) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& m : res.kept) best = std::min(best, std::abs(m.lambda - lam));
        if (best > 1e-4) ++disagreements;
    }
    for (const auto& m : res.kept) {
        if (m.lambda < lo + 3e-3 || m.lambda > hi - 3e-3) continue;
        if (nearest(solver_lambdas, m.lambda) > 1e-4) ++disagreements;
    }
}

void verify_additive(const PeriodicPotential& p, double L, const Tolerances& tol,
                     int workers, unsigned seed, VerifyLog& log) {
    const auto gs = gaps(p, L, tol);
    std::vector<const SpectralGap*> finite;
    for (const auto& g : gs)
        if (g.index > 0) finite.push_back(&g);
    if (finite.empty()) {
        log.report(true, "additive-interface-vs-theory", "skipped: no finite gaps");
        log.report(true, "additive-interface-vs-oracle", "skipped: no finite gaps");
        return;
    }
    const double w = finite.front()->width();
    const std::vector<double> alphas = {0.4 * w, 1.5 * w, 4.0 * w};
    const auto rows = additive_scan(p, alphas, L, tol, workers);
    int theory_bad = 0, oracle_bad = 0;
    for (const auto& row : rows) {
        const auto prob = InterfaceProblem::additive(p, row.alpha);
        for (std::size_t i = 0; i < row.pairs.size(); ++i) {
            const auto& pair = row.pairs[i];
            if (pair.expects_eigenvalue != row.results[i].has_value()) ++theory_bad;
            if (!std::isfinite(pair.overlap_lo)) continue;
            if (pair.overlap_hi - pair.overlap_lo < 5e-3) continue;  // hairline overlap
            std::vector<double> found;
            double kappa_min = std::numeric_limits<double>::infinity();
            if (row.results[i]) {
                found.push_back(row.results[i]->lambda);
                kappa_min = std::min(row.results[i]->kappa_left,
                                     row.results[i]->kappa_right);
            }
            cross_check_window(prob, pair.overlap_lo, pair.overlap_hi, found, kappa_min,
                               tol, seed, oracle_bad);
        }
    }
    log.report(theory_bad == 0, "additive-interface-vs-theory",
               theory_bad ? std::to_string(theory_bad) + " pair(s) disagree" : "");
    log.report(oracle_bad == 0, "additive-interface-vs-oracle",
               oracle_bad ? std::to_string(oracle_bad) + " disagreement(s)" : "");
}

void verify_dislocation(const PeriodicPotential& p, double L, const Tolerances& tol,
                        int workers, VerifyLog& log,
                        std::optional<InterfaceEigenvalue>& odd_mode_out,
                        double& odd_mode_t) {
    if (!is_even_descriptor(p)) {
        log.report(true, "dislocation-counts-vs-theory", "skipped: potential not even");
        log.report(true, "dislocation-parity-of-eigenfunctions", "skipped");
        return;
    }
    const double d = p.period();
    const std::vector<double> ts = {0.15 * d, 0.37 * d, 0.55 * d, 0.83 * d};
    int count_bad = 0, parity_bad = 0, checked = 0;
    for (const InterfaceKind kind :
         {InterfaceKind::DislocationSymmetric, InterfaceKind::DislocationOneSided}) {
        const auto rows = dislocation_scan(p, kind, ts, L, tol, workers);
        for (const auto& row : rows) {
            if (row.prediction) {
                const auto& pr = *row.prediction;
                // skip t within 0.02 d of a table cell boundary: count jumps
                const std::vector<double> bounds = {0.0, d / 2, d, pr.d0, d - pr.d0};
                double dist = std::numeric_limits<double>::infinity();
                for (double b : bounds)
                    if (b >= 0.0) dist = std::min(dist, std::abs(row.t - b));
                if (dist > 0.02 * d) {
                    ++checked;
                    if (static_cast<int>(row.modes.size()) != pr.count) ++count_bad;
                    if (pr.parity_applicable) {
                        int even = 0, odd = 0;
                        for (const auto& m : row.modes) {
                            even += m.parity == ModeParity::Even;
                            odd += m.parity == ModeParity::Odd;
                        }
                        if (even != pr.even_modes || odd != pr.odd_modes) ++count_bad;
                    }
                }
            }
            for (const auto& m : row.modes) {
                if (kind == InterfaceKind::DislocationSymmetric) {
                    // assembled sample grid is symmetric about the interface
                    double defect = 0.0, peak = 0.0;
                    const std::size_t n = m.psi.size();
                    const double sgn = m.parity == ModeParity::Odd ? -1.0 : 1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        peak = std::max(peak, std::abs(m.psi[i]));
                        defect = std::max(defect,
                                          std::abs(m.psi[i] - sgn * m.psi[n - 1 - i]));
                    }
                    if (defect > 1e-4 * peak) ++parity_bad;
                    if (m.parity == ModeParity::Odd && !odd_mode_out) {
                        odd_mode_out = m;
                        odd_mode_t = row.t;
                    }
                }
            }
        }
    }
    if (checked == 0) {
        log.report(true, "dislocation-counts-vs-theory",
                   "skipped: no monotone half-period classification");
    } else {
        log.report(count_bad == 0, "dislocation-counts-vs-theory",
                   count_bad ? std::to_string(count_bad) + " cell(s) disagree" : "");
    }
    log.report(parity_bad == 0, "dislocation-parity-of-eigenfunctions",
               parity_bad ? std::to_string(parity_bad) + " defect(s)" : "");
}

void verify_h_refinement(const PeriodicPotential& p, const Tolerances& tol,
                         unsigned seed, const std::optional<InterfaceEigenvalue>& mode,
                         double t, VerifyLog& log) {
    if (!mode) {
        log.report(true, "oracle-h-refinement-order", "skipped: no odd localized mode");
        return;
    }
    const auto prob = InterfaceProblem::dislocation_symmetric(p, t);
    const double d = p.period();
    const double lo = mode->lambda - 0.02, hi = mode->lambda + 0.02;
    double lam[3];
    for (int k = 0; k < 3; ++k) {
        const double h = d / (100.0 * (1 << k));
        const auto op = assemble(prob, 15.0 * d, h);
        const auto eigs = eigenvalues_in_window(op, lo, hi, tol, seed);
        double best = std::numeric_limits<double>::infinity(), val = 0.0;
        for (const auto& e : eigs)
            if (std::abs(e.lambda - mode->lambda) < best) {
                best = std::abs(e.lambda - mode->lambda);
                val = e.lambda;
            }
        if (!std::isfinite(best)) {
            log.report(false, "oracle-h-refinement-order", "mode lost under refinement");
            return;
        }
        lam[k] = val;
    }
    const double fitted = std::log2(std::abs((lam[0] - lam[1]) / (lam[1] - lam[2])));
    log.report(fitted >= 3.5, "oracle-h-refinement-order",
               "fitted order " + io::format_value(fitted));
}

int run_verify(const Common& c, const Tolerances& tol) {
    const auto p = io::potential_from_json_file(c.potentials.at(0));
    VerifyLog log;
    verify_edges(p, c.lambda_max, tol, log);
    verify_monotonicity(p, c.lambda_max, tol, log);
    verify_additive(p, c.lambda_max, tol, c.workers, c.seed, log);
    std::optional<InterfaceEigenvalue> odd_mode;
    double odd_t = 0.0;
    verify_dislocation(p, c.lambda_max, tol, c.workers, log, odd_mode, odd_t);
    verify_h_refinement(p, tol, c.seed, odd_mode, odd_t, log);
    const std::string tail =
        (log.failures ? "verify: FAIL (" + std::to_string(log.failures) + ")"
                      : "verify: all checks passed") +
        "\n";
    log.buf << tail;
    std::cout << tail;
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
        if (!f) throw std::invalid_argument("output path not writable: " + c.out);
        f << log.buf.str();
    }
    return log.failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "band/gap structure of 1-D periodic Schrödinger operators and localized "
        "modes of glued interface operators"};
    app.require_subcommand(1);
    Common c;

    auto* sub_bands = app.add_subcommand("bands", "band edges below lambda-max");
    add_common(sub_bands, c, 1);

    auto* sub_gaps = app.add_subcommand("gaps", "open spectral gaps with polarities");
    add_common(sub_gaps, c, 1);

    auto* sub_beigs = app.add_subcommand(
        "boundary-eigs", "periodic-cell Dirichlet and Neumann eigenvalues");
    add_common(sub_beigs, c, 1);
    int count = 6, efn_index = 1;
    std::string efn, efn_kind = "dirichlet";
    sub_beigs->add_option("--count", count, "eigenvalues per family")
        ->capture_default_str()
        ->check(CLI::Range(1, 64));
    sub_beigs->add_option("--efn", efn, "write one eigenfunction CSV (x,psi) here");
    sub_beigs->add_option("--efn-kind", efn_kind, "dirichlet|neumann")
        ->check(CLI::IsMember({"dirichlet", "neumann"}));
    sub_beigs->add_option("--efn-index", efn_index, "1-based index within the family");

    auto* sub_ratio = app.add_subcommand(
        "ratio-profile", "decaying-solution ratio sampled across one gap");
    add_common(sub_ratio, c, 1);
    int gap_index = 1;
    double rp_t = 0.0;
    std::string side = "+";
    sub_ratio->add_option("--gap", gap_index, "gap index (0 = semi-infinite)")
        ->capture_default_str();
    sub_ratio->add_option("--t", rp_t, "origin shift of the potential")
        ->capture_default_str();
    sub_ratio->add_option("--side", side, "+ (decays right) or - (decays left)")
        ->check(CLI::IsMember({"+", "-"}));

    auto* sub_iface = app.add_subcommand(
        "interface", "localized eigenvalues of one glued operator");
    add_common(sub_iface, c, 2);
    double alpha = 0.0, disl_t = 0.0;
    std::string mode = "symmetric", iface_efn;
    auto* alpha_opt = sub_iface->add_option("--alpha", alpha, "additive shift of the right half");
    auto* t_opt = sub_iface->add_option("--t", disl_t, "dislocation parameter");
    sub_iface->add_option("--mode", mode, "symmetric|one-sided")
        ->check(CLI::IsMember({"symmetric", "one-sided"}))
        ->capture_default_str();
    sub_iface->add_option("--efn", iface_efn,
                          "eigenfunction CSV path; mode k goes to <stem>.k<ext>");

    auto* sub_ascan = app.add_subcommand("additive-scan",
                                         "interface eigenvalues over an alpha grid");
    add_common(sub_ascan, c, 1);
    std::string ascan_grid;
    sub_ascan->add_option("--grid", ascan_grid, "alpha grid lo:hi:step")->required();

    auto* sub_dscan = app.add_subcommand("dislocation-scan",
                                         "dislocation eigenvalues over a t grid");
    add_common(sub_dscan, c, 1);
    std::string dscan_grid, dscan_mode = "symmetric";
    sub_dscan->add_option("--grid", dscan_grid, "t grid lo:hi:step")->required();
    sub_dscan->add_option("--mode", dscan_mode, "symmetric|one-sided")
        ->check(CLI::IsMember({"symmetric", "one-sided"}))
        ->capture_default_str();

    auto* sub_oracle = app.add_subcommand(
        "oracle", "finite-difference eigenvalues in a lambda window");
    add_common(sub_oracle, c, 2);
    double o_alpha = 0.0, o_t = 0.0;
    std::string o_mode = "symmetric", o_window;
    auto* o_alpha_opt = sub_oracle->add_option("--alpha", o_alpha, "additive shift");
    auto* o_t_opt = sub_oracle->add_option("--t", o_t, "dislocation parameter");
    sub_oracle->add_option("--mode", o_mode, "symmetric|one-sided")
        ->check(CLI::IsMember({"symmetric", "one-sided"}))
        ->capture_default_str();
    sub_oracle->add_option("--grid", o_window, "lambda window lo:hi:h")->required();

    auto* sub_verify = app.add_subcommand(
        "verify", "cross-method suite: solver vs oracle vs classification theory");
    add_common(sub_verify, c, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << gapmodes::io::diagnostic_json("config", e.what()) << "\n";
        return 2;
    }

    try {
        const Tolerances tol = make_tolerances(c);
        if (*sub_bands) return run_bands(c, tol);
        if (*sub_gaps) return run_gaps(c, tol);
        if (*sub_beigs) return run_boundary_eigs(c, tol, count, efn, efn_kind, efn_index);
        if (*sub_ratio) return run_ratio_profile(c, tol, gap_index, rp_t, side);
        if (*sub_iface)
            return run_interface(c, tol,
                                 select_problem(c, alpha_opt, alpha, t_opt, disl_t, mode),
                                 iface_efn);
        if (*sub_ascan) return run_additive_scan(c, tol, ascan_grid);
        if (*sub_dscan) return run_dislocation_scan(c, tol, dscan_grid, dscan_mode);
        if (*sub_oracle)
            return run_oracle(c, tol,
                              select_problem(c, o_alpha_opt, o_alpha, o_t_opt, o_t, o_mode),
                              o_window);
        if (*sub_verify) return run_verify(c, tol);
        std::cerr << gapmodes::io::diagnostic_json("config", "no command selected") << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << gapmodes::io::diagnostic_json("config", e.what()) << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << gapmodes::io::diagnostic_json("numerical", e.what()) << "\n";
        return 3;
    }
}
