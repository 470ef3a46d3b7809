#include "gapmodes/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gapmodes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Prüfer angle at d for the shooting problem; theta(0) = 0 (Dirichlet) or
// pi/2 (Neumann).  Strictly increasing in lambda.
double shooting_angle(const PeriodicPotential& p, double lambda,
                      BoundaryCondition bc, double tol) {
    PruferState s0{bc == BoundaryCondition::Dirichlet ? 0.0 : 0.5 * M_PI, 0.0};
    return integrate_prufer(p, lambda, 0.0, p.period(), s0, tol).theta;
}

// boundary mismatch used for Newton polish: psi(d) for Dirichlet,
// psi'(d) for Neumann
double shooting_mismatch(const PeriodicPotential& p, double lambda,
                         BoundaryCondition bc, double tol) {
    const StateVector y0 = (bc == BoundaryCondition::Dirichlet)
                               ? StateVector{0.0, 1.0}
                               : StateVector{1.0, 0.0};
    const StateVector y = integrate_state(p, lambda, 0.0, p.period(), y0, tol);
    return bc == BoundaryCondition::Dirichlet ? y[0] : y[1];
}

double eigenvalue_by_index(const PeriodicPotential& p, BoundaryCondition bc,
                           int k, const Tolerances& tol) {
    const double d = p.period();
    const double target = (bc == BoundaryCondition::Dirichlet)
                              ? k * M_PI
                              : 0.5 * M_PI + (k - 1) * M_PI;

    double lo = p.min_bound() - 2.0;
    // Sturm comparison with the constant potential sup V gives this upper
    // bound for the k-th angle target
    double hi = std::pow(k * M_PI / d, 2.0) + p.sup_bound() + 2.0;
    double th_lo = shooting_angle(p, lo, bc, tol.ode_tol);
    if (th_lo >= target)
        throw std::runtime_error("boundary eigenvalue: lower bracket failed");
    double th_hi = shooting_angle(p, hi, bc, tol.ode_tol);
    int guard = 0;
    while (th_hi < target) {
        hi += std::max(1.0, hi - lo);
        th_hi = shooting_angle(p, hi, bc, tol.ode_tol);
        if (++guard > 60)
            throw std::runtime_error("boundary eigenvalue: upper bracket failed");
    }

    while (hi - lo > tol.bisect_width * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (shooting_angle(p, mid, bc, tol.ode_tol) < target) lo = mid;
        else hi = mid;
    }

    // Newton polish on the linear mismatch; stay inside a small multiple of
    // the final bracket
    double lambda = 0.5 * (lo + hi);
    const double span = std::max(hi - lo, 1e-14 * std::max(1.0, std::abs(lambda)));
    for (int it = 0; it < 3; ++it) {
        const double delta = 1e-6 * std::max(1.0, std::abs(lambda));
        const double g = shooting_mismatch(p, lambda, bc, tol.ode_tol);
        const double gp = shooting_mismatch(p, lambda + delta, bc, tol.ode_tol);
        const double gm = shooting_mismatch(p, lambda - delta, bc, tol.ode_tol);
        const double dg = (gp - gm) / (2 * delta);
        if (dg == 0.0) break;
        const double step = -g / dg;
        if (!(std::abs(step) < 100.0 * span)) break;
        lambda += step;
    }
    if (lambda < lo - 100 * span || lambda > hi + 100 * span)
        lambda = 0.5 * (lo + hi);
    return lambda;
}

BoundaryEigenpair assemble_eigenpair(const PeriodicPotential& p,
                                     BoundaryCondition bc, int k, double lambda,
                                     const Tolerances& tol) {
    BoundaryEigenpair e;
    e.condition = bc;
    e.index = k;
    e.lambda = lambda;
    e.period = p.period();

    const int n = tol.efn_samples_boundary;
    const double d = p.period();
    e.x.resize(n + 1);
    e.psi.resize(n + 1);
    e.dpsi.resize(n + 1);

    StateVector y = (bc == BoundaryCondition::Dirichlet) ? StateVector{0.0, 1.0}
                                                         : StateVector{1.0, 0.0};
    e.x[0] = 0.0;
    e.psi[0] = y[0];
    e.dpsi[0] = y[1];
    for (int i = 1; i <= n; ++i) {
        const double x0 = d * (i - 1) / n;
        const double x1 = d * i / n;
        y = integrate_state(p, lambda, x0, x1, y, tol.ode_tol);
        e.x[i] = x1;
        e.psi[i] = y[0];
        e.dpsi[i] = y[1];
    }

    double peak = 0.0;
    for (double v : e.psi) peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        throw std::runtime_error("boundary eigenfunction vanished identically");
    double sign = (bc == BoundaryCondition::Dirichlet)
                      ? (e.dpsi[0] > 0 ? 1.0 : -1.0)
                      : (e.psi[0] > 0 ? 1.0 : -1.0);
    const double scale = sign / peak;
    for (auto& v : e.psi) v *= scale;
    for (auto& v : e.dpsi) v *= scale;

    // parity about d/2: the sample count is even so index n/2 is the center
    const int mid = n / 2;
    double err_even = 0.0, err_odd = 0.0;
    for (int j = 0; j <= mid; ++j) {
        err_even = std::max(err_even, std::abs(e.psi[mid + j] - e.psi[mid - j]));
        err_odd = std::max(err_odd, std::abs(e.psi[mid + j] + e.psi[mid - j]));
    }
    if (err_even < 1e-5 && err_even <= err_odd)
        e.parity = HalfPeriodParity::Even;
    else if (err_odd < 1e-5)
        e.parity = HalfPeriodParity::Odd;
    else
        throw std::runtime_error("eigenfunction parity could not be classified");

    // periodic vs antiperiodic continuation: compare the endpoint states
    double same, flip, ref;
    if (bc == BoundaryCondition::Dirichlet) {
        same = std::abs(e.dpsi[n] - e.dpsi[0]);
        flip = std::abs(e.dpsi[n] + e.dpsi[0]);
        ref = std::abs(e.dpsi[0]);
    } else {
        same = std::abs(e.psi[n] - e.psi[0]);
        flip = std::abs(e.psi[n] + e.psi[0]);
        ref = std::abs(e.psi[0]);
    }
    if (same < 1e-5 * std::max(1.0, ref) && same <= flip)
        e.periodicity = PeriodicityType::Periodic;
    else if (flip < 1e-5 * std::max(1.0, ref))
        e.periodicity = PeriodicityType::Antiperiodic;
    else
        throw std::runtime_error("eigenfunction periodicity could not be classified");
    return e;
}

std::vector<BoundaryEigenpair> boundary_eigenvalues(const PeriodicPotential& p,
                                                    BoundaryCondition bc,
                                                    int count,
                                                    const Tolerances& tol) {
    if (count < 1)
        throw std::invalid_argument("boundary eigenvalues: count must be >= 1");
    tol.validate();
    std::vector<BoundaryEigenpair> out;
    out.reserve(count);
    for (int k = 1; k <= count; ++k) {
        const double lambda = eigenvalue_by_index(p, bc, k, tol);
        out.push_back(assemble_eigenpair(p, bc, k, lambda, tol));
    }
    return out;
}

// eigenvalues only, extending the list until both families pass lambda_max
void eigenvalue_lists(const PeriodicPotential& p, double lambda_max,
                      const Tolerances& tol, std::vector<double>& mu,
                      std::vector<double>& nu) {
    mu.clear();
    nu.clear();
    const int hard_cap = 256;
    for (int k = 1; k <= hard_cap; ++k) {
        mu.push_back(eigenvalue_by_index(p, BoundaryCondition::Dirichlet, k, tol));
        if (mu.back() > lambda_max) break;
    }
    const int need_nu = static_cast<int>(mu.size()) + 1;
    for (int k = 1; k <= std::max(need_nu, 2); ++k)
        nu.push_back(eigenvalue_by_index(p, BoundaryCondition::Neumann, k, tol));
}

}  // namespace

std::vector<BoundaryEigenpair> dirichlet_eigenvalues(const PeriodicPotential& p,
                                                     int count,
                                                     const Tolerances& tol) {
    return boundary_eigenvalues(p, BoundaryCondition::Dirichlet, count, tol);
}

std::vector<BoundaryEigenpair> neumann_eigenvalues(const PeriodicPotential& p,
                                                   int count,
                                                   const Tolerances& tol) {
    return boundary_eigenvalues(p, BoundaryCondition::Neumann, count, tol);
}

double SpectralGap::width() const {
    return (index == 0) ? kInf : upper - lower;
}

bool SpectralGap::contains(double lambda) const {
    return lambda > lower && lambda < upper;
}

std::vector<double> band_edges(const PeriodicPotential& p, double lambda_max,
                               const Tolerances& tol) {
    tol.validate();
    std::vector<double> mu, nu;
    eigenvalue_lists(p, lambda_max, tol, mu, nu);
    if (nu.empty()) throw std::runtime_error("band_edges: no eigenvalues found");

    // Scan grid: a coarse sweep at the capped step, densified in small
    // windows around every boundary eigenvalue.  Gaps can be narrower than
    // any fixed affordable step (the pairing law says both of their edge
    // crossings sit at boundary eigenvalues), so the windows guarantee the
    // crossings are bracketed while the sweep stays cheap; the roots
    // themselves come from discriminant sign changes only.
    std::vector<double> grid;
    const double start = nu.front() - 2.0 * tol.scan_step_cap;
    for (double x = start; x < lambda_max; x += tol.scan_step_cap)
        grid.push_back(x);
    grid.push_back(lambda_max);
    for (const auto* list : {&mu, &nu})
        for (double v : *list) {
            if (v > lambda_max + 1e-5) continue;
            const double w = 1e-6 * std::max(1.0, std::abs(v));
            for (int i = -8; i <= 8; ++i) grid.push_back(v + w * i / 8.0);
        }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    while (!grid.empty() && grid.back() > lambda_max) grid.pop_back();

    std::vector<double> edges;
    auto refine = [&](double lo, double hi, double offset) {
        // root of Delta(lambda) - offset by bisection
        double flo = discriminant(p, lo, tol.ode_tol) - offset;
        for (int it = 0; it < 200 && hi - lo > tol.bisect_width * std::max(1.0, std::abs(lo)); ++it) {
            const double m = 0.5 * (lo + hi);
            const double fm = discriminant(p, m, tol.ode_tol) - offset;
            if ((fm > 0) == (flo > 0)) { lo = m; flo = fm; }
            else hi = m;
        }
        edges.push_back(0.5 * (lo + hi));
    };

    std::vector<double> disc(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        disc[i] = discriminant(p, grid[i], tol.ode_tol);

    // A root can land exactly on a grid node (V constant puts the lone edge
    // at a node of the densified grid).  Such a node is an edge only when
    // the nearest nonzero-signed neighbors disagree; a tangential touch of
    // +-2 (closed gap) has equal signs on both sides and is not an edge.
    auto sweep = [&](double offset) {
        auto sgn = [&](std::size_t i) {
            const double f = disc[i] - offset;
            if (std::abs(f) <= 1e-12) return 0;
            return f > 0 ? 1 : -1;
        };
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const int a = sgn(i), b = sgn(i + 1);
            if (a * b < 0) refine(grid[i], grid[i + 1], offset);
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (sgn(i) != 0) continue;
            int left = 0, right = 0;
            for (std::size_t j = i; j-- > 0 && left == 0;) left = sgn(j);
            for (std::size_t j = i + 1; j < grid.size() && right == 0; ++j)
                right = sgn(j);
            if (left * right < 0) edges.push_back(grid[i]);
        }
    };
    sweep(2.0);
    sweep(-2.0);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double a, double b) {
                                return std::abs(a - b) <
                                       10 * tol.bisect_width * std::max(1.0, std::abs(a));
                            }),
                edges.end());
    while (!edges.empty() && edges.back() > lambda_max) edges.pop_back();
    return edges;
}

std::vector<SpectralGap> gaps(const PeriodicPotential& p, double lambda_max,
                              const Tolerances& tol,
                              std::vector<std::string>* warnings) {
    tol.validate();
    std::vector<double> mu, nu;
    eigenvalue_lists(p, lambda_max, tol, mu, nu);
    if (nu.empty()) throw std::runtime_error("gaps: no eigenvalues found");

    std::vector<SpectralGap> out;
    SpectralGap g0;
    g0.index = 0;
    g0.lower = -kInf;
    g0.upper = nu.front();
    g0.lower_kind = EdgeKind::SemiInfinite;
    g0.upper_kind = EdgeKind::Neumann;
    g0.polarity = GapPolarity::DN;
    out.push_back(g0);

    for (std::size_t n = 1; n <= mu.size(); ++n) {
        if (n + 1 > nu.size()) break;
        const double a = mu[n - 1];
        const double b = nu[n];
        const double lower = std::min(a, b);
        const double upper = std::max(a, b);
        if (lower >= lambda_max) break;
        if (upper - lower <= tol.closed_gap_width) {
            if (warnings)
                warnings->push_back("gap " + std::to_string(n) +
                                    " is closed (width " +
                                    std::to_string(upper - lower) + "); skipped");
            continue;
        }
        SpectralGap g;
        g.index = static_cast<int>(n);
        g.lower = lower;
        g.upper = upper;
        g.lower_kind = (a <= b) ? EdgeKind::Dirichlet : EdgeKind::Neumann;
        g.upper_kind = (a <= b) ? EdgeKind::Neumann : EdgeKind::Dirichlet;
        g.polarity = (g.lower_kind == EdgeKind::Dirichlet) ? GapPolarity::DN
                                                           : GapPolarity::ND;
        out.push_back(g);
    }
    return out;
}

BandWidthBound alpha_star(const PeriodicPotential& p, double lambda_max,
                          const Tolerances& tol) {
    const std::vector<double> e = band_edges(p, lambda_max, tol);
    BandWidthBound r;
    r.value = kInf;
    for (std::size_t i = 0; i + 1 < e.size(); i += 2) {
        r.value = std::min(r.value, e[i + 1] - e[i]);
        ++r.bands_used;
    }
    if (r.bands_used == 0) r.value = 0.0;
    return r;
}

MonotonicityReport eigenfunction_monotonicity(const BoundaryEigenpair& e) {
    if (e.x.size() < 64 || e.x.size() != e.psi.size() ||
        e.x.size() != e.dpsi.size())
        throw std::invalid_argument("eigenfunction_monotonicity: bad samples");
    const int n = static_cast<int>(e.x.size()) - 1;
    const int mid = n / 2;

    double dscale = 0.0;
    for (int i = 0; i <= mid; ++i) dscale = std::max(dscale, std::abs(e.dpsi[i]));
    MonotonicityReport r;
    if (dscale < 1e-10) {
        r.degenerate = true;
        return r;
    }
    const double eps = 1e-8 * dscale;

    int prev_sign = 0, first_sign = 0, transitions = 0;
    int change_at = -1;
    for (int i = 0; i <= mid; ++i) {
        const double v = e.dpsi[i];
        const int s = (v > eps) ? 1 : (v < -eps ? -1 : 0);
        if (s == 0) continue;
        if (first_sign == 0) first_sign = s;
        if (prev_sign != 0 && s != prev_sign) {
            ++transitions;
            if (transitions == 1) change_at = i;
        }
        prev_sign = s;
    }
    if (first_sign == 0) {
        r.degenerate = true;
        return r;
    }
    if (transitions == 0) {
        r.increasing = first_sign > 0;
        r.decreasing = first_sign < 0;
        return r;
    }
    if (transitions > 1)
        throw std::runtime_error(
            "eigenfunction_monotonicity: more than one interior extremum");

    // bracket the psi' zero: last sample with the old sign vs change_at
    int i1 = change_at;
    int i0 = i1 - 1;
    while (i0 > 0 && std::abs(e.dpsi[i0]) <= eps) --i0;
    const double x0 = e.x[i0], x1 = e.x[i1];
    const double g0 = e.dpsi[i0], g1 = e.dpsi[i1];
    double xz = x0 + (x1 - x0) * g0 / (g0 - g1);
    // quadratic refinement through three nearby derivative samples
    if (i0 >= 1 && i1 <= mid) {
        const double xa = e.x[i0 - 1], ga = e.dpsi[i0 - 1];
        // parabola through (xa,ga),(x0,g0),(x1,g1): Newton form
        const double d1 = (g0 - ga) / (x0 - xa);
        const double d2 = ((g1 - g0) / (x1 - x0) - d1) / (x1 - xa);
        // solve ga + d1 (x-xa) + d2 (x-xa)(x-x0) = 0 near xz by two Newton steps
        for (int it = 0; it < 2; ++it) {
            const double f = ga + d1 * (xz - xa) + d2 * (xz - xa) * (xz - x0);
            const double fp = d1 + d2 * ((xz - xa) + (xz - x0));
            if (fp != 0.0) xz -= f / fp;
        }
        if (!(xz >= xa && xz <= x1)) xz = x0 + (x1 - x0) * g0 / (g0 - g1);
    }
    r.extremum_location = xz;
    return r;
}

ComparisonCheck vbar_condition(const PeriodicPotential& p,
                               const Tolerances& tol) {
    tol.validate();
    ComparisonCheck c;
    c.threshold = 80.0 * (13.0 - 2.0 * std::sqrt(37.0));

    const MonotonicityReport m = monotonicity_on_half_period(p, tol.monotonicity_grid);
    if (!(m.increasing || m.decreasing)) return c;
    c.monotone = true;

    const double d = p.period();
    const bool inc = m.increasing;
    // the parabola matches V at its half-period maximum: x = d/2 when V
    // increases on [0, d/2], x = 0 when it decreases
    c.beta = inc ? p(0.5 * d) : p(0.0);

    const int n = tol.vbar_grid;
    const double slack = 1e-12 * std::max(1.0, p.sup_bound());
    auto admissible = [&](double alpha) {
        for (int i = 0; i <= n; ++i) {
            const double x = 0.5 * d * i / n;
            const double u = inc ? (2.0 * x / d - 1.0) : (2.0 * x / d);
            const double vbar = c.beta + (alpha - c.beta) * u * u;
            if (vbar < p(x) - slack) return false;
        }
        return true;
    };

    // the parabola value at the far end can never drop below V there, which
    // bounds alpha from below; bisect on the monotone admissibility predicate
    const double floor_v = inc ? p(0.0) : p(0.5 * d);
    double lo = floor_v - 1e-6 * std::max(1.0, std::abs(floor_v));
    double hi = c.beta;
    if (!admissible(hi))
        throw std::runtime_error("vbar_condition: constant comparison failed");
    if (admissible(lo)) {
        c.alpha = lo;
    } else {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (admissible(mid)) hi = mid;
            else lo = mid;
        }
        c.alpha = hi;
    }
    c.gamma = (c.beta - c.alpha) * d * d;
    c.satisfied = c.gamma >= c.threshold;
    return c;
}

}  // namespace gapmodes
