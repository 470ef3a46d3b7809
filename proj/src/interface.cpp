#include "gapmodes/interface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gapmodes/floquet.hpp"

namespace gapmodes {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Even about the origin: every active cosine mode must be shifted by a half
// multiple of its own period.
bool potential_is_even(const PeriodicPotential& p) {
    const auto& a = p.coeffs();
    const double d = p.period();
    const double s = p.shift();
    const double pi = std::acos(-1.0);
    for (std::size_t j = 1; j < a.size(); ++j) {
        if (a[j] == 0.0) continue;
        const double phase = std::sin(2.0 * pi * static_cast<double>(j) * s / d);
        if (std::abs(phase) > 1e-9) return false;
    }
    return true;
}

void require_even(const PeriodicPotential& p, const char* who) {
    if (!potential_is_even(p)) {
        throw std::invalid_argument(std::string(who) +
                                    ": potential must be even about the origin");
    }
}

double reduce_mod_period(double t, double d) {
    double r = std::fmod(t, d);
    if (r < 0.0) r += d;
    if (r == d) r = 0.0;
    return r;
}

// Uniform samples of the solution with initial state y0 at x0, marching to
// x1 (either direction) in n equal sub-steps.  Returns states at the n+1
// grid points including both endpoints.
std::vector<StateVector> sample_states(const PeriodicPotential& p, double lambda,
                                       double x0, double x1, int n,
                                       const StateVector& y0, double tol) {
    std::vector<StateVector> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(y0);
    StateVector y = y0;
    for (int j = 1; j <= n; ++j) {
        const double a = x0 + (x1 - x0) * (static_cast<double>(j - 1) / n);
        const double b = x0 + (x1 - x0) * (static_cast<double>(j) / n);
        y = integrate_state(p, lambda, a, b, y, tol);
        out.push_back(y);
    }
    return out;
}

struct SideBlock {
    std::vector<StateVector> block;  // one period, left to right, n_per+1 states
    double multiplier = 0.0;         // block-to-block scale factor
    double kappa = 0.0;
    StateVector v0{};                // unit Cauchy data at the interface
    double period = 0.0;
};

// One stably-integrated period of the decaying Floquet solution.
//
// Right side: the decaying direction shrinks like e^(-kappa x), so forward
// integration from the eigenvector would let the complementary growing
// direction overtake the solution within a single deep-gap period.  We
// integrate backwards from x = period (state rho * v), which amplifies the
// direction we want and suppresses the other.  Block m on
// [m*period, (m+1)*period] is the stored block scaled by rho^m.
//
// Left side: mirrored.  The solution decays leftwards, so forward
// integration from x = -period (state v / rho_big) is the stable direction.
// Block m on [-(m+1)*period, -m*period] is the stored block scaled by
// rho_big^(-m).
SideBlock decaying_block(const PeriodicPotential& p, double lambda, Side side,
                         const Tolerances& tol) {
    const DecayingState ds = decaying_state(p, lambda, side, tol);
    const double d = p.period();
    const int n = tol.efn_samples_per_period;
    SideBlock sb;
    sb.kappa = ds.kappa;
    sb.v0 = ds.value;
    sb.period = d;
    if (side == Side::Right) {
        sb.multiplier = ds.multiplier;  // |rho| < 1
        StateVector end{ds.multiplier * ds.value[0], ds.multiplier * ds.value[1]};
        auto rev = sample_states(p, lambda, d, 0.0, n, end, tol.ode_tol);
        sb.block.assign(rev.rbegin(), rev.rend());
    } else {
        sb.multiplier = 1.0 / ds.multiplier;  // |1/rho_big| < 1, leftward decay
        StateVector start{sb.multiplier * ds.value[0], sb.multiplier * ds.value[1]};
        sb.block = sample_states(p, lambda, -d, 0.0, n, start, tol.ode_tol);
    }
    return sb;
}

// Assembled eigenfunction samples plus the matching residual at the
// interface.  The residual is the sine of the angle between the two sides'
// unit Cauchy vectors after the best scalar alignment.
void assemble_mode(const PeriodicPotential& left_p,
                   const PeriodicPotential& right_p, double lambda,
                   const Tolerances& tol, InterfaceEigenvalue* mode) {
    const SideBlock lb = decaying_block(left_p, lambda, Side::Left, tol);
    const SideBlock rb = decaying_block(right_p, lambda, Side::Right, tol);
    mode->kappa_left = lb.kappa;
    mode->kappa_right = rb.kappa;

    const double c = lb.v0[0] * rb.v0[0] + lb.v0[1] * rb.v0[1];
    const double rx = rb.v0[0] - c * lb.v0[0];
    const double ry = rb.v0[1] - c * lb.v0[1];
    mode->residual = std::hypot(rx, ry);

    const int n = tol.efn_samples_per_period;
    const int per = tol.efn_periods;
    const std::size_t total = static_cast<std::size_t>(2 * per * n) + 1;
    mode->x.clear();
    mode->psi.clear();
    mode->dpsi.clear();
    mode->x.reserve(total);
    mode->psi.reserve(total);
    mode->dpsi.reserve(total);

    // Left half: blocks from the far left up to (but excluding) x = 0.
    double scale = c;
    for (int m = 0; m < per - 1; ++m) scale *= lb.multiplier;
    for (int m = per - 1; m >= 0; --m) {
        const double x_left = -(m + 1) * lb.period;
        const int j_end = (m == 0) ? n - 1 : n - 1;  // skip the shared right endpoint
        for (int j = 0; j <= j_end; ++j) {
            mode->x.push_back(x_left + lb.period * (static_cast<double>(j) / n));
            mode->psi.push_back(scale * lb.block[static_cast<std::size_t>(j)][0]);
            mode->dpsi.push_back(scale * lb.block[static_cast<std::size_t>(j)][1]);
        }
        scale /= lb.multiplier;
    }
    // Right half: x = 0 onward, last block keeps its right endpoint.
    scale = 1.0;
    for (int m = 0; m < per; ++m) {
        const double x_left = m * rb.period;
        const int j_end = (m == per - 1) ? n : n - 1;
        for (int j = 0; j <= j_end; ++j) {
            mode->x.push_back(x_left + rb.period * (static_cast<double>(j) / n));
            mode->psi.push_back(scale * rb.block[static_cast<std::size_t>(j)][0]);
            mode->dpsi.push_back(scale * rb.block[static_cast<std::size_t>(j)][1]);
        }
        scale *= rb.multiplier;
    }

    double peak = 0.0;
    for (double v : mode->psi) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0) throw std::runtime_error("assembled eigenfunction vanishes");
    double lead = mode->psi[static_cast<std::size_t>(per) * n];  // value at x = 0
    if (std::abs(lead) <= 1e-9 * peak) {
        lead = mode->dpsi[static_cast<std::size_t>(per) * n];
    }
    const double flip = (lead < 0.0) ? -1.0 : 1.0;
    for (double& v : mode->psi) v *= flip / peak;
    for (double& v : mode->dpsi) v *= flip / peak;
}

struct Overlap {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_is_edge = true;  // false when both gaps are semi-infinite
};

Overlap gap_overlap(const SpectralGap& gl, const SpectralGap& gr) {
    Overlap o;
    o.lo = std::max(gl.lower, gr.lower);
    o.hi = std::min(gl.upper, gr.upper);
    o.lo_is_edge = std::isfinite(o.lo);
    return o;
}

double margin_at(double v, const Tolerances& tol) {
    return tol.edge_margin * std::max(1.0, std::abs(v));
}

}  // namespace

InterfaceProblem::InterfaceProblem(InterfaceKind k, PeriodicPotential base,
                                   PeriodicPotential second, double parameter)
    : kind_(k),
      base_(std::move(base)),
      second_(std::move(second)),
      parameter_(parameter) {}

InterfaceProblem InterfaceProblem::two_potential(const PeriodicPotential& left,
                                                 const PeriodicPotential& right) {
    require_even(left, "two_potential");
    require_even(right, "two_potential");
    return InterfaceProblem(InterfaceKind::TwoPotential, left, right, 0.0);
}

InterfaceProblem InterfaceProblem::additive(const PeriodicPotential& base,
                                            double alpha) {
    require_even(base, "additive");
    if (!std::isfinite(alpha)) {
        throw std::invalid_argument("additive: alpha must be finite");
    }
    return InterfaceProblem(InterfaceKind::Additive, base,
                            base.plus_constant(alpha), alpha);
}

InterfaceProblem InterfaceProblem::dislocation_symmetric(
    const PeriodicPotential& base, double t) {
    require_even(base, "dislocation_symmetric");
    if (!std::isfinite(t)) {
        throw std::invalid_argument("dislocation_symmetric: t must be finite");
    }
    const double tr = reduce_mod_period(t, base.period());
    return InterfaceProblem(InterfaceKind::DislocationSymmetric, base,
                            base.shifted(tr), tr);
}

InterfaceProblem InterfaceProblem::dislocation_one_sided(
    const PeriodicPotential& base, double t) {
    require_even(base, "dislocation_one_sided");
    if (!std::isfinite(t)) {
        throw std::invalid_argument("dislocation_one_sided: t must be finite");
    }
    const double tr = reduce_mod_period(t, base.period());
    return InterfaceProblem(InterfaceKind::DislocationOneSided, base,
                            base.shifted(tr), tr);
}

PeriodicPotential InterfaceProblem::left() const {
    switch (kind_) {
        case InterfaceKind::TwoPotential:
            return base_;
        case InterfaceKind::Additive:
            return base_;
        case InterfaceKind::DislocationSymmetric:
            return base_.shifted(-parameter_);
        case InterfaceKind::DislocationOneSided:
            return base_;
    }
    throw std::logic_error("unreachable");
}

PeriodicPotential InterfaceProblem::right() const {
    switch (kind_) {
        case InterfaceKind::TwoPotential:
        case InterfaceKind::Additive:
        case InterfaceKind::DislocationSymmetric:
        case InterfaceKind::DislocationOneSided:
            return second_;
    }
    throw std::logic_error("unreachable");
}

double InterfaceProblem::operator()(double x) const {
    return (x < 0.0) ? left()(x) : right()(x);
}

std::optional<InterfaceEigenvalue> solve_two_potential(
    const InterfaceProblem& prob, const SpectralGap& left_gap,
    const SpectralGap& right_gap, const Tolerances& tol) {
    tol.validate();
    const PeriodicPotential lp = prob.left();
    const PeriodicPotential rp = prob.right();

    Overlap o = gap_overlap(left_gap, right_gap);
    if (!o.lo_is_edge) {
        o.lo = std::min(semi_infinite_cutoff(lp), semi_infinite_cutoff(rp));
    }
    if (!(o.hi > o.lo)) {
        throw std::invalid_argument("solve_two_potential: gap overlap is empty");
    }
    double a = o.lo + (o.lo_is_edge ? margin_at(o.lo, tol) : 0.0);
    double b = o.hi - margin_at(o.hi, tol);
    if (!(a < b)) return std::nullopt;  // thinner than the resolvable margin

    auto mismatch = [&](double lambda) {
        const RatioValue r = ratio(rp, lambda, Side::Right, tol);
        const RatioValue l = ratio(lp, lambda, Side::Left, tol);
        if (r.is_pole || l.is_pole) {
            throw std::runtime_error(
                "solve_two_potential: unexpected ratio pole for even potential");
        }
        return r.value - l.value;
    };

    // Near the edge of a narrow gap the discriminant excess can fall below
    // the delta margin; pull the endpoint inward until it is evaluable.  A
    // root inside the abandoned sliver is within a few dead-zone widths of
    // the essential spectrum and counts as absorbed.
    const double width = b - a;
    auto evaluable = [&](double lambda, double* out) {
        try {
            *out = mismatch(lambda);
            return true;
        } catch (const std::runtime_error&) {
            return false;
        }
    };
    double fa = 0.0, fb = 0.0;
    double inset = 0.0;
    while (!evaluable(a + inset, &fa)) {
        inset = inset == 0.0 ? margin_at(a, tol) : 4.0 * inset;
        if (inset > width / 4) return std::nullopt;
    }
    a += inset;
    inset = 0.0;
    while (!evaluable(b - inset, &fb)) {
        inset = inset == 0.0 ? margin_at(b, tol) : 4.0 * inset;
        if (inset > width / 4) return std::nullopt;
    }
    b -= inset;
    if (!(fa < 0.0) || !(fb > 0.0)) return std::nullopt;  // increasing, no root

    while (b - a > tol.bisect_width * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = mismatch(m);
        if (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // Secant polish inside the final bracket.
    double lambda = 0.5 * (a + b);
    for (int it = 0; it < 3 && fb != fa; ++it) {
        const double s = b - fb * (b - a) / (fb - fa);
        if (!(s > a) || !(s < b)) break;
        const double fs = mismatch(s);
        lambda = s;
        if (fs < 0.0) {
            a = s;
            fa = fs;
        } else {
            b = s;
            fb = fs;
        }
    }

    InterfaceEigenvalue mode;
    mode.lambda = lambda;
    mode.left_gap_index = left_gap.index;
    mode.right_gap_index = right_gap.index;
    mode.parity = ModeParity::None;
    assemble_mode(lp, rp, lambda, tol, &mode);
    return mode;
}

namespace {

// Bisection for a root of an increasing scalar function on (a, b) with
// f(a) < 0 < f(b) already established.
double bisect_increasing(const std::function<double(double)>& f, double a,
                         double b, const Tolerances& tol) {
    while (b - a > tol.bisect_width * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (f(m) < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

bool absorbed_by_edges(double lambda, const SpectralGap& gap,
                       const Tolerances& tol) {
    if (std::isfinite(gap.lower) && lambda - gap.lower < margin_at(gap.lower, tol)) {
        return true;
    }
    if (std::isfinite(gap.upper) && gap.upper - lambda < margin_at(gap.upper, tol)) {
        return true;
    }
    return false;
}

}  // namespace

std::vector<InterfaceEigenvalue> solve_dislocation(const InterfaceProblem& prob,
                                                   const SpectralGap& gap,
                                                   const Tolerances& tol) {
    tol.validate();
    const bool symmetric = prob.kind() == InterfaceKind::DislocationSymmetric;
    if (!symmetric && prob.kind() != InterfaceKind::DislocationOneSided) {
        throw std::invalid_argument(
            "solve_dislocation: problem is not a dislocation");
    }
    const PeriodicPotential& p = prob.base();
    const double t = prob.parameter();
    const PeriodicPotential lp = prob.left();
    const PeriodicPotential rp = prob.right();

    const RatioProfile prof = ratio_profile(p, gap, t, Side::Right, tol);
    const std::size_t n = prof.lambda.size();

    // Matching function: symmetric dislocations localize where the
    // right-side ratio hits zero (even mode) or blows up (odd mode);
    // one-sided dislocations where it crosses the unshifted left ratio.
    auto fval = [&](double lambda) {
        const RatioValue r = ratio_shifted(p, t, lambda, Side::Right, tol);
        double v = r.value;
        if (!symmetric) {
            const RatioValue l = ratio(p, lambda, Side::Left, tol);
            if (l.is_pole) {
                throw std::runtime_error(
                    "solve_dislocation: unexpected left-ratio pole");
            }
            v -= l.value;
        }
        return v;
    };

    std::vector<double> grid_f(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid_f[i] = prof.value[i];
        if (!symmetric) {
            const RatioValue l = ratio(p, prof.lambda[i], Side::Left, tol);
            if (l.is_pole) {
                throw std::runtime_error(
                    "solve_dislocation: unexpected left-ratio pole");
            }
            grid_f[i] -= l.value;
        }
    }

    // Locate the grid interval containing the refined pole, if any.
    std::ptrdiff_t pole_cell = -1;
    if (prof.pole) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (prof.lambda[i] <= *prof.pole && *prof.pole <= prof.lambda[i + 1]) {
                pole_cell = static_cast<std::ptrdiff_t>(i);
                break;
            }
        }
    }

    std::function<double(double)> f = fval;
    std::vector<InterfaceEigenvalue> modes;
    auto add_root = [&](double a, double b) {
        const double lambda = bisect_increasing(f, a, b, tol);
        if (absorbed_by_edges(lambda, gap, tol)) return;
        InterfaceEigenvalue mode;
        mode.lambda = lambda;
        mode.left_gap_index = gap.index;
        mode.right_gap_index = gap.index;
        mode.parity = symmetric ? ModeParity::Even : ModeParity::None;
        assemble_mode(lp, rp, lambda, tol, &mode);
        modes.push_back(std::move(mode));
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (static_cast<std::ptrdiff_t>(i) == pole_cell) continue;
        if (prof.pole_flag[i] || prof.pole_flag[i + 1]) continue;
        if (grid_f[i] < 0.0 && grid_f[i + 1] > 0.0) {
            add_root(prof.lambda[i], prof.lambda[i + 1]);
        } else if (grid_f[i] == 0.0 && !absorbed_by_edges(prof.lambda[i], gap, tol)) {
            InterfaceEigenvalue mode;
            mode.lambda = prof.lambda[i];
            mode.left_gap_index = gap.index;
            mode.right_gap_index = gap.index;
            mode.parity = symmetric ? ModeParity::Even : ModeParity::None;
            assemble_mode(lp, rp, mode.lambda, tol, &mode);
            modes.push_back(std::move(mode));
        }
    }

    if (prof.pole && pole_cell >= 0) {
        const double lp_lambda = *prof.pole;
        const double delta =
            std::max(16.0 * tol.bisect_width * std::max(1.0, std::abs(lp_lambda)),
                     1e-11);
        const double la = prof.lambda[static_cast<std::size_t>(pole_cell)];
        const double lb = prof.lambda[static_cast<std::size_t>(pole_cell) + 1];
        // The function rises to +infinity left of the pole and returns from
        // -infinity right of it; a zero may hide on either side.
        if (lp_lambda - delta > la) {
            const double fl = f(lp_lambda - delta);
            if (grid_f[static_cast<std::size_t>(pole_cell)] < 0.0 && fl > 0.0) {
                add_root(la, lp_lambda - delta);
            }
        }
        if (lp_lambda + delta < lb) {
            const double fr = f(lp_lambda + delta);
            if (fr < 0.0 && grid_f[static_cast<std::size_t>(pole_cell) + 1] > 0.0) {
                add_root(lp_lambda + delta, lb);
            }
        }
        if (symmetric && !absorbed_by_edges(lp_lambda, gap, tol)) {
            InterfaceEigenvalue mode;
            mode.lambda = lp_lambda;
            mode.left_gap_index = gap.index;
            mode.right_gap_index = gap.index;
            mode.parity = ModeParity::Odd;
            assemble_mode(lp, rp, lp_lambda, tol, &mode);
            modes.push_back(std::move(mode));
        }
    }

    std::sort(modes.begin(), modes.end(),
              [](const InterfaceEigenvalue& x, const InterfaceEigenvalue& y) {
                  return x.lambda < y.lambda;
              });
    return modes;
}

std::vector<GapPairPrediction> predict_two_potential(
    const std::vector<SpectralGap>& left_gaps,
    const std::vector<SpectralGap>& right_gaps, const Tolerances& tol) {
    tol.validate();
    std::vector<GapPairPrediction> out;
    for (const SpectralGap& gl : left_gaps) {
        for (const SpectralGap& gr : right_gaps) {
            const Overlap o = gap_overlap(gl, gr);
            if (!(o.hi > o.lo)) continue;
            GapPairPrediction p;
            p.left_index = gl.index;
            p.right_index = gr.index;
            p.overlap_lo = o.lo_is_edge ? o.lo : -kInf;
            p.overlap_hi = o.hi;
            p.left_polarity = gl.polarity;
            p.right_polarity = gr.polarity;
            p.expects_eigenvalue = gl.polarity != gr.polarity;
            out.push_back(p);
        }
    }
    return out;
}

DislocationPrediction predict_dislocation_count(const PeriodicPotential& base,
                                                int gap_index, double t,
                                                InterfaceKind kind,
                                                const Tolerances& tol) {
    tol.validate();
    const bool symmetric = kind == InterfaceKind::DislocationSymmetric;
    if (!symmetric && kind != InterfaceKind::DislocationOneSided) {
        throw std::invalid_argument(
            "predict_dislocation_count: kind must be a dislocation");
    }
    if (gap_index != 0 && gap_index != 1) {
        throw std::invalid_argument(
            "predict_dislocation_count: classification covers gaps 0 and 1 only");
    }
    const MonotonicityReport mono =
        monotonicity_on_half_period(base, tol.monotonicity_grid);
    if (!mono.increasing && !mono.decreasing) {
        throw std::invalid_argument(
            "predict_dislocation_count: potential must be strictly monotone on "
            "its half period");
    }
    const bool increasing = mono.increasing;
    const double d = base.period();
    const double half = 0.5 * d;
    const double tr = reduce_mod_period(t, d);

    DislocationPrediction pred;
    pred.parity_applicable = symmetric;

    auto set_counts = [&](int zeros, int poles) {
        pred.count = zeros + poles;
        if (symmetric) {
            pred.even_modes = zeros;
            pred.odd_modes = poles;
        } else {
            pred.even_modes = 0;
            pred.odd_modes = 0;
        }
    };

    if (gap_index == 0) {
        // Semi-infinite gap: one even mode on exactly one half of the shift
        // range, on opposite halves for increasing vs decreasing potentials.
        const bool present =
            increasing ? (tr > half && tr < d) : (tr > 0.0 && tr < half);
        set_counts(present ? 1 : 0, 0);
        return pred;
    }

    if (increasing) {
        // Branch on the shape of the first Dirichlet eigenfunction.
        const auto dmodes = dirichlet_eigenvalues(base, 1, tol);
        const MonotonicityReport em = eigenfunction_monotonicity(dmodes.at(0));
        if (em.increasing || em.decreasing) {
            if (!symmetric) {
                set_counts(tr > 0.0 ? 1 : 0, 0);
                return pred;
            }
            if (tr == 0.0 || tr == half) {
                set_counts(0, 0);
            } else if (tr < half) {
                set_counts(1, 0);
            } else {
                set_counts(0, 1);
            }
            return pred;
        }
        if (!em.extremum_location) {
            throw std::runtime_error(
                "predict_dislocation_count: unclassifiable Dirichlet mode");
        }
        const double d0 = *em.extremum_location;
        pred.d0 = d0;
        if (!symmetric) {
            set_counts(tr > 0.0 ? 1 : 0, 0);
            return pred;
        }
        if (tr == 0.0) {
            set_counts(0, 0);
        } else if (tr < d0) {
            set_counts(1, 0);
        } else if (tr <= half) {
            set_counts(0, 0);
        } else if (tr < d - d0) {
            set_counts(1, 1);
        } else {
            set_counts(0, 1);
        }
        return pred;
    }

    // Decreasing potential: branch on the second Neumann eigenfunction.
    const auto nmodes = neumann_eigenvalues(base, 2, tol);
    const MonotonicityReport em = eigenfunction_monotonicity(nmodes.at(1));
    if (em.increasing || em.decreasing) {
        if (!symmetric) {
            set_counts(tr > 0.0 ? 1 : 0, 0);
            return pred;
        }
        if (tr == 0.0 || tr == half) {
            set_counts(0, 0);
        } else if (tr < half) {
            set_counts(0, 1);
        } else {
            set_counts(1, 0);
        }
        return pred;
    }
    if (!em.extremum_location) {
        throw std::runtime_error(
            "predict_dislocation_count: unclassifiable Neumann mode");
    }
    const double d0 = *em.extremum_location;
    pred.d0 = d0;
    if (!symmetric) {
        if (tr == 0.0) {
            set_counts(0, 0);
        } else if (tr < d0) {
            set_counts(2, 0);
        } else if (tr < d - d0) {
            set_counts(1, 0);
        } else {
            set_counts(0, 0);
        }
        return pred;
    }
    if (tr == 0.0 || tr == half) {
        set_counts(0, 0);
    } else if (tr < d0) {
        set_counts(1, 1);
    } else if (tr < half) {
        set_counts(0, 1);
    } else if (tr < d - d0) {
        set_counts(1, 0);
    } else {
        set_counts(0, 0);
    }
    return pred;
}

namespace {

template <class Fn>
void parallel_for(int n, int workers, Fn fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<AdditiveScanRow> additive_scan(const PeriodicPotential& base,
                                           const std::vector<double>& alphas,
                                           double lambda_max,
                                           const Tolerances& tol, int workers) {
    tol.validate();
    require_even(base, "additive_scan");
    const std::vector<SpectralGap> left_gaps = gaps(base, lambda_max, tol);

    std::vector<AdditiveScanRow> rows(alphas.size());
    parallel_for(static_cast<int>(alphas.size()), workers, [&](int i) {
        const double alpha = alphas[static_cast<std::size_t>(i)];
        AdditiveScanRow& row = rows[static_cast<std::size_t>(i)];
        row.alpha = alpha;
        // The right operator is the same potential raised by alpha, so its
        // gaps are the translated records of the unshifted list.
        std::vector<SpectralGap> right_gaps = left_gaps;
        for (SpectralGap& g : right_gaps) {
            g.lower += alpha;
            g.upper += alpha;
        }
        row.pairs = predict_two_potential(left_gaps, right_gaps, tol);
        const InterfaceProblem prob = InterfaceProblem::additive(base, alpha);
        row.results.reserve(row.pairs.size());
        for (const GapPairPrediction& pair : row.pairs) {
            const SpectralGap& gl =
                left_gaps[static_cast<std::size_t>(pair.left_index)];
            const SpectralGap& gr =
                right_gaps[static_cast<std::size_t>(pair.right_index)];
            row.results.push_back(solve_two_potential(prob, gl, gr, tol));
        }
    });
    return rows;
}

std::vector<DislocationScanRow> dislocation_scan(const PeriodicPotential& base,
                                                 InterfaceKind kind,
                                                 const std::vector<double>& ts,
                                                 double lambda_max,
                                                 const Tolerances& tol,
                                                 int workers) {
    tol.validate();
    if (kind != InterfaceKind::DislocationSymmetric &&
        kind != InterfaceKind::DislocationOneSided) {
        throw std::invalid_argument("dislocation_scan: kind must be a dislocation");
    }
    require_even(base, "dislocation_scan");
    const std::vector<SpectralGap> gap_list = gaps(base, lambda_max, tol);

    std::vector<DislocationScanRow> rows(ts.size() * gap_list.size());
    const int n_tasks = static_cast<int>(rows.size());
    parallel_for(n_tasks, workers, [&](int task) {
        const std::size_t ti = static_cast<std::size_t>(task) / gap_list.size();
        const std::size_t gi = static_cast<std::size_t>(task) % gap_list.size();
        DislocationScanRow& row = rows[static_cast<std::size_t>(task)];
        row.t = ts[ti];
        row.gap_index = gap_list[gi].index;
        const InterfaceProblem prob =
            (kind == InterfaceKind::DislocationSymmetric)
                ? InterfaceProblem::dislocation_symmetric(base, ts[ti])
                : InterfaceProblem::dislocation_one_sided(base, ts[ti]);
        if (row.gap_index <= 1) {
            try {
                row.prediction =
                    predict_dislocation_count(base, row.gap_index, ts[ti], kind, tol);
            } catch (const std::invalid_argument&) {
                row.prediction = std::nullopt;  // non-monotone base: no table
            }
        }
        row.modes = solve_dislocation(prob, gap_list[gi], tol);
    });
    return rows;
}

}  // namespace gapmodes
