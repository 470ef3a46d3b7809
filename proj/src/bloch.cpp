#include "gapmodes/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapmodes {

DecayingState decaying_state(const PeriodicPotential& p, double lambda,
                             Side side, const Tolerances& tol) {
    tol.validate();
    if (!std::isfinite(lambda))
        throw std::invalid_argument("decaying_state: lambda must be finite");
    const TransferMatrix M = monodromy(p, lambda, 0.0, tol.ode_tol);
    const double tr = M.trace();
    if (!(std::abs(tr) - 2.0 > tol.delta_margin))
        throw std::runtime_error(
            "decaying_state: lambda is not strictly inside a spectral gap");

    const double s = tr > 0 ? 1.0 : -1.0;
    const double root = std::sqrt(std::abs(tr) - 2.0) * std::sqrt(std::abs(tr) + 2.0);
    // |rho_small| < 1 < |rho_big|; the subtraction-free forms stay accurate
    // deep in a gap where |tr| is huge
    const double rho_small = s * 2.0 / (std::abs(tr) + root);
    const double rho_big = s * (std::abs(tr) + root) / 2.0;
    const double rho = (side == Side::Right) ? rho_small : rho_big;

    // eigenvector of M for rho: both algebraic forms are exact; pick the one
    // with the larger norm to avoid cancellation
    const StateVector v1{M.m12, rho - M.m11};
    const StateVector v2{rho - M.m22, M.m21};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    StateVector v = (n1 >= n2) ? v1 : v2;
    const double n = std::max(n1, n2);
    if (!(n > 0) || !std::isfinite(n))
        throw std::runtime_error("decaying_state: eigenvector extraction failed");
    v[0] /= n;
    v[1] /= n;
    // deterministic sign: psi(0) > 0, falling back to psi'(0) > 0 at a pole
    // of the ratio where psi(0) ~ 0
    const double lead = (std::abs(v[0]) > tol.pole_threshold) ? v[0] : v[1];
    if (lead < 0) {
        v[0] = -v[0];
        v[1] = -v[1];
    }

    DecayingState out;
    out.value = v;
    out.multiplier = rho;
    out.kappa = std::abs(std::log(std::abs(rho_small))) / p.period();
    return out;
}

RatioValue ratio(const PeriodicPotential& p, double lambda, Side side,
                 const Tolerances& tol) {
    const DecayingState s = decaying_state(p, lambda, side, tol);
    RatioValue r;
    r.is_pole = std::abs(s.value[0]) <= tol.pole_threshold;
    r.value = s.value[1] / s.value[0];
    return r;
}

RatioValue ratio_shifted(const PeriodicPotential& p, double t, double lambda,
                         Side side, const Tolerances& tol) {
    return ratio(p.shifted(t), lambda, side, tol);
}

double semi_infinite_cutoff(const PeriodicPotential& p) {
    return p.min_bound() - std::max(25.0, 10.0 * p.sup_bound());
}

RatioProfile ratio_profile(const PeriodicPotential& p, const SpectralGap& gap,
                           double t, Side side, const Tolerances& tol) {
    tol.validate();
    // Narrow gaps clear the delta margin only away from their edges: the
    // discriminant excess |tr M| - 2 vanishes linearly at each edge with a
    // slope proportional to the gap width, so a fixed inset can land in the
    // dead zone.  Widen geometrically until the endpoint is usable.
    const auto usable = [&](double lam) {
        try {
            (void)ratio_shifted(p, t, lam, side, tol);
            return true;
        } catch (const std::runtime_error&) {
            return false;
        }
    };
    const double span = gap.index == 0 ? 1.0 : gap.width();
    double hi_inset = std::max(tol.edge_margin, span * 1e-6);
    while (!usable(gap.upper - hi_inset) && hi_inset < span / 4) hi_inset *= 4;
    double lo, hi = gap.upper - hi_inset;
    if (gap.index == 0) {
        lo = semi_infinite_cutoff(p);
    } else {
        double lo_inset = std::max(tol.edge_margin, span * 1e-6);
        while (!usable(gap.lower + lo_inset) && lo_inset < span / 4) lo_inset *= 4;
        lo = gap.lower + lo_inset;
    }
    if (!(lo < hi))
        throw std::invalid_argument("ratio_profile: gap interior is empty");

    RatioProfile out;
    out.scan_lo = lo;
    out.scan_hi = hi;
    const int n = tol.ratio_samples;
    out.lambda.resize(n);
    out.value.resize(n);
    out.pole_flag.resize(n);
    const double sgn = (side == Side::Right) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
        const double lam = lo + (hi - lo) * i / (n - 1);
        const RatioValue r = ratio_shifted(p, t, lam, side, tol);
        out.lambda[i] = lam;
        out.value[i] = r.value;
        out.pole_flag[i] = r.is_pole;
    }

    // monotonicity violations of sgn * R mark the pole interval
    std::vector<int> breaks;
    for (int i = 0; i + 1 < n; ++i)
        if (sgn * out.value[i] > sgn * out.value[i + 1]) breaks.push_back(i);
    if (breaks.empty()) return out;
    int blo = breaks.front(), bhi = breaks.back() + 1;
    if (static_cast<int>(breaks.size()) > 2 || bhi - blo > 2)
        throw std::runtime_error(
            "ratio_profile: multiple monotonicity breaks in one gap");

    double a = out.lambda[blo], b = out.lambda[bhi];
    double ra = sgn * out.value[blo], rb = sgn * out.value[bhi];
    const double width_floor = tol.bisect_width * std::max(1.0, std::abs(b));
    while (b - a > width_floor) {
        const double m = 0.5 * (a + b);
        const double rm = sgn * ratio_shifted(p, t, m, side, tol).value;
        // left of the pole sgn*R exceeds its value at a; right of it, R has
        // restarted from -inf and sits below
        if (rm >= ra) {
            a = m;
            ra = rm;
        } else {
            b = m;
            rb = rm;
        }
    }
    (void)rb;
    out.pole = 0.5 * (a + b);
    return out;
}

}  // namespace gapmodes
