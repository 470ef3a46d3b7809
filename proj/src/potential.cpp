#include "gapmodes/potential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gapmodes {

PeriodicPotential::PeriodicPotential(double period,
                                     std::vector<double> cosine_coeffs,
                                     double shift)
    : d_(period), a_(std::move(cosine_coeffs)), shift_(shift) {
    if (!(d_ > 0) || !std::isfinite(d_))
        throw std::invalid_argument("potential: period must be positive and finite");
    if (a_.empty())
        throw std::invalid_argument("potential: need at least the constant coefficient");
    for (double c : a_)
        if (!std::isfinite(c))
            throw std::invalid_argument("potential: coefficients must be finite");
    if (!std::isfinite(shift_))
        throw std::invalid_argument("potential: shift must be finite");
}

double PeriodicPotential::operator()(double x) const {
    const double w = 2.0 * M_PI / d_;
    const double y = x + shift_;
    double v = a_[0];
    for (std::size_t j = 1; j < a_.size(); ++j)
        v += a_[j] * std::cos(w * static_cast<double>(j) * y);
    return v;
}

double PeriodicPotential::derivative(double x) const { return derivative(x, 1); }

double PeriodicPotential::derivative(double x, int m) const {
    if (m < 0) throw std::invalid_argument("potential: derivative order must be >= 0");
    if (m == 0) return (*this)(x);
    const double w = 2.0 * M_PI / d_;
    const double y = x + shift_;
    double v = 0.0;
    for (std::size_t j = 1; j < a_.size(); ++j) {
        const double wj = w * static_cast<double>(j);
        // d^m/dx^m cos(wj y) = wj^m cos(wj y + m pi/2)
        v += a_[j] * std::pow(wj, m) * std::cos(wj * y + 0.5 * M_PI * m);
    }
    return v;
}

double PeriodicPotential::sup_bound() const {
    double s = std::abs(a_[0]);
    for (std::size_t j = 1; j < a_.size(); ++j) s += std::abs(a_[j]);
    return s;
}

double PeriodicPotential::min_bound() const {
    double s = a_[0];
    for (std::size_t j = 1; j < a_.size(); ++j) s -= std::abs(a_[j]);
    return s;
}

PeriodicPotential PeriodicPotential::shifted(double s) const {
    return PeriodicPotential(d_, a_, shift_ + s);
}

PeriodicPotential PeriodicPotential::plus_constant(double c) const {
    std::vector<double> b = a_;
    b[0] += c;
    return PeriodicPotential(d_, b, shift_);
}

MonotonicityReport monotonicity_on_half_period(const PeriodicPotential& p,
                                               int grid) {
    if (p.shift() != 0.0)
        throw std::invalid_argument(
            "monotonicity_on_half_period: requires an unshifted potential");
    if (grid < 16) throw std::invalid_argument("monotonicity: grid too small");

    const double d = p.period();
    const double w = 2.0 * M_PI / d;
    // derivative scale: threshold below which V' counts as zero
    double dscale = 0.0;
    for (std::size_t j = 1; j < p.coeffs().size(); ++j)
        dscale += std::abs(p.coeffs()[j]) * w * static_cast<double>(j);
    const double eps = 1e-12 * std::max(1.0, dscale);

    MonotonicityReport r;
    int prev_sign = 0;
    int transitions = 0;
    double first_change_lo = 0.0, first_change_hi = 0.0;
    bool any_nonzero = false;
    for (int i = 1; i <= grid; ++i) {
        const double x = 0.5 * d * static_cast<double>(i) / (grid + 1);
        const double dv = p.derivative(x);
        int s = (dv > eps) ? 1 : (dv < -eps ? -1 : 0);
        if (s == 0) continue;
        any_nonzero = true;
        if (prev_sign != 0 && s != prev_sign) {
            ++transitions;
            if (transitions == 1) {
                first_change_lo = 0.5 * d * static_cast<double>(i - 1) / (grid + 1);
                first_change_hi = x;
            }
        }
        if (prev_sign == 0) prev_sign = s;
        else if (s != prev_sign) prev_sign = s;
    }

    if (!any_nonzero) {
        r.degenerate = true;
        return r;
    }

    // redo a single pass to recover the sign of the first nonzero sample
    int first_sign = 0;
    for (int i = 1; i <= grid && first_sign == 0; ++i) {
        const double x = 0.5 * d * static_cast<double>(i) / (grid + 1);
        const double dv = p.derivative(x);
        first_sign = (dv > eps) ? 1 : (dv < -eps ? -1 : 0);
    }

    if (transitions == 0) {
        r.increasing = (first_sign > 0);
        r.decreasing = (first_sign < 0);
        return r;
    }

    // refine the first derivative sign change by bisection on the exact V'
    double lo = first_change_lo, hi = first_change_hi;
    double flo = p.derivative(lo);
    // the bracketing sample may itself be a zero sample; widen if needed
    if (std::abs(flo) <= eps) {
        lo = std::max(0.0, lo - 0.5 * d / (grid + 1));
        flo = p.derivative(lo);
    }
    for (int it = 0; it < 80 && hi - lo > 1e-13 * d; ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = p.derivative(m);
        if ((fm > 0) == (flo > 0)) { lo = m; flo = fm; }
        else hi = m;
    }
    r.extremum_location = 0.5 * (lo + hi);
    return r;
}

}  // namespace gapmodes
