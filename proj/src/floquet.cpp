#include "gapmodes/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapmodes {

StateVector PruferState::to_state() const {
    const double r = std::exp(log_rho);
    return {r * std::sin(theta), r * std::cos(theta)};
}

PruferState PruferState::from_state(const StateVector& v) {
    PruferState s;
    s.theta = std::atan2(v[0], v[1]);
    s.log_rho = 0.5 * std::log(v[0] * v[0] + v[1] * v[1]);
    return s;
}

namespace {

// Dormand-Prince 5(4) pair, FSAL.  Error is controlled per unit length:
// a step of size h is accepted when the weighted local error estimate is
// below tol * |h|.
template <typename F, std::size_t N>
std::array<double, N> dopri5(F&& f, double x0, double x1,
                             std::array<double, N> y, double tol,
                             const std::function<void(double, const std::array<double, N>&)>* observer) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double span = x1 - x0;
    if (span == 0.0) return y;
    const double dir = (span > 0) ? 1.0 : -1.0;
    const double L = std::abs(span);

    double x = x0;
    double h = dir * std::min(L, std::max(L / 200.0, 1e-6));
    std::array<double, N> k1 = f(x, y);
    if (observer) (*observer)(x, y);

    long steps = 0;
    const long max_steps = 20000000;
    while (dir * (x1 - x) > 0) {
        if (++steps > max_steps)
            throw std::runtime_error("ode: step count exceeded");
        if (dir * (x + h - x1) > 0) h = x1 - x;
        if (std::abs(h) < 16.0 * 2.220446049250313e-16 * std::max(std::abs(x), 1.0))
            throw std::runtime_error("ode: step size underflow");

        std::array<double, N> t, k2, k3, k4, k5, k6, k7, y5;
        for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * a21 * k1[i];
        k2 = f(x + c2 * h, t);
        for (std::size_t i = 0; i < N; ++i)
            t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(x + c3 * h, t);
        for (std::size_t i = 0; i < N; ++i)
            t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(x + c4 * h, t);
        for (std::size_t i = 0; i < N; ++i)
            t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(x + c5 * h, t);
        for (std::size_t i = 0; i < N; ++i)
            t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                               a64 * k4[i] + a65 * k5[i]);
        k6 = f(x + h, t);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        k7 = f(x + h, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = 1.0 + std::max(std::abs(y[i]), std::abs(y5[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);

        const double budget = tol * std::abs(h);
        if (err <= budget) {
            x += h;
            y = y5;
            k1 = k7;  // FSAL
            if (observer) (*observer)(x, y);
        }
        // EPUS: err ~ C h^5 while the acceptance threshold scales with h,
        // so the optimal-step exponent is 1/4
        double factor = (err > 0.0)
                            ? 0.9 * std::pow(budget / err, 0.25)
                            : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        h *= factor;
    }
    return y;
}

}  // namespace

StateVector integrate_state(const PeriodicPotential& V, double lambda,
                            double x0, double x1, StateVector y0, double tol,
                            const std::function<void(double, const StateVector&)>* observer) {
    auto rhs = [&V, lambda](double x, const StateVector& y) -> StateVector {
        return {y[1], (V(x) - lambda) * y[0]};
    };
    return dopri5(rhs, x0, x1, y0, tol, observer);
}

PruferState integrate_prufer(const PeriodicPotential& V, double lambda,
                             double x0, double x1, PruferState s0, double tol) {
    using P = std::array<double, 2>;
    auto rhs = [&V, lambda](double x, const P& y) -> P {
        const double q = lambda - V(x) - 1.0;
        const double s = std::sin(y[0]);
        const double c = std::cos(y[0]);
        return {1.0 + q * s * s, -q * s * c};
    };
    const std::function<void(double, const P&)>* no_obs = nullptr;
    P y = dopri5(rhs, x0, x1, P{s0.theta, s0.log_rho}, tol, no_obs);
    return PruferState{y[0], y[1]};
}

TransferMatrix transfer(const PeriodicPotential& V, double lambda, double x0,
                        double length, double tol) {
    const StateVector c = integrate_state(V, lambda, x0, x0 + length, {1.0, 0.0}, tol);
    const StateVector s = integrate_state(V, lambda, x0, x0 + length, {0.0, 1.0}, tol);
    return TransferMatrix{c[0], s[0], c[1], s[1]};
}

TransferMatrix monodromy(const PeriodicPotential& V, double lambda,
                         double base_point, double tol) {
    return transfer(V, lambda, base_point, V.period(), tol);
}

double discriminant(const PeriodicPotential& V, double lambda, double tol) {
    return monodromy(V, lambda, 0.0, tol).trace();
}

}  // namespace gapmodes
