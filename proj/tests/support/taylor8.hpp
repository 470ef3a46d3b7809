#pragma once

// Test-support integrator, deliberately unrelated to the library's adaptive
// Runge-Kutta: fixed-step Taylor series of order K for -psi'' + V psi =
// lambda psi with V a finite cosine series.  The recurrence for the local
// Taylor coefficients a_k of psi at x0 is
//   (k+1)(k+2) a_{k+2} = sum_{m=0}^{k} w_m a_{k-m},
// where w_m is the m-th Taylor coefficient of V - lambda at x0, available in
// closed form from the series.  Used as an independent oracle in tests.

#include <array>
#include <cmath>

#include "gapmodes/floquet.hpp"
#include "gapmodes/potential.hpp"

namespace testsupport {

inline gapmodes::StateVector taylor_step(const gapmodes::PeriodicPotential& V,
                                         double lambda, double x0, double h,
                                         const gapmodes::StateVector& y) {
    constexpr int K = 8;
    std::array<double, K + 3> a{};  // psi^{(k)}(x0) / k!
    std::array<double, K + 1> w{};  // (V - lambda)^{(m)}(x0) / m!
    for (int m = 0; m <= K; ++m) {
        double fact = 1.0;
        for (int i = 2; i <= m; ++i) fact *= i;
        w[m] = V.derivative(x0, m) / fact;
    }
    w[0] -= lambda;
    a[0] = y[0];
    a[1] = y[1];
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (int m = 0; m <= k; ++m) s += w[m] * a[k - m];
        a[k + 2] = s / ((k + 1.0) * (k + 2.0));
    }
    double psi = 0.0, dpsi = 0.0;
    for (int k = K + 2; k >= 1; --k) psi = (psi + a[k]) * h;
    psi += a[0];
    for (int k = K + 2; k >= 2; --k) dpsi = (dpsi + k * a[k]) * h;
    dpsi += a[1];
    return {psi, dpsi};
}

inline gapmodes::StateVector taylor_integrate(
    const gapmodes::PeriodicPotential& V, double lambda, double x0, double x1,
    gapmodes::StateVector y, int steps) {
    const double h = (x1 - x0) / steps;
    double x = x0;
    for (int i = 0; i < steps; ++i) {
        y = taylor_step(V, lambda, x, h, y);
        x = x0 + (i + 1) * h;
    }
    return y;
}

inline gapmodes::TransferMatrix taylor_monodromy(
    const gapmodes::PeriodicPotential& V, double lambda, int steps) {
    auto c = taylor_integrate(V, lambda, 0.0, V.period(), {1.0, 0.0}, steps);
    auto s = taylor_integrate(V, lambda, 0.0, V.period(), {0.0, 1.0}, steps);
    return gapmodes::TransferMatrix{c[0], s[0], c[1], s[1]};
}

}  // namespace testsupport
