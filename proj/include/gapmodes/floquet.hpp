#pragma once

#include <array>
#include <functional>

#include "gapmodes/potential.hpp"
#include "gapmodes/tolerances.hpp"

namespace gapmodes {

// state (psi, psi') of -psi'' + V psi = lambda psi
using StateVector = std::array<double, 2>;

struct TransferMatrix {
    // columns are the propagated canonical initial states:
    // [psi_c psi_s; psi_c' psi_s'] with psi_c(x0)=1,psi_c'(x0)=0 and
    // psi_s(x0)=0, psi_s'(x0)=1
    double m11, m12, m21, m22;

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
    StateVector apply(const StateVector& v) const {
        return {m11 * v[0] + m12 * v[1], m21 * v[0] + m22 * v[1]};
    }
};

// Prüfer phase-plane coordinates psi = rho sin(theta), psi' = rho cos(theta);
// rho is carried as a logarithm so deep-gap growth cannot overflow.
struct PruferState {
    double theta;
    double log_rho;
    StateVector to_state() const;
    static PruferState from_state(const StateVector& v);
};

// Propagates (psi, psi') from x0 to x1 (either direction).  Local error is
// controlled per unit length at tol; throws std::runtime_error on step-size
// underflow.  Optional dense output callback receives (x, state) at every
// accepted step boundary.
StateVector integrate_state(const PeriodicPotential& V, double lambda,
                            double x0, double x1, StateVector y0, double tol,
                            const std::function<void(double, const StateVector&)>* observer = nullptr);

// Same flow in Prüfer variables: theta' = 1 + (lambda - V - 1) sin^2 theta,
// (log rho)' = -(lambda - V - 1) sin theta cos theta.  theta is continuous
// (no 2 pi reduction), which makes it a winding-number counter.
PruferState integrate_prufer(const PeriodicPotential& V, double lambda,
                             double x0, double x1, PruferState s0, double tol);

// Transfer matrix over [x0, x0 + length]
TransferMatrix transfer(const PeriodicPotential& V, double lambda, double x0,
                        double length, double tol);

// Monodromy over one period starting at base_point
TransferMatrix monodromy(const PeriodicPotential& V, double lambda,
                         double base_point, double tol);

// Floquet discriminant tr M(lambda) / 1  (the classical Delta)
double discriminant(const PeriodicPotential& V, double lambda, double tol);

}  // namespace gapmodes
