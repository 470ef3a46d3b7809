#pragma once

#include <optional>
#include <vector>

#include "gapmodes/spectrum.hpp"

namespace gapmodes {

// which half line the Floquet solution decays on
enum class Side { Left, Right };

// Decaying Floquet solution at energy lambda inside an open gap, represented
// by its Cauchy data at x = 0 of the given potential (unit 2-norm).
struct DecayingState {
    StateVector value;  // (psi(0), psi'(0)), |value| = 1
    double kappa;       // decay rate per unit length, > 0
    double multiplier;  // Floquet multiplier of this solution over one period
};

// Throws std::runtime_error when lambda is not strictly inside a gap
// (| |trace| - 2 | <= delta_margin) and std::invalid_argument on bad input.
DecayingState decaying_state(const PeriodicPotential& p, double lambda,
                             Side side, const Tolerances& tol = {});

// logarithmic derivative psi'/psi at x = 0 of the decaying solution
struct RatioValue {
    double value = 0.0;
    bool is_pole = false;  // psi(0) numerically vanishes; value is meaningless
};

RatioValue ratio(const PeriodicPotential& p, double lambda, Side side,
                 const Tolerances& tol = {});

// Ratio of the solution decaying on `side` for the potential shifted by t,
// evaluated at the shifted origin.  Computed from the monodromy based at t
// directly: propagating a decaying state across n periods would amplify the
// complementary growing direction by e^{2 kappa n d} and is never done here.
RatioValue ratio_shifted(const PeriodicPotential& p, double t, double lambda,
                         Side side, const Tolerances& tol = {});

// lower end for scans over the semi-infinite gap: below this the ratio
// functions are dominated by -side * sqrt(-lambda) and carry no roots/poles
double semi_infinite_cutoff(const PeriodicPotential& p);

// Samples of lambda -> ratio_shifted(p, t, lambda, side) across the interior
// of a gap, with the (at most one) pole located and refined.  The pole is
// detected as a violation of the strict lambda-monotonicity of the ratio
// between consecutive samples, then narrowed by a bisection that keeps the
// monotone reference values on both flanks.
struct RatioProfile {
    std::vector<double> lambda;
    std::vector<double> value;
    std::vector<bool> pole_flag;
    std::optional<double> pole;
    double scan_lo = 0.0;  // actual endpoints used (gap inset / cutoff)
    double scan_hi = 0.0;
};

RatioProfile ratio_profile(const PeriodicPotential& p, const SpectralGap& gap,
                           double t, Side side, const Tolerances& tol = {});

}  // namespace gapmodes
