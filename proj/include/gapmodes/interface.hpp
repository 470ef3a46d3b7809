#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapmodes/bloch.hpp"
#include "gapmodes/spectrum.hpp"

namespace gapmodes {

enum class InterfaceKind {
    TwoPotential,          // independent even potentials left and right
    Additive,              // right = left + constant
    DislocationSymmetric,  // left = base(x - t), right = base(x + t)
    DislocationOneSided    // left = base(x), right = base(x + t)
};

enum class ModeParity { Even, Odd, None };

// Whole-line operator glued from two periodic half-line potentials at x = 0
// (the right piece owns x = 0).
class InterfaceProblem {
public:
    static InterfaceProblem two_potential(const PeriodicPotential& left,
                                          const PeriodicPotential& right);
    static InterfaceProblem additive(const PeriodicPotential& base, double alpha);
    // dislocation parameter is reduced into [0, period)
    static InterfaceProblem dislocation_symmetric(const PeriodicPotential& base,
                                                  double t);
    static InterfaceProblem dislocation_one_sided(const PeriodicPotential& base,
                                                  double t);

    InterfaceKind kind() const { return kind_; }
    double parameter() const { return parameter_; }
    const PeriodicPotential& base() const { return base_; }
    PeriodicPotential left() const;
    PeriodicPotential right() const;
    double operator()(double x) const;  // the glued potential

private:
    InterfaceProblem(InterfaceKind k, PeriodicPotential base,
                     PeriodicPotential second, double parameter);
    InterfaceKind kind_;
    PeriodicPotential base_;    // left potential for TwoPotential
    PeriodicPotential second_;  // right potential for TwoPotential, else unused
    double parameter_;
};

// Localized eigenvalue of an interface operator with its assembled
// eigenfunction on [-X_left, X_right], X_side = efn_periods * period(side).
// The eigenfunction is built block by block from the Floquet multiplier and
// a single stably-integrated period per side, so deep-gap tails are exact to
// integrator accuracy instead of being overrun by the complementary
// exponential direction.
struct InterfaceEigenvalue {
    double lambda = 0.0;
    int left_gap_index = -1;
    int right_gap_index = -1;
    ModeParity parity = ModeParity::None;
    double residual = 0.0;  // directional mismatch of the two Cauchy vectors
    double kappa_left = 0.0;
    double kappa_right = 0.0;
    std::vector<double> x, psi, dpsi;
};

// Matching-condition root in the overlap of one gap of the left operator
// with one gap of the right operator.  The mismatch R_right - R_left is
// strictly increasing across the overlap (both potentials must be even, so
// neither ratio has a pole there); at most one root exists.  Roots closer
// than tol.edge_margin to the overlap boundary count as absorbed into the
// essential spectrum and yield nullopt.
std::optional<InterfaceEigenvalue> solve_two_potential(
    const InterfaceProblem& prob, const SpectralGap& left_gap,
    const SpectralGap& right_gap, const Tolerances& tol = {});

// All localized eigenvalues of a dislocation problem inside one gap of the
// base spectrum.  Symmetric dislocations: eigenvalues are the zeros (even
// modes) and the pole (odd mode) of the shifted-origin ratio; one-sided:
// roots of R_+(t; .) - R_-(0; .) on each continuity segment.
std::vector<InterfaceEigenvalue> solve_dislocation(const InterfaceProblem& prob,
                                                   const SpectralGap& gap,
                                                   const Tolerances& tol = {});

// Overlap bookkeeping for gap pairs of two glued operators.
struct GapPairPrediction {
    int left_index = 0;
    int right_index = 0;
    double overlap_lo = 0.0;  // -infinity when both gaps are semi-infinite
    double overlap_hi = 0.0;
    GapPolarity left_polarity = GapPolarity::DN;
    GapPolarity right_polarity = GapPolarity::DN;
    bool expects_eigenvalue = false;  // polarities differ
};

// All pairs with a nonempty open overlap, in (left, right) index order.
std::vector<GapPairPrediction> predict_two_potential(
    const std::vector<SpectralGap>& left_gaps,
    const std::vector<SpectralGap>& right_gaps, const Tolerances& tol = {});

// Eigenvalue counts predicted by the classification theory for dislocations
// in the semi-infinite gap (index 0) and the first open gap (index 1).
// Requires the base potential to be strictly monotone on its half period.
// For symmetric dislocations the split into even modes (ratio zeros) and odd
// modes (ratio poles) is also predicted.
struct DislocationPrediction {
    int count = 0;
    int even_modes = 0;
    int odd_modes = 0;
    bool parity_applicable = false;
    double d0 = -1.0;  // interior extremum used by the table, when relevant
};

DislocationPrediction predict_dislocation_count(const PeriodicPotential& base,
                                                int gap_index, double t,
                                                InterfaceKind kind,
                                                const Tolerances& tol = {});

// One scan row per interface-shift value alpha: predictions and solver
// results for every overlapping gap pair whose unshifted gaps lie below
// lambda_max.  results[i] corresponds to pairs[i].
struct AdditiveScanRow {
    double alpha = 0.0;
    std::vector<GapPairPrediction> pairs;
    std::vector<std::optional<InterfaceEigenvalue>> results;
};

std::vector<AdditiveScanRow> additive_scan(const PeriodicPotential& base,
                                           const std::vector<double>& alphas,
                                           double lambda_max,
                                           const Tolerances& tol = {},
                                           int workers = 1);

// One row per (t, gap): theory prediction (when the base is monotone and the
// gap index is covered by the tables) and the computed modes.
struct DislocationScanRow {
    double t = 0.0;
    int gap_index = 0;
    std::optional<DislocationPrediction> prediction;
    std::vector<InterfaceEigenvalue> modes;
};

std::vector<DislocationScanRow> dislocation_scan(const PeriodicPotential& base,
                                                 InterfaceKind kind,
                                                 const std::vector<double>& ts,
                                                 double lambda_max,
                                                 const Tolerances& tol = {},
                                                 int workers = 1);

}  // namespace gapmodes
