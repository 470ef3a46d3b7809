#pragma once

#include <optional>
#include <vector>

namespace gapmodes {

// Real even periodic potential given by a finite cosine series
//   V(x) = a0 + sum_{j>=1} a_j cos(2 pi j (x + shift) / d).
// With shift = 0 the potential is even about x = 0 and about x = d/2.
class PeriodicPotential {
public:
    PeriodicPotential(double period, std::vector<double> cosine_coeffs,
                      double shift = 0.0);

    double period() const { return d_; }
    double shift() const { return shift_; }
    const std::vector<double>& coeffs() const { return a_; }

    double operator()(double x) const;
    double derivative(double x) const;

    // m-th derivative (exact, from the series); m >= 0
    double derivative(double x, int m) const;

    // sup |V| <= |a0| + sum |a_j| and a lower bound for min V
    double sup_bound() const;
    double min_bound() const;

    PeriodicPotential shifted(double s) const;        // x -> x + s
    PeriodicPotential plus_constant(double c) const;  // V + c

private:
    double d_;
    std::vector<double> a_;
    double shift_;
};

// Sign structure of a function on [0, d/2].
struct MonotonicityReport {
    bool increasing = false;
    bool decreasing = false;
    // location of the interior sign change of the derivative, when the
    // function is not monotone on the half period
    std::optional<double> extremum_location;
    // derivative numerically zero on the whole half period
    bool degenerate = false;
};

// Classifies V on [0, d/2] from its exact derivative on a uniform grid.
// Requires shift == 0 (the symmetry the classification relies on only holds
// for the unshifted series).
MonotonicityReport monotonicity_on_half_period(const PeriodicPotential& p,
                                               int grid = 2048);

}  // namespace gapmodes
