#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapmodes/floquet.hpp"
#include "gapmodes/potential.hpp"
#include "gapmodes/tolerances.hpp"

namespace gapmodes {

enum class BoundaryCondition { Dirichlet, Neumann };
enum class HalfPeriodParity { Even, Odd };
enum class PeriodicityType { Periodic, Antiperiodic };

// Eigenpair of -psi'' + V psi = lambda psi on [0, d] with the stated
// boundary condition at both ends.  Samples are uniform on [0, d] including
// both endpoints; psi is normalized to max |psi| = 1 with a deterministic
// sign (first nonzero of psi(0), psi'(0) positive).
struct BoundaryEigenpair {
    BoundaryCondition condition;
    int index = 0;  // 1-based within its family
    double lambda = 0.0;
    double period = 0.0;
    std::vector<double> x;
    std::vector<double> psi;
    std::vector<double> dpsi;
    HalfPeriodParity parity = HalfPeriodParity::Even;  // about d/2
    PeriodicityType periodicity = PeriodicityType::Periodic;
};

std::vector<BoundaryEigenpair> dirichlet_eigenvalues(
    const PeriodicPotential& p, int count, const Tolerances& tol = {});
std::vector<BoundaryEigenpair> neumann_eigenvalues(
    const PeriodicPotential& p, int count, const Tolerances& tol = {});

// All roots of |discriminant| = 2 detected by sign crossings up to
// lambda_max, ascending.  Tangential touches (closed gaps) do not cross and
// are not edges of open gaps, so they are not reported.
std::vector<double> band_edges(const PeriodicPotential& p, double lambda_max,
                               const Tolerances& tol = {});

enum class EdgeKind { Dirichlet, Neumann, SemiInfinite };
enum class GapPolarity { DN, ND };

// Open spectral gap (lower, upper).  index 0 is the semi-infinite gap below
// the spectrum.  polarity DN means the decaying-solution ratio R+ sweeps
// from the Dirichlet-type divergence at the lower edge to the Neumann-type
// zero at the upper edge; the semi-infinite gap counts as DN.
struct SpectralGap {
    int index = 0;
    double lower = 0.0;  // -infinity for index 0
    double upper = 0.0;
    EdgeKind lower_kind = EdgeKind::SemiInfinite;
    EdgeKind upper_kind = EdgeKind::Neumann;
    GapPolarity polarity = GapPolarity::DN;

    double width() const;  // +infinity for index 0
    bool contains(double lambda) const;
};

// Open gaps whose lower endpoint lies below lambda_max, ascending by index.
// Gap n is assembled from the boundary eigenvalues as
// (min(mu_n, nu_{n+1}), max(mu_n, nu_{n+1})); candidates narrower than
// tol.closed_gap_width are skipped and described in *warnings.
std::vector<SpectralGap> gaps(const PeriodicPotential& p, double lambda_max,
                              const Tolerances& tol = {},
                              std::vector<std::string>* warnings = nullptr);

// Smallest band width among the complete bands below lambda_max.  A
// potential with no complete band pair below lambda_max (e.g. V constant,
// where every gap above the semi-infinite one is closed) reports value 0
// with bands_used 0: there are no finite bands whose width could constrain
// anything, so any positive perturbation size exceeds the bound vacuously.
struct BandWidthBound {
    double value = 0.0;
    int bands_used = 0;
};
BandWidthBound alpha_star(const PeriodicPotential& p, double lambda_max,
                          const Tolerances& tol = {});

// Sign structure of a boundary eigenfunction on [0, d/2], from its sampled
// derivative; the interior extremum (when present) is refined by local
// interpolation of the psi' zero crossing.
MonotonicityReport eigenfunction_monotonicity(const BoundaryEigenpair& e);

// Comparison-potential criterion: V on its monotone half period must be
// dominated by a parabola that matches V at the half-period maximum and has
// normalized depth gamma = (beta - alpha) d^2 above the fixed threshold
// 80 (13 - 2 sqrt(37)).  alpha is the smallest admissible parabola value at
// the opposite end (smaller alpha = deeper parabola = larger gamma).
struct ComparisonCheck {
    bool monotone = false;
    bool satisfied = false;
    double gamma = 0.0;
    double threshold = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};
ComparisonCheck vbar_condition(const PeriodicPotential& p,
                               const Tolerances& tol = {});

}  // namespace gapmodes
