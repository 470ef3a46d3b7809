#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gapmodes/spectrum.hpp"

using namespace gapmodes;

namespace {
PeriodicPotential sin2() { return PeriodicPotential(10.0, {0.5, -0.5}); }
PeriodicPotential cos2() { return PeriodicPotential(10.0, {0.5, 0.5}); }
PeriodicPotential zero() { return PeriodicPotential(10.0, {0.0}); }

// reference eigenvalues computed with an independent spectral (Fourier
// Galerkin) method and an independent shooting code, cross-validated to
// twelve digits
constexpr double kSinMu[6] = {0.746767946710, 0.843394840882, 1.450478160271,
                              2.098843626064, 2.980721256390, 4.062119800728};
constexpr double kSinNu[6] = {0.283170112157, 0.290518061632, 1.056846912427,
                              1.406864979697, 2.102217942589, 2.980584383860};
constexpr double kCosMu[6] = {0.290518061632, 0.843394840882, 1.406864979697,
                              2.098843626064, 2.980584383860, 4.062119800728};
constexpr double kCosNu[6] = {0.283170112157, 0.746767946710, 1.056846912427,
                              1.450478160271, 2.102217942589, 2.980721256390};
constexpr double kSinEdges[8] = {0.283170112160, 0.290518061632,
                                 0.746767946711, 0.843394840878,
                                 1.056846912426, 1.406864979696,
                                 1.450478160270, 2.098843626065};
constexpr double kD0 = 2.1670825382;
}  // namespace

TEST_CASE("free particle boundary eigenvalues match closed forms") {
    auto p = zero();
    auto mu = dirichlet_eigenvalues(p, 4);
    auto nu = neumann_eigenvalues(p, 4);
    for (int k = 1; k <= 4; ++k) {
        CHECK(std::abs(mu[k - 1].lambda - std::pow(k * M_PI / 10.0, 2)) < 1e-8);
        CHECK(std::abs(nu[k - 1].lambda - std::pow((k - 1) * M_PI / 10.0, 2)) < 1e-8);
        CHECK(mu[k - 1].index == k);
        CHECK(nu[k - 1].index == k);
    }
}

TEST_CASE("free particle: single band edge, single gap, empty width bound") {
    auto p = zero();
    auto edges = band_edges(p, 4.0);
    REQUIRE(edges.size() == 1);
    CHECK(std::abs(edges[0]) < 1e-8);

    std::vector<std::string> warnings;
    auto gs = gaps(p, 4.0, Tolerances{}, &warnings);
    REQUIRE(gs.size() == 1);
    CHECK(gs[0].index == 0);
    CHECK(std::isinf(gs[0].lower));
    CHECK(std::abs(gs[0].upper) < 1e-8);
    CHECK(gs[0].polarity == GapPolarity::DN);
    CHECK(warnings.size() >= 3);  // the closed gaps are reported

    auto bw = alpha_star(p, 4.0);
    CHECK(bw.bands_used == 0);
    CHECK(bw.value == 0.0);
}

TEST_CASE("sin^2 and cos^2 boundary eigenvalues match the references") {
    auto mu_s = dirichlet_eigenvalues(sin2(), 6);
    auto nu_s = neumann_eigenvalues(sin2(), 6);
    auto mu_c = dirichlet_eigenvalues(cos2(), 6);
    auto nu_c = neumann_eigenvalues(cos2(), 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(mu_s[i].lambda - kSinMu[i]) < 1e-8);
        CHECK(std::abs(nu_s[i].lambda - kSinNu[i]) < 1e-8);
        CHECK(std::abs(mu_c[i].lambda - kCosMu[i]) < 1e-8);
        CHECK(std::abs(nu_c[i].lambda - kCosNu[i]) < 1e-8);
    }
}

TEST_CASE("sin^2 band edges match the reference edge list") {
    auto edges = band_edges(sin2(), 2.1);
    REQUIRE(edges.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(edges[i] - kSinEdges[i]) < 1e-8);
}

TEST_CASE("gap structure of sin^2: edges, kinds, polarity") {
    auto gs = gaps(sin2(), 2.2);
    REQUIRE(gs.size() == 5);  // G0..G4

    CHECK(gs[0].index == 0);
    CHECK(std::isinf(gs[0].lower));
    CHECK(std::abs(gs[0].upper - kSinNu[0]) < 1e-8);
    CHECK(gs[0].upper_kind == EdgeKind::Neumann);
    CHECK(gs[0].polarity == GapPolarity::DN);

    // G1 = (nu_2, mu_1): the lower edge is Neumann for a potential that
    // increases on the half period
    CHECK(gs[1].index == 1);
    CHECK(std::abs(gs[1].lower - kSinNu[1]) < 1e-8);
    CHECK(std::abs(gs[1].upper - kSinMu[0]) < 1e-8);
    CHECK(gs[1].lower_kind == EdgeKind::Neumann);
    CHECK(gs[1].upper_kind == EdgeKind::Dirichlet);
    CHECK(gs[1].polarity == GapPolarity::ND);

    CHECK(gs[2].lower_kind == EdgeKind::Dirichlet);
    CHECK(gs[2].polarity == GapPolarity::DN);
    CHECK(std::abs(gs[2].lower - kSinMu[1]) < 1e-8);
    CHECK(std::abs(gs[2].upper - kSinNu[2]) < 1e-8);

    CHECK(gs[3].polarity == GapPolarity::ND);
    CHECK(gs[4].polarity == GapPolarity::DN);
    CHECK(std::abs(gs[4].lower - kSinMu[3]) < 1e-8);
    CHECK(std::abs(gs[4].upper - kSinNu[4]) < 1e-8);

    for (const auto& g : gs) {
        CHECK(g.contains(0.5 * (std::isinf(g.lower) ? g.upper - 1.0 : g.lower + g.upper)));
        CHECK_FALSE(g.contains(g.upper + 0.1));
    }
}

TEST_CASE("gap polarity flips for the decreasing potential") {
    auto gs = gaps(cos2(), 2.2);
    REQUIRE(gs.size() == 5);
    CHECK(gs[1].lower_kind == EdgeKind::Dirichlet);
    CHECK(gs[1].polarity == GapPolarity::DN);
    // for this decreasing well mu_n < nu_{n+1} holds in every computed gap:
    // all of them are Dirichlet-bottomed
    CHECK(gs[2].polarity == GapPolarity::DN);
    CHECK(gs[3].polarity == GapPolarity::DN);
    CHECK(gs[4].polarity == GapPolarity::DN);
    // same gap endpoints as sin^2 (the potentials are shifts of each other)
    auto hs = gaps(sin2(), 2.2);
    for (int i = 1; i < 5; ++i) {
        CHECK(std::abs(gs[i].lower - hs[i].lower) < 1e-8);
        CHECK(std::abs(gs[i].upper - hs[i].upper) < 1e-8);
    }
}

TEST_CASE("ordering of mu_1 and nu_2 follows the half-period monotonicity") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        const double a1 = -(0.4 + 1.0 * U(rng));
        const double a2 = a1 / 4.0 * 0.8 * U(rng);
        PeriodicPotential inc(10.0, {0.3 * U(rng), a1, a2});
        auto mu = dirichlet_eigenvalues(inc, 1);
        auto nu = neumann_eigenvalues(inc, 2);
        CHECK(nu[1].lambda < mu[0].lambda);

        PeriodicPotential dec(10.0, {0.3 * U(rng), -a1, -a2});
        auto mu2 = dirichlet_eigenvalues(dec, 1);
        auto nu2 = neumann_eigenvalues(dec, 2);
        CHECK(mu2[0].lambda < nu2[1].lambda);
    }
}

TEST_CASE("eigenfunction symmetry classes follow the index pattern") {
    for (const auto& p : {sin2(), cos2()}) {
        auto mu = dirichlet_eigenvalues(p, 4);
        auto nu = neumann_eigenvalues(p, 4);
        // Dirichlet: odd index = even about d/2 + antiperiodic,
        //            even index = odd about d/2 + periodic
        CHECK(mu[0].parity == HalfPeriodParity::Even);
        CHECK(mu[0].periodicity == PeriodicityType::Antiperiodic);
        CHECK(mu[1].parity == HalfPeriodParity::Odd);
        CHECK(mu[1].periodicity == PeriodicityType::Periodic);
        CHECK(mu[2].parity == HalfPeriodParity::Even);
        CHECK(mu[2].periodicity == PeriodicityType::Antiperiodic);
        CHECK(mu[3].parity == HalfPeriodParity::Odd);
        CHECK(mu[3].periodicity == PeriodicityType::Periodic);
        // Neumann: odd index = even + periodic, even index = odd + antiperiodic
        CHECK(nu[0].parity == HalfPeriodParity::Even);
        CHECK(nu[0].periodicity == PeriodicityType::Periodic);
        CHECK(nu[1].parity == HalfPeriodParity::Odd);
        CHECK(nu[1].periodicity == PeriodicityType::Antiperiodic);
        CHECK(nu[2].parity == HalfPeriodParity::Even);
        CHECK(nu[2].periodicity == PeriodicityType::Periodic);
        CHECK(nu[3].parity == HalfPeriodParity::Odd);
        CHECK(nu[3].periodicity == PeriodicityType::Antiperiodic);
    }
}

TEST_CASE("eigenfunction samples satisfy the differential equation") {
    auto p = sin2();
    auto mu = dirichlet_eigenvalues(p, 2);
    const auto& e = mu[0];
    const int n = static_cast<int>(e.x.size()) - 1;
    const double h = e.period / n;
    for (int i = 10; i < n - 10; i += 97) {
        const double lhs = (e.psi[i - 1] - 2 * e.psi[i] + e.psi[i + 1]) / (h * h);
        const double rhs = (p(e.x[i]) - e.lambda) * e.psi[i];
        CHECK(std::abs(lhs - rhs) < 1e-4);
        const double mid = (e.psi[i + 1] - e.psi[i - 1]) / (2 * h);
        CHECK(std::abs(mid - e.dpsi[i]) < 1e-5);
    }
    // endpoint values respect the boundary condition and normalization
    CHECK(std::abs(e.psi[0]) < 1e-12);
    CHECK(std::abs(e.psi[n]) < 1e-8);
    double peak = 0.0;
    for (double v : e.psi) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("first Dirichlet eigenfunction of sin^2 peaks at the reference point") {
    auto mu = dirichlet_eigenvalues(sin2(), 1);
    auto r = eigenfunction_monotonicity(mu[0]);
    CHECK_FALSE(r.increasing);
    CHECK_FALSE(r.decreasing);
    REQUIRE(r.extremum_location.has_value());
    CHECK(std::abs(*r.extremum_location - kD0) < 1e-3);

    // ground Neumann state of sin^2 concentrates at the potential minimum:
    // decreasing on the half period
    auto nu = neumann_eigenvalues(sin2(), 1);
    auto rn = eigenfunction_monotonicity(nu[0]);
    CHECK(rn.decreasing);

    // second Neumann eigenfunction of cos^2: interior extremum at d - d0 - d/2
    auto nc = neumann_eigenvalues(cos2(), 2);
    auto rc = eigenfunction_monotonicity(nc[1]);
    REQUIRE(rc.extremum_location.has_value());
    CHECK(std::abs(*rc.extremum_location - (5.0 - kD0)) < 1e-3);

    // constant potential: ground Neumann state is flat
    auto nz = neumann_eigenvalues(zero(), 1);
    CHECK(eigenfunction_monotonicity(nz[0]).degenerate);
}

TEST_CASE("smallest band width and shift invariance") {
    const double lmax = 2.0988436261 + 0.01;
    auto bw = alpha_star(sin2(), lmax);
    CHECK(bw.bands_used == 4);
    CHECK(std::abs(bw.value - 0.0073479495) < 1e-7);

    auto bw2 = alpha_star(PeriodicPotential(10.0, {1.2, -0.5}), lmax + 0.7);
    CHECK(bw2.bands_used == 4);
    CHECK(std::abs(bw2.value - bw.value) < 1e-8);
}

TEST_CASE("comparison-potential criterion") {
    auto c = vbar_condition(sin2());
    CHECK(c.monotone);
    CHECK(c.satisfied);
    CHECK(c.threshold == doctest::Approx(66.7579951524).epsilon(1e-10));
    CHECK(std::abs(c.beta - 1.0) < 1e-12);
    CHECK(std::abs(c.alpha) < 1e-5);
    CHECK(std::abs(c.gamma - 100.0) < 1e-3);

    auto cc = vbar_condition(cos2());
    CHECK(cc.monotone);
    CHECK(cc.satisfied);
    CHECK(std::abs(cc.gamma - 100.0) < 1e-3);

    // half-depth well: gamma = 50 falls short of the threshold
    auto ch = vbar_condition(PeriodicPotential(10.0, {0.25, -0.25}));
    CHECK(ch.monotone);
    CHECK_FALSE(ch.satisfied);
    CHECK(std::abs(ch.gamma - 50.0) < 1e-3);

    // almost-flat monotone well: gamma ~ 2
    auto cf = vbar_condition(PeriodicPotential(10.0, {0.5, -0.01}));
    CHECK(cf.monotone);
    CHECK_FALSE(cf.satisfied);
    CHECK(cf.gamma < 5.0);

    // non-monotone potential is rejected without a verdict
    auto cn = vbar_condition(PeriodicPotential(10.0, {0.0, 1.0, 1.0}));
    CHECK_FALSE(cn.monotone);
    CHECK_FALSE(cn.satisfied);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(dirichlet_eigenvalues(sin2(), 0), std::invalid_argument);
    CHECK_THROWS_AS(neumann_eigenvalues(sin2(), -2), std::invalid_argument);
    Tolerances bad;
    bad.ode_tol = -1.0;
    CHECK_THROWS_AS(dirichlet_eigenvalues(sin2(), 1, bad), std::invalid_argument);
}
