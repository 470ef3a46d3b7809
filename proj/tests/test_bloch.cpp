#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gapmodes/bloch.hpp"
#include "gapmodes/floquet.hpp"
#include "gapmodes/spectrum.hpp"

using namespace gapmodes;

namespace {

PeriodicPotential sin_squared() { return PeriodicPotential(10.0, {0.5, -0.5}); }
PeriodicPotential cos_squared() { return PeriodicPotential(10.0, {0.5, 0.5}); }
PeriodicPotential free_particle() { return PeriodicPotential(10.0, {0.0}); }

}  // namespace

TEST_CASE("free particle: decaying states match the closed form") {
    const PeriodicPotential p = free_particle();
    const Tolerances tol;
    for (double lambda : {-0.25, -1.0, -4.0, -9.0, -20.0}) {
        const double k = std::sqrt(-lambda);
        const DecayingState right = decaying_state(p, lambda, Side::Right, tol);
        const DecayingState left = decaying_state(p, lambda, Side::Left, tol);
        CHECK(right.kappa == doctest::Approx(k).epsilon(1e-9));
        CHECK(left.kappa == doctest::Approx(k).epsilon(1e-9));
        // e^{-k x}: psi'(0)/psi(0) = -k; e^{+k x}: +k.
        CHECK(right.value[1] / right.value[0] == doctest::Approx(-k).epsilon(1e-9));
        CHECK(left.value[1] / left.value[0] == doctest::Approx(k).epsilon(1e-9));
        CHECK(right.multiplier ==
              doctest::Approx(std::exp(-k * p.period())).epsilon(1e-8));
        CHECK(right.value[0] > 0.0);  // canonical sign
        CHECK(left.value[0] > 0.0);
        const RatioValue rr = ratio(p, lambda, Side::Right, tol);
        const RatioValue rl = ratio(p, lambda, Side::Left, tol);
        CHECK_FALSE(rr.is_pole);
        CHECK_FALSE(rl.is_pole);
        CHECK(rr.value == doctest::Approx(-k).epsilon(1e-9));
        CHECK(rl.value == doctest::Approx(k).epsilon(1e-9));
    }
}

TEST_CASE("decay rate agrees with the discriminant formula inside gaps") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    const double d = p.period();
    // interior points of gaps 0, 1, 2, 3 of the half-strength cosine potential
    const std::vector<double> lambdas = {-2.0, -0.3, 0.05, 0.4, 0.6, 0.95, 1.4287};
    for (double lambda : lambdas) {
        const double delta = discriminant(p, lambda, tol.ode_tol);
        REQUIRE(std::abs(delta) > 2.0);
        const double kappa_ref = std::acosh(0.5 * std::abs(delta)) / d;
        const DecayingState right = decaying_state(p, lambda, Side::Right, tol);
        const DecayingState left = decaying_state(p, lambda, Side::Left, tol);
        CHECK(right.kappa == doctest::Approx(kappa_ref).epsilon(1e-8));
        CHECK(left.kappa == doctest::Approx(kappa_ref).epsilon(1e-8));
        CHECK(std::abs(right.multiplier) ==
              doctest::Approx(std::exp(-kappa_ref * d)).epsilon(1e-8));
        // the two multipliers are the reciprocal eigenvalue pair
        CHECK(right.multiplier * left.multiplier == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("decaying states are monodromy eigenvectors") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    for (double lambda : {-1.0, 0.4, 0.95, 1.4287}) {
        const TransferMatrix m = monodromy(p, lambda, 0.0, tol.ode_tol);
        const double norm_m = std::abs(m.m11) + std::abs(m.m12) + std::abs(m.m21) +
                              std::abs(m.m22);
        for (Side side : {Side::Right, Side::Left}) {
            const DecayingState ds = decaying_state(p, lambda, side, tol);
            const StateVector mv = m.apply(ds.value);
            const double rx = mv[0] - ds.multiplier * ds.value[0];
            const double ry = mv[1] - ds.multiplier * ds.value[1];
            CHECK(std::hypot(rx, ry) <= 1e-8 * norm_m);
        }
    }
}

TEST_CASE("rejects energies inside a spectral band") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    for (double lambda : {0.285, 0.8, 1.2, 2.5}) {  // interior band points
        CHECK_THROWS_AS(decaying_state(p, lambda, Side::Right, tol),
                        std::runtime_error);
        CHECK_THROWS_AS(decaying_state(p, lambda, Side::Left, tol),
                        std::runtime_error);
    }
}

TEST_CASE("ratio is monotone across gaps: increasing right, decreasing left") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    const std::vector<SpectralGap> gs = gaps(p, 2.1, tol);
    REQUIRE(gs.size() >= 3);
    for (const SpectralGap& g : gs) {
        const double lo = std::isfinite(g.lower) ? g.lower + 1e-4
                                                 : semi_infinite_cutoff(p);
        const double hi = g.upper - 1e-4;
        REQUIRE(lo < hi);
        double prev_r = 0.0, prev_l = 0.0;
        for (int i = 0; i <= 30; ++i) {
            const double lambda = lo + (hi - lo) * i / 30.0;
            const RatioValue rr = ratio(p, lambda, Side::Right, tol);
            const RatioValue rl = ratio(p, lambda, Side::Left, tol);
            REQUIRE_FALSE(rr.is_pole);  // even potential: no pole at the origin
            REQUIRE_FALSE(rl.is_pole);
            if (i > 0) {
                CHECK(rr.value > prev_r);
                CHECK(rl.value < prev_l);
            }
            prev_r = rr.value;
            prev_l = rl.value;
            // mirror identity at an even origin
            CHECK(rl.value == doctest::Approx(-rr.value).epsilon(1e-7));
        }
    }
}

TEST_CASE("ratio blows up at Dirichlet-kind edges and vanishes at Neumann-kind") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    const std::vector<SpectralGap> gs = gaps(p, 2.1, tol);
    REQUIRE(gs.size() >= 2);
    const SpectralGap& g1 = gs[1];  // (nu_2, mu_1): Neumann below, Dirichlet above
    REQUIRE(g1.lower_kind == EdgeKind::Neumann);
    REQUIRE(g1.upper_kind == EdgeKind::Dirichlet);

    const double near_neumann = ratio(p, g1.lower + 1e-6, Side::Right, tol).value;
    CHECK(std::abs(near_neumann) < 1e-2);

    const double d6 = ratio(p, g1.upper - 1e-6, Side::Right, tol).value;
    const double d8 = ratio(p, g1.upper - 1e-8, Side::Right, tol).value;
    CHECK(std::abs(d6) > 3e2);
    CHECK(std::abs(d8) > 5.0 * std::abs(d6));  // ~1/sqrt(distance) growth
    CHECK(d6 > 0.0);  // increasing toward +infinity
    CHECK(d8 > 0.0);
}

TEST_CASE("shifted ratio: period translation and half-period duality") {
    const PeriodicPotential s2 = sin_squared();
    const PeriodicPotential c2 = cos_squared();
    const Tolerances tol;
    const double d = s2.period();
    for (double lambda : {-0.5, 0.45, 0.7}) {
        for (double t : {0.8, 3.7, 6.2}) {
            const RatioValue a = ratio_shifted(s2, t, lambda, Side::Right, tol);
            const RatioValue b = ratio_shifted(s2, t + d, lambda, Side::Right, tol);
            REQUIRE_FALSE(a.is_pole);
            REQUIRE_FALSE(b.is_pole);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
            // cos^2 is the half-period translate of sin^2
            const RatioValue c = ratio_shifted(c2, t, lambda, Side::Right, tol);
            const RatioValue s =
                ratio_shifted(s2, t + 0.5 * d, lambda, Side::Right, tol);
            REQUIRE_FALSE(c.is_pole);
            CHECK(c.value == doctest::Approx(s.value).epsilon(1e-8));
        }
    }
}

TEST_CASE("ratio profile: pole location for shifted potentials in gap 1") {
    const PeriodicPotential p = sin_squared();
    const Tolerances tol;
    const std::vector<SpectralGap> gs = gaps(p, 2.1, tol);
    REQUIRE(gs.size() >= 2);
    const SpectralGap& g1 = gs[1];

    // reference poles computed independently (high-order spectral method)
    const RatioProfile prof7 = ratio_profile(p, g1, 7.0, Side::Right, tol);
    REQUIRE(prof7.pole.has_value());
    CHECK(*prof7.pole == doctest::Approx(0.3238736467).epsilon(1e-7));

    const RatioProfile prof8 = ratio_profile(p, g1, 8.0, Side::Right, tol);
    REQUIRE(prof8.pole.has_value());
    CHECK(*prof8.pole == doctest::Approx(0.4022062216).epsilon(1e-7));

    // shift inside the zero-only cell: no pole anywhere in the gap
    const RatioProfile prof1 = ratio_profile(p, g1, 1.0, Side::Right, tol);
    CHECK_FALSE(prof1.pole.has_value());

    // semi-infinite gap never carries a pole
    const RatioProfile prof_g0 = ratio_profile(p, gs[0], 7.0, Side::Right, tol);
    CHECK_FALSE(prof_g0.pole.has_value());
    CHECK(prof_g0.scan_lo == doctest::Approx(semi_infinite_cutoff(p)));

    // profile samples are finite and the pole flag marks only huge values
    for (std::size_t i = 0; i < prof7.lambda.size(); ++i) {
        if (!prof7.pole_flag[i]) CHECK(std::isfinite(prof7.value[i]));
    }
}

TEST_CASE("free particle profile follows -sqrt(-lambda) over the gap") {
    const PeriodicPotential p = free_particle();
    const Tolerances tol;
    const std::vector<SpectralGap> gs = gaps(p, 0.5, tol);
    REQUIRE(gs.size() == 1);
    REQUIRE(gs[0].index == 0);
    const RatioProfile prof = ratio_profile(p, gs[0], 0.0, Side::Right, tol);
    CHECK_FALSE(prof.pole.has_value());
    for (std::size_t i = 0; i < prof.lambda.size(); ++i) {
        const double lambda = prof.lambda[i];
        if (lambda > -1e-4) continue;  // closed form degenerates at the edge
        CHECK(prof.value[i] ==
              doctest::Approx(-std::sqrt(-lambda)).epsilon(1e-6));
    }
}

TEST_CASE("input validation") {
    const PeriodicPotential p = sin_squared();
    Tolerances bad;
    bad.ode_tol = -1.0;
    CHECK_THROWS_AS(decaying_state(p, -1.0, Side::Right, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(decaying_state(p, std::nan(""), Side::Right, Tolerances{}),
                    std::invalid_argument);
}
