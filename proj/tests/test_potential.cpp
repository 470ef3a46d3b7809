#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gapmodes/potential.hpp"
#include "gapmodes/tolerances.hpp"

using gapmodes::MonotonicityReport;
using gapmodes::PeriodicPotential;

namespace {
PeriodicPotential sin2() {
    // sin^2(pi x / 10) = 1/2 - 1/2 cos(2 pi x / 10), period 10
    return PeriodicPotential(10.0, {0.5, -0.5});
}
PeriodicPotential cos2() {
    return PeriodicPotential(10.0, {0.5, 0.5});
}
}  // namespace

TEST_CASE("evaluation matches closed forms") {
    auto p = sin2();
    for (double x : {0.0, 0.3, 2.5, 5.0, 7.9, 10.0, -3.7, 123.456}) {
        const double want = std::pow(std::sin(M_PI * x / 10.0), 2);
        CHECK(p(x) == doctest::Approx(want).epsilon(1e-14));
    }
    auto q = cos2();
    for (double x : {0.0, 0.3, 2.5, 5.0, 7.9, -11.0}) {
        const double want = std::pow(std::cos(M_PI * x / 10.0), 2);
        CHECK(q(x) == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("periodicity and evenness for unshifted series") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double d = 5.0 + 10.0 * std::abs(U(rng));
        PeriodicPotential p(d, {U(rng), U(rng), U(rng), U(rng)});
        for (int i = 0; i < 10; ++i) {
            const double x = 20.0 * U(rng);
            CHECK(p(x + d) == doctest::Approx(p(x)).epsilon(1e-12));
            CHECK(p(-x) == doctest::Approx(p(x)).epsilon(1e-12));
            CHECK(p(d - x) == doctest::Approx(p(x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("shift and constant offset behave as claimed") {
    auto p = sin2();
    auto ps = p.shifted(2.5);
    auto pc = p.plus_constant(-1.75);
    for (double x : {0.0, 1.0, 4.2, -6.6}) {
        CHECK(ps(x) == doctest::Approx(p(x + 2.5)).epsilon(1e-14));
        CHECK(pc(x) == doctest::Approx(p(x) - 1.75).epsilon(1e-14));
    }
    // composition order does not matter
    auto a = p.shifted(1.0).plus_constant(3.0);
    auto b = p.plus_constant(3.0).shifted(1.0);
    for (double x : {0.2, 8.9}) CHECK(a(x) == doctest::Approx(b(x)).epsilon(1e-14));
}

TEST_CASE("derivatives agree with central differences") {
    PeriodicPotential p(7.0, {0.2, -0.8, 0.3, 0.05});
    const double h = 1e-5;
    for (double x : {0.1, 1.7, 3.3, 6.9}) {
        const double fd1 = (p(x + h) - p(x - h)) / (2 * h);
        CHECK(p.derivative(x) == doctest::Approx(fd1).epsilon(1e-8));
        const double fd2 = (p(x + h) - 2 * p(x) + p(x - h)) / (h * h);
        CHECK(p.derivative(x, 2) == doctest::Approx(fd2).epsilon(1e-4));
    }
    CHECK(p.derivative(1.3, 0) == doctest::Approx(p(1.3)).epsilon(1e-15));
}

TEST_CASE("bounds bracket the range") {
    PeriodicPotential p(9.0, {0.4, -1.1, 0.25});
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 9000; ++i) {
        const double v = p(9.0 * i / 9000.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(p.min_bound() <= lo + 1e-12);
    CHECK(p.sup_bound() >= hi - 1e-12);
    CHECK(p.sup_bound() >= -lo - 1e-12);
}

TEST_CASE("constructor rejects bad input") {
    CHECK_THROWS_AS(PeriodicPotential(0.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicPotential(-3.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicPotential(5.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicPotential(5.0, {1.0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        PeriodicPotential(5.0, {1.0}, std::numeric_limits<double>::infinity()),
        std::invalid_argument);
}

TEST_CASE("monotonicity classification on the half period") {
    // sin^2 increases on [0, d/2]
    auto r = monotonicity_on_half_period(sin2());
    CHECK(r.increasing);
    CHECK_FALSE(r.decreasing);
    CHECK_FALSE(r.extremum_location.has_value());
    CHECK_FALSE(r.degenerate);

    // cos^2 decreases on [0, d/2]
    auto r2 = monotonicity_on_half_period(cos2());
    CHECK(r2.decreasing);
    CHECK_FALSE(r2.increasing);

    // constant potential is degenerate
    auto r3 = monotonicity_on_half_period(PeriodicPotential(10.0, {0.7}));
    CHECK(r3.degenerate);

    // interior extremum: V = cos(2 pi x/d) + cos(4 pi x/d) has V' = 0 at an
    // interior point of (0, d/2); V'(x) = -(2pi/d)(sin w x)(1 + 4 cos w x)
    // with w = 2pi/d, so the extremum sits at cos(w x) = -1/4
    PeriodicPotential bump(10.0, {0.0, 1.0, 1.0});
    auto r4 = monotonicity_on_half_period(bump);
    CHECK_FALSE(r4.increasing);
    CHECK_FALSE(r4.decreasing);
    REQUIRE(r4.extremum_location.has_value());
    const double want = 10.0 / (2 * M_PI) * std::acos(-0.25);
    CHECK(*r4.extremum_location == doctest::Approx(want).epsilon(1e-8));

    // shifted potential is rejected
    CHECK_THROWS_AS(monotonicity_on_half_period(sin2().shifted(1.0)),
                    std::invalid_argument);
}

TEST_CASE("random monotone families classify correctly") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double a1 = -(0.3 + 1.2 * U(rng));
        const double a2 = a1 / 4.0 * (0.9 * U(rng));
        PeriodicPotential inc(10.0, {0.0, a1, a2});
        auto r = monotonicity_on_half_period(inc);
        CHECK(r.increasing);
        PeriodicPotential dec(10.0, {0.0, -a1, -a2});
        auto r2 = monotonicity_on_half_period(dec);
        CHECK(r2.decreasing);
    }
}

TEST_CASE("tolerance profiles are valid and hash distinctly") {
    auto d = gapmodes::tolerance_profile("default");
    auto f = gapmodes::tolerance_profile("fast");
    auto t = gapmodes::tolerance_profile("tight");
    CHECK(gapmodes::tolerance_hash(d) != gapmodes::tolerance_hash(f));
    CHECK(gapmodes::tolerance_hash(d) != gapmodes::tolerance_hash(t));
    CHECK(gapmodes::tolerance_hash_hex(d).size() == 16);
    CHECK_THROWS_AS(gapmodes::tolerance_profile("nope"), std::invalid_argument);
    // hash is a pure function of the field values
    auto d2 = gapmodes::tolerance_profile("default");
    CHECK(gapmodes::tolerance_hash(d) == gapmodes::tolerance_hash(d2));
    d2.ode_tol *= 2;
    CHECK(gapmodes::tolerance_hash(d) != gapmodes::tolerance_hash(d2));
}
