#include "cusp/ode.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace cusp;
using namespace cusp::ode;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

auto growth = [](double, const State<1>& y, State<1>& d) { d[0] = y[0]; };

auto oscillator(double omega) {
    return [omega](double, const State<2>& y, State<2>& d) {
        d[0] = y[1];
        d[1] = -omega * omega * y[0];
    };
}

} // namespace

TEST_CASE("exponential growth", "[ode]") {
    for (double tol : {1e-8, 1e-10, 1e-12}) {
        const auto y = integrate<1>(growth, 0.0, 5.0, {1.0}, {tol});
        CHECK_THAT(y[0], WithinRel(std::exp(5.0), 50.0 * tol));
    }
    SECTION("backwards") {
        const auto y = integrate<1>(growth, 5.0, 0.0, {std::exp(5.0)}, {1e-12});
        CHECK_THAT(y[0], WithinRel(1.0, 1e-10));
    }
    SECTION("empty interval is the identity") {
        IntegratorStats st;
        const auto y = integrate<1>(growth, 2.0, 2.0, {3.0}, {}, &st);
        CHECK(y[0] == 3.0);
        CHECK(st.rhs_evals == 0);
    }
}

TEST_CASE("harmonic oscillator over many periods", "[ode]") {
    const double omega = 3.0;
    const double t1 = 20.0 * std::numbers::pi;
    const auto y = integrate<2>(oscillator(omega), 0.0, t1, {1.0, 0.0}, {1e-12});
    CHECK_THAT(y[0], WithinAbs(std::cos(omega * t1), 1e-9));
    CHECK_THAT(y[1], WithinAbs(-omega * std::sin(omega * t1), 1e-9));
    // Wronskian of the two fundamental solutions
    const auto z = integrate<2>(oscillator(omega), 0.0, t1, {0.0, 1.0}, {1e-12});
    CHECK_THAT(y[0] * z[1] - y[1] * z[0], WithinAbs(1.0, 1e-10));
}

TEST_CASE("error decreases with the tolerance", "[ode]") {
    double prev = 1.0;
    for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        const auto y = integrate<2>(oscillator(1.0), 0.0, 10.0, {1.0, 0.0}, {tol});
        const double err = std::abs(y[0] - std::cos(10.0));
        CHECK(err <= 100.0 * tol);
        CHECK(err <= prev);
        prev = err;
    }
}

TEST_CASE("statistics and step limits", "[ode]") {
    IntegratorStats st;
    (void)integrate<2>(oscillator(1.0), 0.0, 10.0, {1.0, 0.0}, {1e-10}, &st);
    CHECK(st.accepted > 0);
    CHECK(st.rhs_evals >= 12 * st.accepted);

    IntegratorStats capped;
    IntegratorOptions opts;
    opts.max_step = 0.01;
    (void)integrate<2>(oscillator(1.0), 0.0, 10.0, {1.0, 0.0}, opts, &capped);
    CHECK(capped.accepted >= 1000);

    opts.max_steps = 50;
    CHECK_THROWS_AS(integrate<2>(oscillator(1.0), 0.0, 10.0, {1.0, 0.0}, opts), NumericalError);
}

TEST_CASE("integrator errors", "[ode]") {
    CHECK_THROWS_AS(integrate<1>(growth, 0.0, 1.0, {1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(integrate<1>(growth, 0.0, 1.0, {1.0}, {-1e-8}), DomainError);
    // y' = y^2 blows up at t = 1
    auto blowup = [](double, const State<1>& y, State<1>& d) { d[0] = y[0] * y[0]; };
    CHECK_THROWS_AS(integrate<1>(blowup, 0.0, 2.0, {1.0}, {1e-10}), NumericalError);
}
