#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "worldline/quadrature.hpp"

using namespace worldline;

TEST_CASE("constant integrand is exact with zero error estimate") {
    const auto r = integrate_1d([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{});
    CHECK(r.value == 1.0);
    CHECK(r.abs_error_estimate == 0.0);
    CHECK(r.converged);
    CHECK(r.evaluations == 5);
}

TEST_CASE("sin over [0, pi] integrates to 2") {
    const auto r = integrate_1d([](double t) { return std::sin(t); }, 0.0, M_PI,
                                QuadratureSpec::adaptive());
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(2.0, 1e-10));
    CHECK(r.converged);
}

TEST_CASE("composite Simpson is exact for cubics") {
    const auto r = integrate_1d([](double t) { return t * t * t; }, 0.0, 1.0,
                                QuadratureSpec::composite(2));
    CHECK(r.value == 0.25);
    const auto ra = integrate_1d([](double t) { return t * t * t; }, 0.0, 1.0,
                                 QuadratureSpec::adaptive());
    CHECK_THAT(ra.value, Catch::Matchers::WithinAbs(0.25, 1e-14));
}

TEST_CASE("composite convergence order is ~4") {
    auto err = [](int n) {
        const auto r = integrate_1d([](double t) { return std::exp(t); }, 0.0, 1.0,
                                    QuadratureSpec::composite(n));
        return std::abs(r.value - (std::exp(1.0) - 1.0));
    };
    const double order = std::log2(err(16) / err(32));
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("error estimate brackets the true error on closed forms") {
    struct Case {
        double (*f)(double);
        double a, b, exact;
    };
    const std::vector<Case> battery = {
        {[](double t) { return std::sin(t); }, 0.0, M_PI, 2.0},
        {[](double t) { return std::exp(t); }, 0.0, 1.0, std::exp(1.0) - 1.0},
        {[](double t) { return 1.0 / (1.0 + t); }, 0.0, 2.0, std::log(3.0)},
    };
    for (const auto& c : battery) {
        const auto r = integrate_1d(c.f, c.a, c.b, QuadratureSpec::composite(32));
        const double true_err = std::abs(r.value - c.exact);
        CHECK(r.abs_error_estimate >= true_err / 100.0);
        CHECK(r.abs_error_estimate <= std::max(true_err * 100.0, 1e-15));
    }
}

TEST_CASE("adaptive flags unconverged instead of throwing") {
    const auto r = integrate_1d([](double t) { return std::sin(50.0 * t); }, 0.0, 10.0,
                                QuadratureSpec::adaptive(1e-15, 1e-15, 2));
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("non-finite samples raise NumericalError with the abscissa") {
    CHECK_THROWS_AS(integrate_1d([](double t) { return 1.0 / t; }, -1.0, 1.0,
                                 QuadratureSpec::adaptive()),
                    NumericalError);
    try {
        integrate_1d([](double t) { return 1.0 / t; }, -1.0, 1.0, QuadratureSpec::adaptive());
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("x=") != std::string::npos);
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(QuadratureSpec::composite(3), InputError);
    CHECK_THROWS_AS(QuadratureSpec::composite(0), InputError);
    CHECK_THROWS_AS(QuadratureSpec::adaptive(0.0, 1e-10), InputError);
    CHECK_THROWS_AS(QuadratureSpec::adaptive(1e-12, -1.0), InputError);
    CHECK_THROWS_AS(QuadratureSpec::adaptive(1e-12, 1e-10, 0), InputError);
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 1.0, 0.0, QuadratureSpec{}),
                    InputError);
}

TEST_CASE("2-D tensor rule") {
    const ParamRect unit{0.0, 1.0, 0.0, 1.0};
    const auto r6 = integrate_2d([](double, double) { return 1.0; }, ParamRect{0.0, 2.0, 0.0, 3.0},
                                 QuadratureSpec::composite(2));
    CHECK(r6.value == 6.0);
    const auto rts = integrate_2d([](double tau, double sigma) { return tau * sigma; }, unit,
                                  QuadratureSpec::adaptive());
    CHECK_THAT(rts.value, Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK(rts.converged);

    CHECK_THROWS_AS(integrate_2d([](double, double) { return 1.0; },
                                 ParamRect{0.0, 0.0, 0.0, 1.0}, QuadratureSpec{}),
                    InputError);
    try {
        integrate_2d([](double tau, double sigma) { return 1.0 / (tau + sigma - 1.0); }, unit,
                     QuadratureSpec::composite(2));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("tau=") != std::string::npos);
    }
}

TEST_CASE("results are deterministic") {
    auto f = [](double t) { return std::sin(t) * std::exp(-0.1 * t); };
    const auto a = integrate_1d(f, 0.0, 7.0, QuadratureSpec::adaptive());
    const auto b = integrate_1d(f, 0.0, 7.0, QuadratureSpec::adaptive());
    CHECK(std::memcmp(&a.value, &b.value, sizeof a.value) == 0);
    CHECK(std::memcmp(&a.abs_error_estimate, &b.abs_error_estimate, sizeof a.value) == 0);
    CHECK(a.evaluations == b.evaluations);
}
