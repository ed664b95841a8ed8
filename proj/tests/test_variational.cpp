#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "worldline/functionals.hpp"
#include "worldline/variational.hpp"

using namespace worldline;

namespace {

const UnitSystem nat = UnitSystem::natural();
const Particle unit_mass(1.0);

double max_line_deviation(const PathVariable& pv) {
    const double slope = (pv.x_end() - pv.x_start()) / (pv.t_end() - pv.t_start());
    double dev = 0.0;
    for (std::size_t k = 0; k <= pv.intervals(); ++k)
        dev = std::max(dev, std::abs(pv.node_x(k) - (pv.x_start() +
                                                     slope * (pv.node_t(k) - pv.t_start()))));
    return dev;
}

}  // namespace

TEST_CASE("path construction and feasibility") {
    const auto line = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 10, nat);
    CHECK(line.intervals() == 10);
    CHECK(line.dt() == 1.0);
    CHECK(line.node_x(0) == 0.0);
    CHECK(line.node_x(10) == 6.0);

    CHECK_THROWS_AS(PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 3, nat), InputError);
    CHECK_THROWS_AS(PathVariable::straight_line(0.0, 0.0, 1.0, 0.995, 8, nat), InputError);
    CHECK_THROWS_AS(PathVariable::zigzag(0.0, 0.0, 1.0, 2.0, 8, nat), InputError);
    // Interior node demanding |dx/dt| >= v_max fails construction.
    CHECK_THROWS_AS(PathVariable(0.0, 0.0, 10.0, 6.0, {3.0, 0.1, 4.0, 4.6}, nat), InputError);
    CHECK_THROWS_AS(PathVariable(0.0, 0.0, 10.0, 6.0, {1.2, 2.4, 3.6}, nat, 1.5), InputError);
}

TEST_CASE("discrete objectives on closed forms") {
    const auto line = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 10, nat);
    CHECK_THAT(discrete_objective(line, Objective::ActionS, unit_mass, nat),
               Catch::Matchers::WithinRel(-8.0, 1e-13));
    CHECK_THAT(discrete_objective(line, Objective::AreaA, unit_mass, nat),
               Catch::Matchers::WithinRel(8.0, 1e-13));

    const auto rest = PathVariable::straight_line(0.0, 2.0, 5.0, 2.0, 10, nat);
    CHECK_THAT(discrete_objective(rest, Objective::ActionS, unit_mass, nat),
               Catch::Matchers::WithinAbs(-5.0, 1e-14));

    // Same discretization up to the constant -h/(m0^2 c^2), for any path.
    const auto zig = PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 16, nat);
    const Particle p(2.3);
    const double k = proportionality_constant(p, nat);
    CHECK_THAT(discrete_objective(zig, Objective::AreaA, p, nat),
               Catch::Matchers::WithinRel(
                   -discrete_objective(zig, Objective::ActionS, p, nat) / k, 1e-13));
}

TEST_CASE("gradient vanishes on the straight line") {
    const auto line = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 32, nat);
    for (auto which : {Objective::ActionS, Objective::AreaA}) {
        const auto g = objective_gradient(line, which, unit_mass, nat);
        double norm = 0.0;
        for (double gi : g) norm += gi * gi;
        CHECK(std::sqrt(norm) < 1e-12);
    }
}

TEST_CASE("gradient pushes a perturbed node back toward the line") {
    auto interior = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 10, nat).interior();
    interior[4] += 0.3;  // node above the line
    const auto path = PathVariable(0.0, 0.0, 10.0, 6.0, interior, nat);
    const auto g = objective_gradient(path, Objective::ActionS, unit_mass, nat);
    CHECK(g[4] > 0.0);  // descent step x -= a*g moves it back down
    interior[4] -= 0.6;
    const auto below = PathVariable(0.0, 0.0, 10.0, 6.0, interior, nat);
    CHECK(objective_gradient(below, Objective::ActionS, unit_mass, nat)[4] < 0.0);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937 rng(7031);
    std::uniform_real_distribution<double> bump(-0.1, 0.1);
    const double fd_step = 1e-7 * 10.0;  // of the domain length
    for (int trial = 0; trial < 10; ++trial) {
        auto interior = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 12, nat).interior();
        for (double& x : interior) x += bump(rng);
        const auto path = PathVariable(0.0, 0.0, 10.0, 6.0, interior, nat);
        const auto which = trial % 2 == 0 ? Objective::ActionS : Objective::AreaA;
        const auto g = objective_gradient(path, which, unit_mass, nat);
        for (std::size_t k = 0; k < interior.size(); ++k) {
            auto plus = interior, minus = interior;
            plus[k] += fd_step;
            minus[k] -= fd_step;
            const double fd =
                (discrete_objective(PathVariable(0.0, 0.0, 10.0, 6.0, plus, nat), which,
                                    unit_mass, nat) -
                 discrete_objective(PathVariable(0.0, 0.0, 10.0, 6.0, minus, nat), which,
                                    unit_mass, nat)) /
                (2.0 * fd_step);
            CHECK_THAT(fd, Catch::Matchers::WithinRel(g[k], 1e-5));
        }
    }
}

TEST_CASE("area gradient is the exact negative multiple of the action gradient") {
    auto interior = PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 16, nat).interior();
    const auto path = PathVariable(0.0, 0.0, 10.0, 6.0, interior, nat);
    const Particle p(1.7);
    const auto gs = objective_gradient(path, Objective::ActionS, p, nat);
    const auto ga = objective_gradient(path, Objective::AreaA, p, nat);
    const double scale = -nat.h() / (p.rest_mass() * p.rest_mass() * nat.c() * nat.c());
    for (std::size_t k = 0; k < gs.size(); ++k)
        CHECK_THAT(ga[k], Catch::Matchers::WithinRel(scale * gs[k], 1e-12));
}

TEST_CASE("free particle optimization reaches the straight line") {
    const auto zig = PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 32, nat);
    OptimizeSettings settings;
    settings.record_history = true;

    const auto action = optimize(zig, Objective::ActionS, unit_mass, nat, settings);
    REQUIRE(action.converged);
    CHECK(action.gradient_norm <= 1e-10);
    CHECK(max_line_deviation(action.path) < 1e-4 * 6.0);

    const auto area = optimize(zig, Objective::AreaA, unit_mass, nat, settings);
    REQUIRE(area.converged);
    CHECK(max_line_deviation(area.path) < 1e-4 * 6.0);

    // Same argmin from both objectives.
    for (std::size_t k = 0; k < action.path.interior().size(); ++k)
        CHECK_THAT(area.path.interior()[k],
                   Catch::Matchers::WithinAbs(action.path.interior()[k], 1e-6));

    // Monotone descent of the minimized objective across accepted steps.
    for (std::size_t i = 1; i < action.history.size(); ++i)
        CHECK(action.history[i] <= action.history[i - 1]);
    for (std::size_t i = 1; i < area.history.size(); ++i)
        CHECK(area.history[i] <= area.history[i - 1]);

    // Endpoints bit-identical to the input.
    CHECK(action.path.x_start() == zig.x_start());
    CHECK(action.path.x_end() == zig.x_end());
    CHECK(action.path.samples().front().x == 0.0);
    CHECK(action.path.samples().back().x == 6.0);
}

TEST_CASE("stationary start converges immediately") {
    const auto line = PathVariable::straight_line(0.0, 0.0, 10.0, 6.0, 32, nat);
    const auto res = optimize(line, Objective::ActionS, unit_mass, nat);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    for (std::size_t k = 0; k < line.interior().size(); ++k)
        CHECK_THAT(res.path.interior()[k],
                   Catch::Matchers::WithinAbs(line.interior()[k], 1e-12));
}

TEST_CASE("optimization is deterministic") {
    const auto zig = PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 16, nat);
    const auto a = optimize(zig, Objective::ActionS, unit_mass, nat);
    const auto b = optimize(zig, Objective::ActionS, unit_mass, nat);
    CHECK(a.iterations == b.iterations);
    CHECK(a.objective == b.objective);
    for (std::size_t k = 0; k < a.path.interior().size(); ++k)
        CHECK(a.path.interior()[k] == b.path.interior()[k]);
}

TEST_CASE("discretization error of the objective is second order") {
    // Fix a smooth non-extremal curve, sample it on N intervals, and compare
    // the discrete objective against the continuum action of the curve.
    const auto curve = Trajectory::from_expression(Expr::parse("0.5*t+0.2*sin(t)"), 0.0, 10.0,
                                                   nat);
    const double exact =
        relativistic_action(curve, unit_mass, nat, QuadratureSpec::adaptive()).value;
    auto discrete_err = [&](int n) {
        std::vector<double> interior(static_cast<std::size_t>(n) - 1);
        for (int k = 1; k < n; ++k)
            interior[k - 1] = curve.position_at(10.0 * k / n);
        const PathVariable pv(0.0, curve.position_at(0.0), 10.0, curve.position_at(10.0),
                              interior, nat);
        return std::abs(discrete_objective(pv, Objective::ActionS, unit_mass, nat) - exact);
    };
    const double order = std::log2(discrete_err(32) / discrete_err(64));
    CHECK(order >= 1.8);
    CHECK(order <= 2.5);
}

TEST_CASE("optimized path exports as a csv-ready trajectory") {
    const auto res = optimize(PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 16, nat),
                              Objective::ActionS, unit_mass, nat);
    const auto samples = res.path.samples();
    REQUIRE(samples.size() == 17);
    const auto tr = Trajectory::from_samples(samples, nat);
    CHECK_THAT(tr.velocity_at(5.0), Catch::Matchers::WithinAbs(0.6, 1e-4));
}
