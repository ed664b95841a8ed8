// Minimize the discrete action and maximize the discrete swept area from the
// same zig-zag start; both land on the straight line.

#include <cstdio>

#include "worldline/worldline.hpp"

using namespace worldline;

int main() {
    const auto u = UnitSystem::natural();
    const Particle p(1.0);
    const auto start = PathVariable::zigzag(0.0, 0.0, 10.0, 6.0, 32, u);

    for (auto which : {Objective::ActionS, Objective::AreaA}) {
        const auto res = optimize(start, which, p, u);
        std::printf("%s: objective=%.12g iterations=%lld gradient_norm=%.3g converged=%d\n",
                    which == Objective::ActionS ? "action" : "area  ", res.objective,
                    static_cast<long long>(res.iterations), res.gradient_norm,
                    res.converged ? 1 : 0);
        std::printf("  midpoint x(5) = %.12g (straight line: 3)\n",
                    res.path.node_x(res.path.intervals() / 2));
    }
    return 0;
}
