// Library walk-through: evaluate the action, the swept area, and their
// proportionality on a curved trajectory, in both unit systems.

#include <iostream>

#include "worldline/worldline.hpp"

using namespace worldline;

int main() {
    const QuadratureSpec quad;

    // Natural units: x(t) = 0.5 t + 0.2 sin t on [0, 10], unit rest mass.
    {
        const auto u = UnitSystem::natural();
        const auto tr = Trajectory::from_expression(Expr::parse("0.5*t+0.2*sin(t)"), 0.0,
                                                    10.0, u);
        const auto rep = verify_identity(tr, Particle(1.0), u, quad);
        std::cout << "# natural units\n" << report_key_value_block(rep);
    }

    // SI: an electron crossing at half the speed of light for 10 ns.
    {
        const auto u = UnitSystem::si();
        const auto tr = Trajectory::from_expression(Expr::parse("0.5*c*t"), 0.0, 1e-8, u);
        const Particle electron(9.1093837015e-31);
        const auto rep = verify_identity(tr, electron, u, quad);
        std::cout << "# SI, electron at 0.5c\n" << report_key_value_block(rep);
        std::cout << "compton_length=" << format_double(compton_length(electron, u)) << "\n";
        std::cout << "de_broglie_length="
                  << format_double(de_broglie_length(electron, 0.5 * u.c(), u)) << "\n";
    }
    return 0;
}
