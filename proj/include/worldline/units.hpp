#pragma once

#include <cmath>

#include "worldline/errors.hpp"

namespace worldline {

enum class UnitMode { SI, Natural };

// CODATA 2018 exact values.
inline constexpr double kPlanckSI     = 6.62607015e-34;  // J s
inline constexpr double kLightSpeedSI = 299792458.0;     // m/s

// Planck constant h, light speed c, and the mode they live in. Natural mode
// pins h = c = 1 exactly; SI mode defaults to CODATA but accepts overrides.
// Speeds are absolute (m/s) in SI mode and fractions of c in Natural mode.
class UnitSystem {
public:
    static UnitSystem natural() { return UnitSystem(1.0, 1.0, UnitMode::Natural); }
    static UnitSystem si() { return UnitSystem(kPlanckSI, kLightSpeedSI, UnitMode::SI); }
    static UnitSystem si(double h, double c) { return UnitSystem(h, c, UnitMode::SI); }

    double h() const { return h_; }
    double c() const { return c_; }
    UnitMode mode() const { return mode_; }

private:
    UnitSystem(double h, double c, UnitMode mode) : h_(h), c_(c), mode_(mode) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw InputError("Planck constant must be positive and finite");
        if (!(c > 0.0) || !std::isfinite(c))
            throw InputError("light speed must be positive and finite");
    }

    double h_;
    double c_;
    UnitMode mode_;
};

// Point particle; its only property is the rest mass (> 0).
class Particle {
public:
    explicit Particle(double rest_mass) : rest_mass_(rest_mass) {
        if (!(rest_mass > 0.0) || !std::isfinite(rest_mass))
            throw InputError("rest mass must be positive and finite");
    }

    double rest_mass() const { return rest_mass_; }

private:
    double rest_mass_;
};

// sqrt(1 - v^2/c^2), computed as (1-b)(1+b) to keep precision near |v| = c.
inline double proper_time_rate(double v, const UnitSystem& u) {
    const double beta = v / u.c();
    if (!(std::abs(beta) < 1.0))
        throw InputError("speed limit violated: |v| >= c");
    return std::sqrt((1.0 - beta) * (1.0 + beta));
}

inline double lorentz_gamma(double v, const UnitSystem& u) {
    return 1.0 / proper_time_rate(v, u);
}

// h / (m0 c)
inline double compton_length(const Particle& p, const UnitSystem& u) {
    return u.h() / (p.rest_mass() * u.c());
}

// m0 / sqrt(1 - v^2/c^2); exact m0 at v = 0.
inline double relativistic_mass(const Particle& p, double v, const UnitSystem& u) {
    return p.rest_mass() * lorentz_gamma(v, u);
}

// m0^2 c^2 / h, the action-per-area constant; equals h / compton_length^2.
inline double proportionality_constant(const Particle& p, const UnitSystem& u) {
    const double m0 = p.rest_mass();
    return m0 * m0 * u.c() * u.c() / u.h();
}

}  // namespace worldline
