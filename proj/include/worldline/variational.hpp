#pragma once

// Fixed-endpoint discrete path optimization. A path is a uniform t-grid with
// movable interior nodes; the two objectives are the per-segment
// constant-velocity discretizations of the relativistic action and of the
// swept area. They are exact negative multiples of each other,
//
//   AreaA = -(h / (m0^2 c^2)) * ActionS,
//
// so their stationary paths coincide; the optimizer minimizes ActionS or
// -AreaA with projected gradient descent (Armijo backtracking).

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "worldline/errors.hpp"
#include "worldline/format.hpp"
#include "worldline/trajectory.hpp"
#include "worldline/units.hpp"

namespace worldline {

enum class Objective { ActionS, AreaA };

// Uniform-grid path with pinned endpoints and a per-segment speed bound
// |dx/dt| <= v_max (strict at construction; the optimizer's projection keeps
// iterates strictly inside).
class PathVariable {
public:
    static constexpr double kDefaultVMaxFraction = 0.99;  // of c

    PathVariable(double t_start, double x_start, double t_end, double x_end,
                 std::vector<double> interior, const UnitSystem& u,
                 double v_max_fraction = kDefaultVMaxFraction)
        : units_(u),
          t_start_(t_start),
          x_start_(x_start),
          t_end_(t_end),
          x_end_(x_end),
          interior_(std::move(interior)),
          v_max_(v_max_fraction * u.c()) {
        if (!(t_start_ < t_end_)) throw InputError("path needs t_start < t_end");
        if (interior_.size() < 3)
            throw InputError("path needs at least 4 intervals (3 interior nodes)");
        if (!(v_max_fraction > 0.0) || !(v_max_fraction < 1.0))
            throw InputError("v_max must lie strictly between 0 and c");
        for (double x : interior_)
            if (!std::isfinite(x)) throw InputError("path nodes must be finite");
        for (std::size_t k = 0; k <= interior_.size(); ++k)
            if (!(std::abs(segment_velocity(k)) < v_max_))
                throw InputError("infeasible path: |dx/dt| >= v_max on segment " +
                                 std::to_string(k));
    }

    static PathVariable straight_line(double t_start, double x_start, double t_end,
                                      double x_end, int intervals, const UnitSystem& u,
                                      double v_max_fraction = kDefaultVMaxFraction) {
        std::vector<double> interior(check_intervals(intervals) - 1);
        for (std::size_t k = 0; k < interior.size(); ++k) {
            const double s = static_cast<double>(k + 1) / intervals;
            interior[k] = x_start + (x_end - x_start) * s;
        }
        return PathVariable(t_start, x_start, t_end, x_end, std::move(interior), u,
                            v_max_fraction);
    }

    // Straight line with interior nodes pushed alternately up and down; the
    // amplitude keeps every segment inside the speed bound.
    static PathVariable zigzag(double t_start, double x_start, double t_end, double x_end,
                               int intervals, const UnitSystem& u,
                               double v_max_fraction = kDefaultVMaxFraction) {
        check_intervals(intervals);
        const double dt = (t_end - t_start) / intervals;
        const double v_line = (x_end - x_start) / (t_end - t_start);
        const double v_max = v_max_fraction * u.c();
        if (!(std::abs(v_line) < v_max)) throw InputError("infeasible endpoints: |dx/dt| >= v_max");
        const double amp = 0.25 * (v_max - std::abs(v_line)) * dt;
        std::vector<double> interior(static_cast<std::size_t>(intervals) - 1);
        for (std::size_t k = 0; k < interior.size(); ++k) {
            const double s = static_cast<double>(k + 1) / intervals;
            interior[k] = x_start + (x_end - x_start) * s + (k % 2 == 0 ? amp : -amp);
        }
        return PathVariable(t_start, x_start, t_end, x_end, std::move(interior), u,
                            v_max_fraction);
    }

    const UnitSystem& unit_system() const { return units_; }
    std::size_t intervals() const { return interior_.size() + 1; }
    double dt() const { return (t_end_ - t_start_) / intervals(); }
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    double x_start() const { return x_start_; }
    double x_end() const { return x_end_; }
    double v_max() const { return v_max_; }
    const std::vector<double>& interior() const { return interior_; }

    double node_t(std::size_t k) const {
        return k == intervals() ? t_end_ : t_start_ + dt() * k;
    }

    double node_x(std::size_t k) const {
        if (k == 0) return x_start_;
        if (k == intervals()) return x_end_;
        return interior_[k - 1];
    }

    // (x_{k+1} - x_k) / dt for segment k in [0, intervals).
    double segment_velocity(std::size_t k) const {
        return (node_x(k + 1) - node_x(k)) / dt();
    }

    PathVariable with_interior(std::vector<double> interior) const {
        return PathVariable(t_start_, x_start_, t_end_, x_end_, std::move(interior), units_,
                            v_max_ / units_.c());
    }

    std::vector<TrajectorySample> samples() const {
        std::vector<TrajectorySample> out(intervals() + 1);
        for (std::size_t k = 0; k <= intervals(); ++k) out[k] = {node_t(k), node_x(k)};
        return out;
    }

private:
    static int check_intervals(int intervals) {
        if (intervals < 4) throw InputError("path needs at least 4 intervals");
        return intervals;
    }

    UnitSystem units_;
    double t_start_, x_start_, t_end_, x_end_;
    std::vector<double> interior_;
    double v_max_;
};

namespace var_detail {

// Per-segment objective density g(v) and its derivative. ActionS uses
// g = -m0 c^2 sqrt(1 - v^2/c^2) (so g' is the relativistic momentum);
// AreaA uses g = (h/m0) sqrt(1 - v^2/c^2).
inline double density(Objective which, double v, const Particle& p, const UnitSystem& u) {
    const double rate = proper_time_rate(v, u);
    if (which == Objective::ActionS) return -p.rest_mass() * u.c() * u.c() * rate;
    return u.h() / p.rest_mass() * rate;
}

inline double density_derivative(Objective which, double v, const Particle& p,
                                 const UnitSystem& u) {
    const double gamma = lorentz_gamma(v, u);
    if (which == Objective::ActionS) return p.rest_mass() * gamma * v;
    return -u.h() / (p.rest_mass() * u.c() * u.c()) * gamma * v;
}

}  // namespace var_detail

// Sum over segments of g(v_k) dt.
inline double discrete_objective(const PathVariable& pv, Objective which, const Particle& p,
                                 const UnitSystem& u) {
    double sum = 0.0;
    for (std::size_t k = 0; k < pv.intervals(); ++k)
        sum += var_detail::density(which, pv.segment_velocity(k), p, u);
    return sum * pv.dt();
}

// d(objective)/d(x_k) for the interior nodes: g'(v_{k-1}) - g'(v_k).
inline std::vector<double> objective_gradient(const PathVariable& pv, Objective which,
                                              const Particle& p, const UnitSystem& u) {
    for (std::size_t k = 0; k < pv.intervals(); ++k)
        if (!(std::abs(pv.segment_velocity(k)) < pv.v_max()))
            throw InputError("segment " + std::to_string(k) +
                             " at the speed bound: sub-gradient undefined");
    std::vector<double> grad(pv.intervals() - 1);
    for (std::size_t k = 1; k < pv.intervals(); ++k)
        grad[k - 1] = var_detail::density_derivative(which, pv.segment_velocity(k - 1), p, u) -
                      var_detail::density_derivative(which, pv.segment_velocity(k), p, u);
    return grad;
}

struct OptimizeSettings {
    double grad_tol = 1e-10;
    std::int64_t max_iter = 100000;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double grow = 2.0;
    int max_backtracks = 60;
    bool record_history = false;
};

struct OptimizeResult {
    PathVariable path;
    double objective = 0.0;       // discrete_objective of `path` for the chosen target
    std::int64_t iterations = 0;  // accepted descent steps
    double gradient_norm = 0.0;   // of the minimized objective, at exit
    bool converged = false;
    std::vector<double> history;  // minimized objective per accepted step
};

namespace var_detail {

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double norm_inf(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Clamp sweeps against both pinned endpoints until every segment satisfies
// the bound; the tiny margin keeps iterates strictly feasible.
inline void project(std::vector<double>& x, const PathVariable& shape) {
    const double bound = shape.v_max() * shape.dt() * (1.0 - 1e-9);
    const std::size_t n = x.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool changed = false;
        auto clamp_to = [&](double& value, double anchor) {
            const double lo = anchor - bound, hi = anchor + bound;
            if (value < lo) { value = lo; changed = true; }
            if (value > hi) { value = hi; changed = true; }
        };
        for (std::size_t k = 0; k < n; ++k) clamp_to(x[k], k == 0 ? shape.x_start() : x[k - 1]);
        for (std::size_t k = n; k-- > 0;) clamp_to(x[k], k + 1 == n ? shape.x_end() : x[k + 1]);
        if (!changed) return;
    }
}

}  // namespace var_detail

// Projected gradient descent with Armijo backtracking. Minimizes ActionS
// directly or -AreaA (equivalently maximizes the area); deterministic for
// identical inputs and settings.
inline OptimizeResult optimize(const PathVariable& initial, Objective which,
                               const Particle& p, const UnitSystem& u,
                               const OptimizeSettings& settings = {}) {
    const double sign = which == Objective::ActionS ? 1.0 : -1.0;
    auto value_of = [&](const PathVariable& pv) {
        return sign * discrete_objective(pv, which, p, u);
    };
    auto gradient_of = [&](const PathVariable& pv) {
        std::vector<double> g = objective_gradient(pv, which, p, u);
        if (sign < 0.0)
            for (double& gi : g) gi = -gi;
        return g;
    };

    OptimizeResult res{initial, 0.0, 0, 0.0, false, {}};
    double f = value_of(res.path);
    std::vector<double> grad = gradient_of(res.path);
    double gnorm = var_detail::norm2(grad);

    // Trial step: Barzilai-Borwein from the last accepted move, which probes
    // the local curvature; the Armijo test keeps descent strictly monotone.
    // The very first step only has the x-span to set a scale.
    const double span = std::abs(initial.x_end() - initial.x_start()) +
                        initial.v_max() * (initial.t_end() - initial.t_start());
    std::vector<double> prev_interior, prev_grad;
    double alpha_fallback = 0.0;

    while (res.iterations < settings.max_iter && gnorm > settings.grad_tol) {
        double alpha = 0.0;
        if (!prev_interior.empty()) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < grad.size(); ++k) {
                const double s = res.path.interior()[k] - prev_interior[k];
                ss += s * s;
                sy += s * (grad[k] - prev_grad[k]);
            }
            if (sy > 0.0 && ss > 0.0) alpha = ss / sy;
        }
        if (alpha == 0.0)
            alpha = alpha_fallback > 0.0 ? alpha_fallback * settings.grow
                                         : 0.1 * span / var_detail::norm_inf(grad);

        prev_interior = res.path.interior();
        prev_grad = grad;

        bool accepted = false;
        for (int bt = 0; bt < settings.max_backtracks; ++bt) {
            std::vector<double> trial = res.path.interior();
            for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= alpha * grad[k];
            var_detail::project(trial, res.path);
            double directional = 0.0;
            for (std::size_t k = 0; k < trial.size(); ++k)
                directional += grad[k] * (trial[k] - res.path.interior()[k]);
            if (directional < 0.0) {
                PathVariable candidate = res.path.with_interior(std::move(trial));
                const double f_trial = value_of(candidate);
                // Once the demanded decrease drops below the evaluation noise
                // of f, the Armijo test is uninformative; the analytic
                // gradient still resolves progress, so accept on its norm.
                const double f_noise =
                    64.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
                const bool in_noise = settings.armijo_c * -directional <= f_noise;
                bool accept = false;
                if (!in_noise) {
                    accept = f_trial <= f + settings.armijo_c * directional;
                } else {
                    accept = var_detail::norm2(gradient_of(candidate)) < gnorm;
                }
                if (accept) {
                    res.path = std::move(candidate);
                    f = std::min(f, f_trial);
                    accepted = true;
                    alpha_fallback = alpha;
                    break;
                }
            }
            alpha *= settings.shrink;
        }
        if (!accepted) break;  // line search stalled at this accuracy

        ++res.iterations;
        if (settings.record_history) res.history.push_back(f);
        grad = gradient_of(res.path);
        gnorm = var_detail::norm2(grad);
    }

    res.gradient_norm = gnorm;
    res.converged = gnorm <= settings.grad_tol;
    res.objective = discrete_objective(res.path, which, p, u);
    return res;
}

}  // namespace worldline
