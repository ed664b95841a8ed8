#pragma once

// Action and area functionals for a point particle on a 1-D world line:
//
//   de Broglie radius      Lambda_B = h / (2 pi m v), m the speed-dependent mass
//   swept area (temporal)  A = (h/m0) * Int sqrt(1 - v^2/c^2) dt
//   swept area (spatial)   A = Int h/(m v) dx, monotone x(t) only
//   relativistic action    S = -m0 c^2 * Int sqrt(1 - v^2/c^2) dt
//   world-line length      L = c * Int sqrt(1 - v^2/c^2) dt
//   Nambu-Goto area        Sigma = Int sqrt((Xdot.X')^2 - Xdot^2 X'^2) dsigma dtau
//
// The identity under test: |S| * h = m0^2 c^2 * A, i.e. |S| = h/lambda^2 * A
// with lambda the Compton length. Signed S is kept; the identity is stated on
// magnitudes because the two integrals above fix S = -(m0^2 c^2 / h) A.
// The temporal form is canonical (regular at v = 0); the spatial form is the
// independent cross-check and needs min |v| above a floor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "worldline/errors.hpp"
#include "worldline/format.hpp"
#include "worldline/quadrature.hpp"
#include "worldline/trajectory.hpp"
#include "worldline/units.hpp"
#include "worldline/worldsheet.hpp"

namespace worldline {

inline constexpr double kDefaultVFloorFraction = 1e-3;  // of c, for the spatial form

// h / (2 pi m v); undefined at v = 0 (infinite radius).
inline double de_broglie_length(const Particle& p, double v, const UnitSystem& u) {
    if (v == 0.0) throw InputError("zero-velocity De Broglie radius is undefined");
    const double m = relativistic_mass(p, v, u);  // enforces |v| < c
    return u.h() / (2.0 * M_PI * m * std::abs(v));
}

namespace func_detail {

// Integrate f over a list of breakpoints, one quadrature per cell. Sampled
// trajectories are only piecewise-smooth; asking the adaptive rule to span
// interpolation kinks lets panel aliasing fool its error estimate.
template <class F>
FunctionalResult integrate_piecewise(F&& f, const std::vector<double>& breaks,
                                     const QuadratureSpec& q) {
    FunctionalResult total;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const FunctionalResult r = integrate_1d(f, breaks[k], breaks[k + 1], q);
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
        total.converged = total.converged && r.converged;
    }
    return total;
}

template <class F>
FunctionalResult integrate_over_time(const Trajectory& tr, F&& f, const QuadratureSpec& q) {
    if (!tr.is_sampled() || !q.is_adaptive())
        return integrate_1d(f, tr.t_start(), tr.t_end(), q);
    std::vector<double> breaks;
    breaks.reserve(tr.samples().size());
    for (const auto& s : tr.samples()) breaks.push_back(s.t);
    return integrate_piecewise(f, breaks, q);
}

// Each functional integrates its own physical integrand rather than sharing
// a factored proper-time core, so the action-area residual measures real
// quadrature noise instead of cancelling algebraically.
inline FunctionalResult proper_time_integral(const Trajectory& tr, const UnitSystem& u,
                                             const QuadratureSpec& q, double scale) {
    return integrate_over_time(
        tr, [&tr, &u, scale](double t) { return scale * proper_time_rate(tr.velocity_at(t), u); },
        q);
}

}  // namespace func_detail

inline FunctionalResult swept_area_temporal(const Trajectory& tr, const Particle& p,
                                            const UnitSystem& u, const QuadratureSpec& q) {
    return func_detail::proper_time_integral(tr, u, q, u.h() / p.rest_mass());
}

inline FunctionalResult relativistic_action(const Trajectory& tr, const Particle& p,
                                            const UnitSystem& u, const QuadratureSpec& q) {
    return func_detail::proper_time_integral(tr, u, q, -p.rest_mass() * u.c() * u.c());
}

inline FunctionalResult worldline_length(const Trajectory& tr, const UnitSystem& u,
                                         const QuadratureSpec& q) {
    return func_detail::proper_time_integral(tr, u, q, u.c());
}

namespace func_detail {

// t with x(t) = target, by bisection on the (monotone) position. Terminates
// when the bracket collapses to adjacent doubles.
inline double invert_position(const Trajectory& tr, double target) {
    double a = tr.t_start();
    double b = tr.t_end();
    double fa = tr.position_at(a) - target;
    double fb = tr.position_at(b) - target;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) {
        // Quadrature abscissae live inside [x(t_start), x(t_end)]; landing
        // here means the bracket failed by round-off at an endpoint.
        return std::abs(fa) <= std::abs(fb) ? a : b;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double fm = tr.position_at(mid) - target;
        if (fm == 0.0) return mid;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace func_detail

// Eq-4-style area: integrate h/(m v) over x between the endpoint positions.
// Requires a monotone trajectory with min |v| >= v_floor_fraction * c.
inline FunctionalResult swept_area_spatial(const Trajectory& tr, const Particle& p,
                                           const UnitSystem& u, const QuadratureSpec& q,
                                           double v_floor_fraction = kDefaultVFloorFraction) {
    if (!tr.is_monotone()) throw InputError("non-monotone trajectory");
    const double v_floor = v_floor_fraction * u.c();
    const double v_min = tr.min_abs_velocity();
    if (v_min < v_floor)
        throw InputError("velocity below v_floor: min |v| = " + format_double(v_min) +
                         " < " + format_double(v_floor));
    const double xa = tr.position_at(tr.t_start());
    const double xb = tr.position_at(tr.t_end());
    std::vector<double> breaks;
    if (tr.is_sampled() && q.is_adaptive()) {
        for (const auto& s : tr.samples()) breaks.push_back(s.x);
        if (breaks.front() > breaks.back()) std::reverse(breaks.begin(), breaks.end());
    } else {
        breaks = {std::min(xa, xb), std::max(xa, xb)};
    }
    return func_detail::integrate_piecewise(
        [&](double x) {
            const double t = func_detail::invert_position(tr, x);
            const double v = tr.velocity_at(t);
            return u.h() / (relativistic_mass(p, v, u) * std::abs(v));
        },
        breaks, q);
}

// --- Nambu-Goto --------------------------------------------------------------

inline constexpr double kRadicandClamp = -1e-12;  // round-off tolerance at null nodes

namespace func_detail {

inline double nambu_goto_integrand(const FourVector& dtau, const FourVector& dsigma,
                                   double tau, double sigma) {
    const double cross = minkowski_dot(dtau, dsigma);
    const double radicand =
        cross * cross - minkowski_dot(dtau, dtau) * minkowski_dot(dsigma, dsigma);
    if (radicand < kRadicandClamp)
        throw InputError("spacelike or degenerate worldsheet: radicand " +
                         format_double(radicand) + " at (tau=" + format_double(tau) +
                         ", sigma=" + format_double(sigma) + ")");
    return std::sqrt(std::max(radicand, 0.0));
}

// Second-order finite-difference tangent along one grid axis.
inline FourVector grid_axis_derivative(const Worldsheet& ws, std::size_t i, std::size_t j,
                                       bool along_tau) {
    const auto& coords = along_tau ? ws.grid_taus() : ws.grid_sigmas();
    const std::size_t n = coords.size();
    const std::size_t k = along_tau ? i : j;
    auto node = [&](std::size_t m) -> const FourVector& {
        return along_tau ? ws.grid_node(m, j) : ws.grid_node(i, m);
    };
    FourVector out{};
    if (k == 0) {
        const double h0 = coords[1] - coords[0], h1 = coords[2] - coords[1];
        for (int c = 0; c < 4; ++c) {
            const double d0 = (node(1)[c] - node(0)[c]) / h0;
            const double d1 = (node(2)[c] - node(1)[c]) / h1;
            out[c] = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        }
    } else if (k + 1 == n) {
        const double h0 = coords[n - 1] - coords[n - 2], h1 = coords[n - 2] - coords[n - 3];
        for (int c = 0; c < 4; ++c) {
            const double d0 = (node(n - 1)[c] - node(n - 2)[c]) / h0;
            const double d1 = (node(n - 2)[c] - node(n - 3)[c]) / h1;
            out[c] = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        }
    } else {
        const double hl = coords[k] - coords[k - 1], hr = coords[k + 1] - coords[k];
        for (int c = 0; c < 4; ++c) {
            const double dl = (node(k)[c] - node(k - 1)[c]) / hl;
            const double dr = (node(k + 1)[c] - node(k)[c]) / hr;
            out[c] = (hr * dl + hl * dr) / (hl + hr);
        }
    }
    return out;
}

inline double trapezoid_weight(const std::vector<double>& coords, std::size_t k) {
    const double left = k == 0 ? 0.0 : coords[k] - coords[k - 1];
    const double right = k + 1 == coords.size() ? 0.0 : coords[k + 1] - coords[k];
    return 0.5 * (left + right);
}

inline double grid_area_pass(const Worldsheet& ws, const std::vector<std::size_t>& ii,
                             const std::vector<std::size_t>& jj,
                             const std::vector<std::vector<double>>& integrand) {
    std::vector<double> taus(ii.size()), sigmas(jj.size());
    for (std::size_t a = 0; a < ii.size(); ++a) taus[a] = ws.grid_taus()[ii[a]];
    for (std::size_t b = 0; b < jj.size(); ++b) sigmas[b] = ws.grid_sigmas()[jj[b]];
    double sum = 0.0;
    for (std::size_t a = 0; a < ii.size(); ++a) {
        const double wi = trapezoid_weight(taus, a);
        for (std::size_t b = 0; b < jj.size(); ++b)
            sum += wi * trapezoid_weight(sigmas, b) * integrand[ii[a]][jj[b]];
    }
    return sum;
}

inline std::vector<std::size_t> coarse_indices(std::size_t n) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; k += 2) idx.push_back(k);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

inline FunctionalResult grid_nambu_goto_area(const Worldsheet& ws) {
    const std::size_t nt = ws.grid_taus().size();
    const std::size_t ns = ws.grid_sigmas().size();
    std::vector<std::vector<double>> integrand(nt, std::vector<double>(ns));
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < ns; ++j) {
            const FourVector dtau = grid_axis_derivative(ws, i, j, true);
            const FourVector dsigma = grid_axis_derivative(ws, i, j, false);
            integrand[i][j] = nambu_goto_integrand(dtau, dsigma, ws.grid_taus()[i],
                                                   ws.grid_sigmas()[j]);
        }
    std::vector<std::size_t> all_i(nt), all_j(ns);
    for (std::size_t i = 0; i < nt; ++i) all_i[i] = i;
    for (std::size_t j = 0; j < ns; ++j) all_j[j] = j;
    FunctionalResult r;
    r.value = grid_area_pass(ws, all_i, all_j, integrand);
    const double coarse =
        grid_area_pass(ws, coarse_indices(nt), coarse_indices(ns), integrand);
    r.abs_error_estimate = std::abs(r.value - coarse) / 3.0;  // trapezoid Richardson
    r.evaluations = static_cast<std::int64_t>(nt * ns);
    return r;
}

}  // namespace func_detail

inline FunctionalResult nambu_goto_area(const Worldsheet& ws, const QuadratureSpec& q) {
    if (ws.is_grid()) return func_detail::grid_nambu_goto_area(ws);
    return integrate_2d(
        [&](double tau, double sigma) {
            FourVector dtau, dsigma;
            ws.tangents_at(tau, sigma, dtau, dsigma);
            return func_detail::nambu_goto_integrand(dtau, dsigma, tau, sigma);
        },
        ws.domain(), q);
}

inline FunctionalResult nambu_goto_action(const Worldsheet& ws, double tension,
                                          const QuadratureSpec& q) {
    if (!(tension > 0.0) || !std::isfinite(tension))
        throw InputError("string tension must be positive");
    FunctionalResult r = nambu_goto_area(ws, q);
    r.value *= tension;
    r.abs_error_estimate *= tension;
    return r;
}

// --- the identity ------------------------------------------------------------

struct ActionReport {
    double action_S = 0.0;
    double area_A = 0.0;
    double constant_k = 0.0;
    double worldline_length_L = 0.0;
    double identity_residual = std::numeric_limits<double>::quiet_NaN();
    bool residual_defined = false;
    double action_abs_error = 0.0;
    double area_abs_error = 0.0;
    std::int64_t evaluations = 0;
    bool converged = true;
};

// Evaluates S, A, L and the dimensionless residual | |S| h / (m0^2 c^2 A) - 1 |.
// S and A come from separate quadratures so the residual is a real
// cross-check, not an algebraic tautology.
inline ActionReport verify_identity(const Trajectory& tr, const Particle& p,
                                    const UnitSystem& u, const QuadratureSpec& q) {
    const FunctionalResult S = relativistic_action(tr, p, u, q);
    const FunctionalResult A = swept_area_temporal(tr, p, u, q);
    const FunctionalResult L = worldline_length(tr, u, q);
    ActionReport rep;
    rep.action_S = S.value;
    rep.area_A = A.value;
    rep.constant_k = proportionality_constant(p, u);
    rep.worldline_length_L = L.value;
    rep.action_abs_error = S.abs_error_estimate;
    rep.area_abs_error = A.abs_error_estimate;
    rep.evaluations = S.evaluations + A.evaluations + L.evaluations;
    rep.converged = S.converged && A.converged && L.converged;
    if (A.value > 0.0) {
        rep.identity_residual = std::abs(std::abs(S.value) / (rep.constant_k * A.value) - 1.0);
        rep.residual_defined = true;
    }
    return rep;
}

inline std::string report_key_value_block(const ActionReport& r) {
    std::string out;
    out += "action_S=" + format_double(r.action_S) + "\n";
    out += "area_A=" + format_double(r.area_A) + "\n";
    out += "constant_k=" + format_double(r.constant_k) + "\n";
    out += "worldline_length_L=" + format_double(r.worldline_length_L) + "\n";
    out += "identity_residual=";
    out += r.residual_defined ? format_double(r.identity_residual) : "undefined";
    out += "\n";
    return out;
}

inline std::string report_csv_header() {
    return "action_S,area_A,constant_k,worldline_length_L,identity_residual";
}

inline std::string report_csv_row(const ActionReport& r) {
    std::string out = format_double(r.action_S) + "," + format_double(r.area_A) + "," +
                      format_double(r.constant_k) + "," +
                      format_double(r.worldline_length_L) + ",";
    out += r.residual_defined ? format_double(r.identity_residual) : "undefined";
    return out;
}

}  // namespace worldline
