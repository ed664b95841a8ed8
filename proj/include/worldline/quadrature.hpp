#pragma once

// 1-D adaptive / fixed-grid Simpson rules and a tensor-product 2-D rule.
// Everything is deterministic: the same inputs produce bit-identical results.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "worldline/errors.hpp"

namespace worldline {

// Value of an action/area/length evaluation together with its error estimate.
// `converged` is false when a tolerance-driven rule ran out of depth; the
// value is still the best available.
struct FunctionalResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool converged = true;
};

struct CompositeSimpson {
    int n_intervals = 64;  // even, >= 2
};

struct AdaptiveSimpson {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 40;
};

class QuadratureSpec {
public:
    QuadratureSpec() : method_(AdaptiveSimpson{}) {}

    static QuadratureSpec composite(int n_intervals) {
        if (n_intervals < 2 || n_intervals % 2 != 0)
            throw InputError("composite Simpson needs an even interval count >= 2");
        return QuadratureSpec(CompositeSimpson{n_intervals});
    }

    static QuadratureSpec adaptive(double abs_tol = 1e-12, double rel_tol = 1e-10,
                                   int max_depth = 40) {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw InputError("quadrature tolerances must be positive");
        if (max_depth < 1) throw InputError("max_depth must be >= 1");
        return QuadratureSpec(AdaptiveSimpson{abs_tol, rel_tol, max_depth});
    }

    bool is_adaptive() const { return std::holds_alternative<AdaptiveSimpson>(method_); }
    const AdaptiveSimpson& adaptive_params() const { return std::get<AdaptiveSimpson>(method_); }
    const CompositeSimpson& composite_params() const { return std::get<CompositeSimpson>(method_); }

private:
    explicit QuadratureSpec(CompositeSimpson m) : method_(m) {}
    explicit QuadratureSpec(AdaptiveSimpson m) : method_(m) {}
    std::variant<CompositeSimpson, AdaptiveSimpson> method_;
};

namespace quad_detail {

template <class F>
double sample(F& f, double x, std::int64_t& evals) {
    const double y = f(x);
    ++evals;
    if (!std::isfinite(y))
        throw NumericalError("non-finite integrand sample at x=" + std::to_string(x));
    return y;
}

inline double simpson(double h, double fa, double fm, double fb) {
    return (fa + 4.0 * fm + fb) * (h / 6.0);
}

template <class F>
void adaptive_step(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, FunctionalResult& out) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = sample(f, lm, out.evaluations);
    const double frm = sample(f, rm, out.evaluations);
    const double left = simpson(m - a, fa, flm, fm);
    const double right = simpson(b - m, fm, frm, fb);
    const double refined = left + right;
    const double err = (refined - whole) / 15.0;  // Richardson difference of nested rules
    if (std::abs(err) <= tol) {
        out.value += refined + err;
        out.abs_error_estimate += std::abs(err);
        return;
    }
    if (depth <= 0) {
        out.value += refined + err;
        out.abs_error_estimate += std::abs(err);
        out.converged = false;
        return;
    }
    adaptive_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    adaptive_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

template <class F>
double composite_simpson_1d(F& f, double a, double b, int n, std::int64_t& evals) {
    const double h = (b - a) / n;
    double s = sample(f, a, evals) + sample(f, b, evals);
    for (int i = 1; i < n; ++i) s += sample(f, a + i * h, evals) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Composite Simpson over a tensor grid with n intervals per axis.
template <class F2>
double composite_simpson_2d(F2& f, double a0, double b0, double a1, double b1, int n,
                            std::int64_t& evals) {
    const double h0 = (b0 - a0) / n;
    const double h1 = (b1 - a1) / n;
    auto weight = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a0 + i * h0;
        double row = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double y = a1 + j * h1;
            const double v = f(x, y);
            ++evals;
            if (!std::isfinite(v))
                throw NumericalError("non-finite integrand sample at (tau=" +
                                     std::to_string(x) + ", sigma=" + std::to_string(y) + ")");
            row += weight(j) * v;
        }
        s += weight(i) * row;
    }
    return s * h0 * h1 / 9.0;
}

}  // namespace quad_detail

template <class F>
FunctionalResult integrate_1d(F&& f, double a, double b, const QuadratureSpec& spec) {
    if (!(a < b)) throw InputError("integration bounds must satisfy a < b");
    FunctionalResult out;
    if (spec.is_adaptive()) {
        const auto& p = spec.adaptive_params();
        const double m = 0.5 * (a + b);
        const double fa = quad_detail::sample(f, a, out.evaluations);
        const double fm = quad_detail::sample(f, m, out.evaluations);
        const double fb = quad_detail::sample(f, b, out.evaluations);
        const double whole = quad_detail::simpson(b - a, fa, fm, fb);
        const double tol = std::max(p.abs_tol, p.rel_tol * std::abs(whole));
        quad_detail::adaptive_step(f, a, m, b, fa, fm, fb, whole, tol, p.max_depth, out);
    } else {
        const int n = spec.composite_params().n_intervals;
        // Value is the plain n-interval rule; the refinement only feeds the
        // error estimate, so the documented O(h^4) order stays observable.
        const double coarse = quad_detail::composite_simpson_1d(f, a, b, n, out.evaluations);
        const double fine = quad_detail::composite_simpson_1d(f, a, b, 2 * n, out.evaluations);
        out.value = coarse;
        out.abs_error_estimate = std::abs(fine - coarse) * (16.0 / 15.0);
    }
    return out;
}

struct ParamRect {
    double tau_min = 0.0, tau_max = 1.0;
    double sigma_min = 0.0, sigma_max = 1.0;
};

template <class F2>
FunctionalResult integrate_2d(F2&& f, const ParamRect& r, const QuadratureSpec& spec) {
    if (!(r.tau_min < r.tau_max) || !(r.sigma_min < r.sigma_max))
        throw InputError("parameter rectangle must have positive extent in tau and sigma");
    FunctionalResult out;
    if (spec.is_adaptive()) {
        const auto& p = spec.adaptive_params();
        // Tensor Simpson with uniform doubling; converged when the n vs 2n
        // Richardson difference meets tolerance. Node count is capped so a
        // hostile tolerance cannot allocate unbounded work.
        constexpr int kMaxIntervals = 2048;
        int n = 2;
        double prev = quad_detail::composite_simpson_2d(f, r.tau_min, r.tau_max, r.sigma_min,
                                                        r.sigma_max, n, out.evaluations);
        out.converged = false;
        for (int level = 0; level < p.max_depth && 2 * n <= kMaxIntervals; ++level) {
            n *= 2;
            const double fine = quad_detail::composite_simpson_2d(
                f, r.tau_min, r.tau_max, r.sigma_min, r.sigma_max, n, out.evaluations);
            const double err = std::abs(fine - prev) / 15.0;
            out.value = fine;
            out.abs_error_estimate = err;
            if (err <= std::max(p.abs_tol, p.rel_tol * std::abs(fine))) {
                out.converged = true;
                break;
            }
            prev = fine;
        }
    } else {
        const int n = spec.composite_params().n_intervals;
        const double coarse = quad_detail::composite_simpson_2d(f, r.tau_min, r.tau_max,
                                                                r.sigma_min, r.sigma_max, n,
                                                                out.evaluations);
        const double fine = quad_detail::composite_simpson_2d(f, r.tau_min, r.tau_max,
                                                              r.sigma_min, r.sigma_max, 2 * n,
                                                              out.evaluations);
        out.value = coarse;
        out.abs_error_estimate = std::abs(fine - coarse) * (16.0 / 15.0);
    }
    return out;
}

}  // namespace worldline
