#pragma once

// 1-D world lines x(t), either analytic (expression + domain) or sampled.
// Sampled sources interpolate with a shape-preserving (Fritsch-Carlson
// limited) cubic Hermite, so interpolation overshoot cannot manufacture
// |v| >= c where the data has none. Constructors reject any trajectory whose
// speed reaches c at a collocation point.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "worldline/errors.hpp"
#include "worldline/expr.hpp"
#include "worldline/format.hpp"
#include "worldline/units.hpp"

namespace worldline {

struct TrajectorySample {
    double t;
    double x;
};

namespace traj_detail {

// Node slopes: second-order finite differences (centered in the interior,
// one-sided at the ends), then Fritsch-Carlson monotonicity limiting. On
// locally monotone smooth data the limiter leaves the slopes untouched.
inline std::vector<double> limited_slopes(const std::vector<TrajectorySample>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> h(n - 1), d(n - 1), m(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = pts[k + 1].t - pts[k].t;
        d[k] = (pts[k + 1].x - pts[k].x) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k)
        m[k] = (h[k] * d[k - 1] + h[k - 1] * d[k]) / (h[k - 1] + h[k]);
    m[0] = ((2.0 * h[0] + h[1]) * d[0] - h[0] * d[1]) / (h[0] + h[1]);
    m[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * d[n - 2] - h[n - 2] * d[n - 3]) /
               (h[n - 2] + h[n - 3]);

    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (d[k] == 0.0) {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        double alpha = m[k] / d[k];
        double beta = m[k + 1] / d[k];
        if (alpha < 0.0) { m[k] = 0.0; alpha = 0.0; }
        if (beta < 0.0) { m[k + 1] = 0.0; beta = 0.0; }
        const double r2 = alpha * alpha + beta * beta;
        if (r2 > 9.0) {
            const double scale = 3.0 / std::sqrt(r2);
            m[k] = scale * alpha * d[k];
            m[k + 1] = scale * beta * d[k];
        }
    }
    return m;
}

}  // namespace traj_detail

class Trajectory {
public:
    static constexpr int kDefaultCollocation = 1024;

    static Trajectory from_expression(Expr position, double t_start, double t_end,
                                      const UnitSystem& u,
                                      int collocation = kDefaultCollocation) {
        if (!(t_start < t_end)) throw InputError("trajectory needs t_start < t_end");
        Trajectory tr(u, t_start, t_end);
        tr.velocity_expr_ = position.derivative();
        tr.position_expr_ = std::move(position);
        tr.check_speed_limit(collocation);
        return tr;
    }

    static Trajectory from_samples(std::vector<TrajectorySample> points, const UnitSystem& u,
                                   int collocation = kDefaultCollocation) {
        if (points.size() < 3) throw InputError("sampled trajectory needs at least 3 points");
        for (std::size_t i = 0; i + 1 < points.size(); ++i)
            if (!(points[i].t < points[i + 1].t))
                throw InputError("sample times must be strictly increasing (row " +
                                 std::to_string(i + 2) + ")");
        for (const auto& p : points)
            if (!std::isfinite(p.t) || !std::isfinite(p.x))
                throw InputError("sample values must be finite");
        Trajectory tr(u, points.front().t, points.back().t);
        tr.slopes_ = traj_detail::limited_slopes(points);
        tr.points_ = std::move(points);
        tr.check_speed_limit(collocation);
        return tr;
    }

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    const UnitSystem& unit_system() const { return units_; }
    bool is_sampled() const { return !points_.empty(); }
    const std::vector<TrajectorySample>& samples() const { return points_; }

    double position_at(double t) const {
        check_domain(t);
        if (position_expr_) return position_expr_->evaluate(t, units_);
        const auto [k, s, h] = locate(t);
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return points_[k].x * h00 + h * slopes_[k] * h10 + points_[k + 1].x * h01 +
               h * slopes_[k + 1] * h11;
    }

    double velocity_at(double t) const {
        check_domain(t);
        if (velocity_expr_) return velocity_expr_->evaluate(t, units_);
        const auto [k, s, h] = locate(t);
        const double d00 = 6.0 * s * (s - 1.0);
        const double d10 = (3.0 * s - 1.0) * (s - 1.0);
        const double d01 = -d00;
        const double d11 = s * (3.0 * s - 2.0);
        return points_[k].x * d00 / h + slopes_[k] * d10 + points_[k + 1].x * d01 / h +
               slopes_[k + 1] * d11;
    }

    // True iff v keeps one strict sign across the collocation grid.
    bool is_monotone(int collocation = kDefaultCollocation) const {
        int sign = 0;
        for (int i = 0; i < collocation; ++i) {
            const double v = velocity_at(grid_point(i, collocation));
            if (v == 0.0) return false;
            const int s = v > 0.0 ? 1 : -1;
            if (sign == 0) sign = s;
            else if (s != sign) return false;
        }
        return true;
    }

    double min_abs_velocity(int collocation = kDefaultCollocation) const {
        double lo = std::abs(velocity_at(t_start_));
        for (int i = 1; i < collocation; ++i)
            lo = std::min(lo, std::abs(velocity_at(grid_point(i, collocation))));
        return lo;
    }

    // Uniform n-point resampling; analytic sources are evaluated exactly,
    // sampled sources interpolated.
    Trajectory resampled(int n) const {
        if (n < 3) throw InputError("resample needs at least 3 points");
        std::vector<TrajectorySample> pts(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double t = grid_point(i, n);
            pts[static_cast<std::size_t>(i)] = {t, position_at(t)};
        }
        return from_samples(std::move(pts), units_);
    }

private:
    Trajectory(const UnitSystem& u, double t0, double t1)
        : units_(u), t_start_(t0), t_end_(t1) {}

    void check_domain(double t) const {
        if (!(t >= t_start_) || !(t <= t_end_))
            throw InputError("t=" + format_double(t) + " outside trajectory domain [" +
                             format_double(t_start_) + ", " + format_double(t_end_) + "]");
    }

    double grid_point(int i, int n) const {
        return i + 1 == n ? t_end_ : t_start_ + (t_end_ - t_start_) * i / (n - 1);
    }

    // Interval index and normalized coordinate for a sampled lookup.
    std::tuple<std::size_t, double, double> locate(double t) const {
        auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double value, const TrajectorySample& p) {
                                       return value < p.t;
                                   });
        std::size_t k = static_cast<std::size_t>(it - points_.begin());
        if (k > 0) --k;
        if (k + 1 >= points_.size()) k = points_.size() - 2;
        const double h = points_[k + 1].t - points_[k].t;
        return {k, (t - points_[k].t) / h, h};
    }

    void check_speed_limit(int collocation) const {
        collocation = std::max(collocation, 3);
        for (int i = 0; i < collocation; ++i) {
            const double t = grid_point(i, collocation);
            if (!(std::abs(velocity_at(t)) < units_.c()))
                throw InputError("speed limit violated: |v| >= c at t=" + format_double(t));
        }
        for (const auto& p : points_)
            if (!(std::abs(velocity_at(p.t)) < units_.c()))
                throw InputError("speed limit violated: |v| >= c at t=" + format_double(p.t));
    }

    UnitSystem units_;
    double t_start_;
    double t_end_;
    std::optional<Expr> position_expr_;
    std::optional<Expr> velocity_expr_;
    std::vector<TrajectorySample> points_;  // empty for analytic sources
    std::vector<double> slopes_;
};

// --- CSV interchange: header "t,x", one pair per line, LF endings -----------

inline std::vector<TrajectorySample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty trajectory CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,x") throw InputError("trajectory CSV must start with header 't,x'");
    std::vector<TrajectorySample> pts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError("trajectory CSV line " + std::to_string(lineno) +
                             ": expected 't,x' pair");
        TrajectorySample s{};
        const char* tb = line.data();
        auto r1 = std::from_chars(tb, tb + comma, s.t);
        const char* xb = line.data() + comma + 1;
        auto r2 = std::from_chars(xb, line.data() + line.size(), s.x);
        if (r1.ec != std::errc{} || r1.ptr != tb + comma || r2.ec != std::errc{} ||
            r2.ptr != line.data() + line.size())
            throw InputError("trajectory CSV line " + std::to_string(lineno) +
                             ": malformed number");
        pts.push_back(s);
    }
    return pts;
}

inline Trajectory read_trajectory_csv(std::istream& in, const UnitSystem& u,
                                      int collocation = Trajectory::kDefaultCollocation) {
    return Trajectory::from_samples(read_samples_csv(in), u, collocation);
}

inline void write_samples_csv(std::ostream& out, const std::vector<TrajectorySample>& pts) {
    out << "t,x\n";
    for (const auto& p : pts)
        out << format_double(p.t) << ',' << format_double(p.x) << '\n';
}

}  // namespace worldline
