#pragma once

// Worldsheets X(tau, sigma) into Minkowski space with fixed signature
// (+,-,-,-). Embeddings are analytic callables (optionally with exact
// tangents) or rectangular sample grids; grids use second-order finite
// differences for the tangents.

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "worldline/errors.hpp"
#include "worldline/quadrature.hpp"

namespace worldline {

using FourVector = std::array<double, 4>;

// a.b under diag(+,-,-,-)
inline double minkowski_dot(const FourVector& a, const FourVector& b) {
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

class Worldsheet {
public:
    using Embedding = std::function<FourVector(double, double)>;
    using TangentFn = std::function<void(double, double, FourVector&, FourVector&)>;

    static Worldsheet analytic(Embedding embed, ParamRect domain, TangentFn tangents = {}) {
        if (!(domain.tau_min < domain.tau_max) || !(domain.sigma_min < domain.sigma_max))
            throw InputError("worldsheet domain must have positive extent in tau and sigma");
        if (!embed) throw InputError("worldsheet embedding must be callable");
        Worldsheet ws;
        ws.domain_ = domain;
        ws.embed_ = std::move(embed);
        ws.tangents_ = std::move(tangents);
        return ws;
    }

    static Worldsheet from_grid(std::vector<double> taus, std::vector<double> sigmas,
                                std::vector<FourVector> nodes) {
        if (taus.size() < 3 || sigmas.size() < 3)
            throw InputError("worldsheet grid needs at least 3x3 nodes");
        for (std::size_t i = 0; i + 1 < taus.size(); ++i)
            if (!(taus[i] < taus[i + 1]))
                throw InputError("grid tau values must be strictly increasing");
        for (std::size_t j = 0; j + 1 < sigmas.size(); ++j)
            if (!(sigmas[j] < sigmas[j + 1]))
                throw InputError("grid sigma values must be strictly increasing");
        if (nodes.size() != taus.size() * sigmas.size())
            throw InputError("grid node count does not match tau x sigma dimensions");
        Worldsheet ws;
        ws.domain_ = {taus.front(), taus.back(), sigmas.front(), sigmas.back()};
        ws.taus_ = std::move(taus);
        ws.sigmas_ = std::move(sigmas);
        ws.nodes_ = std::move(nodes);
        return ws;
    }

    // X(tau, sigma) = (tau, sigma, 0, 0): a string of the given length held
    // static for the given duration.
    static Worldsheet static_string(double length, double duration) {
        if (!(length > 0.0) || !(duration > 0.0))
            throw InputError("static string needs positive length and duration");
        return analytic(
            [](double tau, double sigma) { return FourVector{tau, sigma, 0.0, 0.0}; },
            ParamRect{0.0, duration, 0.0, length},
            [](double, double, FourVector& dtau, FourVector& dsigma) {
                dtau = {1.0, 0.0, 0.0, 0.0};
                dsigma = {0.0, 1.0, 0.0, 0.0};
            });
    }

    bool is_grid() const { return !nodes_.empty(); }
    const ParamRect& domain() const { return domain_; }
    const std::vector<double>& grid_taus() const { return taus_; }
    const std::vector<double>& grid_sigmas() const { return sigmas_; }

    const FourVector& grid_node(std::size_t i, std::size_t j) const {
        return nodes_[i * sigmas_.size() + j];
    }

    FourVector at(double tau, double sigma) const { return embed_(tau, sigma); }

    // dX/dtau and dX/dsigma for analytic sheets; finite differences unless
    // exact tangents were supplied. FD steps stay inside the domain.
    void tangents_at(double tau, double sigma, FourVector& dtau, FourVector& dsigma) const {
        if (tangents_) {
            tangents_(tau, sigma, dtau, dsigma);
            return;
        }
        const double htau = fd_step(domain_.tau_max - domain_.tau_min);
        const double hsig = fd_step(domain_.sigma_max - domain_.sigma_min);
        dtau = fd_derivative([&](double v) { return embed_(v, sigma); }, tau,
                             domain_.tau_min, domain_.tau_max, htau);
        dsigma = fd_derivative([&](double v) { return embed_(tau, v); }, sigma,
                               domain_.sigma_min, domain_.sigma_max, hsig);
    }

private:
    Worldsheet() = default;

    static double fd_step(double extent) { return 6.0e-6 * extent; }

    template <class F>
    static FourVector fd_derivative(F&& f, double v, double lo, double hi, double h) {
        FourVector out{};
        if (v - h >= lo && v + h <= hi) {
            const FourVector a = f(v - h), b = f(v + h);
            for (int i = 0; i < 4; ++i) out[i] = (b[i] - a[i]) / (2.0 * h);
        } else if (v - h < lo) {
            const FourVector f0 = f(v), f1 = f(v + h), f2 = f(v + 2.0 * h);
            for (int i = 0; i < 4; ++i) out[i] = (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h);
        } else {
            const FourVector f0 = f(v), f1 = f(v - h), f2 = f(v - 2.0 * h);
            for (int i = 0; i < 4; ++i) out[i] = (3.0 * f0[i] - 4.0 * f1[i] + f2[i]) / (2.0 * h);
        }
        return out;
    }

    ParamRect domain_{};
    Embedding embed_;
    TangentFn tangents_;
    std::vector<double> taus_;
    std::vector<double> sigmas_;
    std::vector<FourVector> nodes_;
};

// Grid CSV: header "tau,sigma,x0,x1,x2,x3", rows in row-major order (tau
// outer, sigma inner), forming a tensor grid.
inline Worldsheet read_worldsheet_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty worldsheet CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "tau,sigma,x0,x1,x2,x3")
        throw InputError("worldsheet CSV must start with header 'tau,sigma,x0,x1,x2,x3'");

    std::vector<std::array<double, 6>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 6> row{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int f = 0; f < 6; ++f) {
            auto r = std::from_chars(p, end, row[f]);
            if (r.ec != std::errc{})
                throw InputError("worldsheet CSV line " + std::to_string(lineno) +
                                 ": malformed number");
            p = r.ptr;
            if (f < 5) {
                if (p >= end || *p != ',')
                    throw InputError("worldsheet CSV line " + std::to_string(lineno) +
                                     ": expected 6 comma-separated fields");
                ++p;
            }
        }
        if (p != end)
            throw InputError("worldsheet CSV line " + std::to_string(lineno) +
                             ": trailing characters");
        rows.push_back(row);
    }
    if (rows.empty()) throw InputError("worldsheet CSV has no data rows");

    // Infer the tensor structure: sigma cycles fastest.
    std::vector<double> sigmas;
    sigmas.push_back(rows[0][1]);
    std::size_t n_sigma = rows.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][0] != rows[0][0]) {
            n_sigma = r;
            break;
        }
        sigmas.push_back(rows[r][1]);
    }
    if (rows.size() % n_sigma != 0)
        throw InputError("worldsheet CSV rows do not form a complete tensor grid");
    const std::size_t n_tau = rows.size() / n_sigma;
    std::vector<double> taus(n_tau);
    std::vector<FourVector> nodes(rows.size());
    for (std::size_t i = 0; i < n_tau; ++i) {
        taus[i] = rows[i * n_sigma][0];
        for (std::size_t j = 0; j < n_sigma; ++j) {
            const auto& row = rows[i * n_sigma + j];
            if (row[0] != taus[i] || row[1] != sigmas[j])
                throw InputError("worldsheet CSV row " + std::to_string(i * n_sigma + j + 2) +
                                 ": (tau, sigma) breaks the tensor grid pattern");
            nodes[i * n_sigma + j] = {row[2], row[3], row[4], row[5]};
        }
    }
    return Worldsheet::from_grid(std::move(taus), std::move(sigmas), std::move(nodes));
}

}  // namespace worldline
