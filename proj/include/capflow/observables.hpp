#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "cap.hpp"
#include "grid.hpp"
#include "space_form.hpp"
#include "surface.hpp"

namespace capflow {

/// Composite Simpson rule over an even number of equal intervals.
inline double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() - 1;
    if (n < 2 || n % 2 != 0) throw DomainError("Simpson rule needs an even number of intervals");
    double s = f.front() + f.back();
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

template <class F>
double simpson(F&& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return s * h / 3.0;
}

inline constexpr int kVolumeInnerIntervals = 128;
inline constexpr int kWettingIntervals = 256;

/// Metric weight e^U(s, beta) of a space form in the half-space model; the flat weight 1 when sf is null.
struct Weight {
    const SpaceForm* sf = nullptr;
    double operator()(double s, double beta) const { return sf ? conformal_factor_polar(s, beta, *sf) : 1.0; }
};

/// Node geometry along the whole grid.
inline std::vector<NodeGeometry> graph_geometry(const Jet& j, const Grid& grid, const SpaceForm& sf) {
    std::vector<NodeGeometry> out(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out[i] = node_geometry(grid.beta(i), j.u[i], j.ub[i], j.ubb[i], i == 0, sf);
    return out;
}

namespace detail {

/// Integral over the graph against the area element, f evaluated per node.
template <class F>
double surface_integral(const std::vector<NodeGeometry>& geo, const Grid& grid, const SpaceForm& sf, F&& f) {
    const int n = sf.n;
    std::vector<double> w(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const auto& g = geo[i];
        const double sb = std::sin(grid.beta(i));
        w[i] = f(i, g) * std::pow(g.weight * g.rho, n) * g.v * std::pow(sb, n - 1);
    }
    return unit_sphere_area(n) * simpson(w, grid.h);
}

} // namespace detail

inline double area(const std::vector<NodeGeometry>& geo, const Grid& grid, const SpaceForm& sf) {
    return detail::surface_integral(geo, grid, sf, [](std::size_t, const NodeGeometry&) { return 1.0; });
}

inline double area(const Jet& j, const Grid& grid, int n, Weight w) {
    std::vector<double> f(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double b = grid.beta(i), rho = std::exp(j.u[i]);
        f[i] = std::pow(w(rho, b) * rho, n) * std::sqrt(1.0 + j.ub[i] * j.ub[i]) * std::pow(std::sin(b), n - 1);
    }
    return unit_sphere_area(n) * simpson(f, grid.h);
}

inline double area(const Jet& j, const Grid& grid, const SpaceForm& sf) { return area(j, grid, sf.n, Weight{&sf}); }

/// Weighted area of the flat disk of coordinate radius s_max in the boundary plane.
inline double wetting_disk(double s_max, int n, Weight w) {
    if (s_max <= 0.0) return 0.0;
    auto f = [&](double s) { return std::pow(w(s, 0.5 * std::numbers::pi), n) * std::pow(s, n - 1); };
    return unit_sphere_area(n) * simpson(f, 0.0, s_max, kWettingIntervals);
}

inline double wetting_disk(double s_max, const SpaceForm& sf) { return wetting_disk(s_max, sf.n, Weight{&sf}); }

inline double wetting_area(const Jet& j, const SpaceForm& sf) {
    return wetting_disk(std::exp(j.u.back()), sf);
}

/// Volume of the region between the graph and the boundary plane; uses only j.u.
inline double volume(const Jet& j, const Grid& grid, int n, Weight w) {
    std::vector<double> f(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double beta = grid.beta(i);
        const double rho = std::exp(j.u[i]);
        auto g = [&](double s) { return std::pow(w(s, beta), n + 1) * std::pow(s, n); };
        f[i] = simpson(g, 0.0, rho, kVolumeInnerIntervals) * std::pow(std::sin(beta), n - 1);
    }
    return unit_sphere_area(n) * simpson(f, grid.h);
}

inline double volume(const Jet& j, const Grid& grid, const SpaceForm& sf) { return volume(j, grid, sf.n, Weight{&sf}); }

/// Principal curvatures as (meridian, azimuthal) arrays.
struct Curvatures {
    std::vector<double> meridian, azimuthal;
};

inline Curvatures principal_curvatures(const std::vector<NodeGeometry>& geo) {
    Curvatures c;
    for (const auto& g : geo) {
        c.meridian.push_back(g.kappa_meridian);
        c.azimuthal.push_back(g.kappa_azimuthal);
    }
    return c;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

/// sigma_k of (kb, ka, ..., ka) with ka repeated n-1 times.
inline double sigma_k(double kb, double ka, int n, int k) {
    if (k < 0 || k > n) throw DomainError("sigma_k order out of range");
    if (k == 0) return 1.0;
    return binomial(n - 1, k) * std::pow(ka, k) + binomial(n - 1, k - 1) * kb * std::pow(ka, k - 1);
}

inline std::vector<double> sigma_k(const std::vector<NodeGeometry>& geo, int n, int k) {
    if (k < 1 || k > n) throw DomainError("sigma_k order out of range");
    std::vector<double> out;
    out.reserve(geo.size());
    for (const auto& g : geo) out.push_back(sigma_k(g.kappa_meridian, g.kappa_azimuthal, n, k));
    return out;
}

/// Minkowski-formula residual of order k, divided by the area.
inline double minkowski_residual(const std::vector<NodeGeometry>& geo, const Grid& grid, const SpaceForm& sf, int k) {
    const int n = sf.n;
    if (k < 1 || k > n) throw DomainError("Minkowski order out of range");
    const double ct = std::cos(sf.theta), sK = sf.sK();
    const double lhs = detail::surface_integral(geo, grid, sf, [&](std::size_t, const NodeGeometry& g) {
        return sigma_k(g.kappa_meridian, g.kappa_azimuthal, n, k - 1) * (g.V + sK * ct * g.Ynu);
    });
    const double rhs = detail::surface_integral(geo, grid, sf, [&](std::size_t, const NodeGeometry& g) {
        return sigma_k(g.kappa_meridian, g.kappa_azimuthal, n, k) * g.support;
    });
    return ((n - k + 1) * lhs - k * rhs) / area(geo, grid, sf);
}

inline double energy(double area_value, double wetting_value, const SpaceForm& sf) {
    return area_value - std::cos(sf.theta) * wetting_value;
}

inline double kappa_spread(const std::vector<NodeGeometry>& geo) {
    double s = 0.0;
    for (const auto& g : geo) s = std::max(s, std::abs(g.kappa_meridian - g.kappa_azimuthal));
    return s;
}

struct ObservableRecord {
    double t = 0.0;
    double area = 0.0;
    double wetting = 0.0;
    double volume = 0.0;
    double energy = 0.0;
    double H_min = 0.0;
    double H_max = 0.0;
    double kappa_spread = 0.0;
    double max_abs_G = std::numeric_limits<double>::quiet_NaN();
    std::map<int, double> minkowski_residual;
};

inline ObservableRecord observe(const Jet& j, const Grid& grid, const SpaceForm& sf, double t = 0.0) {
    const auto geo = graph_geometry(j, grid, sf);
    ObservableRecord r;
    r.t = t;
    r.area = area(geo, grid, sf);
    r.wetting = wetting_area(j, sf);
    r.volume = volume(j, grid, sf);
    r.energy = energy(r.area, r.wetting, sf);
    r.H_min = std::numeric_limits<double>::infinity();
    r.H_max = -r.H_min;
    for (const auto& g : geo) {
        r.H_min = std::min(r.H_min, g.mean());
        r.H_max = std::max(r.H_max, g.mean());
    }
    r.kappa_spread = kappa_spread(geo);
    for (int k = 1; k <= sf.n; ++k) r.minkowski_residual[k] = minkowski_residual(geo, grid, sf, k);
    return r;
}

/// Exact jet of a cap profile sampled on the grid.
inline Jet cap_jet(const CapProfile& cap, const Grid& grid) {
    Jet j;
    j.u.resize(grid.size());
    j.ub.resize(grid.size());
    j.ubb.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) cap.log_jet(grid.beta(i), j.u[i], j.ub[i], j.ubb[i]);
    return j;
}

} // namespace capflow
