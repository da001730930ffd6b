#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace capflow {

/// Uniform grid beta_i = i h on [0, pi/2]; node 0 is the pole, node N the contact boundary.
struct Grid {
    int N = 64;
    double h = std::numbers::pi / 128;

    static Grid make(int N) {
        if (N < 16) throw DomainError("grid needs at least 16 intervals");
        if (N % 2 != 0) throw DomainError("grid interval count must be even");
        return Grid{N, 0.5 * std::numbers::pi / N};
    }

    std::size_t size() const { return static_cast<std::size_t>(N) + 1; }
    double beta(std::size_t i) const { return i == static_cast<std::size_t>(N) ? 0.5 * std::numbers::pi : h * static_cast<double>(i); }
};

/// u = log rho on the grid at flow time t.
struct GraphState {
    std::vector<double> u;
    double t = 0.0;
};

/// u with its first and second beta-derivatives at every node.
struct Jet {
    std::vector<double> u, ub, ubb;
    std::size_t size() const { return u.size(); }
};

/// Two ghost values past each end: pole[k] = u_{-1-k}, boundary[k] = u_{N+1+k}.
struct Ghosts {
    std::array<double, 2> pole{};
    std::array<double, 2> boundary{};
};

namespace fd {

/// Fourth-order central first and second differences at every node given ghosts.
inline void central(const std::vector<double>& u, const Ghosts& g, double h,
                    std::vector<double>& d1, std::vector<double>& d2) {
    const std::size_t n = u.size();
    auto at = [&](long i) -> double {
        if (i < 0) return g.pole[static_cast<std::size_t>(-i - 1)];
        if (i >= static_cast<long>(n)) return g.boundary[static_cast<std::size_t>(i - static_cast<long>(n))];
        return u[static_cast<std::size_t>(i)];
    };
    d1.resize(n);
    d2.resize(n);
    const double i12h = 1.0 / (12.0 * h), i12h2 = 1.0 / (12.0 * h * h);
    for (long i = 0; i < static_cast<long>(n); ++i) {
        const double m2 = at(i - 2), m1 = at(i - 1), c = at(i), p1 = at(i + 1), p2 = at(i + 2);
        d1[static_cast<std::size_t>(i)] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) * i12h;
        d2[static_cast<std::size_t>(i)] = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) * i12h2;
    }
}

} // namespace fd

/**
 * @brief Ghost values closing the grid.
 *
 * Pole: even reflection, so u_beta(0) = 0.
 * Boundary: values of the quintic through the last five nodes whose slope
 * at beta = pi/2 equals cot(theta).
 */
inline Ghosts boundary_closure(const std::vector<double>& u, double h, double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi)) throw DomainError("contact angle theta must lie in (0, pi)");
    if (u.size() < 5) throw DomainError("closure needs at least five nodes");
    const std::size_t N = u.size() - 1;
    Ghosts g;
    g.pole = {u[1], u[2]};
    const double s = h / std::tan(theta);
    const double u0 = u[N], u1 = u[N - 1], u2 = u[N - 2], u3 = u[N - 3], u4 = u[N - 4];
    g.boundary[0] = 5.0 * s - 65.0 * u0 / 12.0 + 10.0 * u1 - 5.0 * u2 + 5.0 * u3 / 3.0 - 0.25 * u4;
    g.boundary[1] = 30.0 * s - 47.5 * u0 + 80.0 * u1 - 45.0 * u2 + 16.0 * u3 - 2.5 * u4;
    return g;
}

inline Ghosts boundary_closure(const GraphState& state, const Grid& grid, double theta) {
    return boundary_closure(state.u, grid.h, theta);
}

/// Derivatives of u with the capillary closure; end slopes are installed exactly.
inline Jet derivatives(const std::vector<double>& u, const Grid& grid, double theta) {
    if (u.size() != grid.size()) throw DomainError("state size does not match grid");
    Jet j;
    j.u = u;
    fd::central(u, boundary_closure(u, grid.h, theta), grid.h, j.ub, j.ubb);
    j.ub.front() = 0.0;
    j.ub.back() = 1.0 / std::tan(theta);
    return j;
}

inline Jet derivatives(const GraphState& state, const Grid& grid, double theta) {
    return derivatives(state.u, grid, theta);
}

struct Kinematics {
    std::vector<double> rho, v;
};

inline Kinematics kinematics(const Jet& j) {
    Kinematics k;
    k.rho.resize(j.size());
    k.v.resize(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        k.rho[i] = std::exp(j.u[i]);
        k.v[i] = std::sqrt(1.0 + j.ub[i] * j.ub[i]);
    }
    return k;
}

} // namespace capflow
