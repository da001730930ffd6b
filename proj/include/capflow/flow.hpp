#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cap.hpp"
#include "error.hpp"
#include "fit.hpp"
#include "grid.hpp"
#include "observables.hpp"
#include "space_form.hpp"
#include "surface.hpp"

namespace capflow {

/// Cap of half-space radius cap_rhat plus amp * cos(2 mode beta).
struct InitialProfile {
    double cap_rhat = 1.0;
    double perturb_amp = 0.0;
    int perturb_mode = 1;
};

struct FlowConfig {
    SpaceForm sf;
    Grid grid;
    InitialProfile initial;
    double cfl = 0.4;
    double t_max = 10.0;
    double tol_stop = 1e-7;
    long snapshot_every = 1000;
    bool strict_angle = false;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 0.5)) throw DomainError("cfl must lie in (0, 0.5]");
        if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
        if (!(tol_stop >= 0.0)) throw DomainError("tol_stop must be non-negative");
        if (snapshot_every < 1) throw DomainError("snapshot_every must be at least 1");
        if (initial.perturb_mode < 1) throw DomainError("perturb_mode must be at least 1");
        if (!(initial.cap_rhat > 0.0)) throw DomainError("cap_rhat must be positive");
        if (strict_angle && !sf.angle_restriction_holds())
            throw DomainError("angle restriction |cos theta| < (3n+1)/(5n-1) violated");
    }
};

inline std::vector<double> initial_profile(const InitialProfile& ip, const Grid& grid, const SpaceForm& sf) {
    const CapProfile cap = cap_from_halfspace(ip.cap_rhat, sf);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double b = grid.beta(i);
        u[i] = std::log(cap.rho(b)) + ip.perturb_amp * std::cos(2.0 * ip.perturb_mode * b);
    }
    return u;
}

/// Speed at one node, divergence form with the chain rule applied to 1/(rho e^U).
inline double speed_at(double beta, double u, double ub, double ubb, bool pole, const SpaceForm& sf) {
    const double r0 = sf.r0, m = sf.m(), p = sf.p();
    const int n = sf.n;
    const double ct = std::cos(sf.theta);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double rho = std::exp(u);
    const double v = std::sqrt(1.0 + ub * ub);
    const double e = 4.0 * r0 / (m * (1.0 + rho * rho) + 2.0 * p * rho * cb);
    const double d_inv = (m * (rho - 1.0 / rho) * ub - 2.0 * p * sb) / (4.0 * r0);
    const double W = ub / (rho * v * e);
    const double Wb = ubb / (rho * v * v * v * e) + ub / v * d_inv;
    const double div = pole ? n * Wb : Wb + (n - 1.0) * cb / sb * W;
    return 2.0 * r0 / m * div
           - 2.0 * (n + 1.0) * r0 / (m * v) * ub * d_inv
           + sf.K * 2.0 * n * ct * r0 * r0 / m
           - n * ct / (2.0 * rho) * axial_bracket(rho, beta, ub);
}

inline std::vector<double> speed_G(const Jet& j, const Grid& grid, const SpaceForm& sf) {
    std::vector<double> G(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        G[i] = speed_at(grid.beta(i), j.u[i], j.ub[i], j.ubb[i], i == 0, sf);
        if (!std::isfinite(G[i])) throw NumericalFailure("non-finite speed", i);
    }
    return G;
}

inline std::vector<double> speed_G(const GraphState& s, const Grid& grid, const SpaceForm& sf) {
    return speed_G(derivatives(s, grid, sf.theta), grid, sf);
}

/// Speed assembled as v F / (rho e^U) from the support function, V_a, Y_a and mean curvature.
inline std::vector<double> speed_from_items(const Jet& j, const Grid& grid, const SpaceForm& sf) {
    std::vector<double> G(j.size());
    const double ct = std::cos(sf.theta), sK = sf.sK();
    const int n = sf.n;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto g = node_geometry(grid.beta(i), j.u[i], j.ub[i], j.ubb[i], i == 0, sf);
        const double F = n * g.V + n * sK * ct * g.Ynu - g.mean_from_items * g.support;
        G[i] = g.v * F / (g.rho * g.weight);
    }
    return G;
}

inline double max_abs(const std::vector<double>& x) {
    double s = 0.0;
    for (double a : x) s = std::max(s, std::abs(a));
    return s;
}

/// Largest coefficient of u_bb in the speed over the grid.
inline double max_diffusion(const Jet& j, const Grid& grid, const SpaceForm& sf) {
    const double m = sf.m(), p = sf.p();
    double D = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double rho = std::exp(j.u[i]);
        const double v = std::sqrt(1.0 + j.ub[i] * j.ub[i]);
        const double P = m * (1.0 + rho * rho) + 2.0 * p * rho * std::cos(grid.beta(i));
        D = std::max(D, P / (2.0 * m * rho * v * v * v));
    }
    return D;
}

/// dt = cfl h^2 / (kStencilFactor max D); the closed fourth-order operator reaches about 9.1 D / h^2.
inline constexpr double kStencilFactor = 4.0;

inline double stable_dt(const Jet& j, const Grid& grid, const SpaceForm& sf, double cfl) {
    return cfl * grid.h * grid.h / (kStencilFactor * max_diffusion(j, grid, sf));
}

inline double stable_dt(const GraphState& s, const Grid& grid, const SpaceForm& sf, double cfl) {
    return stable_dt(derivatives(s, grid, sf.theta), grid, sf, cfl);
}

namespace detail {

inline GraphState midpoint(const GraphState& s, const std::vector<double>& G0, const Grid& grid,
                           const SpaceForm& sf, double dt) {
    GraphState half{s.u, s.t + 0.5 * dt};
    for (std::size_t i = 0; i < half.u.size(); ++i) half.u[i] += 0.5 * dt * G0[i];
    const auto G1 = speed_G(half, grid, sf);
    GraphState out{s.u, s.t + dt};
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        out.u[i] += dt * G1[i];
        if (!std::isfinite(out.u[i])) throw NumericalFailure("non-finite profile", i);
    }
    return out;
}

} // namespace detail

/// One explicit midpoint step.
inline GraphState step(const GraphState& s, const Grid& grid, const SpaceForm& sf, double dt) {
    if (!(dt >= 0.0)) throw DomainError("time step must be non-negative");
    if (dt == 0.0) return s;
    return detail::midpoint(s, speed_G(s, grid, sf), grid, sf, dt);
}

/// Pair of caps of the same angle bracketing the profile, with slack C h^2 on rho.
struct Enclosure {
    CapProfile inner, outer;
    double slack = 0.0;

    /// Index of the first node outside the band, or -1.
    long violation(const std::vector<double>& u, const Grid& grid) const {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double b = grid.beta(i);
            const double rho = std::exp(u[i]);
            if (rho < inner.rho(b) - slack || rho > outer.rho(b) + slack) return static_cast<long>(i);
        }
        return -1;
    }
};

inline constexpr double kEnclosureConstant = 1.0;

/// Tightest caps of angle theta with inner <= rho <= outer at every node.
inline Enclosure enclosure_for(const std::vector<double>& u, const Grid& grid, const SpaceForm& sf) {
    const CapProfile unit = cap_from_halfspace(1.0, sf);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - std::log(unit.rho(grid.beta(i)));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    Enclosure e;
    e.inner = cap_from_halfspace(std::exp(lo), sf);
    e.outer = cap_from_halfspace(std::exp(hi), sf);
    e.slack = kEnclosureConstant * grid.h * grid.h;
    return e;
}

enum class Termination { Converged, TimeLimit, NumericalFailure };

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::Converged: return "converged";
    case Termination::TimeLimit: return "time-limit";
    case Termination::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct Snapshot {
    long step = 0;
    GraphState state;
    ObservableRecord record;
};

struct GradientSample {
    double t;
    double max_abs_ub;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    GraphState final_state;
    Termination reason = Termination::TimeLimit;
    long steps = 0;
    std::string failure;
    std::vector<GradientSample> gradient;
    Enclosure enclosure;
    std::vector<std::string> warnings;
};

inline constexpr double kConvergedSpread = 1e-3;
inline constexpr double kConvergedFitRms = 1e-5;

/**
 * @brief Runs the flow until max|G| < tol_stop with an umbilic, cap-shaped
 * profile, or until t_max.
 *
 * Snapshots are taken at step 0, every snapshot_every steps and at the end.
 * Leaving the enclosure band throws InvariantViolation; a non-finite value
 * ends the run with Termination::NumericalFailure.
 */
inline Trajectory evolve(const FlowConfig& cfg) {
    cfg.validate();
    const SpaceForm& sf = cfg.sf;
    const Grid& grid = cfg.grid;
    Trajectory tr;
    if (!sf.angle_restriction_holds())
        tr.warnings.push_back("contact angle outside |cos theta| < (3n+1)/(5n-1); convergence is not guaranteed");

    GraphState s{initial_profile(cfg.initial, grid, sf), 0.0};
    tr.enclosure = enclosure_for(s.u, grid, sf);

    auto snapshot = [&](long k, const Jet& j, double maxG) {
        Snapshot snap{k, s, observe(j, grid, sf, s.t)};
        snap.record.max_abs_G = maxG;
        const long bad = tr.enclosure.violation(s.u, grid);
        if (bad >= 0)
            throw InvariantViolation("enclosure", "profile left the bracketing caps at node " + std::to_string(bad) +
                                                      ", t = " + std::to_string(s.t));
        tr.snapshots.push_back(std::move(snap));
    };

    long k = 0;
    try {
        for (;;) {
            const Jet j = derivatives(s, grid, sf.theta);
            const auto G = speed_G(j, grid, sf);
            const double maxG = max_abs(G);
            tr.gradient.push_back({s.t, max_abs(j.ub)});
            const bool due = k % cfg.snapshot_every == 0;

            bool done = false;
            if (maxG < cfg.tol_stop) {
                const auto geo = graph_geometry(j, grid, sf);
                if (kappa_spread(geo) <= kConvergedSpread && fit_cap(s.u, grid, sf).rms <= kConvergedFitRms) {
                    tr.reason = Termination::Converged;
                    done = true;
                }
            }
            if (!done && s.t >= cfg.t_max) {
                tr.reason = Termination::TimeLimit;
                done = true;
            }
            if (due || done) snapshot(k, j, maxG);
            if (done) break;

            const double dt = std::min(stable_dt(j, grid, sf, cfg.cfl), cfg.t_max - s.t);
            s = detail::midpoint(s, G, grid, sf, dt);
            if (cfg.t_max - s.t < 1e-14 * cfg.t_max) s.t = cfg.t_max;
            ++k;
        }
    } catch (const NumericalFailure& e) {
        tr.reason = Termination::NumericalFailure;
        tr.failure = e.what();
    }
    tr.steps = k;
    tr.final_state = s;
    return tr;
}

} // namespace capflow
