#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "fit.hpp"
#include "flow.hpp"
#include "observables.hpp"

namespace capflow {

/// Cap of angle theta enclosing the given volume.
inline CapProfile volume_matched_cap(double target, const Grid& grid, const SpaceForm& sf) {
    auto f = [&](double t) {
        const Jet j = cap_jet(cap_from_halfspace(std::exp(t), sf), grid);
        return std::log(volume(j, grid, sf) / target);
    };
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 60 && f(lo) > 0.0; ++i) lo -= 1.0;
    for (int i = 0; i < 60 && f(hi) < 0.0; ++i) hi += 1.0;
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return cap_from_halfspace(std::exp(0.5 * (a + b)), sf);
}

struct IsoperimetricReport {
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double energy_cap = 0.0;
    double relative_gap = 0.0;
    bool decreased = false;
    bool matches_cap = false;
    std::vector<std::string> failures;
    std::string table;
};

inline constexpr double kCapEnergyTolerance = 1e-3;

/// Energy comparison between the run's endpoints and the cap of equal volume.
inline IsoperimetricReport isoperimetric_check(const Trajectory& tr, const Grid& grid, const SpaceForm& sf) {
    IsoperimetricReport rep;
    if (tr.snapshots.empty()) {
        rep.failures.push_back("trajectory has no snapshots");
        return rep;
    }
    const auto& first = tr.snapshots.front().record;
    const auto& last = tr.snapshots.back().record;
    rep.energy_initial = first.energy;
    rep.energy_final = last.energy;
    const CapProfile cap = volume_matched_cap(first.volume, grid, sf);
    const Jet cj = cap_jet(cap, grid);
    const auto geo = graph_geometry(cj, grid, sf);
    rep.energy_cap = energy(area(geo, grid, sf), wetting_area(cj, sf), sf);
    rep.relative_gap = std::abs(rep.energy_final - rep.energy_cap) / std::abs(rep.energy_cap);
    rep.decreased = rep.energy_final <= rep.energy_initial + 1e-12 * std::abs(rep.energy_initial);
    rep.matches_cap = rep.relative_gap <= kCapEnergyTolerance;
    if (!rep.decreased) rep.failures.push_back("final energy exceeds initial energy");
    if (!rep.matches_cap) rep.failures.push_back("final energy differs from the equal-volume cap");

    std::ostringstream os;
    os.precision(12);
    os << "quantity            value\n"
       << "E(initial)          " << rep.energy_initial << "\n"
       << "E(final)            " << rep.energy_final << "\n"
       << "E(cap, same volume) " << rep.energy_cap << "\n"
       << "relative gap        " << rep.relative_gap << "\n";
    rep.table = os.str();
    return rep;
}

/// Outcome of one runtime invariant.
struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
};

inline constexpr double kVolumeDriftBound = 1e-4;
inline constexpr double kEnergySlack = 1e-8;

inline CheckResult volume_drift_check(const Trajectory& tr) {
    CheckResult c{"volume_conservation", true, 0.0, kVolumeDriftBound};
    const double v0 = tr.snapshots.front().record.volume;
    for (const auto& s : tr.snapshots) c.value = std::max(c.value, std::abs(s.record.volume - v0) / v0);
    c.passed = c.value <= c.bound;
    return c;
}

/// Largest energy increase between consecutive snapshots relative to |E(0)|.
inline CheckResult energy_monotone_check(const Trajectory& tr) {
    CheckResult c{"energy_monotonicity", true, 0.0, kEnergySlack};
    const double e0 = std::abs(tr.snapshots.front().record.energy);
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
        c.value = std::max(c.value, (tr.snapshots[i].record.energy - tr.snapshots[i - 1].record.energy) / e0);
    c.passed = c.value <= c.bound;
    return c;
}

/// max|u_b| over the run divided by its maximum over the first 1% of flow time.
inline CheckResult gradient_bound_check(const Trajectory& tr) {
    CheckResult c{"gradient_bound", true, 0.0, 2.0};
    if (tr.gradient.empty()) return c;
    const double t_end = tr.gradient.back().t;
    double early = 0.0, all = 0.0;
    for (const auto& g : tr.gradient) {
        all = std::max(all, g.max_abs_ub);
        if (g.t <= 0.01 * t_end) early = std::max(early, g.max_abs_ub);
    }
    c.value = early > 0.0 ? all / early : (all > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    c.passed = c.value <= c.bound;
    return c;
}

inline CheckResult enclosure_check(const Trajectory& tr, const Grid& grid) {
    CheckResult c{"enclosure", true, 0.0, tr.enclosure.slack};
    for (const auto& s : tr.snapshots) {
        for (std::size_t i = 0; i < s.state.u.size(); ++i) {
            const double b = grid.beta(i), rho = std::exp(s.state.u[i]);
            c.value = std::max({c.value, tr.enclosure.inner.rho(b) - rho, rho - tr.enclosure.outer.rho(b)});
        }
    }
    c.passed = c.value <= c.bound;
    return c;
}

} // namespace capflow
