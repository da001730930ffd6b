#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cap.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "observables.hpp"

namespace capflow {

struct CapFit {
    double c = 0.0;
    double rhat = 0.0;
    double rms = 0.0;
    double volume_match = 0.0;
};

/// Cap profile with explicit centre height (the fitted centre need not match theta).
inline double cap_rho(double c, double rhat, double beta) {
    const double sb = std::sin(beta);
    return c * std::cos(beta) + std::sqrt(std::max(rhat * rhat - c * c * sb * sb, 0.0));
}

/**
 * @brief Least-squares sphere rho^2 - 2 c rho cos(beta) + w = 0 with w = c^2 - rhat^2.
 *
 * volume_match compares the fitted cap's volume with reference_volume, or
 * with the profile's own volume when none is given.
 */
inline CapFit fit_cap(const std::vector<double>& u, const Grid& grid, const SpaceForm& sf,
                      std::optional<double> reference_volume = std::nullopt) {
    if (u.size() != grid.size()) throw DomainError("state size does not match grid");
    // minimise sum (a_i c + w - b_i)^2 with a_i = -2 rho cos, b_i = -rho^2
    double saa = 0.0, sa = 0.0, sab = 0.0, sb = 0.0;
    const double cnt = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rho = std::exp(u[i]);
        const double a = -2.0 * rho * std::cos(grid.beta(i));
        const double b = -rho * rho;
        saa += a * a;
        sa += a;
        sab += a * b;
        sb += b;
    }
    const double det = saa * cnt - sa * sa;
    if (std::abs(det) < 1e-300) throw FitFailure("singular cap-fit normal equations");
    CapFit fit;
    fit.c = (sab * cnt - sa * sb) / det;
    const double w = (saa * sb - sa * sab) / det;
    const double r2 = fit.c * fit.c - w;
    if (!(r2 > 0.0)) throw FitFailure("cap fit has non-positive squared radius");
    fit.rhat = std::sqrt(r2);

    double ss = 0.0;
    std::vector<double> ucap(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double beta = grid.beta(i);
        const double rc = cap_rho(fit.c, fit.rhat, beta);
        const double d = std::exp(u[i]) - rc;
        ss += d * d;
        ucap[i] = std::log(rc);
    }
    fit.rms = std::sqrt(ss / cnt);

    Jet cj;
    cj.u = ucap;
    const double vfit = volume(cj, grid, sf);
    Jet rj;
    rj.u = u;
    const double vref = reference_volume ? *reference_volume : volume(rj, grid, sf);
    fit.volume_match = std::abs(vfit - vref) / vref;
    return fit;
}

} // namespace capflow
