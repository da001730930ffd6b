#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "space_form.hpp"

namespace capflow {

/**
 * @brief Spherical cap meeting the supporting sphere at angle theta.
 *
 * In the half-space model the cap is the sphere of radius rhat centred at
 * height c on the symmetry axis; as a radial graph over the upper hemisphere
 * it is rho(beta) = c cos(beta) + sqrt(rhat^2 - c^2 sin^2(beta)).
 * |r| is the Euclidean radius of its image in the ball model and d the
 * signed distance of that sphere's centre from the origin along a. r is
 * negative once rhat > 1 / (1 + cos theta): the enclosed region then lies
 * outside the ball-model sphere and the cap bends the other way.
 */
struct CapProfile {
    double c = 0.0;
    double rhat = 1.0;
    double r = 0.0;
    double d = 0.0;

    double rho(double beta) const {
        const double sb = std::sin(beta);
        return c * std::cos(beta) + std::sqrt(rhat * rhat - c * c * sb * sb);
    }

    /// log rho and its first two beta-derivatives.
    void log_jet(double beta, double& u, double& ub, double& ubb) const {
        const double sb = std::sin(beta), cb = std::cos(beta);
        const double s = std::sqrt(rhat * rhat - c * c * sb * sb);
        const double r = c * cb + s;
        const double r1 = -c * sb - c * c * sb * cb / s;
        const double r2 = -c * cb - c * c * (cb * cb - sb * sb) / s - c * c * c * c * sb * sb * cb * cb / (s * s * s);
        u = std::log(r);
        ub = r1 / r;
        ubb = r2 / r - ub * ub;
    }
};

namespace detail {

/**
 * Ball-model sphere of the cap image. The half-space sphere meets the axis at
 * heights z1 = c + rhat and z2 = c - rhat, which map to r0 (z - 1) / (z + 1)
 * along e_{n+1}; the differences are formed without cancellation.
 */
inline void ball_sphere(CapProfile& cap, const SpaceForm& sf) {
    const double z1 = cap.c + cap.rhat, z2 = cap.c - cap.rhat;
    const double den = (z1 + 1.0) * (z2 + 1.0);
    if (den == 0.0) {
        // totally geodesic disk: the image is a plane
        cap.r = cap.d = std::numeric_limits<double>::infinity();
        return;
    }
    cap.r = 2.0 * sf.r0 * cap.rhat / den;
    cap.d = -sf.r0 * (z1 * z2 - 1.0) / den;
}

} // namespace detail

/// Cap with half-space radius rhat for the contact angle of sf.
inline CapProfile cap_from_halfspace(double rhat, const SpaceForm& sf) {
    if (!(rhat > 0.0) || !std::isfinite(rhat)) throw DomainError("cap radius must be positive and finite");
    CapProfile cap;
    cap.rhat = rhat;
    cap.c = -rhat * std::cos(sf.theta);
    detail::ball_sphere(cap, sf);
    return cap;
}

/// Cap of the family given its signed ball-model radius r; r = +-inf is the totally geodesic disk.
inline CapProfile cap_profile(double r, const SpaceForm& sf) {
    if (!(r != 0.0) || std::isnan(r)) throw DomainError("cap radius r must be nonzero");
    // rhat in (0, h) sweeps r over (0, inf), rhat in (h, inf) sweeps (-inf, 0), h = 1/(1+cos theta)
    const double h = 1.0 / (1.0 + std::cos(sf.theta));
    if (std::isinf(r)) return cap_from_halfspace(h, sf);
    const bool near = r > 0.0;
    auto rhat_of = [&](double t) { return near ? h / (1.0 + std::exp(-t)) : h * (1.0 + std::exp(t)); };
    // 1/r is monotone in rhat on both branches
    auto f = [&](double t) {
        const double rc = cap_from_halfspace(rhat_of(t), sf).r;
        return near ? std::log(rc / r) : std::log(r / rc);
    };
    double lo = -30.0, hi = 30.0;
    if (!(f(lo) <= 0.0 && f(hi) >= 0.0)) throw DomainError("cap radius outside the representable range");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return cap_from_halfspace(rhat_of(0.5 * (a + b)), sf);
}

} // namespace capflow
