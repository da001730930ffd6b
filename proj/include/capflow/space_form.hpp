#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "error.hpp"

namespace capflow {

using Vec = Eigen::VectorXd;

/// Euclidean model radius of the geodesic ball of radius R.
inline double radius_to_model(double R, int K) {
    if (K != -1 && K != 1) throw DomainError("curvature sign must be -1 or +1");
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("geodesic radius must be positive and finite");
    if (K == 1 && R >= std::numbers::pi) throw DomainError("geodesic radius must be below pi for K=+1");
    // tanh(R/2) and tan(R/2) are the half-angle forms of the model radius
    return K < 0 ? std::tanh(0.5 * R) : std::tan(0.5 * R);
}

/// Inverse of radius_to_model.
inline double model_to_radius(double r0, int K) {
    if (K != -1 && K != 1) throw DomainError("curvature sign must be -1 or +1");
    if (!(r0 > 0.0)) throw DomainError("model radius must be positive");
    if (K < 0) {
        if (r0 >= 1.0) throw DomainError("model radius must be below 1 for K=-1");
        return 2.0 * std::atanh(r0);
    }
    return 2.0 * std::atan(r0);
}

/**
 * @brief Ambient geodesic ball B_R in hyperbolic (K=-1) or spherical (K=+1)
 * space, the hypersurface dimension and the contact angle.
 */
struct SpaceForm {
    int K = -1;
    double R = 0.0;
    double r0 = 0.0;
    int n = 2;
    double theta = std::numbers::pi / 2;

    static SpaceForm make(int K, double R, int n, double theta) {
        if (n < 2) throw DomainError("dimension n must be at least 2");
        if (!(theta > 0.0 && theta < std::numbers::pi))
            throw DomainError("contact angle theta must lie in (0, pi)");
        SpaceForm sf;
        sf.K = K;
        sf.R = R;
        sf.r0 = radius_to_model(R, K);
        sf.n = n;
        sf.theta = theta;
        return sf;
    }

    /// 1 + K r0^2
    double m() const { return 1.0 + K * r0 * r0; }
    /// 1 - K r0^2
    double p() const { return 1.0 - K * r0 * r0; }
    /// sinh R for K=-1, sin R for K=+1
    double sK() const { return 2.0 * r0 / m(); }

    double angle_bound() const { return (3.0 * n + 1.0) / (5.0 * n - 1.0); }
    bool angle_restriction_holds() const { return std::abs(std::cos(theta)) < angle_bound(); }
};

/// Conformal weight e^U (K=-1) or e^V (K=+1) of the half-space model at z.
inline double conformal_factor(const Vec& z, const SpaceForm& sf) {
    const double zz = z.squaredNorm();
    const double zl = z(z.size() - 1);
    return 4.0 * sf.r0 / (sf.m() * (1.0 + zz) + 2.0 * sf.p() * zl);
}

/// Same weight for a point given by its distance s from the origin and polar angle beta.
inline double conformal_factor_polar(double s, double beta, const SpaceForm& sf) {
    return 4.0 * sf.r0 / (sf.m() * (1.0 + s * s) + 2.0 * sf.p() * s * std::cos(beta));
}

/// Half space to ball model.
inline Vec halfspace_map(const Vec& z, const SpaceForm& sf) {
    const Eigen::Index d = z.size();
    const double zl = z(d - 1);
    const double tang = z.head(d - 1).squaredNorm();
    const double D = tang + (1.0 + zl) * (1.0 + zl);
    Vec x(d);
    x.head(d - 1) = (2.0 * sf.r0 / D) * z.head(d - 1);
    x(d - 1) = sf.r0 * (tang + zl * zl - 1.0) / D;
    return x;
}

/// Ball model to half space.
inline Vec halfspace_map_inverse(const Vec& x, const SpaceForm& sf) {
    const Eigen::Index d = x.size();
    const Vec y = x / sf.r0;
    const double yl = y(d - 1);
    const double tang = y.head(d - 1).squaredNorm();
    const double D = tang + (1.0 - yl) * (1.0 - yl);
    Vec z(d);
    z.head(d - 1) = (2.0 / D) * y.head(d - 1);
    z(d - 1) = (1.0 - tang - yl * yl) / D;
    return z;
}

/// Conformal factor of the ball-model metric, g = lambda^2 |dx|^2.
inline double ball_metric_factor(const Vec& x, const SpaceForm& sf) {
    return 2.0 / (1.0 + sf.K * x.squaredNorm());
}

/// The fixed axis a = -e_{n+1}.
inline Vec axis(Eigen::Index dim) {
    Vec a = Vec::Zero(dim);
    a(dim - 1) = -1.0;
    return a;
}

inline double killing_scalar_V(const Vec& x, const SpaceForm& sf) {
    const double xa = -x(x.size() - 1);
    return 2.0 * xa / (1.0 + sf.K * x.squaredNorm());
}

/// Returns (X_a, Y_a) at a ball-model point.
inline std::pair<Vec, Vec> killing_vectors(const Vec& x, const SpaceForm& sf) {
    const Vec a = axis(x.size());
    const double xa = x.dot(a);
    const double xx = x.squaredNorm();
    const double r2 = sf.r0 * sf.r0;
    Vec X = (2.0 / sf.m()) * (xa * x - 0.5 * (xx + r2) * a);
    Vec Y = 0.5 * (1.0 - sf.K * xx) * a + sf.K * xa * x;
    return {std::move(X), std::move(Y)};
}

/// Area of the unit (k-1)-sphere in R^k, |S^{k-1}|.
inline double unit_sphere_area(int k) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

} // namespace capflow
