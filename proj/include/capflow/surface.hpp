#pragma once

#include <cmath>
#include <utility>

#include "space_form.hpp"

namespace capflow {

/**
 * @brief Pointwise geometry of the radial graph rho = e^u at one node.
 *
 * Curvatures are taken with respect to the outward normal of the enclosed
 * region, so round caps have positive curvature.
 */
struct NodeGeometry {
    double rho = 1.0, v = 1.0;
    double weight = 1.0;        ///< conformal factor e^U on the graph
    double support = 0.0;       ///< g(X_a, nu)
    double V = 0.0;             ///< V_a
    double Ynu = 0.0;           ///< g(Y_a, nu)
    double kappa_meridian = 0.0;
    double kappa_azimuthal = 0.0;
    double mean_from_items = 0.0;  ///< closed-form mean curvature of the graph
    double laplace_term = 0.0;     ///< a^{ij} u_ij
    double n_minus_1 = 1.0;

    /// Sum of the principal curvatures.
    double mean() const { return kappa_meridian + n_minus_1 * kappa_azimuthal; }
};

/// The bracket rho^2 cos b + 2 rho + cos b - (rho^2 - 1) sin b u_b.
inline double axial_bracket(double rho, double beta, double ub) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    return rho * rho * cb + 2.0 * rho + cb - (rho * rho - 1.0) * sb * ub;
}

/// Euclidean principal curvatures (meridian, azimuthal) of the radial graph rho = e^u in the flat half space.
inline std::pair<double, double> euclidean_curvatures(double beta, double rho, double ub, double ubb, bool pole) {
    const double v = std::sqrt(1.0 + ub * ub);
    const double cot_ub = pole ? ubb : ub * std::cos(beta) / std::sin(beta);
    return {(1.0 - ubb / (v * v)) / (rho * v), (1.0 - cot_ub) / (rho * v)};
}

inline NodeGeometry node_geometry(double beta, double u, double ub, double ubb, bool pole, const SpaceForm& sf) {
    const double r0 = sf.r0, m = sf.m(), p = sf.p();
    const int n = sf.n;
    const double cb = std::cos(beta), sb = std::sin(beta);
    NodeGeometry g;
    g.n_minus_1 = n - 1.0;
    const double rho = std::exp(u);
    const double v = std::sqrt(1.0 + ub * ub);
    const double P = m * (1.0 + rho * rho) + 2.0 * p * rho * cb;
    const double e = 4.0 * r0 / P;
    g.rho = rho;
    g.v = v;
    g.weight = e;
    g.support = e * (2.0 * r0 / m) * rho / v;
    g.V = 0.5 * (1.0 - rho * rho) * e;
    const double Q = axial_bracket(rho, beta, ub);
    g.Ynu = sf.K * r0 * rho * e / v - m * e * Q / (4.0 * r0 * v);

    const double cot_ub = pole ? ubb : ub * cb / sb;
    const auto [kb, ka] = euclidean_curvatures(beta, rho, ub, ubb, pole);
    const double dnU = -(2.0 * m * rho + 2.0 * p * (cb + ub * sb)) / (P * v);
    g.kappa_meridian = (kb + dnU) / e;
    g.kappa_azimuthal = (ka + dnU) / e;

    g.laplace_term = ubb / (v * v) + (n - 1.0) * cot_ub;
    g.mean_from_items = -(g.laplace_term / (rho * v * e) + p / (2.0 * r0) * n * sb * ub / v
                          + n * (rho * rho - 1.0) * m / (4.0 * r0 * rho * v));
    return g;
}

} // namespace capflow
