// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <capflow/capflow.hpp>
#include <capflow/io.hpp>

#include "oracles.hpp"

using namespace capflow;
using std::numbers::pi;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SpaceForm unit_space(int K, double theta, int n = 2) {
    return SpaceForm::make(K, K < 0 ? std::log(3.0) : 1.0, n, theta);
}

void static_caps() {
    bool ok = true;
    double worst_res = 0.0, worst_rate = INFINITY;
    int waived = 0;
    for (int K : {-1, 1})
        for (double th : {pi / 3, pi / 2, 2 * pi / 3})
            for (double rhat : {0.5, 1.0, 2.0}) {
                const SpaceForm sf = unit_space(K, th);
                const CapProfile cap = cap_from_halfspace(rhat, sf);
                RefinementStudy s;
                for (int N : {64, 256}) {
                    s.N.push_back(N);
                    s.residual.push_back(static_cap_residual(cap, Grid::make(N), sf));
                }
                s = finish_study(s, kStaticResidualFloor, 1e-5);
                ok = ok && s.passed;
                worst_res = std::max(worst_res, s.residual.back());
                if (s.rate) worst_rate = std::min(worst_rate, *s.rate);
                if (s.waived) ++waived;
            }
    report("static_caps", ok,
           fmt("max|G| at N=256 %.2e (bound 1e-5), min rate %.2f (bound 1.8), %d of 18 at roundoff", worst_res,
               worst_rate, waived));
}

struct Run {
    RunConfig rc;
    Trajectory tr;
};

Run standard(const char* file) {
    Run r{load_config(std::string(CAPFLOW_CONFIGS) + "/" + file), {}};
    r.tr = evolve(r.rc.flow);
    return r;
}

void volume_energy_enclosure(const Run& r) {
    const auto v = volume_drift_check(r.tr);
    report("volume_conservation", v.passed, fmt("relative drift %.2e (bound %.0e)", v.value, v.bound));
    const auto e = energy_monotone_check(r.tr);
    report("energy_monotonicity", e.passed,
           fmt("largest relative increase %.2e over %zu snapshots (slack %.0e)", e.value, r.tr.snapshots.size(), e.bound));
    const auto c = enclosure_check(r.tr, r.rc.flow.grid);
    const auto& en = r.tr.enclosure;
    const bool nested = en.inner.rhat < en.outer.rhat;
    report("enclosure", c.passed && nested,
           fmt("caps rhat %.6f < %.6f (ball radii %.6f, %.6f), worst excursion %.2e (allowed h^2 = %.2e)",
               en.inner.rhat, en.outer.rhat, en.inner.r, en.outer.r, c.value, c.bound));
}

void convergence(const Run& hyp, const Run& sph) {
    bool ok = true;
    std::string detail;
    for (const Run* r : {&hyp, &sph}) {
        const auto& f = r->rc.flow;
        const auto& last = r->tr.snapshots.back().record;
        const CapFit fit = fit_cap(r->tr.final_state.u, f.grid, f.sf, r->tr.snapshots.front().record.volume);
        const bool c = r->tr.reason == Termination::Converged && last.kappa_spread <= 1e-3 && fit.rms <= 1e-5 &&
                       fit.volume_match <= 1e-3;
        ok = ok && c;
        detail += fmt("K=%+d %s t=%.3f spread %.1e rms %.1e vol %.1e; ", f.sf.K, to_string(r->tr.reason),
                      r->tr.final_state.t, last.kappa_spread, fit.rms, fit.volume_match);
    }
    detail.resize(detail.size() - 2);
    report("convergence_to_cap", ok, detail);
}

void minkowski() {
    bool ok = true;
    double worst_rate = INFINITY, worst_fine = 0.0;
    int studies = 0, waived = 0;
    for (int K : {-1, 1}) {
        const SpaceForm sf = unit_space(K, pi / 3);
        std::vector<RandomProfile> profiles{{1.0, {}}};
        for (const auto& p : random_profiles(10, 2024u)) profiles.push_back(p);
        for (const auto& p : profiles) {
            const CapProfile cap = cap_from_halfspace(p.rhat, sf);
            for (int k = 1; k <= 2; ++k) {
                RefinementStudy s;
                for (int N : {64, 256}) {
                    const Grid g = Grid::make(N);
                    s.N.push_back(N);
                    s.residual.push_back(minkowski_on(perturbed_cap(cap, p.amps, g), g, sf, k));
                }
                s = finish_study(s, kMinkowskiFloor, std::nullopt);
                ok = ok && s.passed;
                ++studies;
                worst_fine = std::max(worst_fine, s.residual.back());
                if (s.rate) worst_rate = std::min(worst_rate, *s.rate);
                if (s.waived) ++waived;
            }
        }
    }
    report("minkowski_identities", ok,
           fmt("%d studies, min rate %.2f (bound 1.8), max residual at N=256 %.2e, %d at roundoff", studies, worst_rate,
               worst_fine, waived));
}

void curvature() {
    const Grid g = Grid::make(256);
    double worst = 0.0;
    for (int K : {-1, 1})
        for (int n : {2, 3}) {
            const SpaceForm sf = unit_space(K, pi / 3, n);
            for (const auto& p : random_profiles(10, 77u))
                worst = std::max(worst, curvature_crosscheck(perturbed_cap(cap_from_halfspace(p.rhat, sf), p.amps, g), g, sf));
        }
    report("curvature_crosscheck", worst <= 1e-6, fmt("max relative difference %.2e (bound 1e-6)", worst));
}

void oracle_quadratures() {
    const Grid g = Grid::make(256);
    double worst = 0.0;
    struct Case {
        int K;
        double rhat;
    };
    for (Case c : {Case{-1, 0.2}, Case{-1, 0.3}, Case{1, 0.5}, Case{1, 0.9}}) {
        const SpaceForm sf = unit_space(c.K, pi / 2);
        const auto sphere = oracle::geodesic_sphere(c.rhat, -c.rhat, sf.r0, c.K);
        const auto zone = oracle::orthogonal_zone(sphere.radius, sphere.centre_distance, sf.R, c.K);
        const Jet j = cap_jet(cap_from_halfspace(c.rhat, sf), g);
        worst = std::max({worst, std::abs(area(j, g, sf) - zone.area) / zone.area,
                          std::abs(volume(j, g, sf) - zone.volume) / zone.volume});
    }
    report("oracle_quadratures", worst <= 1e-6, fmt("max relative error %.2e over H^3 and S^3 caps (bound 1e-6)", worst));
}

} // namespace

int main() {
    try {
        static_caps();
        const Run hyp = standard("standard.toml");
        volume_energy_enclosure(hyp);
        const Run sph = standard("standard_spherical.toml");
        convergence(hyp, sph);
        minkowski();
        curvature();
        oracle_quadratures();
    } catch (const std::exception& e) {
        std::printf("FAIL %-24s %s\n", "exception", e.what());
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
