#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "convergence.hpp"
#include "io.hpp"
#include "verify.hpp"

namespace capflow {

enum ExitCode : int { kExitConverged = 0, kExitError = 1, kExitTimeLimit = 2 };

/// Output directory: CAPFLOW_OUTPUT_DIR when set, else the configured one.
inline std::filesystem::path output_directory(const RunConfig& rc) {
    if (const char* env = std::getenv("CAPFLOW_OUTPUT_DIR"); env && *env) return env;
    return rc.output_dir;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

/// Runs the flow, writes snapshots, observables.csv and summary.json; returns the exit code.
inline int run_evolve(const RunConfig& rc, std::ostream& log) {
    const auto dir = output_directory(rc);
    std::filesystem::create_directories(dir);
    const FlowConfig& cfg = rc.flow;

    nlohmann::json summary;
    for (const auto& k : summary_keys()) summary[k] = nullptr;
    summary["config"] = to_json(rc);

    const auto t0 = std::chrono::steady_clock::now();
    Trajectory tr;
    std::string violated;
    try {
        tr = evolve(cfg);
    } catch (const InvariantViolation& e) {
        violated = e.invariant();
        summary["termination"] = "invariant-violation";
        summary["failure"] = e.what();
        summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        summary["warnings"] = nlohmann::json::array();
        write_json(dir / "summary.json", summary);
        log << "error: invariant violated: " << e.what() << '\n';
        return kExitError;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& s : tr.snapshots)
        write_snapshot_csv(dir / ("snap_" + std::to_string(s.step) + ".csv"), s.state, cfg.grid, cfg.sf);
    write_observables_csv(dir / "observables.csv", tr.snapshots);

    summary["termination"] = to_string(tr.reason);
    summary["steps"] = tr.steps;
    summary["wall_time_s"] = wall;
    summary["t_final"] = tr.final_state.t;
    summary["warnings"] = tr.warnings;
    summary["failure"] = tr.failure.empty() ? nlohmann::json(nullptr) : nlohmann::json(tr.failure);
    for (const auto& w : tr.warnings) log << "warning: " << w << '\n';

    if (!tr.snapshots.empty()) {
        summary["initial"] = to_json(tr.snapshots.front().record);
        summary["final"] = to_json(tr.snapshots.back().record);
        const double v0 = tr.snapshots.front().record.volume;
        nlohmann::json checks;
        checks["volume_conservation"] = to_json(volume_drift_check(tr));
        checks["energy_monotonicity"] = to_json(energy_monotone_check(tr));
        checks["enclosure"] = to_json(enclosure_check(tr, cfg.grid));
        checks["gradient_bound"] = to_json(gradient_bound_check(tr));
        try {
            const CapFit fit = fit_cap(tr.final_state.u, cfg.grid, cfg.sf, v0);
            summary["cap_fit"] = {{"c", fit.c}, {"rhat", fit.rhat}, {"rms", fit.rms}, {"volume_match", fit.volume_match}};
            checks["cap_fit_rms"] = to_json(CheckResult{"cap_fit_rms", fit.rms <= kConvergedFitRms, fit.rms, kConvergedFitRms});
            checks["volume_match"] = to_json(CheckResult{"volume_match", fit.volume_match <= 1e-3, fit.volume_match, 1e-3});
        } catch (const FitFailure& e) {
            summary["cap_fit"] = {{"error", e.what()}};
        }
        const double spread = tr.snapshots.back().record.kappa_spread;
        checks["umbilicity"] = to_json(CheckResult{"umbilicity", spread <= kConvergedSpread, spread, kConvergedSpread});
        if (tr.reason == Termination::Converged) {
            const auto iso = isoperimetric_check(tr, cfg.grid, cfg.sf);
            summary["isoperimetric"] = {{"energy_initial", iso.energy_initial}, {"energy_final", iso.energy_final},
                                        {"energy_cap", iso.energy_cap},         {"relative_gap", iso.relative_gap},
                                        {"decreased", iso.decreased},           {"matches_cap", iso.matches_cap},
                                        {"failures", iso.failures},             {"table", iso.table}};
        }
        summary["checks"] = checks;
    }
    write_json(dir / "summary.json", summary);

    log << "termination: " << to_string(tr.reason) << " after " << tr.steps << " steps, t = " << tr.final_state.t << '\n';
    switch (tr.reason) {
    case Termination::Converged: return kExitConverged;
    case Termination::TimeLimit: return kExitTimeLimit;
    default: log << "error: " << tr.failure << '\n'; return kExitError;
    }
}

/// Runs the verification suites and writes verify.json; 0 when every check passes.
inline int run_verify(const RunConfig& rc, std::ostream& log) {
    const auto dir = output_directory(rc);
    std::filesystem::create_directories(dir);
    const auto report = run_verification(rc.flow, rc.verify_refine);
    write_json(dir / "verify.json", report);
    for (const auto& w : report["warnings"]) log << "warning: " << w.get<std::string>() << '\n';
    const bool ok = report["passed"].get<bool>();
    log << "verify: " << (ok ? "passed" : "failed") << '\n';
    return ok ? kExitConverged : kExitError;
}

} // namespace capflow
