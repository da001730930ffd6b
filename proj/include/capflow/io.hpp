#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "convergence.hpp"
#include "error.hpp"
#include "flow.hpp"

namespace capflow {

/// Everything a config file can set.
struct RunConfig {
    FlowConfig flow;
    std::string output_dir = "capflow_out";
    bool verify_refine = true;
};

namespace detail {

inline long line_of(const toml::node& n) { return static_cast<long>(n.source().begin.line); }

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"spaceform", {"K", "R", "n", "theta"}},
        {"grid", {"N"}},
        {"flow", {"cfl", "t_max", "tol_stop", "snapshot_every", "strict_angle"}},
        {"initial", {"cap_rhat", "perturb_amp", "perturb_mode"}},
        {"output", {"dir"}},
        {"verify", {"refine"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(const toml::table& root) : root_(root) {}

    const toml::node* find(const std::string& table, const std::string& key) const {
        const auto* t = root_.get_as<toml::table>(table);
        return t ? t->get(key) : nullptr;
    }

    double real(const std::string& table, const std::string& key, std::optional<double> fallback) const {
        const auto* n = find(table, key);
        if (!n) return require(table, key, fallback);
        if (auto v = n->value<double>()) return *v;
        throw ConfigError(table + "." + key, "expected a number", line_of(*n));
    }

    long integer(const std::string& table, const std::string& key, std::optional<long> fallback) const {
        const auto* n = find(table, key);
        if (!n) return require(table, key, fallback);
        if (n->is_integer()) return static_cast<long>(*n->value<int64_t>());
        throw ConfigError(table + "." + key, "expected an integer", line_of(*n));
    }

    bool boolean(const std::string& table, const std::string& key, bool fallback) const {
        const auto* n = find(table, key);
        if (!n) return fallback;
        if (auto v = n->value<bool>()) return *v;
        throw ConfigError(table + "." + key, "expected true or false", line_of(*n));
    }

    std::string text(const std::string& table, const std::string& key, const std::string& fallback) const {
        const auto* n = find(table, key);
        if (!n) return fallback;
        if (auto v = n->value<std::string>()) return *v;
        throw ConfigError(table + "." + key, "expected a string", line_of(*n));
    }

    long line(const std::string& table, const std::string& key) const {
        const auto* n = find(table, key);
        return n ? line_of(*n) : 0;
    }

private:
    template <class T>
    static T require(const std::string& table, const std::string& key, std::optional<T> fallback) {
        if (!fallback) throw ConfigError(table + "." + key, "required key is missing");
        return *fallback;
    }

    const toml::table& root_;
};

} // namespace detail

/// Parses and validates a TOML run configuration.
inline RunConfig parse_config(std::string_view text, std::string_view source = "config") {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError("", std::string(e.description()), static_cast<long>(e.source().begin.line));
    }

    for (const auto& [k, node] : root) {
        const std::string key(k.str());
        const auto it = detail::allowed_keys().find(key);
        if (it == detail::allowed_keys().end()) throw ConfigError(key, "unknown table", detail::line_of(node));
        const auto* tbl = node.as_table();
        if (!tbl) throw ConfigError(key, "expected a table", detail::line_of(node));
        for (const auto& [sub, subnode] : *tbl) {
            const std::string s(sub.str());
            if (!it->second.count(s)) throw ConfigError(key + "." + s, "unknown key", detail::line_of(subnode));
        }
    }

    const detail::Reader rd(root);
    RunConfig rc;
    FlowConfig& f = rc.flow;

    const long K = rd.integer("spaceform", "K", std::nullopt);
    const double R = rd.real("spaceform", "R", std::nullopt);
    const long n = rd.integer("spaceform", "n", std::nullopt);
    const double theta = rd.real("spaceform", "theta", std::nullopt);
    if (K != -1 && K != 1) throw ConfigError("spaceform.K", "must be -1 or 1", rd.line("spaceform", "K"));
    if (n < 2) throw ConfigError("spaceform.n", "must be an integer >= 2", rd.line("spaceform", "n"));
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw ConfigError("spaceform.theta", "theta must lie in the open range (0, pi)", rd.line("spaceform", "theta"));
    try {
        f.sf = SpaceForm::make(static_cast<int>(K), R, static_cast<int>(n), theta);
    } catch (const DomainError& e) {
        throw ConfigError("spaceform.R", e.what(), rd.line("spaceform", "R"));
    }

    const long N = rd.integer("grid", "N", std::nullopt);
    try {
        f.grid = Grid::make(static_cast<int>(N));
    } catch (const DomainError& e) {
        throw ConfigError("grid.N", e.what(), rd.line("grid", "N"));
    }

    f.cfl = rd.real("flow", "cfl", 0.4);
    f.t_max = rd.real("flow", "t_max", 10.0);
    f.tol_stop = rd.real("flow", "tol_stop", 1e-7);
    f.snapshot_every = rd.integer("flow", "snapshot_every", 1000);
    f.strict_angle = rd.boolean("flow", "strict_angle", false);
    f.initial.cap_rhat = rd.real("initial", "cap_rhat", 1.0);
    f.initial.perturb_amp = rd.real("initial", "perturb_amp", 0.0);
    f.initial.perturb_mode = static_cast<int>(rd.integer("initial", "perturb_mode", 1));
    rc.output_dir = rd.text("output", "dir", rc.output_dir);
    rc.verify_refine = rd.boolean("verify", "refine", true);

    if (!(f.cfl > 0.0 && f.cfl <= 0.5)) throw ConfigError("flow.cfl", "must lie in (0, 0.5]", rd.line("flow", "cfl"));
    if (!(f.t_max > 0.0)) throw ConfigError("flow.t_max", "must be positive", rd.line("flow", "t_max"));
    if (!(f.tol_stop >= 0.0)) throw ConfigError("flow.tol_stop", "must be non-negative", rd.line("flow", "tol_stop"));
    if (f.snapshot_every < 1) throw ConfigError("flow.snapshot_every", "must be at least 1", rd.line("flow", "snapshot_every"));
    if (!(f.initial.cap_rhat > 0.0)) throw ConfigError("initial.cap_rhat", "must be positive", rd.line("initial", "cap_rhat"));
    if (f.initial.perturb_mode < 1) throw ConfigError("initial.perturb_mode", "must be at least 1", rd.line("initial", "perturb_mode"));
    if (f.strict_angle && !f.sf.angle_restriction_holds())
        throw ConfigError("spaceform.theta",
                          "angle restriction |cos theta| < (3n+1)/(5n-1) violated and flow.strict_angle is set",
                          rd.line("spaceform", "theta"));
    return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

/// Decimal text that reads back to the same double.
inline std::string exact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_snapshot_csv(const std::filesystem::path& path, const GraphState& s, const Grid& grid, const SpaceForm& sf) {
    const Jet j = derivatives(s, grid, sf.theta);
    const auto G = speed_G(j, grid, sf);
    const auto geo = graph_geometry(j, grid, sf);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "beta,u,rho,G,kappa_beta,kappa_azimuthal\n";
    for (std::size_t i = 0; i < s.u.size(); ++i)
        out << exact(grid.beta(i)) << ',' << exact(s.u[i]) << ',' << exact(geo[i].rho) << ',' << exact(G[i]) << ','
            << exact(geo[i].kappa_meridian) << ',' << exact(geo[i].kappa_azimuthal) << '\n';
}

/// Columns of a CSV file with a header row, keyed by header name.
inline std::map<std::string, std::vector<double>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> names;
    {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) names.push_back(cell);
    }
    std::map<std::string, std::vector<double>> cols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t c = 0; c < names.size() && std::getline(ls, cell, ','); ++c)
            cols[names[c]].push_back(std::strtod(cell.c_str(), nullptr));
    }
    return cols;
}

inline void write_observables_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,area,wetting,volume,energy,max_abs_G,kappa_spread\n";
    for (const auto& s : snaps) {
        const auto& r = s.record;
        out << exact(r.t) << ',' << exact(r.area) << ',' << exact(r.wetting) << ',' << exact(r.volume) << ','
            << exact(r.energy) << ',' << exact(r.max_abs_G) << ',' << exact(r.kappa_spread) << '\n';
    }
}

using nlohmann::json;

inline json to_json(const ObservableRecord& r) {
    json mk = json::object();
    for (const auto& [k, v] : r.minkowski_residual) mk[std::to_string(k)] = v;
    return {{"t", r.t}, {"area", r.area}, {"wetting", r.wetting}, {"volume", r.volume}, {"energy", r.energy},
            {"H_min", r.H_min}, {"H_max", r.H_max}, {"kappa_spread", r.kappa_spread}, {"max_abs_G", r.max_abs_G},
            {"minkowski_residual", mk}};
}

inline json to_json(const RunConfig& rc) {
    const auto& f = rc.flow;
    return {{"spaceform", {{"K", f.sf.K}, {"R", f.sf.R}, {"n", f.sf.n}, {"theta", f.sf.theta}, {"r0", f.sf.r0}}},
            {"grid", {{"N", f.grid.N}}},
            {"flow", {{"cfl", f.cfl}, {"t_max", f.t_max}, {"tol_stop", f.tol_stop}, {"snapshot_every", f.snapshot_every},
                      {"strict_angle", f.strict_angle}}},
            {"initial", {{"cap_rhat", f.initial.cap_rhat}, {"perturb_amp", f.initial.perturb_amp},
                         {"perturb_mode", f.initial.perturb_mode}}},
            {"output", {{"dir", rc.output_dir}}}};
}

inline json to_json(const CheckResult& c) {
    return {{"passed", c.passed}, {"value", c.value}, {"bound", c.bound}};
}

/// Keys present in every summary.json.
inline const std::vector<std::string>& summary_keys() {
    static const std::vector<std::string> keys{"config",  "termination", "steps",         "wall_time_s", "t_final",
                                               "initial", "final",       "cap_fit",       "isoperimetric",
                                               "checks",  "warnings",    "failure"};
    return keys;
}

} // namespace capflow
