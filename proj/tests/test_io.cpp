#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <capflow/run.hpp>

using namespace capflow;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"([spaceform]
K = -1
R = 1.0986122886681098
n = 2
theta = 1.0471975511965976

[grid]
N = 32
)";

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("capflow_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

/// Sets CAPFLOW_OUTPUT_DIR for the lifetime of the object.
struct OutputDirOverride {
    explicit OutputDirOverride(const fs::path& p) { setenv("CAPFLOW_OUTPUT_DIR", p.c_str(), 1); }
    ~OutputDirOverride() { unsetenv("CAPFLOW_OUTPUT_DIR"); }
};

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, ParsesDefaultsAndValues) {
    const RunConfig rc = parse_config(std::string(kBase) + "[flow]\ncfl = 0.3\nsnapshot_every = 7\n[output]\ndir = \"x\"\n");
    EXPECT_EQ(rc.flow.sf.K, -1);
    EXPECT_NEAR(rc.flow.sf.r0, 0.5, 1e-15);
    EXPECT_EQ(rc.flow.grid.N, 32);
    EXPECT_EQ(rc.flow.cfl, 0.3);
    EXPECT_EQ(rc.flow.snapshot_every, 7);
    EXPECT_EQ(rc.flow.t_max, 10.0);
    EXPECT_EQ(rc.flow.initial.cap_rhat, 1.0);
    EXPECT_EQ(rc.output_dir, "x");
    EXPECT_TRUE(rc.verify_refine);
}

TEST(Config, RejectsUnknownKeysWithLine) {
    const auto msg = message_of(std::string(kBase) + "[flow]\ncfl = 0.3\nspeed = 2\n");
    EXPECT_NE(msg.find("line 11"), std::string::npos) << msg;
    EXPECT_NE(msg.find("flow.speed"), std::string::npos) << msg;
    EXPECT_NE(message_of(std::string(kBase) + "[extra]\na = 1\n").find("unknown table"), std::string::npos);
}

TEST(Config, RequiresKeys) {
    const auto msg = message_of("[spaceform]\nK = 1\nR = 1.0\nn = 2\n[grid]\nN = 32\n");
    EXPECT_NE(msg.find("spaceform.theta"), std::string::npos) << msg;
    EXPECT_NE(msg.find("required"), std::string::npos) << msg;
    EXPECT_NE(message_of("[spaceform]\nK = 1\nR = 1.0\nn = 2\ntheta = 1.0\n").find("grid.N"), std::string::npos);
}

TEST(Config, ValidatesValues) {
    auto with = [](const std::string& from, const std::string& to) {
        std::string t = kBase;
        t.replace(t.find(from), from.size(), to);
        return message_of(t);
    };
    const auto theta = with("theta = 1.0471975511965976", "theta = 0.0");
    EXPECT_NE(theta.find("theta must lie in the open range (0, pi)"), std::string::npos) << theta;
    EXPECT_NE(theta.find("line 5"), std::string::npos) << theta;
    EXPECT_NE(with("theta = 1.0471975511965976", "theta = 3.5").find("open range"), std::string::npos);
    EXPECT_NE(with("K = -1", "K = 0").find("-1 or 1"), std::string::npos);
    EXPECT_NE(with("K = -1", "K = \"h\"").find("expected an integer"), std::string::npos);
    EXPECT_NE(with("N = 32", "N = 32.5").find("expected an integer"), std::string::npos);
    EXPECT_NE(with("N = 32", "N = 33").find("even"), std::string::npos);
    EXPECT_NE(with("R = 1.0986122886681098", "R = -1.0").find("spaceform.R"), std::string::npos);
    EXPECT_NE(message_of("[spaceform\nK = 1\n").find("line 1"), std::string::npos);
}

TEST(Config, StrictAngle) {
    std::string t = kBase;
    t.replace(t.find("theta = 1.0471975511965976"), 26, "theta = 0.4510268117962624");  // cos theta = 0.9
    EXPECT_NO_THROW(parse_config(t));
    const auto msg = message_of(t + "[flow]\nstrict_angle = true\n");
    EXPECT_NE(msg.find("(3n+1)/(5n-1)"), std::string::npos) << msg;
}

TEST(Csv, ExactRoundTrip) {
    EXPECT_EQ(std::strtod(exact(0.1).c_str(), nullptr), 0.1);
    const RunConfig rc = parse_config(kBase);
    const auto& f = rc.flow;
    GraphState s{initial_profile({0.9, 0.05, 2}, f.grid, f.sf), 0.0};
    const fs::path dir = scratch("csv");
    write_snapshot_csv(dir / "snap.csv", s, f.grid, f.sf);
    const auto cols = read_csv(dir / "snap.csv");
    ASSERT_EQ(cols.at("u").size(), s.u.size());
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        EXPECT_EQ(cols.at("u")[i], s.u[i]);
        EXPECT_EQ(cols.at("beta")[i], f.grid.beta(i));
    }
    for (const char* c : {"rho", "G", "kappa_beta", "kappa_azimuthal"}) EXPECT_EQ(cols.at(c).size(), s.u.size());
}

TEST(Run, TimeLimitWritesEverything) {
    const fs::path dir = scratch("timelimit");
    OutputDirOverride env(dir);
    const RunConfig rc = parse_config(std::string(kBase) + "[flow]\nt_max = 0.05\nsnapshot_every = 50\n"
                                                           "[initial]\nperturb_amp = 0.05\n[output]\ndir = \"ignored\"\n");
    std::ostringstream log;
    EXPECT_EQ(run_evolve(rc, log), kExitTimeLimit);
    EXPECT_FALSE(fs::exists("ignored"));
    EXPECT_TRUE(fs::exists(dir / "snap_0.csv"));
    EXPECT_TRUE(fs::exists(dir / "snap_50.csv"));
    const auto obs = read_csv(dir / "observables.csv");
    for (const char* c : {"t", "area", "wetting", "volume", "energy", "max_abs_G", "kappa_spread"}) EXPECT_TRUE(obs.count(c));
    EXPECT_EQ(obs.at("t").back(), 0.05);
    const auto summary = read_json(dir / "summary.json");
    for (const auto& k : summary_keys()) EXPECT_TRUE(summary.contains(k)) << k;
    EXPECT_EQ(summary["termination"], "time-limit");
    EXPECT_EQ(summary["t_final"].get<double>(), 0.05);
    EXPECT_TRUE(summary["isoperimetric"].is_null());
    EXPECT_TRUE(summary["checks"]["volume_conservation"]["passed"].get<bool>());
}

TEST(Run, ConvergedRun) {
    const fs::path dir = scratch("converged");
    OutputDirOverride env(dir);
    const RunConfig rc = parse_config(std::string(kBase) + "[flow]\ntol_stop = 1e-6\n[initial]\nperturb_amp = 0.03\n");
    std::ostringstream log;
    EXPECT_EQ(run_evolve(rc, log), kExitConverged);
    const auto summary = read_json(dir / "summary.json");
    EXPECT_EQ(summary["termination"], "converged");
    EXPECT_LE(summary["final"]["max_abs_G"].get<double>(), 1e-6);
    EXPECT_TRUE(summary["isoperimetric"]["matches_cap"].get<bool>());
    EXPECT_EQ(summary["config"]["grid"]["N"], 32);
    EXPECT_NE(log.str().find("converged"), std::string::npos);
}

TEST(Run, VerifyPassesForBothSpaceForms) {
    for (const char* K : {"-1", "1"}) {
        const fs::path dir = scratch(std::string("verify") + K);
        OutputDirOverride env(dir);
        std::string t = kBase;
        t.replace(t.find("K = -1"), 6, std::string("K = ") + K);
        std::ostringstream log;
        EXPECT_EQ(run_verify(parse_config(t), log), kExitConverged) << log.str();
        const auto v = read_json(dir / "verify.json");
        EXPECT_TRUE(v["passed"].get<bool>()) << v.dump(2);
        EXPECT_EQ(v["static_caps"].size(), 3u);
        EXPECT_EQ(v["static_caps"][0]["N"], nlohmann::json({32, 128}));
        EXPECT_EQ(v["minkowski"].size(), 4u);
    }
}

TEST(Run, VerifyWithoutRefinement) {
    const fs::path dir = scratch("verify_norefine");
    OutputDirOverride env(dir);
    std::string t = kBase;
    t.replace(t.find("N = 32"), 6, "N = 16");
    std::ostringstream log;
    EXPECT_EQ(run_verify(parse_config(t + "[verify]\nrefine = false\n"), log), kExitConverged) << log.str();
    const auto v = read_json(dir / "verify.json");
    EXPECT_EQ(v["static_caps"][0]["rate"], "n/a");
    EXPECT_EQ(v["warnings"].size(), 1u);
    EXPECT_NE(log.str().find("warning"), std::string::npos);
}

TEST(Cli, BundledConfigConverges) {
    const fs::path dir = scratch("cli");
    const int code = shell("CAPFLOW_OUTPUT_DIR=" + dir.string() + " " + CAPFLOW_CLI + " evolve " + CAPFLOW_CONFIGS +
                           "/standard.toml > " + (dir / "log.txt").string() + " 2>&1");
    EXPECT_EQ(code, 0);
    const auto summary = read_json(dir / "summary.json");
    EXPECT_EQ(summary["termination"], "converged");
    EXPECT_TRUE(summary["checks"]["energy_monotonicity"]["passed"].get<bool>());
    EXPECT_TRUE(summary["checks"]["volume_conservation"]["passed"].get<bool>());
}

TEST(Cli, ErrorsExitWithOne) {
    const fs::path dir = scratch("cli_error");
    std::string t = kBase;
    t.replace(t.find("theta = 1.0471975511965976"), 26, "theta = 0.0");
    std::ofstream(dir / "bad.toml") << t;
    const std::string out = " > " + (dir / "log.txt").string() + " 2>&1";
    EXPECT_EQ(shell(std::string(CAPFLOW_CLI) + " evolve " + (dir / "bad.toml").string() + out), 1);
    std::ifstream in(dir / "log.txt");
    const std::string log((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(log.find("theta must lie in the open range (0, pi)"), std::string::npos) << log;
    std::string strict = kBase;
    strict.replace(strict.find("theta = 1.0471975511965976"), 26, "theta = 0.4510268117962624");
    std::ofstream(dir / "strict.toml") << strict << "[flow]\nstrict_angle = true\n";
    EXPECT_EQ(shell(std::string(CAPFLOW_CLI) + " evolve " + (dir / "strict.toml").string() + out), 1);
    std::ifstream in2(dir / "log.txt");
    const std::string log2((std::istreambuf_iterator<char>(in2)), {});
    EXPECT_NE(log2.find("angle restriction"), std::string::npos) << log2;
    EXPECT_EQ(shell(std::string(CAPFLOW_CLI) + " evolve " + (dir / "missing.toml").string() + out), 1);
    EXPECT_EQ(shell(std::string(CAPFLOW_CLI) + " frobnicate" + out), 1);
}
