#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = KINREG_CLI_PATH;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kinreg_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& log, const std::string& env = "") {
    const std::string cmd = env + " " + kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.ini";
    std::ofstream(p) << text;
    return p;
}

const char* kSphere = "[domain]\nname = sphere\n[temperature]\nkind = constant\nt0 = 0.05\n";

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) {
    const auto dir = scratch("usage");
    EXPECT_EQ(run("frobnicate", dir / "log"), 2);
    EXPECT_NE(slurp(dir / "log").find("Usage"), std::string::npos);
    EXPECT_EQ(run("", dir / "log"), 2);
    EXPECT_EQ(run("solve --jobs 0", dir / "log"), 2);
}

TEST(Cli, BadConfigReportsTheLine) {
    const auto dir = scratch("badcfg");
    const auto cfg = write_config(dir, "[grid]\nvolume_nodes = 600\ngrazing_cutoff = 0\n");
    EXPECT_EQ(run("solve --config " + cfg.string() + " --out-dir " + (dir / "out").string(), dir / "log"), 2);
    EXPECT_NE(slurp(dir / "log").find("line 3"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));

    const auto gamma = write_config(dir, "[model]\ngamma = 0\n");
    EXPECT_EQ(run("verify-geometry --config " + gamma.string(), dir / "log"), 2);
    EXPECT_NE(slurp(dir / "log").find("line 2"), std::string::npos);
}

TEST(Cli, EnvironmentOverrideIsValidated) {
    const auto dir = scratch("env");
    const auto cfg = write_config(dir, kSphere);
    EXPECT_EQ(run("verify-geometry --config " + cfg.string(), dir / "log", "KINREG_GRID_MESH_POLAR=0"), 2);
}

TEST(Cli, GeometryOnSpherePasses) {
    const auto dir = scratch("geometry");
    const auto cfg = write_config(dir, kSphere);
    ASSERT_EQ(run("verify-geometry --config " + cfg.string() + " --out-dir " + (dir / "out").string(), dir / "log"), 0)
        << slurp(dir / "log");
    const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    EXPECT_EQ(summary["command"], "verify-geometry");
    EXPECT_FALSE(summary["failed"].get<bool>());
    std::set<std::string> names;
    for (const auto& v : summary["verdicts"]) {
        EXPECT_EQ(v["status"], "pass") << v["check"];
        EXPECT_TRUE(names.insert(v["check"].get<std::string>()).second);
    }
    EXPECT_TRUE(names.count("inverse_square_sphere_closed_form"));
    for (const auto& a : summary["artifacts"]) EXPECT_TRUE(fs::exists(dir / "out" / a.get<std::string>())) << a;
}

TEST(Cli, OutputsAreByteIdenticalForAFixedSeed) {
    const auto dir = scratch("determinism");
    const auto cfg = write_config(dir, "[domain]\nname = ellipsoid\n");
    const std::string base = "verify-flux-forms --config " + cfg.string() + " --jobs 2 --out-dir ";
    ASSERT_EQ(run(base + (dir / "a").string(), dir / "log"), 0) << slurp(dir / "log");
    ASSERT_EQ(run(base + (dir / "b").string(), dir / "log"), 0);
    ASSERT_EQ(run(base + (dir / "c").string() + " --seed 2", dir / "log"), 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().extension() != ".csv") continue;
        const auto name = e.path().filename();
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 4);
    EXPECT_NE(slurp(dir / "a" / "flux_form_bpsi.csv"), slurp(dir / "c" / "flux_form_bpsi.csv"));
}

TEST(Cli, DivergenceExitsWithResidualHistory) {
    const auto dir = scratch("diverge");
    const auto cfg = write_config(dir, std::string(kSphere) +
                                           "[grid]\nvolume_nodes = 40\n[solver]\ntol = 1e-14\nmax_iters = 3\n");
    EXPECT_EQ(run("solve --config " + cfg.string() + " --out-dir " + (dir / "out").string(), dir / "log"), 3)
        << slurp(dir / "log");
    const std::string res = slurp(dir / "out" / "residuals.csv");
    EXPECT_EQ(res.rfind("iter,update_norm,equation_residual,flux_iterations\n", 0), 0u);
    EXPECT_EQ(std::count(res.begin(), res.end(), '\n'), 4);
    const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    EXPECT_TRUE(summary["failed"].get<bool>());
    EXPECT_TRUE(summary["convergence"]["diverged"].get<bool>());
}
