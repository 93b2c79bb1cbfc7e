#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <shallowcv/app.hpp>

using namespace shallowcv;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SHALLOWCV_CONFIG_DIR;

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "shallowcv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    CliResult r;
    r.code = app::run_cli(int(argv.size()), argv.data(), o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

class CliTest : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() / ("shallowcv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write_config(const json& j, const std::string& name = "cfg.json") {
        const fs::path p = dir / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }
    json base() const { return json::parse(slurp(kConfigs / "case1.json")); }
};

/// Data rows of a CSV (comment lines dropped).
std::vector<std::string> rows(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> r;
    for (std::string l; std::getline(in, l);)
        if (!l.empty() && l[0] != '#') r.push_back(l);
    return r;
}

}  // namespace

TEST_F(CliTest, MapUnitCircleHasZeroRobinConstant) {
    const CliResult r = cli({"map", "--config", (kConfigs / "unit_circle_csv.json").string(), "--out", (dir / "m").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = read_json(dir / "m" / "map.json");
    EXPECT_LT(std::abs(j["csm"]["robin_constant"].get<double>()), 1e-9);
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_TRUE(j.contains("config"));
    EXPECT_TRUE(fs::exists(dir / "m" / "map_backward_grid.csv"));
    EXPECT_TRUE(fs::exists(dir / "m" / "map_forward_cloud.csv"));
}

TEST_F(CliTest, MapCase4Warns) {
    const CliResult r = cli({"map", "--config", (kConfigs / "case4.json").string(), "--out", (dir / "m").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_FALSE(read_json(dir / "m" / "map.json")["warnings"].empty());
    const CliResult r1 = cli({"map", "--config", (kConfigs / "case1.json").string(), "--out", (dir / "m1").string()});
    EXPECT_TRUE(read_json(dir / "m1" / "map.json")["warnings"].empty());
    EXPECT_LT(read_json(dir / "m1" / "map.json")["validity_metric"].get<double>(), 0.05);
}

TEST_F(CliTest, MissingGeometryFileExitsTwoWithoutOutputs) {
    json j = base();
    j["geometry"] = {{"csv_path", "does_not_exist.csv"}};
    const CliResult r = cli({"map", "--config", write_config(j).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("does_not_exist.csv"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(CliTest, InvalidConfigNamesTheField) {
    json j = base();
    j["material"]["poisson"] = 0.3;
    CliResult r = cli({"solve", "--config", write_config(j).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("material.poisson"), std::string::npos);
    j = base();
    j["material"]["nu"] = 0.7;
    r = cli({"solve", "--config", write_config(j).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("material.nu"), std::string::npos);
    j = base();
    j["solver"]["M"] = 100;
    r = cli({"solve", "--config", write_config(j).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("solver.M"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o"));
    EXPECT_EQ(cli({"solve"}).code, 2);
    EXPECT_EQ(cli({"solve", "--config", (dir / "nope.json").string()}).code, 2);
    EXPECT_EQ(cli({"bogus", "--config", "x"}).code, 2);
}

TEST_F(CliTest, SolveCase1CompareFilter) {
    const CliResult r = cli({"solve", "--config", (kConfigs / "case1.json").string(), "--out", (dir / "s").string(), "--compare-filter",
                       "--rings", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"surface_filtered.csv", "surface_unfiltered.csv", "cavity_filtered.csv", "cavity_unfiltered.csv",
                          "ring_rho0.5_filtered.csv", "ring_rho0.5_unfiltered.csv", "solver_report.json"})
        EXPECT_TRUE(fs::exists(dir / "s" / f)) << f;
    const json rep = read_json(dir / "s" / "solver_report.json");
    EXPECT_EQ(rep["factorizations"], 2);
    EXPECT_LE(rep["equilibrium"]["vs_simulated_area"]["a_minus1"].get<double>(), 1e-6);
    EXPECT_LE(rep["equilibrium"]["vs_simulated_area"]["single_valued"].get<double>(), 1e-6);
    const auto lines = rows(dir / "s" / "cavity_filtered.csv");
    EXPECT_EQ(lines.front(), std::string(kFieldColumns));
    EXPECT_EQ(lines.size(), 721u);
    const std::string head = slurp(dir / "s" / "cavity_filtered.csv").substr(0, 40);
    EXPECT_EQ(head.rfind("# schema_version=1", 0), 0u);
}

TEST_F(CliTest, ZeroGravityGivesZeroTraces) {
    const CliResult r = cli({"solve", "--config", (kConfigs / "zero_gravity.json").string(), "--out", (dir / "z").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = rows(dir / "z" / "cavity_filtered.csv");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> c;
        std::stringstream ss(lines[i]);
        for (std::string f; std::getline(ss, f, ',');) c.push_back(f);
        ASSERT_EQ(c.size(), 13u);
        for (int k : {4, 5, 6, 10, 11}) EXPECT_EQ(std::stod(c[std::size_t(k)]), 0.0) << lines[i];
    }
}

TEST_F(CliTest, OutputsAreDeterministic) {
    const std::string cfg = (kConfigs / "case1.json").string();
    ASSERT_EQ(cli({"solve", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
    ASSERT_EQ(cli({"solve", "--config", cfg, "--out", (dir / "a2").string()}).code, 0);
    // echo carries the output directory, so compare data rows across directories
    EXPECT_EQ(rows(dir / "a" / "surface_filtered.csv"), rows(dir / "a2" / "surface_filtered.csv"));
    ASSERT_EQ(cli({"solve", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
    const std::string first = slurp(dir / "a" / "cavity_filtered.csv");
    ASSERT_EQ(cli({"solve", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "cavity_filtered.csv"), first);
}

TEST_F(CliTest, SingletonSweepMatchesSolve) {
    const std::string cfg = (kConfigs / "case1.json").string();
    ASSERT_EQ(cli({"solve", "--config", cfg, "--out", (dir / "q").string()}).code, 0);
    ASSERT_EQ(cli({"converge", "--config", cfg, "--out", (dir / "q").string(), "--sweep-x0", "1"}).code, 0);
    EXPECT_EQ(slurp(dir / "q" / "cavity_filtered.csv"), slurp(dir / "q" / "converge" / "x0_1" / "cavity.csv"));
    EXPECT_EQ(slurp(dir / "q" / "surface_filtered.csv"), slurp(dir / "q" / "converge" / "x0_1" / "surface.csv"));
}

TEST_F(CliTest, ConvergeSweepReportsMonotoneDifferences) {
    const CliResult r = cli({"converge", "--config", (kConfigs / "case1.json").string(), "--out", (dir / "c").string(), "--sweep-n0",
                       "20,40,80"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = read_json(dir / "c" / "converge_report.json");
    ASSERT_EQ(j["sweeps"].size(), 1u);
    EXPECT_EQ(j["sweeps"][0]["sup_diff_hoop_kpa"].size(), 2u);
    EXPECT_TRUE(j["sweeps"][0]["monotone_hoop"].get<bool>());
    EXPECT_EQ(rows(dir / "c" / "converge_N0.csv").size(), 4u);
}

TEST_F(CliTest, ConvergeRejectsBadSweepValues) {
    const std::string cfg = (kConfigs / "case1.json").string();
    EXPECT_EQ(cli({"converge", "--config", cfg, "--out", (dir / "c").string(), "--sweep-n0", "20,200"}).code, 2);
    EXPECT_EQ(cli({"converge", "--config", cfg, "--out", (dir / "c").string()}).code, 2);
    EXPECT_FALSE(fs::exists(dir / "c"));
}

TEST_F(CliTest, ResidualsReport) {
    const CliResult r = cli({"residuals", "--config", (kConfigs / "case1.json").string(), "--out", (dir / "r").string(), "--filter", "both"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = read_json(dir / "r" / "residuals.json");
    EXPECT_TRUE(j["residuals"]["filtered"]["within_thresholds"]["free_traction"].get<bool>());
    EXPECT_TRUE(j["residuals"]["filtered"]["within_thresholds"]["constrained_displacement"].get<bool>());
    EXPECT_TRUE(j["residuals"]["filtered"]["within_thresholds"]["cavity_traction_l2"].get<bool>());
    EXPECT_GT(j["residuals"]["unfiltered"]["free_traction_over_gammaH"].get<double>(),
              j["residuals"]["filtered"]["free_traction_over_gammaH"].get<double>());
}

TEST_F(CliTest, UnwritableOutputExitsFour) {
    std::ofstream(dir / "blocker") << "x";
    const CliResult r = cli({"solve", "--config", (kConfigs / "case1.json").string(), "--out", (dir / "blocker" / "sub").string()});
    EXPECT_EQ(r.code, 4);
}

TEST_F(CliTest, CapReachedIsNotSilent) {
    json j = base();
    j["solver"]["max_iters"] = 2;
    const CliResult r = cli({"solve", "--config", write_config(j).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("iteration cap reached"), std::string::npos);
    EXPECT_EQ(read_json(dir / "o" / "solver_report.json")["stop_reason"], "cap_reached");
}
