#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

using namespace logschro::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
    args.insert(args.begin(), "logschro");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream sink;
    return parse_config(static_cast<int>(argv.size()), argv.data(), sink);
}

struct Result {
    int code;
    std::string out, err;
};

Result run_args(std::vector<std::string> args) {
    const RunConfig c = parse(std::move(args));
    std::ostringstream out, err;
    const int code = run(c, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("logschro_cli_" + name);
    std::ofstream(p) << content;
    return p;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Cli, ConstantsTable) {
    const Result r = run_args({"constants", "--N", "1", "--s", "0.5"});
    EXPECT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_GE(l.size(), 3u);
    EXPECT_EQ(l[0], "# logschro-kit v0.1.0, N=1, s=0.5");
    EXPECT_EQ(l[1], "name,value");
    EXPECT_NE(r.out.find("zero_limit,0.5"), std::string::npos);
}

TEST(Cli, RejectsInvalidInput) {
    try {
        parse({"constants", "--s", "1.5"});
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("s must lie in (0,1]"), std::string::npos);
    }
    EXPECT_THROW(parse({"constants", "--bogus", "1"}), UsageError);
    EXPECT_THROW(parse({}), UsageError);
    EXPECT_THROW(parse({"eigs", "--k", "0"}), UsageError);
    EXPECT_THROW(parse({"solve", "--N", "2"}), UsageError);
    const fs::path bad = temp_file("bad.json", R"({"schema": 1, "sigma": 2})");
    try {
        parse({"constants", "--config", bad.string()});
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos);
    }
    EXPECT_THROW(parse({"constants", "--config", temp_file("v2.json", R"({"schema": 2})").string()}), UsageError);
    EXPECT_THROW(parse({"constants", "--config", temp_file("noschema.json", R"({"s": 0.3})").string()}), UsageError);
}

TEST(Cli, FlagsOverrideFile) {
    const fs::path cfg = temp_file("cfg.json", R"({"schema": 1, "s": 0.25, "points": 7})");
    const RunConfig c = parse({"kernel-table", "--config", cfg.string(), "--s", "0.75"});
    EXPECT_EQ(c.params.s, 0.75);
    EXPECT_EQ(c.points, 7);
    ASSERT_EQ(c.provenance.size(), 1u);
    EXPECT_NE(c.provenance[0].find("overrides"), std::string::npos);
}

TEST(Cli, KernelTableShape) {
    const Result r = run_args({"kernel-table", "--r-min", "1e-4", "--r-max", "1e3", "--points", "60"});
    EXPECT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 62u);
    EXPECT_EQ(l[1], "r,K,rN_K,rN2s_K,flag");
    EXPECT_EQ(l[2].substr(0, 7), "0.0001,");
    EXPECT_EQ(l[61].substr(0, 5), "1000,");
}

TEST(Cli, Deterministic) {
    const Result a = run_args({"solve", "--f", "random-seed=5", "--mesh-n", "31"});
    const Result b = run_args({"solve", "--f", "random-seed=5", "--mesh-n", "31"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
    EXPECT_NE(a.out, run_args({"solve", "--f", "random-seed=6", "--mesh-n", "31"}).out);
}

TEST(Cli, EigsSummary) {
    const fs::path out = fs::temp_directory_path() / "logschro_cli_eigs.csv";
    const Result r = run_args({"eigs", "--k", "3", "--mesh-n", "31", "--out", out.string()});
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["lambda"].size(), 3u);
    EXPECT_GT(j["lambda"][0].get<double>(), 0.0);
    for (const auto& res : j["residuals"]) EXPECT_LT(res.get<double>(), 1e-8);
    std::ifstream in(out);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# logschro-kit v0.1.0, N=1, s=0.5");
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const fs::path dir = fs::temp_directory_path() / "logschro_cli_outdir";
    fs::create_directories(dir);
    setenv(kOutputDirEnv, dir.c_str(), 1);
    const Result r = run_args({"constants", "--s", "1"});
    unsetenv(kOutputDirEnv);
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(dir / "constants.csv");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# logschro-kit v0.1.0, N=1, s=1");
}

TEST(Cli, ModuleErrorsBecomeJsonRecords) {
    const Result r = run_args({"apply", "--input", "/nonexistent/grid.csv"});
    EXPECT_EQ(r.code, 1);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["command"], "apply");
    EXPECT_NE(j["error"].get<std::string>().find("cannot read"), std::string::npos);
}

TEST(Cli, ApplyRoundTrip) {
    std::ostringstream grid;
    grid << "x1,value\n";
    for (int i = 0; i < 64; ++i) {
        const double x = -8.0 + i * 0.25;
        grid << x << ',' << std::exp(-0.5 * x * x) << '\n';
    }
    const fs::path in = temp_file("grid.csv", grid.str());
    const Result r = run_args({"apply", "--input", in.string(), "--L", "8", "--n", "64"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(lines(r.out).size(), 66u);
    // wrong shape is a run error, not a crash
    EXPECT_EQ(run_args({"apply", "--input", in.string(), "--L", "8", "--n", "128"}).code, 1);
}

TEST(Cli, VerifyHigherDimension) {
    const Result r = run_args({"verify", "--N", "2", "--s", "0.5", "--seed", "1"});
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c.contains("check"));
        EXPECT_TRUE(c.contains("margin"));
        EXPECT_TRUE(c.contains("tolerance"));
        EXPECT_TRUE(c["pass"].get<bool>());
    }
}
