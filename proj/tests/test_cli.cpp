#include "pgnoise/image.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
    int exit_code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(PGNOISE_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / "pgnoise_test_cli";
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ASSERT_EQ(run("scenes --count 2 --width 120 --height 80 --out " + (dir_ / "scenes").string()).exit_code, 0);
    }
    static fs::path dir_;
};

fs::path Cli::dir_;

TEST_F(Cli, ScenesAreEightBitPgm) {
    const auto img = pgnoise::load_image(dir_ / "scenes" / "scene_00.pgm");
    EXPECT_EQ(img.width(), 120u);
    EXPECT_EQ(img.height(), 80u);
}

TEST_F(Cli, SimulateEstimateLoglik) {
    const auto pair_dir = dir_ / "pair";
    ASSERT_EQ(run("simulate --input " + (dir_ / "scenes" / "scene_00.pgm").string() +
                  " --a 20 --b 0.05 --seed 3 --out " + pair_dir.string())
                  .exit_code,
              0);
    const auto meta = nlohmann::json::parse(slurp(pair_dir / "pair.json"));
    EXPECT_EQ(meta["a"], 20.0);
    EXPECT_EQ(meta["seed"], 3);
    const auto noisy = pgnoise::load_float(pair_dir / "noisy.pgfl");
    EXPECT_EQ(noisy.size(), 120u * 80u);

    const std::string files =
        " --clean " + (pair_dir / "clean.pgfl").string() + " --noisy " + (pair_dir / "noisy.pgfl").string();
    const auto est = run("estimate" + files + " --method both");
    ASSERT_EQ(est.exit_code, 0);
    const auto j = nlohmann::json::parse(est.out);
    for (const char* m : {"cumulant", "var"}) {
        ASSERT_TRUE(j.contains(m));
        EXPECT_NEAR(j[m]["a_inv"].get<double>(), 0.05, 0.02);
        EXPECT_NEAR(j[m]["b"].get<double>(), 0.05, 0.02);
        EXPECT_TRUE(j[m].contains("diagnostics"));
    }
    EXPECT_TRUE(j["cumulant"]["diagnostics"].contains("discriminant"));

    const auto only = nlohmann::json::parse(run("estimate" + files + " --method var --var-unweighted").out);
    EXPECT_FALSE(only.contains("cumulant"));

    const auto ll = run("loglik" + files + " --a 20 --b 0.05 --tail-mass 1e-12");
    ASSERT_EQ(ll.exit_code, 0);
    const auto lj = nlohmann::json::parse(ll.out);
    EXPECT_EQ(lj["pixels"], 120 * 80);
    EXPECT_GT(lj["k_max_max"].get<int>(), 20);
    EXPECT_TRUE(lj["ll"].is_number());
}

TEST_F(Cli, EvaluateIsDeterministicAcrossWorkers) {
    const std::string common = " --images " + (dir_ / "scenes").string() +
                               " --profile custom --a-grid 1:100:3 --b-grid 0.01:0.15:2 --seeds 2";
    ASSERT_EQ(run("evaluate" + common + " --workers 1 --out " + (dir_ / "ev1").string()).exit_code, 0);
    ASSERT_EQ(run("evaluate" + common + " --workers 3 --out " + (dir_ / "ev3").string()).exit_code, 0);
    const auto a = slurp(dir_ / "ev1" / "records.csv");
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 2 * 2 * 3 * 2 + 1);
    EXPECT_EQ(a, slurp(dir_ / "ev3" / "records.csv"));
    for (const char* f : {"summary.json", "bias.csv", "per_image.csv"})
        EXPECT_TRUE(fs::exists(dir_ / "ev1" / f)) << f;
}

TEST_F(Cli, ErrorsExitNonzero) {
    EXPECT_NE(run("estimate --clean /nonexistent.pgm --noisy /nonexistent.pgm").exit_code, 0);
    EXPECT_NE(run("simulate --input " + (dir_ / "scenes" / "scene_00.pgm").string() +
                  " --a 0 --b 0.1 --seed 1 --out " + (dir_ / "bad").string())
                  .exit_code,
              0);
    EXPECT_NE(run("evaluate --images " + (dir_ / "scenes").string() + " --a-grid nonsense --out " +
                  (dir_ / "bad").string())
                  .exit_code,
              0);
    EXPECT_NE(run("").exit_code, 0);
}

}  // namespace
