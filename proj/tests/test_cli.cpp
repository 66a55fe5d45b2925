#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "quads/io.hpp"

namespace fs = std::filesystem;
using namespace quads;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QUADS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("quads_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateZeroCount) {
    EXPECT_EQ(run_cli("generate -n 10 --count 0 --out " + path("g")), 0);
    const auto manifest = io::json::parse(io::read_file(path("g/manifest.json")));
    EXPECT_TRUE(manifest.at("instances").empty());
}

TEST_F(CliTest, GenerateIsDeterministicAndVerified) {
    ASSERT_EQ(run_cli("generate -n 9 --count 5 --seed 3 --out " + path("a")), 0);
    ASSERT_EQ(run_cli("generate -n 9 --count 5 --seed 3 --out " + path("b")), 0);
    for (int k = 0; k < 5; ++k) {
        const auto name = io::instance_file_name(9, k);
        EXPECT_EQ(io::read_file(path("a/" + name)), io::read_file(path("b/" + name)));
        const auto rec = io::read_instance(path("a/" + name));
        EXPECT_EQ(ec3::enumerate_solutions(rec.instance).size(), 1U);
    }
    EXPECT_EQ(io::read_file(path("a/manifest.json")), io::read_file(path("b/manifest.json")));
}

TEST_F(CliTest, DryRunWritesOnlyCampaignJson) {
    io::write_file(path("c.cfg"), "n_values = 7..11\ninstances_per_n = 20\n");
    ASSERT_EQ(run_cli("run --config " + path("c.cfg") + " --out " + path("out") + " --dry-run"), 0);
    EXPECT_TRUE(fs::exists(path("out/campaign.json")));
    EXPECT_FALSE(fs::exists(path("out/runtimes.csv")));
    EXPECT_FALSE(fs::exists(path("out/medians.csv")));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
    io::write_file(path("bad.cfg"), "n_values = 7\nsigmaa = 0.2\n");
    EXPECT_EQ(run_cli("run --config " + path("bad.cfg") + " --out " + path("out")), 2);
    EXPECT_EQ(run_cli("run --config " + path("missing.cfg")), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST_F(CliTest, MalformedCsvExitTwo) {
    io::write_file(path("m.csv"), "n_bits,p_bar\n7,0\n");
    EXPECT_EQ(run_cli("fit " + path("m.csv") + " --out " + path("fit")), 2);
}

TEST_F(CliTest, RunFitReportPipeline) {
    ASSERT_EQ(run_cli("generate -n 5 --count 8 --seed 11 --out " + path("inst")), 0);
    ASSERT_EQ(run_cli("generate -n 6 --count 8 --seed 11 --out " + path("inst")), 0);
    ASSERT_EQ(run_cli("generate -n 7 --count 8 --seed 11 --out " + path("inst")), 0);
    io::write_file(path("c.cfg"),
                   "n_values = 5..7\np_bars = 0, 0.003\ninstances_per_n = 8\nenvs_per_instance = 1\n"
                   "master_seed = 11\ninstances_dir = inst\n");
    ASSERT_EQ(run_cli("run --config " + path("c.cfg") + " --out " + path("r1") + " --jobs 1"), 0);
    ASSERT_EQ(run_cli("run --config " + path("c.cfg") + " --out " + path("r2") + " --jobs 2"), 0);
    EXPECT_EQ(io::read_file(path("r1/runtimes.csv")), io::read_file(path("r2/runtimes.csv")));
    EXPECT_EQ(io::read_file(path("r1/medians.csv")), io::read_file(path("r2/medians.csv")));

    // Instances from disk match inline generation with the same seed.
    io::write_file(path("inline.cfg"),
                   "n_values = 5..7\np_bars = 0, 0.003\ninstances_per_n = 8\nenvs_per_instance = 1\n"
                   "master_seed = 11\n");
    ASSERT_EQ(run_cli("run --config " + path("inline.cfg") + " --out " + path("r3")), 0);
    EXPECT_EQ(io::read_file(path("r1/runtimes.csv")), io::read_file(path("r3/runtimes.csv")));

    const auto medians = io::parse_medians_csv(io::read_file(path("r1/medians.csv")));
    EXPECT_EQ(medians.size(), 6U);

    ASSERT_EQ(run_cli("fit " + path("r1/medians.csv") + " --model both --out " + path("r1")), 0);
    const auto fits = io::parse_fits_csv(io::read_file(path("r1/fits.csv")));
    EXPECT_EQ(fits.size(), 4U);  // two powers x two models
    EXPECT_TRUE(fs::exists(path("r1/plot_points.csv")));
    EXPECT_TRUE(fs::exists(path("r1/plot_curves.csv")));
    EXPECT_EQ(io::read_file(path("r1/fits.csv")).rfind("# quads ", 0), 0U);

    // A range holding fewer than three points is skipped, not an error.
    ASSERT_EQ(run_cli("fit " + path("r1/medians.csv") + " --model power_law --range 5-6 --out " + path("f2")), 0);
    EXPECT_TRUE(io::parse_fits_csv(io::read_file(path("f2/fits.csv"))).empty());

    EXPECT_EQ(run_cli("report " + path("r1")), 0);
}
