#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nlsv/cli/run.hpp"

using namespace nlsv;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nlsv_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(NLSV_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Digest, KnownFnvValues) {
  EXPECT_EQ(cli::fnv1a_digest(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a_digest("a"), "af63dc4c8601ec8c");
}

TEST(CheckLine, Format) {
  const std::string line = cli::check_line({"x", 1.0, 2.0, true, "note"});
  EXPECT_EQ(line.rfind("PASS x", 0), 0u);
  EXPECT_NE(line.find("(note)"), std::string::npos);
  EXPECT_EQ(cli::check_line({"y", 3.0, 2.0, false, ""}).rfind("FAIL y", 0), 0u);
}

TEST(Scatter, FreePotentialPassesAndIsReproducible) {
  std::string first;
  for (int pass = 0; pass < 2; ++pass) {
    const auto dir = scratch_dir("scatter" + std::to_string(pass));
    cli::RunContext ctx(Config::parse("potential = zero\ngrid.N = 512\nscatter.tau_max = 5\n"), dir.string());
    cli::run_scatter(ctx);
    EXPECT_TRUE(ctx.all_pass());
    const std::string csv = slurp(dir / "scattering.csv");
    EXPECT_FALSE(csv.empty());
    if (pass == 0)
      first = csv;
    else
      EXPECT_EQ(csv, first);
    std::filesystem::remove_all(dir);
  }
}

TEST(Scatter, DefaultsAreEchoedIntoTheConfig) {
  const auto dir = scratch_dir("defaults");
  cli::RunContext ctx(Config::parse("grid.N = 512\nscatter.tau_max = 2\n"), dir.string());
  cli::run_scatter(ctx);
  EXPECT_EQ(ctx.config().resolved().at("potential"), "gaussian_barrier");
  EXPECT_EQ(ctx.config().resolved().at("potential.v0"), "1");
  std::filesystem::remove_all(dir);
}

TEST(Context, ResolutionScale) {
  const cli::RunContext ctx(Config::parse("dt = 0.1\n"), "unused", 2);
  EXPECT_EQ(ctx.grid("grid", 40.0, 1024).size(), 2048);
  EXPECT_DOUBLE_EQ(ctx.step("dt", 1.0), 0.05);
  EXPECT_THROW(cli::RunContext(Config(), "unused", 0), PreconditionError);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch_dir("binary");
  std::filesystem::create_directories(dir);
  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << "potential = bogus\n";
  EXPECT_EQ(run_binary("scatter --config " + bad.string() + " --out " + dir.string()), 2);
  const auto free_cfg = dir / "free.cfg";
  std::ofstream(free_cfg) << "potential = zero\ngrid.N = 256\nscatter.tau_max = 3\n";
  EXPECT_EQ(run_binary("scatter --config " + free_cfg.string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_NE(run_binary("no-such-subcommand"), 0);
  std::filesystem::remove_all(dir);
}
