#include <mixed_spectra_cli/cli.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace mixed_spectra::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mixed_spectra");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("mixed_spectra_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveSquareWithOneDirichletSide) {
  const auto r = run_cli({"solve", "--square", "--dirichlet", "1", "--levels", "5"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("lambda_1 = 2.4674"), std::string::npos) << r.out;
}

TEST_F(CliTest, HelpListsCommandsAndFlags) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const char* word : {"solve", "verify-split", "verify-corollary", "verify-right", "verify-voila",
                           "verify-grisvard", "sweep", "convergence", "--geometry", "--square", "--angles",
                           "--dirichlet", "--neumann-side", "--which", "--order", "--levels", "--tol",
                           "--max-iter", "--max-level", "--eps-verdict", "--eps-angle", "--right-angle-tol",
                           "--num-eigs", "--task", "--grid", "--count", "--seed", "--threads", "--output",
                           "--format", "--dump-mesh", "--plot-data", "--replay"})
    EXPECT_NE(r.out.find(word), std::string::npos) << word;
}

TEST_F(CliTest, UnknownFlagsAndBadInputFail) {
  EXPECT_EQ(run_cli({"solve", "--square", "--bogus"}).code, kExitError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run_cli({"solve"}).code, kExitError);
  EXPECT_EQ(run_cli({"solve", "--square", "--tol", "0"}).code, kExitError);
  EXPECT_EQ(run_cli({"solve", "--square", "--levels", "3..12"}).code, kExitError);
  EXPECT_EQ(run_cli({"solve", "--geometry", "{\"vertices\": [[0,0],[1,0]]}"}).code, kExitError);
  EXPECT_EQ(run_cli({"verify-right", "--square"}).code, kExitError);
}

TEST_F(CliTest, VerifyRightIsoscelesFromRoundedAngles) {
  const auto r = run_cli({"verify-right", "--angles", "1.5707963", "0.7853982", "--levels", "3..6"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  std::size_t confirmed = 0;
  for (std::size_t at = r.out.find("ConfirmedWithMargin"); at != std::string::npos;
       at = r.out.find("ConfirmedWithMargin", at + 1))
    ++confirmed;
  EXPECT_EQ(confirmed, 2U) << r.out;
}

TEST_F(CliTest, JsonReportReplaysExactly) {
  const auto first = path("first.json");
  const auto second = path("second.json");
  ASSERT_EQ(run_cli({"verify-corollary", "--angles", "0.9", "1.0", "--levels", "2..4", "--output", first}).code,
            kExitOk);
  ASSERT_EQ(run_cli({"--replay", first, "--output", second}).code, kExitOk);
  auto a = nlohmann::json::parse(slurp(first));
  auto b = nlohmann::json::parse(slurp(second));
  EXPECT_TRUE(a.contains("generated_at"));
  EXPECT_EQ(a["config"]["command"], "verify-corollary");
  EXPECT_EQ(a["result"], b["result"]);
  EXPECT_EQ(a["result"].size(), 3U);
}

TEST_F(CliTest, SweepWritesCsvAndPlotData) {
  const auto csv = path("sweep.csv");
  const auto plot = path("plot.csv");
  const auto r = run_cli({"sweep", "--task", "corollary-iii", "--grid", "4x4", "--levels", "1..3", "--output", csv,
                          "--plot-data", plot});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.rfind("task,row,", 0), 0U);
  EXPECT_EQ(text.find("generated_at"), std::string::npos);
  const auto p = slurp(plot);
  EXPECT_EQ(p.rfind("alpha,beta,margin,verdict\n", 0), 0U);
  EXPECT_EQ(std::count(p.begin(), p.end(), '\n'), 17);

  const auto again = path("again.csv");
  ASSERT_EQ(run_cli({"sweep", "--task", "corollary-iii", "--grid", "4x4", "--levels", "1..3", "--output", again,
                     "--threads", "2"})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(again), text);
}

TEST_F(CliTest, DumpMeshAndOtherCommands) {
  const auto mesh = path("mesh.json");
  EXPECT_EQ(run_cli({"convergence", "--square", "--dirichlet", "0,1", "--levels", "1..3", "--dump-mesh", mesh}).code,
            kExitOk);
  EXPECT_EQ(nlohmann::json::parse(slurp(mesh))["level"], 3);

  const std::string tri = R"({"vertices":[[0,0],[1,0],[0.5,0.8660254037844386]],"labels":["N","D","D"]})";
  EXPECT_EQ(run_cli({"verify-split", "--geometry", tri, "--levels", "2..4"}).code, kExitOk);
  EXPECT_EQ(run_cli({"verify-voila", "--geometry", tri, "--levels", "2..4"}).code, kExitOk);
  EXPECT_EQ(run_cli({"verify-grisvard", "--geometry", tri, "--levels", "2..4"}).code, kExitOk);
  EXPECT_EQ(run_cli({"verify-grisvard", "--which", "controls", "--levels", "2..4"}).code, kExitOk);
  const auto eigs = run_cli({"solve", "--square", "--levels", "3", "--num-eigs", "3"});
  EXPECT_EQ(eigs.code, kExitOk);
  EXPECT_NE(eigs.out.find("lowest eigenvalues"), std::string::npos);

  const auto file = path("geometry.json");
  std::ofstream(file) << tri;
  EXPECT_EQ(run_cli({"solve", "--geometry", file, "--levels", "2"}).code, kExitOk);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.command = "sweep";
  c.angles = std::vector<double>{0.4, 0.5};
  c.neumann_side = 2;
  c.count = 7;
  c.seed = 99;
  c.tol = 1e-9;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(*back.neumann_side, 2U);
}
