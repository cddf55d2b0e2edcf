#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifdef SILEVY_CLI_PATH

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("silevy_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("spec.json", R"({"triplet":{"sigma":0.5,"nu":{"type":"compound","rate":3,"marks":{"type":"point","value":1}}},"dimension":2,"level":3})");
    write("bad.json", R"({"triplet":{"sigma":-1},"dimension":2,"level":3})");
    write("regions.json", R"([{"u0":[1,1],"sub":[[0.5,1]]},{"u0":[0.5,0.5]}])");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string path(const std::string& name) { return (dir_ / name).string(); }

  int run(const std::string& args) {
    const std::string cmd = std::string(SILEVY_CLI_PATH) + " " + args + " >" + path("stdout") + " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, VerifyBrownianCore) {
  ASSERT_EQ(run("verify --suite brownian-core --seed 42 --out " + path("out")), 0) << read(path("stderr"));
  const auto j = nlohmann::json::parse(read(dir_ / "out" / "brownian-core.json"));
  int passing = 0;
  for (const auto& r : j["reports"]) passing += r["pass"].get<bool>() ? 1 : 0;
  EXPECT_GE(passing, 6);
  const auto m = nlohmann::json::parse(read(dir_ / "out" / "manifest.json"));
  EXPECT_EQ(m["seed"], 42);
  EXPECT_TRUE(m.contains("config_hash"));
  EXPECT_TRUE(m.contains("version"));
}

TEST_F(Cli, MalformedSpecExitsTwoNamingTheField) {
  EXPECT_EQ(run("simulate --spec " + path("bad.json") + " --regions " + path("regions.json") + " --seed 1"), 2);
  EXPECT_NE(read(path("stderr")).find("sigma"), std::string::npos);
}

TEST_F(Cli, SeedIsMandatoryForSampling) {
  EXPECT_EQ(run("simulate --spec " + path("spec.json") + " --regions " + path("regions.json")), 2);
  EXPECT_NE(read(path("stderr")).find("seed"), std::string::npos);
}

TEST_F(Cli, UnknownFlagAndConfigKey) {
  EXPECT_EQ(run("simulate --colour red"), 2);
  write("cfg.json", R"({"seed":1,"colour":"red"})");
  EXPECT_EQ(run("verify --config " + path("cfg.json")), 2);
}

TEST_F(Cli, SimulateIsByteIdentical) {
  const std::string args = "simulate --spec " + path("spec.json") + " --regions " + path("regions.json") +
                           " --paths 50 --seed 7 --threads 2 --out ";
  ASSERT_EQ(run(args + path("a.csv")), 0);
  ASSERT_EQ(run(args + path("b/data.csv")), 0);
  const auto a = read(path("a.csv"));
  EXPECT_EQ(a, read(dir_ / "b" / "data.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "path_id,region_id,increment");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 101);
  EXPECT_EQ(read(path("manifest.json")), read(dir_ / "b" / "manifest.json"));
}

TEST_F(Cli, ConfigFileDrivesSimulate) {
  write("cfg.json", R"({"spec":{"triplet":{"sigma":1},"dimension":1,"level":4},"regions":[{"u0":[0.5]}],"seed":3,"paths":4})");
  ASSERT_EQ(run("simulate --config " + path("cfg.json")), 0) << read(path("stderr"));
  const auto out = read(path("stdout"));
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 5);
}

TEST_F(Cli, ProjectWritesTrajectories) {
  write("flow.json", R"({"vertices":[[0,0],[1,1]]})");
  ASSERT_EQ(run("project --spec " + path("spec.json") + " --flow " + path("flow.json") +
                " --mesh 4 --paths 3 --seed 2 --level 4 --out " + path("p.csv")),
            0)
      << read(path("stderr"));
  const auto csv = read(path("p.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "path_id,s,value");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
}

TEST_F(Cli, KernelCheck) {
  EXPECT_EQ(run("kernel-check --spec " + path("spec.json") + " --volumes 0.3,0.7 --tol 1e-5"), 0) << read(path("stderr"));
  EXPECT_EQ(run("kernel-check --spec " + path("spec.json") + " --volumes 0.3 --tol 1e-5"), 2);
  EXPECT_EQ(run("kernel-check --spec " + path("spec.json") + " --volumes 0.3,0.7 --tol 1e-300"), 1);
}

TEST_F(Cli, Decompose) {
  ASSERT_EQ(run("decompose --spec " + path("spec.json") + " --seed 5 --epsilons 0.1,0.01,0.001 --out " + path("d")), 0)
      << read(path("stderr"));
  const auto j = nlohmann::json::parse(read(dir_ / "d" / "decompose.json"));
  EXPECT_LE(j["reconstruction_error"].get<double>(), 1e-12);
  EXPECT_EQ(j["tail_curve"].size(), 3u);
  EXPECT_TRUE(j.contains("jump_count"));
  EXPECT_EQ(run("decompose --spec " + path("spec.json") + " --seed 5 --epsilons 0.01,0.1"), 2);
}

TEST_F(Cli, FailingSuiteExitsOne) {
  EXPECT_EQ(run("verify --suite semigroup --seed 1 --tol 1e-300"), 1);
}

#endif
