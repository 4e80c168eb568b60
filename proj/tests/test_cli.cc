// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "cmdp/csv.h"
#include "cmdp/mechanisms.h"

namespace cmdp {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(CMDP_CLI_PATH).empty()) GTEST_SKIP() << "CLI not built";
    dir_ = fs::temp_directory_path() /
           ("cmdp_cli_" + std::string(::testing::UnitTest::GetInstance()
                                          ->current_test_info()
                                          ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of the tool run inside the scratch directory.
  int Run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" +
                            CMDP_CLI_PATH + "' " + args + " > out.txt 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  }
  std::string Output() { return ReadTextFile((dir_ / "out.txt").string()); }
  std::string Path(const std::string& name) { return (dir_ / name).string(); }

  void Synth() {
    ASSERT_EQ(Run("synth --rows 3 --cols 3 --count 40 --length 8 --seed 2"), 0)
        << Output();
  }

  fs::path dir_;
};

TEST_F(Cli, SynthPriorsMechAuditPipeline) {
  Synth();
  for (const char* f : {"nodes.csv", "edges.csv", "trajectories.csv"}) {
    EXPECT_TRUE(fs::exists(Path(f))) << f;
  }
  ASSERT_EQ(Run("priors --gamma 1"), 0) << Output();
  EXPECT_TRUE(fs::exists(Path("priors.csv")));
  ASSERT_EQ(Run("mech --builder mdp --epsilon 0.5 --eta 2 --out q.csv "
                "--lp-out lp.csv --cost-out cost.csv"),
            0)
      << Output();
  EXPECT_TRUE(fs::exists(Path("lp.csv")));
  EXPECT_TRUE(fs::exists(Path("cost.csv.index")));
  EXPECT_EQ(Run("audit --matrix q.csv --priors priors.csv --out audit.csv"), 0)
      << Output();
  EXPECT_TRUE(fs::exists(Path("audit.csv")));

  ASSERT_EQ(Run("mech --builder cmdp --gamma 1 --epsilon 0.5 --eta 2 --out c.csv"),
            0)
      << Output();
  EXPECT_EQ(Run("audit --matrix c.csv --priors priors.csv"), 0) << Output();
  ASSERT_EQ(Run("mech --builder expmech --epsilon 0.5 --out e.csv"), 0);
  EXPECT_EQ(Run("audit --matrix e.csv --eta 2"), 0) << Output();
}

TEST_F(Cli, CorruptedMatrixFailsTheAudit) {
  Synth();
  ASSERT_EQ(Run("mech --builder mdp --epsilon 0.5 --eta 2 --out q.csv"), 0)
      << Output();
  const PerturbationMatrix q = LoadMatrix(Path("q.csv"));
  std::vector<double> p = q.probs();
  const std::size_t ny = q.num_outputs();
  for (std::size_t y = 0; y < ny; ++y) p[y] = y == 0 ? 1.0 : 0.0;
  for (std::size_t y = 0; y < ny; ++y) p[ny + y] = y == 1 ? 1.0 : 0.0;
  WriteTextFile(Path("bad.csv"),
                FormatMatrix(PerturbationMatrix(q.keys(), q.outputs(), p,
                                                q.metadata())));
  EXPECT_EQ(Run("audit --matrix bad.csv"), 1);
  EXPECT_NE(Output().find("worst pair"), std::string::npos) << Output();
}

TEST_F(Cli, MissingInputIsAnIoError) {
  EXPECT_EQ(Run("audit --matrix nope.csv"), 2);
  EXPECT_EQ(Run("priors --nodes nope.csv"), 2);
}

TEST_F(Cli, ConfigFileSuppliesDefaults) {
  Synth();
  WriteTextFile(Path("mech.cfg"),
                "# defaults\nbuilder=mdp\nepsilon=0.4\neta=1.5\nout=from_cfg.csv\n");
  ASSERT_EQ(Run("mech --config mech.cfg --out cli.csv"), 0) << Output();
  EXPECT_TRUE(fs::exists(Path("cli.csv")));
  EXPECT_FALSE(fs::exists(Path("from_cfg.csv")));
  EXPECT_DOUBLE_EQ(LoadMatrix(Path("cli.csv")).metadata().epsilon, 0.4);
  WriteTextFile(Path("broken.cfg"), "epsilon\n");
  EXPECT_EQ(Run("mech --config broken.cfg"), 2);
}

TEST_F(Cli, StatsCommands) {
  WriteTextFile(Path("p.csv"),
                "speed,lon,lat,time,p_value\n1,1,2,3,0.1\n2,2,1,3,0.3\n3,3,3,3,0.2\n");
  ASSERT_EQ(Run("stats-corr --input p.csv --out corr.csv"), 0) << Output();
  const std::string corr = ReadTextFile(Path("corr.csv"));
  EXPECT_NE(corr.find("time,undefined,undefined,undefined"), std::string::npos);
  Synth();
  ASSERT_EQ(Run("stats-density --points nodes.csv --k 2 --radius-m 1500 --out dens"),
            0)
      << Output();
  EXPECT_EQ(std::distance(fs::directory_iterator(Path("dens")),
                          fs::directory_iterator{}),
            4);
}

}  // namespace
}  // namespace cmdp
