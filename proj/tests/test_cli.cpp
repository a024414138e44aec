// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/serialization.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const fs::path kWork = fs::temp_directory_path() / "homowit_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(HOMOWIT_CLI) + " " + args + " >" + (kWork / "stdout.txt").string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (kWork / name).string(); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

TEST_F(Cli, BoundSinglePoint) {
  ASSERT_EQ(run("bound --p-star 0 --out " + path("b.json")), 0);
  const auto j = homowit::io::Json::parse(homowit::io::read_file(path("b.json")));
  EXPECT_NEAR(j["s_sep_max"].get<double>(), 0.9003163, 1e-6);
  EXPECT_EQ(j["mode"], "qubit-subspace-ppt");
}

TEST_F(Cli, BoundCurveAndProblemDump) {
  ASSERT_EQ(run("bound --curve 50 --out " + path("curve.csv")), 0);
  std::ifstream in(path("curve.csv"));
  EXPECT_EQ(homowit::io::parse_bound_curve_csv(in).size(), 50u);
  ASSERT_EQ(run("bound --p-star 0.3 --mode full-ppt --problem-out " + path("p.json") + " --out " + path("b.json")), 0);
  EXPECT_NO_THROW(homowit::io::problem_from_json(homowit::io::Json::parse(homowit::io::read_file(path("p.json")))));
}

TEST_F(Cli, ConfigErrorsExitOne) {
  EXPECT_EQ(run("bound --p-star 1.5"), 1);
  EXPECT_EQ(run("bound --mode sideways"), 1);
  EXPECT_EQ(run("witness --events 10 --out " + path("w")), 1);
  EXPECT_EQ(run("witness --theta 60 --out " + path("w")), 1);
  EXPECT_EQ(run("witness --mode ingest --in " + path("missing.csv") + " --out " + path("w")), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run(""), 1);
}

TEST_F(Cli, SimulateTomoIngestChain) {
  ASSERT_EQ(run("simulate --theta 22.5 --events 5000 --eta-a 0.8 --eta-b 0.8 --seed 4 --out " + path("r.csv")), 0);
  ASSERT_EQ(run("ingest-check --in " + path("r.csv") + " --out " + path("ing.json")), 0);
  const auto ing = homowit::io::Json::parse(homowit::io::read_file(path("ing.json")));
  EXPECT_EQ(ing["n_records"], 10000);
  ASSERT_EQ(run("tomo --in " + path("r.csv") + " --rounds 20 --out " + path("t.json")), 0);
  const auto t = homowit::io::Json::parse(homowit::io::read_file(path("t.json")));
  EXPECT_NEAR(t["party_a"]["p"][1].get<double>(), 0.4, 0.05);
  ASSERT_EQ(run("bound --mode experiment --p-star 0 --delta-p-star 0.01 --marginals " + path("t.json") + " --out " +
                path("be.json")),
            0);
  ASSERT_EQ(run("witness --mode ingest --in " + path("r.csv") + " --theta 22.5 --rounds 20 --out " + path("wi")), 0);
  EXPECT_TRUE(fs::exists(path("wi") + "/verdict_theta_22.5.json"));
}

TEST_F(Cli, MalformedRecordsExitOne) {
  std::ofstream(path("bad.csv")) << "event_id,setting_a,setting_b,x_a\n0,1,1,0.1\n";
  EXPECT_EQ(run("ingest-check --in " + path("bad.csv")), 1);
  EXPECT_NE(homowit::io::read_file(path("stderr.txt")).find(":1:"), std::string::npos);
}

TEST_F(Cli, PointFailureExitsTwo) {
  std::ofstream os(path("one_pair.csv"));
  os << homowit::io::kRecordsHeader << "\n";
  for (int i = 0; i < 2000; ++i) os << i << ",1,1," << 0.01 * (i % 11 - 5) << ",0.3\n";
  os.close();
  EXPECT_EQ(run("witness --mode ingest --in " + path("one_pair.csv") + " --rounds 20 --out " + path("wf")), 2);
  EXPECT_TRUE(fs::exists(path("wf") + "/theta_table.csv"));
}

TEST_F(Cli, SweepWritesArtifacts) {
  ASSERT_EQ(run("sweep --theta 0,22.5 --events 20000 --rounds 20 --eta-a 0.9 --eta-b 0.9 --out " + path("s")), 0);
  for (const char* f : {"verdict_theta_0.json", "verdict_theta_22.5.json", "theta_table.csv", "bound_curve.csv",
                        "plot.gp", "provenance.json"})
    EXPECT_TRUE(fs::exists(path("s") + "/" + f)) << f;
}

TEST_F(Cli, ConfigFileWithOverride) {
  std::ofstream(path("run.cfg")) << "events = 20000\nbootstrap_rounds = 20\ntheta = 10\n";
  ASSERT_EQ(run("witness --config " + path("run.cfg") + " --theta 20 --out " + path("c")), 0);
  EXPECT_TRUE(fs::exists(path("c") + "/verdict_theta_20.json"));
  const auto prov = homowit::io::read_file(path("c") + "/provenance.json");
  EXPECT_NE(prov.find("\"events\": \"20000\""), std::string::npos);
}

}  // namespace
