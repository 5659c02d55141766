// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// The C interface and the command-line tool, used the way a client would.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "eldan/eldan.h"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  eldan_string_free(s);
  return out;
}

const char* kHyperbolaMap =
    R"({"n": 2, "k": 1,
        "components": [[{"coeff": [1, 0], "exps": [1, 1]}, {"coeff": [-1, 0], "exps": [0, 0]}]],
        "base_point": [[1, 0], [1, 0]]})";

TEST(CApi, MapLifecycle) {
  eldan_map* m = nullptr;
  ASSERT_EQ(eldan_map_parse(kHyperbolaMap, &m), ELDAN_OK);
  int n = 0, k = 0;
  ASSERT_EQ(eldan_map_dims(m, &n, &k), ELDAN_OK);
  EXPECT_EQ(n, 2);
  EXPECT_EQ(k, 1);
  double z[4] = {2, 0, 0.5, 0}, out[2];
  ASSERT_EQ(eldan_map_eval(m, z, out), ELDAN_OK);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
  double d = 0;
  ASSERT_EQ(eldan_map_distance(m, 1, &d), ELDAN_OK);
  EXPECT_NEAR(d, std::sqrt(2.0), 1e-8);
  eldan_map_free(m);
}

TEST(CApi, ErrorsCarryKindAndPath) {
  eldan_map* m = nullptr;
  EXPECT_EQ(eldan_map_parse(R"({"n": 2, "k": 1, "components": [[{"coeff": [1, 0], "exps": [1]}]],
                                "base_point": [[0, 0], [0, 0]]})",
                            &m),
            ELDAN_ERR_INVALID);
  EXPECT_EQ(m, nullptr);
  Json err = Json::parse(eldan_last_error());
  EXPECT_EQ(err["kind"], "validation");
  EXPECT_EQ(err["path"], "/components/0/0/exps");
  EXPECT_EQ(eldan_map_dims(nullptr, nullptr, nullptr), ELDAN_ERR_INVALID);
  double v;
  EXPECT_EQ(eldan_affine_tube_measure(2, 3, 0, 1, &v), ELDAN_ERR_INVALID);
}

TEST(CApi, ClosedForms) {
  double v = 0;
  ASSERT_EQ(eldan_disc_measure(1, 0.0, 1.0, &v), ELDAN_OK);
  EXPECT_NEAR(v, 1.0 - std::exp(-0.5), 1e-15);
  ASSERT_EQ(eldan_affine_tube_measure(5, 1, 0.0, 1.0, &v), ELDAN_OK);
  EXPECT_NEAR(v, 1.0 - std::exp(-0.5), 1e-15);
  EXPECT_NE(std::string(eldan_version()), "");
}

TEST(CApi, ConfigAndRun) {
  std::string text = std::string(R"({"experiment": "x", "map": )") + kHyperbolaMap +
                     R"(, "distance": 1.4142135623730951, "r_grid": [1.0], "samples": 200})";
  eldan_config* cfg = nullptr;
  ASSERT_EQ(eldan_config_parse(text.c_str(), &cfg), ELDAN_OK);
  ASSERT_EQ(eldan_config_set_seed(cfg, 42), ELDAN_OK);
  ASSERT_EQ(eldan_config_set_int(cfg, "samples", 300), ELDAN_OK);
  ASSERT_EQ(eldan_config_set_real(cfg, "h", 0.01), ELDAN_OK);
  EXPECT_EQ(eldan_config_set_real(cfg, "h", -1.0), ELDAN_ERR_INVALID);
  EXPECT_EQ(eldan_config_set_real(cfg, "bogus", 1.0), ELDAN_ERR_INVALID);
  char* js = nullptr;
  ASSERT_EQ(eldan_config_to_json(cfg, &js), ELDAN_OK);
  Json canon = Json::parse(take(js));
  EXPECT_EQ(canon["seed"], 42);
  EXPECT_EQ(canon["samples"], 300);
  char* hash = nullptr;
  ASSERT_EQ(eldan_config_hash(cfg, &hash), ELDAN_OK);
  std::string h = take(hash);
  EXPECT_EQ(h.size(), 16u);

  char* out = nullptr;
  ASSERT_EQ(eldan_run(cfg, "tube", 1, &out), ELDAN_OK);
  Json res = Json::parse(take(out));
  EXPECT_EQ(res["verdict"], "pass");
  EXPECT_EQ(res["summary"]["config_hash"], h);
  EXPECT_FALSE(res["files"].empty());
  EXPECT_EQ(eldan_run(cfg, "nope", 1, &out), ELDAN_ERR_INVALID);
  eldan_config_free(cfg);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("eldan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& tag) {
    std::string cmd = std::string(ELDAN_CLI_PATH) + " " + args + " > " +
                      (dir_ / (tag + ".out")).string() + " 2> " +
                      (dir_ / (tag + ".err")).string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string config(const std::string& name) { return std::string(ELDAN_CONFIG_DIR) + "/" + name; }

  fs::path dir_;
};

TEST_F(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help", "help"), 0);
  EXPECT_NE(run("", "none"), 0);
  EXPECT_EQ(run("frobnicate", "bad"), 1);
  EXPECT_EQ(run("tube", "noconfig"), 1);
}

TEST_F(Cli, WrongExponentLengthExitsOneWithPath) {
  Json bad = Json::parse(slurp(config("hyperbola.json")));
  bad["map"]["components"][0][0]["exps"] = {1, 1, 1};
  std::ofstream(dir_ / "bad.json") << bad.dump();
  EXPECT_EQ(run("tube --config " + (dir_ / "bad.json").string(), "bad"), 1);
  Json err = Json::parse(slurp(dir_ / "bad.err"));
  EXPECT_EQ(err["exit_code"], 1);
  EXPECT_EQ(err["error"]["path"], "/map/components/0/0/exps");
}

TEST_F(Cli, TubeIsByteIdenticalAcrossRuns) {
  const std::string base = "tube --config " + config("hyperbola.json") +
                           " --seed 42 --samples 3000 --threads auto --out ";
  ASSERT_EQ(run(base + (dir_ / "a").string(), "a"), 0) << slurp(dir_ / "a.err");
  ASSERT_EQ(run(base + (dir_ / "b").string(), "b"), 0);
  for (const char* name : {"tube.json", "tube_plot.dat"}) {
    std::string a = slurp(dir_ / "a" / name);
    ASSERT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(dir_ / "b" / name)) << name;
  }
  // Results schema.
  Json s = Json::parse(slurp(dir_ / "a" / "tube.json"));
  EXPECT_TRUE(s["experiment"].is_string());
  EXPECT_EQ(s["seed"], 42);
  EXPECT_TRUE(s["optimizer_failures"].is_number_integer());
  ASSERT_EQ(s["rows"].size(), 3u);
  for (const auto& row : s["rows"]) {
    for (const char* key : {"r", "p_hat", "stderr", "baseline", "margin"})
      EXPECT_TRUE(row[key].is_number()) << key;
    EXPECT_TRUE(row["verdict"] == "pass" || row["verdict"] == "fail");
  }
  EXPECT_EQ(slurp(dir_ / "a" / "tube_plot.dat").rfind("# config_hash=", 0), 0u);
}

TEST_F(Cli, OverridesAndOtherCommands) {
  EXPECT_EQ(run("baseline --config " + config("affine.json") + " --out " + dir_.string(), "base"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "baseline.json"));
  EXPECT_EQ(run("localize --config " + config("paraboloid.json") +
                    " --T 0.5 --h 0.01 --paths 3 --threads 1 --out " + dir_.string(),
                "loc"),
            0)
      << slurp(dir_ / "loc.err");
  EXPECT_TRUE(fs::exists(dir_ / "localize_path_2.csv"));
  Json summary = Json::parse(slurp(dir_ / "localize_summary.json"));
  EXPECT_EQ(summary["paths"], 3);
  EXPECT_EQ(run("localize --config " + config("paraboloid.json") + " --h -1", "neg"), 1);
  EXPECT_EQ(run("tilt --seed 5 --out " + dir_.string(), "tilt"), 0);
}

}  // namespace
