// Copyright 2026 The ATP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "atp/checkpoint.h"
#include "atp/config.h"
#include "atp/ingest.h"
#include "atp/training.h"
#include "json.hpp"
#include "support/synthetic.h"

namespace atp {
namespace {

using ::testing::HasSubstr;
using ::testing::MatchesRegex;
using ::testing::StartsWith;

const std::string kPriceService = std::string(ATP_TEST_DATA_DIR) + "/price_service.conllu";

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "atp");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("atp_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, DistanceReproducesWorkedExample) {
  CliRun r = Cli({"distance", "--conllu", kPriceService, "--span", "2:2"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "[1,0,1,2,3,4,3,2,3]\n");
  r = Cli({"distance", "--conllu", kPriceService, "--span", "7:7"});
  EXPECT_EQ(r.out, "[4,3,2,3,2,1,0,1,2]\n");
  r = Cli({"distance", "--conllu", kPriceService, "--span", "7:7", "--offset"});
  EXPECT_EQ(r.out, "[6,5,4,3,2,1,0,1,2]\n");
  r = Cli({"distance", "--conllu", kPriceService, "--span", "7:7", "--clamp", "2"});
  EXPECT_EQ(r.out, "[2,2,2,2,2,1,0,1,2]\n");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"distance", "--conllu", kPriceService},
           {"distance", "--conllu", kPriceService, "--span", "2-2"},
           {"gradcheck", "--seed", "abc"}}) {
    const CliRun r = Cli(args);
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_THAT(r.err, StartsWith("error code=Usage message="));
  }
}

TEST_F(CliTest, DataErrorsExitThreeWithCodeLine) {
  CliRun r = Cli({"distance", "--conllu", Path("missing.conllu"), "--span", "1:1"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_THAT(r.err, StartsWith("error code=Io message="));

  WriteFile(Path("bad.conllu"), "1\tonly\tthree\n");
  r = Cli({"distance", "--conllu", Path("bad.conllu"), "--span", "1:1"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_THAT(r.err, StartsWith("error code=MalformedLine message="));

  r = Cli({"distance", "--conllu", kPriceService, "--span", "5:12"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_THAT(r.err, StartsWith("error code=IndexOutOfRange message="));

  r = Cli({"eval", "--data", Path("x"), "--ckpt", kPriceService});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_THAT(r.err, StartsWith("error code=BadCheckpoint message="));
}

TEST_F(CliTest, IngestWritesDatasetAndSummary) {
  WriteFile(Path("in.xml"), R"(<?xml version="1.0" encoding="UTF-8"?>
<sentences>
  <sentence id="1">
    <text>The price is reasonable although the service is poor</text>
    <aspectTerms>
      <aspectTerm term="price" polarity="positive" from="4" to="9"/>
      <aspectTerm term="service" polarity="negative" from="37" to="44"/>
    </aspectTerms>
  </sentence>
  <sentence id="2">
    <text>Nothing here</text>
  </sentence>
</sentences>
)");
  std::string conllu = ReadFile(kPriceService);
  conllu.replace(conllu.find("price_service"), 13, "1");
  WriteFile(Path("in.conllu"), conllu);
  const CliRun r = Cli({"ingest", "--xml", Path("in.xml"), "--conllu", Path("in.conllu"),
                     "--out", Path("data.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["sentences_read"], 2);
  EXPECT_EQ(summary["sentences_filtered"], 1);
  EXPECT_EQ(summary["instances"], 2);
  EXPECT_EQ(summary["per_class"]["positive"], 1);
  EXPECT_EQ(summary["per_class"]["negative"], 1);
  const auto data = DeserializeDataset(ReadFile(Path("data.jsonl")));
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data[0].aspect_span.begin, 2);
  EXPECT_EQ(data[1].aspect_span.begin, 7);
}

TEST_F(CliTest, TrainEvalPredictExportRoundTrip) {
  const auto data = testing::Instances(testing::MakeSyntheticCorpus(16, 9));
  WriteFile(Path("train.jsonl"), SerializeDataset(data));
  TrainConfig config = testing::SyntheticTrainConfig();
  config.epochs = 4;
  config.dev_fraction = 0.25;
  WriteFile(Path("train.cfg"), SerializeConfig(config));

  CliRun r = Cli({"train", "--data", Path("train.jsonl"), "--config", Path("train.cfg"),
               "--out", Path("model.ckpt"), "--log", Path("train.log")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  int epochs = 0;
  for (std::string line; std::getline(lines, line); ++epochs) {
    const auto report = nlohmann::json::parse(line);
    EXPECT_EQ(report["epoch"], epochs);
    EXPECT_TRUE(report.contains("dev_accuracy"));
  }
  EXPECT_EQ(epochs, 4);
  EXPECT_EQ(ReadFile(Path("train.log")), r.out);

  // The reloaded checkpoint evaluates exactly like the in-memory model.
  const TrainResult in_memory = Train(config, data);
  const EvalResult expected = Evaluate(in_memory.params, data, config.position_mode);
  r = Cli({"eval", "--data", Path("train.jsonl"), "--ckpt", Path("model.ckpt")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, ToJson(expected) + "\n");
  EXPECT_EQ(nlohmann::json::parse(r.out)["accuracy"].get<double>(), expected.accuracy);

  r = Cli({"predict", "--ckpt", Path("model.ckpt"), "--conllu", kPriceService, "--span",
           "2:2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto pred = nlohmann::json::parse(r.out);
  EXPECT_EQ(pred["probabilities"].size(), 4u);
  ASSERT_EQ(pred["attention"].size(), 9u);
  EXPECT_EQ(pred["attention"][1]["token"], "price");
  double total = 0;
  for (const auto& t : pred["attention"]) total += t["alpha"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-9);

  r = Cli({"attn-export", "--ckpt", Path("model.ckpt"), "--data", Path("train.jsonl"),
           "--ids", "syn0,syn3", "--out", Path("maps")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(Path("maps"))) {
    ++files;
    EXPECT_THAT(ReadFile(entry.path().string()), HasSubstr("<svg"));
  }
  EXPECT_EQ(files, 2);
}

TEST_F(CliTest, TrainRejectsBadConfig) {
  WriteFile(Path("train.jsonl"), "");
  WriteFile(Path("bad.cfg"), "dropout = 1.5\n");
  const CliRun r = Cli({"train", "--data", Path("train.jsonl"), "--config", Path("bad.cfg"),
                     "--out", Path("m.ckpt")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_THAT(r.err, StartsWith("error code=BadConfig"));
}

TEST_F(CliTest, GradCheckReportsPerBlock) {
  CliRun r = Cli({"gradcheck", "--dims", "d_e=8,d_h=5,d_p=3,d_w=7,T=6", "--seed", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  int blocks = 0;
  for (std::string line; std::getline(lines, line); ++blocks) {
    EXPECT_THAT(line, MatchesRegex("PASS [a-z_.]+ entries=[0-9]+ failures=0 .*"));
  }
  EXPECT_GE(blocks, 16);

  // An impossible tolerance must surface as a numeric failure.
  r = Cli({"gradcheck", "--tol", "1e-300"});
  EXPECT_EQ(r.code, kExitNumeric);
  EXPECT_THAT(r.out, HasSubstr("FAIL "));
  EXPECT_THAT(r.err, StartsWith("error code=GradCheckFailed"));
}

}  // namespace
}  // namespace atp
