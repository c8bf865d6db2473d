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

#include "atp/checkpoint.h"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "atp/config.h"
#include "atp/error.h"
#include "atp/training.h"
#include "support/synthetic.h"

namespace atp {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TrainConfig SmallConfig() {
  TrainConfig config;
  config.d_e = 5;
  config.d_h = 3;
  config.d_p = 2;
  config.d_w = 4;
  config.max_distance = 6;
  config.aspect_pooling = AspectPooling::kHead;
  return config;
}

AtpParams RandomParams(Rng& rng) {
  Vocabulary vocab;
  for (const char* w : {"The", "price", "is", "reasonable", "naïve"}) vocab.Add(w);
  AtpParams p = InitParams(SmallConfig().ToModelSpec(), vocab, 1.0, rng);
  // Values whose decimal forms would not round-trip through short printing.
  p.attn.w_s.value(0, 0) = 0.1 + 0.2;
  p.attn.w_s.value(0, 1) = -1e-310;  // subnormal
  p.attn.w_s.value(0, 2) = 1.0 / 3.0;
  return p;
}

TEST(ConfigTest, DefaultsMatchPublishedSettings) {
  const TrainConfig c;
  EXPECT_EQ(c.d_h, 150);
  EXPECT_DOUBLE_EQ(c.lr, 0.001);
  EXPECT_EQ(c.batch_size, 128);
  EXPECT_DOUBLE_EQ(c.dropout, 0.5);
  EXPECT_DOUBLE_EQ(c.recurrent_dropout, 0.5);
  EXPECT_DOUBLE_EQ(c.rms_rho, 0.9);
  EXPECT_DOUBLE_EQ(c.rms_eps, 1e-8);
  EXPECT_EQ(c.max_distance, 30);
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, ParseAndSerializeRoundTrip) {
  const TrainConfig parsed = ParseConfig(
      "# comment\n"
      "d_h = 32\n"
      "lr=0.0123456789012345\n"
      "aspect_pooling = head\n"
      "position_mode = offset\n"
      "freeze_embeddings = true\n"
      "\n"
      "seed = 18446744073709551615\n");
  EXPECT_EQ(parsed.d_h, 32);
  EXPECT_EQ(parsed.lr, 0.0123456789012345);
  EXPECT_EQ(parsed.aspect_pooling, AspectPooling::kHead);
  EXPECT_EQ(parsed.position_mode, PositionMode::kWordOffset);
  EXPECT_TRUE(parsed.freeze_embeddings);
  EXPECT_EQ(parsed.seed, 18446744073709551615ULL);
  const std::string text = SerializeConfig(parsed);
  EXPECT_EQ(SerializeConfig(ParseConfig(text)), text);
}

TEST(ConfigTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseConfig("unknown_key = 1\n"); }), ErrorCode::kBadConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("d_h 150\n"); }), ErrorCode::kBadConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("d_h = abc\n"); }), ErrorCode::kBadConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("dropout = 1.0\n").Validate(); }),
            ErrorCode::kBadConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("aspect_pooling = max\n"); }), ErrorCode::kBadConfig);
}

TEST(CheckpointTest, BitExactRoundTrip) {
  Rng rng(1);
  const AtpParams p = RandomParams(rng);
  TrainConfig config = SmallConfig();
  config.lr = 0.1 + 0.2;
  config.seed = 77;
  const std::string bytes = SerializeCheckpoint(p, config);
  EXPECT_EQ(bytes.rfind("ATPCKPT 1 ", 0), 0u);
  const Checkpoint loaded = DeserializeCheckpoint(bytes);
  EXPECT_EQ(SerializeConfig(loaded.config), SerializeConfig(config));
  EXPECT_EQ(loaded.params.word.vocab.words(), p.word.vocab.words());
  EXPECT_EQ(loaded.params.spec.pooling, AspectPooling::kHead);
  const auto a = p.Named();
  const auto b = loaded.params.Named();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].first, b[k].first);
    const auto va = a[k].second->value.flat();
    const auto vb = b[k].second->value.flat();
    ASSERT_EQ(va.size(), vb.size()) << a[k].first;
    for (std::size_t i = 0; i < va.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(va[i]), std::bit_cast<std::uint64_t>(vb[i]));
    }
  }
  EXPECT_EQ(SerializeCheckpoint(loaded.params, loaded.config), bytes);
}

TEST(CheckpointTest, FileRoundTripAndReloadedEvaluation) {
  const auto data = testing::Instances(testing::MakeSyntheticCorpus(12, 2));
  TrainConfig config = testing::SyntheticTrainConfig();
  config.epochs = 2;
  const TrainResult trained = Train(config, data);
  const auto path = std::filesystem::temp_directory_path() / "atp_ckpt_test.bin";
  SaveCheckpoint(path.string(), trained.params, trained.config);
  const Checkpoint loaded = LoadCheckpoint(path.string());
  std::filesystem::remove(path);
  const EvalResult before = Evaluate(trained.params, data, config.position_mode);
  const EvalResult after = Evaluate(loaded.params, data, loaded.config.position_mode);
  EXPECT_EQ(before.accuracy, after.accuracy);
  EXPECT_EQ(before.confusion, after.confusion);
}

TEST(CheckpointTest, RejectsDamagedFiles) {
  Rng rng(2);
  const AtpParams params = RandomParams(rng);
  EXPECT_EQ(CodeOf([&] { SerializeCheckpoint(params, TrainConfig{}); }),
            ErrorCode::kDimensionMismatch);
  const std::string bytes = SerializeCheckpoint(params, SmallConfig());
  EXPECT_EQ(CodeOf([] { DeserializeCheckpoint(""); }), ErrorCode::kBadCheckpoint);
  EXPECT_EQ(CodeOf([] { DeserializeCheckpoint("NOTACKPT 1 5\n{}"); }),
            ErrorCode::kBadCheckpoint);
  EXPECT_EQ(CodeOf([&] { DeserializeCheckpoint(bytes.substr(0, bytes.size() - 8)); }),
            ErrorCode::kBadCheckpoint);
  EXPECT_EQ(CodeOf([&] { DeserializeCheckpoint(bytes + "x"); }), ErrorCode::kBadCheckpoint);
  std::string wrong_version = bytes;
  wrong_version[8] = '9';
  EXPECT_EQ(CodeOf([&] { DeserializeCheckpoint(wrong_version); }),
            ErrorCode::kBadCheckpoint);
  EXPECT_EQ(CodeOf([] { LoadCheckpoint("/nonexistent/dir/ckpt"); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace atp
