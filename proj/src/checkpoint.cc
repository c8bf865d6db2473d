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
#include <cstring>
#include <sstream>

#include "atp/error.h"
#include "atp/ingest.h"
#include "json.hpp"

namespace atp {
namespace {

void AppendLittleEndian(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  }
  out.append(bytes, 8);
}

double ReadLittleEndian(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kBadCheckpoint, "checkpoint: " + what);
}

}  // namespace

std::string SerializeCheckpoint(const AtpParams& params, const TrainConfig& config) {
  const ModelSpec spec = config.ToModelSpec();
  if (spec.d_e != params.word.dim() || spec.d_h != params.spec.d_h ||
      spec.d_p != params.pos.dim() || spec.d_w != params.spec.d_w ||
      spec.max_distance != params.pos.max_distance || spec.pooling != params.spec.pooling) {
    throw Error(ErrorCode::kDimensionMismatch,
                "checkpoint: config does not describe the parameters");
  }
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = SerializeConfig(config);
  header["vocab_lowercase"] = params.word.vocab.lowercase();
  header["vocab"] = params.word.vocab.words();
  auto& tensors = header["tensors"] = nlohmann::json::array();

  std::string payload;
  for (const auto& [name, p] : params.Named()) {
    const Tensor2& t = p->value;
    tensors.push_back({{"name", name},
                       {"rows", t.rows()},
                       {"cols", t.cols()},
                       {"offset", payload.size()}});
    for (double v : t.flat()) AppendLittleEndian(payload, v);
  }
  header["payload_bytes"] = payload.size();

  const std::string header_text = header.dump(1) + "\n";
  std::string out = "ATPCKPT " + std::to_string(kCheckpointVersion) + " " +
                    std::to_string(header_text.size()) + "\n";
  out += header_text;
  out += payload;
  return out;
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) Bad("missing preamble");
  std::istringstream pre{std::string(bytes.substr(0, nl))};
  std::string magic;
  int version = 0;
  std::size_t header_bytes = 0;
  if (!(pre >> magic >> version >> header_bytes) || magic != "ATPCKPT") {
    Bad("bad preamble");
  }
  if (version != kCheckpointVersion) Bad("unsupported version " + std::to_string(version));
  const std::size_t header_begin = nl + 1;
  if (header_begin + header_bytes > bytes.size()) Bad("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(header_begin, header_bytes));
  } catch (const nlohmann::json::exception& e) {
    Bad(std::string("header is not JSON: ") + e.what());
  }
  const std::string_view payload = bytes.substr(header_begin + header_bytes);

  Checkpoint ckpt;
  try {
    ckpt.config = ParseConfig(header.at("config").get<std::string>());
    Vocabulary vocab(header.at("vocab_lowercase").get<bool>());
    const auto words = header.at("vocab").get<std::vector<std::string>>();
    if (words.size() < 2 || words[0] != vocab.word(Vocabulary::kPad) ||
        words[1] != vocab.word(Vocabulary::kUnk)) {
      Bad("vocabulary lacks PAD/UNK rows");
    }
    for (std::size_t i = 2; i < words.size(); ++i) {
      if (vocab.Add(words[i]) != static_cast<int>(i)) Bad("duplicate vocabulary entry");
    }
    if (header.at("payload_bytes").get<std::size_t>() != payload.size()) {
      Bad("payload size mismatch");
    }
    Rng rng(0);
    ckpt.params = InitParams(ckpt.config.ToModelSpec(), std::move(vocab),
                             ckpt.config.init_scale, rng);

    auto named = ckpt.params.Named();
    const auto& tensors = header.at("tensors");
    if (tensors.size() != named.size()) Bad("tensor count mismatch");
    for (std::size_t k = 0; k < named.size(); ++k) {
      const auto& entry = tensors[k];
      Tensor2& t = named[k].second->value;
      if (entry.at("name").get<std::string>() != named[k].first ||
          entry.at("rows").get<int>() != t.rows() ||
          entry.at("cols").get<int>() != t.cols()) {
        Bad("tensor '" + named[k].first + "' missing or misshapen");
      }
      const auto offset = entry.at("offset").get<std::size_t>();
      if (offset + 8 * t.size() > payload.size()) Bad("tensor payload out of range");
      auto flat = t.flat();
      for (std::size_t i = 0; i < flat.size(); ++i) {
        flat[i] = ReadLittleEndian(payload.data() + offset + 8 * i);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Bad(e.what());
  }
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const AtpParams& params,
                    const TrainConfig& config) {
  WriteFile(path, SerializeCheckpoint(params, config));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  return DeserializeCheckpoint(ReadFile(path));
}

}  // namespace atp
