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

#include "atp/config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "atp/error.h"

namespace atp {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kBadConfig,
                "config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::kBadConfig,
              "config key '" + key + "': expected true/false, got '" + value + "'");
}

struct Field {
  std::string key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&)> set;
};

template <typename T>
Field Number(std::string key, T TrainConfig::*member) {
  return Field{
      key,
      [member](const TrainConfig& c) {
        if constexpr (std::is_floating_point_v<T>) {
          return FormatDouble(c.*member);
        } else {
          return std::to_string(c.*member);
        }
      },
      [key, member](TrainConfig& c, const std::string& v) {
        c.*member = ParseNumber<T>(key, v);
      }};
}

Field Bool(std::string key, bool TrainConfig::*member) {
  return Field{key,
               [member](const TrainConfig& c) {
                 return std::string(c.*member ? "true" : "false");
               },
               [key, member](TrainConfig& c, const std::string& v) {
                 c.*member = ParseBool(key, v);
               }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      Number("d_e", &TrainConfig::d_e),
      Number("d_h", &TrainConfig::d_h),
      Number("d_p", &TrainConfig::d_p),
      Number("d_w", &TrainConfig::d_w),
      Number("max_distance", &TrainConfig::max_distance),
      Number("max_len", &TrainConfig::max_len),
      Number("lr", &TrainConfig::lr),
      Number("lr_factor", &TrainConfig::lr_factor),
      Number("lr_patience", &TrainConfig::lr_patience),
      Number("batch_size", &TrainConfig::batch_size),
      Number("dropout", &TrainConfig::dropout),
      Number("recurrent_dropout", &TrainConfig::recurrent_dropout),
      Number("epochs", &TrainConfig::epochs),
      Number("seed", &TrainConfig::seed),
      Number("upsample_target", &TrainConfig::upsample_target),
      Field{"aspect_pooling",
            [](const TrainConfig& c) { return std::string(PoolingName(c.aspect_pooling)); },
            [](TrainConfig& c, const std::string& v) { c.aspect_pooling = ParsePooling(v); }},
      Bool("freeze_embeddings", &TrainConfig::freeze_embeddings),
      Number("rms_rho", &TrainConfig::rms_rho),
      Number("rms_eps", &TrainConfig::rms_eps),
      Number("init_scale", &TrainConfig::init_scale),
      Number("dev_fraction", &TrainConfig::dev_fraction),
      Bool("lowercase", &TrainConfig::lowercase),
      Field{"position_mode",
            [](const TrainConfig& c) { return std::string(PositionModeName(c.position_mode)); },
            [](TrainConfig& c, const std::string& v) {
              if (v == "tree") {
                c.position_mode = PositionMode::kTree;
              } else if (v == "offset") {
                c.position_mode = PositionMode::kWordOffset;
              } else {
                throw Error(ErrorCode::kBadConfig,
                            "config key 'position_mode': expected tree or offset");
              }
            }},
  };
  return fields;
}

}  // namespace

std::string_view PositionModeName(PositionMode mode) {
  return mode == PositionMode::kTree ? "tree" : "offset";
}

ModelSpec TrainConfig::ToModelSpec() const {
  ModelSpec spec;
  spec.d_e = d_e;
  spec.d_h = d_h;
  spec.d_p = d_p;
  spec.d_w = d_w;
  spec.max_distance = max_distance;
  spec.pooling = aspect_pooling;
  spec.input_dropout = dropout;
  spec.recurrent_dropout = recurrent_dropout;
  spec.freeze_embeddings = freeze_embeddings;
  return spec;
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kBadConfig, std::string("invalid config: ") + what);
  };
  require(d_e > 0 && d_h > 0 && d_p > 0 && d_w > 0, "dimensions must be positive");
  require(max_distance > 0, "max_distance must be positive");
  require(max_len >= 0, "max_len must be >= 0");
  require(lr > 0, "lr must be positive");
  require(lr_factor > 0 && lr_factor <= 1, "lr_factor must be in (0, 1]");
  require(lr_patience > 0, "lr_patience must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(dropout >= 0 && dropout < 1, "dropout must be in [0, 1)");
  require(recurrent_dropout >= 0 && recurrent_dropout < 1,
          "recurrent_dropout must be in [0, 1)");
  require(epochs > 0, "epochs must be positive");
  require(upsample_target >= -1, "upsample_target must be >= -1");
  require(rms_rho > 0 && rms_rho < 1, "rms_rho must be in (0, 1)");
  require(rms_eps > 0, "rms_eps must be positive");
  require(init_scale > 0, "init_scale must be positive");
  require(dev_fraction >= 0 && dev_fraction < 1, "dev_fraction must be in [0, 1)");
}

TrainConfig ParseConfig(std::string_view text) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;

  TrainConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kBadConfig,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw Error(ErrorCode::kBadConfig, "unknown config key '" + key + "'");
    }
    it->second->set(config, value);
  }
  config.Validate();
  return config;
}

std::string SerializeConfig(const TrainConfig& config) {
  std::string out;
  for (const Field& f : Fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace atp
