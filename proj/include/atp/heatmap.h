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

// Static HTML/SVG rendering of per-token attention weights.

#ifndef ATP_HEATMAP_H_
#define ATP_HEATMAP_H_

#include <string>
#include <vector>

#include "atp/ingest.h"
#include "atp/model.h"

namespace atp {

struct HeatmapDoc {
  std::string sentence_id;
  std::vector<std::string> tokens;
  Vec alpha;  // one per token, pads omitted
  TokenSpan aspect;
  PolarityLabel predicted = PolarityLabel::kPositive;
  PolarityLabel gold = PolarityLabel::kPositive;
};

HeatmapDoc MakeHeatmapDoc(const ReviewInstance& inst, const Prediction& prediction);

// Linear ramp from white (alpha 0) to #08306b (alpha 1); alpha is clamped to
// [0, 1]. Each channel is non-increasing in alpha.
std::string HeatmapColor(double alpha);

std::string RenderHeatmapHtml(const HeatmapDoc& doc);

// "<sentence_id>_<begin>-<end>.html" with unsafe characters replaced.
std::string HeatmapFileName(const HeatmapDoc& doc);

}  // namespace atp

#endif  // ATP_HEATMAP_H_
