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

#include "atp/heatmap.h"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "atp/error.h"

namespace atp {
namespace {

constexpr int kLow[3] = {255, 255, 255};
constexpr int kHigh[3] = {0x08, 0x30, 0x6b};
constexpr int kCellWidth = 90;
constexpr int kCellHeight = 36;

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

HeatmapDoc MakeHeatmapDoc(const ReviewInstance& inst, const Prediction& prediction) {
  if (static_cast<int>(prediction.alpha.size()) != inst.tree.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "attention length differs from sentence length");
  }
  HeatmapDoc doc;
  doc.sentence_id = inst.sentence_id;
  for (const Token& t : inst.tree.tokens()) doc.tokens.push_back(t.form);
  doc.alpha = prediction.alpha;
  doc.aspect = inst.aspect_span;
  doc.predicted = prediction.label;
  doc.gold = inst.label;
  return doc;
}

std::string HeatmapColor(double alpha) {
  const double a = std::clamp(std::isfinite(alpha) ? alpha : 0.0, 0.0, 1.0);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(kLow[k] + a * (kHigh[k] - kLow[k])));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string RenderHeatmapHtml(const HeatmapDoc& doc) {
  const int n = static_cast<int>(doc.tokens.size());
  const int width = std::max(1, n) * kCellWidth;
  const int height = kCellHeight * 2 + 10;
  std::ostringstream out;
  out << "<!DOCTYPE html>\n"
      << "<!-- attention heatmap\n"
      << "     color mapping: fill = white + alpha * (#08306b - white), per RGB\n"
      << "     channel, alpha clamped to [0, 1]; darker cell means larger alpha.\n"
      << "     Aspect tokens carry a thick outline. Padding steps are omitted. -->\n"
      << "<html><head><meta charset=\"utf-8\"><title>attention "
      << Escape(doc.sentence_id) << "</title></head><body>\n"
      << "<p>sentence " << Escape(doc.sentence_id) << " &middot; aspect ["
      << doc.aspect.begin << ", " << doc.aspect.end << "] &middot; predicted "
      << PolarityName(doc.predicted) << " &middot; gold " << PolarityName(doc.gold)
      << "</p>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  for (int i = 0; i < n; ++i) {
    const double a = doc.alpha[i];
    const bool aspect = doc.aspect.Contains(i + 1);
    char value[32];
    std::snprintf(value, sizeof(value), "%.4f", a);
    out << "<g class=\"cell\" data-index=\"" << (i + 1) << "\" data-alpha=\"" << value
        << "\"" << (aspect ? " data-aspect=\"1\"" : "") << ">"
        << "<title>" << Escape(doc.tokens[i]) << ": " << value << "</title>"
        << "<rect x=\"" << i * kCellWidth << "\" y=\"0\" width=\"" << kCellWidth
        << "\" height=\"" << kCellHeight << "\" fill=\"" << HeatmapColor(a)
        << "\" stroke=\"#000000\" stroke-width=\"" << (aspect ? 3 : 1) << "\"/>"
        << "<text x=\"" << i * kCellWidth + kCellWidth / 2 << "\" y=\""
        << kCellHeight + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"13\"" << (aspect ? " font-weight=\"bold\"" : "") << ">"
        << Escape(doc.tokens[i]) << "</text></g>\n";
  }
  out << "</svg>\n</body></html>\n";
  return out.str();
}

std::string HeatmapFileName(const HeatmapDoc& doc) {
  std::string id = doc.sentence_id.empty() ? "sentence" : doc.sentence_id;
  for (char& c : id) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return id + "_" + std::to_string(doc.aspect.begin) + "-" +
         std::to_string(doc.aspect.end) + ".html";
}

}  // namespace atp
