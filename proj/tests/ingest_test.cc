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

#include "atp/ingest.h"

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "atp/error.h"
#include "support/synthetic.h"

namespace atp {
namespace {

using ::atp::testing::ConlluLine;

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no atp::Error thrown";
  return ErrorCode::kIo;
}

TEST(ConlluTest, PriceServiceSentence) {
  const auto trees = ParseConllu(testing::PriceServiceConllu());
  ASSERT_EQ(trees.size(), 1u);
  const DepTree& tree = trees[0];
  EXPECT_EQ(tree.size(), 9);
  EXPECT_EQ(tree.root(), 3);
  EXPECT_EQ(tree.token(3).form, "is");
  EXPECT_EQ(tree.token(9).head, 8);
  EXPECT_EQ(tree.token(2).deprel, "nsubj");
  EXPECT_EQ(tree.sent_id(), "price_service");
}

TEST(ConlluTest, SingleTokenTree) {
  const auto trees = ParseConllu("1\tword\t_\t_\t_\t_\t0\troot\t_\t_\n");
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0].size(), 1);
  EXPECT_EQ(trees[0].root(), 1);
}

TEST(ConlluTest, SkipsCommentsMultiwordRangesAndEmptyNodes) {
  const std::string text =
      "# text = I can't go\n" + ConlluLine(1, "I", 3, "nsubj") +
      "2-3\tcan't\t_\t_\t_\t_\t_\t_\t_\t_\n" + ConlluLine(2, "ca", 3, "aux") +
      ConlluLine(3, "n't", 0, "root") + "3.1\tgo\t_\t_\t_\t_\t_\t_\t_\t_\n" +
      "\n\n" + ConlluLine(1, "Hi", 0, "root") + "\n";
  const auto trees = ParseConllu(text);
  ASSERT_EQ(trees.size(), 2u);
  EXPECT_EQ(trees[0].size(), 3);
  EXPECT_EQ(trees[1].size(), 1);
}

TEST(ConlluTest, AcceptsCrlf) {
  const auto trees =
      ParseConllu("1\ta\t_\t_\t_\t_\t2\tdet\t_\t_\r\n2\tb\t_\t_\t_\t_\t0\troot\t_\t_\r\n\r\n");
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(trees[0].token(2).deprel, "root");
}

TEST(ConlluTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseConllu("1\tword\t0\troot\n"); }), ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] { ParseConllu("x\tw\t_\t_\t_\t_\t0\troot\t_\t_\n"); }),
            ErrorCode::kMalformedLine);
  // Self loop.
  EXPECT_EQ(CodeOf([] {
              ParseConllu(ConlluLine(1, "a", 0, "root") + ConlluLine(2, "b", 2, "dep"));
            }),
            ErrorCode::kNonTree);
  // Head beyond the sentence.
  EXPECT_EQ(CodeOf([] {
              ParseConllu(ConlluLine(1, "a", 0, "root") + ConlluLine(2, "b", 5, "dep"));
            }),
            ErrorCode::kHeadOutOfRange);
  // Two roots.
  EXPECT_EQ(CodeOf([] {
              ParseConllu(ConlluLine(1, "a", 0, "root") + ConlluLine(2, "b", 0, "root"));
            }),
            ErrorCode::kNonTree);
  // Cycle 2 -> 3 -> 2, disconnected from the root.
  EXPECT_EQ(CodeOf([] {
              ParseConllu(ConlluLine(1, "a", 0, "root") + ConlluLine(2, "b", 3, "dep") +
                          ConlluLine(3, "c", 2, "dep"));
            }),
            ErrorCode::kNonTree);
  // Ids must be consecutive.
  EXPECT_EQ(CodeOf([] {
              ParseConllu(ConlluLine(1, "a", 0, "root") + ConlluLine(3, "b", 1, "dep"));
            }),
            ErrorCode::kMalformedLine);
}

TEST(ConlluTest, RandomTreesSatisfyInvariants) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const DepTree tree = testing::RandomTree(1 + trial % 12, rng);
    int roots = 0, edges = 0;
    for (const Token& t : tree.tokens()) {
      EXPECT_GE(t.head, 0);
      EXPECT_LE(t.head, tree.size());
      EXPECT_NE(t.head, t.index);
      roots += t.head == 0;
      edges += t.head != 0;
    }
    EXPECT_EQ(roots, 1);
    EXPECT_EQ(edges, tree.size() - 1);
  }
}

constexpr char kXml[] = R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<sentences>
    <sentence id="813">
        <text>All the appetizers and salads were fabulous, the steak was mouth watering and the pasta was delicious!!!</text>
        <aspectTerms>
            <aspectTerm term="appetizers" polarity="positive" from="8" to="18"/>
            <aspectTerm term="salads" polarity="POSITIVE" from="23" to="29"/>
        </aspectTerms>
    </sentence>
    <sentence id="900">
        <text>I went there on a Sunday.</text>
    </sentence>
    <sentence id="1001">
        <text>Great screen resolution but it overheats &amp; the fan is loud.</text>
        <aspectTerms>
            <aspectTerm term="screen resolution" polarity="conflict" from="6" to="23"/>
        </aspectTerms>
    </sentence>
</sentences>
)";

TEST(SemevalXmlTest, ParsesAndFilters) {
  const auto all = ParseSemevalXmlAll(kXml);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_TRUE(all[1].aspects.empty());

  const auto kept = ParseSemevalXml(kXml);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "813");
  ASSERT_EQ(kept[0].aspects.size(), 2u);
  EXPECT_EQ(kept[0].aspects[1].polarity, PolarityLabel::kPositive);
  EXPECT_EQ(kept[0].aspects[0].span, (CharSpan{8, 18}));
  EXPECT_EQ(kept[1].aspects[0].polarity, PolarityLabel::kConflict);
  EXPECT_EQ(kept[1].text.substr(0, 5), "Great");
  // Entities are decoded.
  EXPECT_NE(kept[1].text.find(" & "), std::string::npos);
}

TEST(SemevalXmlTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseSemevalXml("<sentences><sentence>"); }),
            ErrorCode::kXmlSyntax);
  EXPECT_EQ(CodeOf([] {
              ParseSemevalXml(
                  R"(<sentences><sentence id="1"><text>ok</text><aspectTerms>)"
                  R"(<aspectTerm term="ok" polarity="mixed" from="0" to="2"/>)"
                  R"(</aspectTerms></sentence></sentences>)");
            }),
            ErrorCode::kUnknownPolarity);
  EXPECT_EQ(CodeOf([] {
              ParseSemevalXml(
                  R"(<sentences><sentence id="1"><text>ok</text><aspectTerms>)"
                  R"(<aspectTerm term="ok" polarity="neutral" from="0" to="9"/>)"
                  R"(</aspectTerms></sentence></sentences>)");
            }),
            ErrorCode::kSpanOutOfBounds);
}

TEST(PolarityTest, CodesAndNames) {
  for (PolarityLabel label : kAllPolarities) {
    EXPECT_EQ(LabelFromCode(LabelCode(label)), label);
    EXPECT_EQ(ParsePolarity(PolarityName(label)), label);
  }
  EXPECT_EQ(ParsePolarity("Neutral"), PolarityLabel::kNeutral);
  EXPECT_EQ(LabelCode(PolarityLabel::kConflict), 3);
  EXPECT_THROW(LabelFromCode(4), Error);
}

DepTree ScreenTree() {
  // Great screen resolution but it overheats & the fan is loud .
  const std::vector<std::pair<std::string, int>> toks = {
      {"Great", 3}, {"screen", 3}, {"resolution", 0}, {"but", 6}, {"it", 6},
      {"overheats", 3}, {"&", 10}, {"the", 9}, {"fan", 10}, {"is", 6},
      {"loud", 10}, {".", 3}};
  std::string text;
  for (int i = 0; i < static_cast<int>(toks.size()); ++i) {
    text += ConlluLine(i + 1, toks[i].first, toks[i].second, "dep");
  }
  return ParseConllu(text).front();
}

TEST(AlignSpanTest, MultiwordAndSubtoken) {
  const DepTree tree = ScreenTree();
  const std::string text = "Great screen resolution but it overheats & the fan is loud.";
  EXPECT_EQ(AlignSpan(tree, text, 6, 23), (TokenSpan{2, 3}));
  EXPECT_EQ(AlignSpan(tree, text, 8, 10), (TokenSpan{2, 2}));
  EXPECT_EQ(CodeOf([&] { AlignSpan(tree, text, 10, 10); }), ErrorCode::kAlignmentFailure);
  EXPECT_EQ(CodeOf([&] { AlignSpan(tree, text, 12, 5); }), ErrorCode::kAlignmentFailure);
  EXPECT_EQ(CodeOf([&] { AlignSpan(tree, "Great screen", 0, 5); }),
            ErrorCode::kAlignmentFailure);
}

TEST(AlignSpanTest, CountsCodePoints) {
  const std::string conllu = ConlluLine(1, "Café", 2, "nsubj") +
                             ConlluLine(2, "rocks", 0, "root") + ConlluLine(3, "!", 2, "punct");
  const DepTree tree = ParseConllu(conllu).front();
  const std::string text = "Café rocks!";
  const auto extents = TokenExtents(tree, text);
  EXPECT_EQ(extents[0], (CharSpan{0, 4}));
  EXPECT_EQ(extents[1], (CharSpan{5, 10}));
  EXPECT_EQ(AlignSpan(tree, text, 5, 10), (TokenSpan{2, 2}));
}

TEST(AlignSpanTest, RealigningExtentsIsIdempotent) {
  const DepTree tree = ScreenTree();
  const std::string text = "Great screen resolution but it overheats & the fan is loud.";
  const auto extents = TokenExtents(tree, text);
  for (int s = 1; s <= tree.size(); ++s) {
    for (int e = s; e <= tree.size(); ++e) {
      const TokenSpan span =
          AlignSpan(tree, text, extents[s - 1].from, extents[e - 1].to);
      EXPECT_EQ(span, (TokenSpan{s, e}));
    }
  }
}

std::string Conllu813And1001(bool with_900) {
  const std::string s813 =
      "All the appetizers and salads were fabulous , the steak was mouth watering "
      "and the pasta was delicious !!!";
  std::string out = "# sent_id = 813\n";
  std::istringstream words(s813);
  std::string w;
  int i = 0;
  while (words >> w) {
    ++i;
    out += ConlluLine(i, w, i == 7 ? 0 : 7, i == 7 ? "root" : "dep");
  }
  out += "\n";
  if (with_900) {
    out += "# sent_id = 900\n";
    const std::vector<std::string> s900 = {"I", "went", "there", "on", "a", "Sunday", "."};
    for (int k = 0; k < 7; ++k) {
      out += ConlluLine(k + 1, s900[k], k == 1 ? 0 : 2, k == 1 ? "root" : "dep");
    }
    out += "\n";
  }
  const std::vector<std::pair<std::string, int>> s1001 = {
      {"Great", 3}, {"screen", 3}, {"resolution", 0}, {"but", 6}, {"it", 6},
      {"overheats", 3}, {"&", 10}, {"the", 9}, {"fan", 10}, {"is", 6},
      {"loud", 10}, {".", 3}};
  out += "# sent_id = 1001\n";
  for (int k = 0; k < 12; ++k) {
    out += ConlluLine(k + 1, s1001[k].first, s1001[k].second, "dep");
  }
  return out + "\n";
}

TEST(BuildDatasetTest, OneInstancePerAspectTerm) {
  for (bool with_900 : {true, false}) {
    IngestSummary summary;
    const auto data = BuildDataset(kXml, Conllu813And1001(with_900), &summary);
    ASSERT_EQ(data.size(), 3u);
    EXPECT_EQ(summary.sentences_read, 3);
    EXPECT_EQ(summary.sentences_filtered, 1);
    EXPECT_EQ(summary.sentences_retained, 2);
    EXPECT_EQ(summary.instances, 3);
    EXPECT_EQ(summary.per_class[LabelCode(PolarityLabel::kPositive)], 2);
    EXPECT_EQ(summary.per_class[LabelCode(PolarityLabel::kConflict)], 1);
    // Two aspects of sentence 813 share one tree.
    EXPECT_EQ(data[0].tree, data[1].tree);
    EXPECT_EQ(data[0].aspect_span, (TokenSpan{3, 3}));
    EXPECT_EQ(data[1].aspect_span, (TokenSpan{5, 5}));
    EXPECT_EQ(data[2].aspect_span, (TokenSpan{2, 3}));
    EXPECT_EQ(data[2].sentence_id, "1001");
  }
}

TEST(BuildDatasetTest, EmptyAndMismatched) {
  EXPECT_TRUE(BuildDataset("<sentences/>", "").empty());
  EXPECT_EQ(CodeOf([] { BuildDataset(kXml, testing::PriceServiceConllu()); }),
            ErrorCode::kCountMismatch);
  // Same count but wrong sent_id.
  std::string renamed = Conllu813And1001(false);
  renamed.replace(renamed.find("= 813"), 5, "= 814");
  EXPECT_EQ(CodeOf([&] { BuildDataset(kXml, renamed); }), ErrorCode::kCountMismatch);
}

TEST(DatasetFileTest, RoundTrip) {
  const auto data = BuildDataset(kXml, Conllu813And1001(true));
  const std::string text = SerializeDataset(data);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const auto back = DeserializeDataset(text);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].tree.tokens(), data[i].tree.tokens());
    EXPECT_EQ(back[i].aspect_span, data[i].aspect_span);
    EXPECT_EQ(back[i].label, data[i].label);
    EXPECT_EQ(back[i].sentence_id, data[i].sentence_id);
    EXPECT_EQ(back[i].char_span, data[i].char_span);
  }
  EXPECT_EQ(CodeOf([] { DeserializeDataset("{not json}\n"); }), ErrorCode::kMalformedLine);
}

}  // namespace
}  // namespace atp
