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

// Ingestion of SemEval-2014 Task 4 style review XML and CoNLL-U dependency
// parses into aligned (sentence, aspect span, polarity) instances.

#ifndef ATP_INGEST_H_
#define ATP_INGEST_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atp {

enum class PolarityLabel : std::uint8_t {
  kPositive = 0,
  kNegative = 1,
  kNeutral = 2,
  kConflict = 3,
};

inline constexpr int kNumPolarities = 4;
inline constexpr std::array<PolarityLabel, kNumPolarities> kAllPolarities = {
    PolarityLabel::kPositive, PolarityLabel::kNegative, PolarityLabel::kNeutral,
    PolarityLabel::kConflict};

inline int LabelCode(PolarityLabel label) { return static_cast<int>(label); }
// Throws kUnknownPolarity for codes outside 0..3.
PolarityLabel LabelFromCode(int code);
// Case-insensitive; throws kUnknownPolarity.
PolarityLabel ParsePolarity(std::string_view text);
std::string_view PolarityName(PolarityLabel label);

struct Token {
  int index = 0;  // 1-based
  std::string form;
  int head = 0;  // 0 = root
  std::string deprel;
};

// A tokenized sentence with a single-rooted dependency tree. Construct via
// DepTree::FromTokens, which validates the tree invariants.
class DepTree {
 public:
  DepTree() = default;

  // Throws kHeadOutOfRange or kNonTree when the tokens do not form a tree,
  // kMalformedLine when token indices are not 1..n in order.
  static DepTree FromTokens(std::vector<Token> tokens,
                            std::string sent_id = {});

  int size() const { return static_cast<int>(tokens_.size()); }
  // 1-based access.
  const Token& token(int index) const { return tokens_[index - 1]; }
  const std::vector<Token>& tokens() const { return tokens_; }
  int root() const;
  // Value of a "# sent_id = ..." comment, if the source carried one.
  const std::string& sent_id() const { return sent_id_; }

  // Undirected adjacency lists indexed 1..n (entry 0 unused).
  std::vector<std::vector<int>> Adjacency() const;

  friend bool operator==(const DepTree& a, const DepTree& b);

 private:
  std::vector<Token> tokens_;
  std::string sent_id_;
};

bool operator==(const Token& a, const Token& b);

// Inclusive, 1-based token range.
struct TokenSpan {
  int begin = 0;
  int end = 0;

  int length() const { return end - begin + 1; }
  bool Contains(int index) const { return index >= begin && index <= end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Half-open character range, counted in Unicode code points.
struct CharSpan {
  int from = 0;
  int to = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct ReviewInstance {
  DepTree tree;
  TokenSpan aspect_span;
  PolarityLabel label = PolarityLabel::kNeutral;
  std::string sentence_id;
  CharSpan char_span;
};

struct AspectTerm {
  std::string term;
  PolarityLabel polarity = PolarityLabel::kNeutral;
  CharSpan span;
};

struct XmlSentence {
  std::string id;
  std::string text;
  std::vector<AspectTerm> aspects;
};

std::vector<DepTree> ParseConllu(std::string_view text);

// Every <sentence> in document order, including those without aspect terms.
std::vector<XmlSentence> ParseSemevalXmlAll(std::string_view text);

// Sentences carrying at least one aspect term.
std::vector<XmlSentence> ParseSemevalXml(std::string_view text);

// Code point extents [from, to) of each token in `sentence_text`. Tokens are
// matched left to right, skipping whitespace between them.
std::vector<CharSpan> TokenExtents(const DepTree& tree,
                                   std::string_view sentence_text);

// Minimal token span whose extent covers [from, to).
TokenSpan AlignSpan(const DepTree& tree, std::string_view sentence_text,
                    int from, int to);

struct IngestSummary {
  int sentences_read = 0;      // all <sentence> elements
  int sentences_filtered = 0;  // dropped for having no aspect terms
  int sentences_retained = 0;
  int instances = 0;
  std::array<int, kNumPolarities> per_class{};
};

// Pairs XML sentences with CoNLL-U blocks. The CoNLL-U file may cover either
// every XML sentence or only the retained ones; pairing is positional and
// cross-checked against "# sent_id" comments when present.
std::vector<ReviewInstance> BuildDataset(std::string_view xml,
                                         std::string_view conllu,
                                         IngestSummary* summary = nullptr);

// Line-delimited JSON records, one per instance.
std::string SerializeDataset(const std::vector<ReviewInstance>& data);
std::vector<ReviewInstance> DeserializeDataset(std::string_view text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace atp

#endif  // ATP_INGEST_H_
