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
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "atp/error.h"
#include "json.hpp"

namespace atp {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<int> ParseInt(std::string_view s) {
  int value = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool IsContinuationByte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

int CodePointLength(std::string_view s) {
  return static_cast<int>(
      std::count_if(s.begin(), s.end(), [](char c) { return !IsContinuationByte(c); }));
}

// Length in bytes of the whitespace character at `pos`, or 0. Recognizes
// ASCII whitespace and U+00A0.
size_t WhitespaceAt(std::string_view text, size_t pos) {
  const auto c = static_cast<unsigned char>(text[pos]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
      c == '\v') {
    return 1;
  }
  if (c == 0xC2 && pos + 1 < text.size() &&
      static_cast<unsigned char>(text[pos + 1]) == 0xA0) {
    return 2;
  }
  return 0;
}

}  // namespace

PolarityLabel LabelFromCode(int code) {
  if (code < 0 || code >= kNumPolarities) {
    throw Error(ErrorCode::kUnknownPolarity,
                "polarity code out of range: " + std::to_string(code));
  }
  return static_cast<PolarityLabel>(code);
}

PolarityLabel ParsePolarity(std::string_view text) {
  const std::string lower = Lower(text);
  for (PolarityLabel label : kAllPolarities) {
    if (lower == PolarityName(label)) return label;
  }
  throw Error(ErrorCode::kUnknownPolarity,
              "unknown polarity '" + std::string(text) + "'");
}

std::string_view PolarityName(PolarityLabel label) {
  switch (label) {
    case PolarityLabel::kPositive: return "positive";
    case PolarityLabel::kNegative: return "negative";
    case PolarityLabel::kNeutral: return "neutral";
    case PolarityLabel::kConflict: return "conflict";
  }
  return "?";
}

bool operator==(const Token& a, const Token& b) {
  return a.index == b.index && a.form == b.form && a.head == b.head &&
         a.deprel == b.deprel;
}

bool operator==(const DepTree& a, const DepTree& b) {
  return a.tokens_ == b.tokens_ && a.sent_id_ == b.sent_id_;
}

DepTree DepTree::FromTokens(std::vector<Token> tokens, std::string sent_id) {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) throw Error(ErrorCode::kNonTree, "empty sentence has no root");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = tokens[i];
    if (t.index != i + 1) {
      throw Error(ErrorCode::kMalformedLine,
                  "token ids must run 1..n, found " + std::to_string(t.index) +
                      " at position " + std::to_string(i + 1));
    }
    if (t.head < 0 || t.head > n) {
      throw Error(ErrorCode::kHeadOutOfRange,
                  "token " + std::to_string(t.index) + " has head " +
                      std::to_string(t.head) + " outside [0, " +
                      std::to_string(n) + "]");
    }
    if (t.head == t.index) {
      throw Error(ErrorCode::kNonTree,
                  "token " + std::to_string(t.index) + " is its own head");
    }
    if (t.head == 0) ++roots;
  }
  if (roots != 1) {
    throw Error(ErrorCode::kNonTree,
                "expected exactly one root, found " + std::to_string(roots));
  }
  // With one root and no self loops, the head links form a tree iff every
  // token reaches the root within n steps.
  std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on stack, 2 reaches root
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = tokens[cur - 1].head;
    }
    if (state[cur] == 1) {
      throw Error(ErrorCode::kNonTree,
                  "head links contain a cycle through token " +
                      std::to_string(cur));
    }
    for (int v : path) state[v] = 2;
  }
  DepTree tree;
  tree.tokens_ = std::move(tokens);
  tree.sent_id_ = std::move(sent_id);
  return tree;
}

int DepTree::root() const {
  for (const Token& t : tokens_) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

std::vector<std::vector<int>> DepTree::Adjacency() const {
  std::vector<std::vector<int>> adj(tokens_.size() + 1);
  for (const Token& t : tokens_) {
    if (t.head == 0) continue;
    adj[t.index].push_back(t.head);
    adj[t.head].push_back(t.index);
  }
  return adj;
}

std::vector<DepTree> ParseConllu(std::string_view text) {
  std::vector<DepTree> trees;
  std::vector<Token> tokens;
  std::string sent_id;
  bool in_block = false;

  auto flush = [&]() {
    if (!tokens.empty()) {
      trees.push_back(DepTree::FromTokens(std::move(tokens), sent_id));
    }
    tokens.clear();
    sent_id.clear();
    in_block = false;
  };

  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      if (!in_block || tokens.empty()) {
        in_block = true;
        constexpr std::string_view kSentId = "# sent_id";
        if (line.substr(0, kSentId.size()) == kSentId) {
          std::string_view rest = line.substr(kSentId.size());
          size_t eq = rest.find('=');
          if (eq != std::string_view::npos) rest = rest.substr(eq + 1);
          while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
          while (!rest.empty() && rest.back() == ' ') rest.remove_suffix(1);
          sent_id = std::string(rest);
        }
      }
      continue;
    }
    in_block = true;
    const auto fields = Split(line, '\t');
    if (fields.size() != 10) {
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": expected 10 fields, got " +
                      std::to_string(fields.size()));
    }
    // Multiword token ranges and empty nodes carry no tree position.
    if (fields[0].find_first_of("-.") != std::string_view::npos) continue;
    const auto id = ParseInt(fields[0]);
    const auto head = ParseInt(fields[6]);
    if (!id || !head) {
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": non-integer ID or HEAD");
    }
    tokens.push_back(Token{*id, std::string(fields[1]), *head,
                           std::string(fields[7])});
  }
  flush();
  return trees;
}

std::vector<XmlSentence> ParseSemevalXmlAll(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kXmlSyntax, e.what());
  }

  std::vector<XmlSentence> out;
  // Sentences live under <sentences>; accept them at the document root too.
  const pt::ptree* container = &doc;
  if (auto s = doc.get_child_optional("sentences")) container = &*s;

  for (const auto& [name, node] : *container) {
    if (name != "sentence") continue;
    XmlSentence sentence;
    sentence.id = node.get<std::string>("<xmlattr>.id", "");
    sentence.text = node.get<std::string>("text", "");
    const int length = CodePointLength(sentence.text);
    if (auto terms = node.get_child_optional("aspectTerms")) {
      for (const auto& [tname, tnode] : *terms) {
        if (tname != "aspectTerm") continue;
        AspectTerm term;
        term.term = tnode.get<std::string>("<xmlattr>.term", "");
        term.polarity =
            ParsePolarity(tnode.get<std::string>("<xmlattr>.polarity", ""));
        const auto from = ParseInt(tnode.get<std::string>("<xmlattr>.from", ""));
        const auto to = ParseInt(tnode.get<std::string>("<xmlattr>.to", ""));
        if (!from || !to || *from < 0 || *to > length || *from > *to) {
          throw Error(ErrorCode::kSpanOutOfBounds,
                      "sentence " + sentence.id + ": aspect '" + term.term +
                          "' has offsets outside the sentence text");
        }
        term.span = CharSpan{*from, *to};
        sentence.aspects.push_back(std::move(term));
      }
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

std::vector<XmlSentence> ParseSemevalXml(std::string_view text) {
  auto all = ParseSemevalXmlAll(text);
  std::erase_if(all, [](const XmlSentence& s) { return s.aspects.empty(); });
  return all;
}

std::vector<CharSpan> TokenExtents(const DepTree& tree,
                                   std::string_view sentence_text) {
  std::vector<CharSpan> extents;
  extents.reserve(tree.size());
  size_t pos = 0;  // bytes
  int cp = 0;      // code points consumed so far
  for (const Token& token : tree.tokens()) {
    while (pos < sentence_text.size()) {
      const size_t ws = WhitespaceAt(sentence_text, pos);
      if (ws == 0) break;
      pos += ws;
      ++cp;
    }
    if (token.form.empty() ||
        sentence_text.substr(pos, token.form.size()) != token.form) {
      throw Error(ErrorCode::kAlignmentFailure,
                  "token " + std::to_string(token.index) + " '" + token.form +
                      "' not found at offset " + std::to_string(cp));
    }
    const int len = CodePointLength(token.form);
    extents.push_back(CharSpan{cp, cp + len});
    pos += token.form.size();
    cp += len;
  }
  return extents;
}

TokenSpan AlignSpan(const DepTree& tree, std::string_view sentence_text,
                    int from, int to) {
  if (to <= from) {
    throw Error(ErrorCode::kAlignmentFailure,
                "empty character span [" + std::to_string(from) + ", " +
                    std::to_string(to) + ")");
  }
  const auto extents = TokenExtents(tree, sentence_text);
  TokenSpan span{0, 0};
  for (int i = 0; i < static_cast<int>(extents.size()); ++i) {
    if (extents[i].to > from && extents[i].from < to) {
      if (span.begin == 0) span.begin = i + 1;
      span.end = i + 1;
    }
  }
  if (span.begin == 0) {
    throw Error(ErrorCode::kAlignmentFailure,
                "character span [" + std::to_string(from) + ", " +
                    std::to_string(to) + ") covers no token");
  }
  return span;
}

std::vector<ReviewInstance> BuildDataset(std::string_view xml,
                                         std::string_view conllu,
                                         IngestSummary* summary) {
  const auto all = ParseSemevalXmlAll(xml);
  const auto trees = ParseConllu(conllu);

  std::vector<const XmlSentence*> retained;
  for (const auto& s : all) {
    if (!s.aspects.empty()) retained.push_back(&s);
  }

  // Pair trees either with every sentence or with the retained ones.
  std::vector<std::pair<const XmlSentence*, const DepTree*>> pairs;
  if (trees.size() == all.size()) {
    for (size_t i = 0; i < all.size(); ++i) pairs.emplace_back(&all[i], &trees[i]);
  } else if (trees.size() == retained.size()) {
    for (size_t i = 0; i < retained.size(); ++i) {
      pairs.emplace_back(retained[i], &trees[i]);
    }
  } else {
    throw Error(ErrorCode::kCountMismatch,
                "CoNLL-U has " + std::to_string(trees.size()) +
                    " sentences; XML has " + std::to_string(all.size()) +
                    " (" + std::to_string(retained.size()) +
                    " with aspect terms)");
  }

  IngestSummary local;
  local.sentences_read = static_cast<int>(all.size());
  local.sentences_retained = static_cast<int>(retained.size());
  local.sentences_filtered = local.sentences_read - local.sentences_retained;

  std::vector<ReviewInstance> out;
  for (const auto& [sentence, tree] : pairs) {
    if (!tree->sent_id().empty() && tree->sent_id() != sentence->id) {
      throw Error(ErrorCode::kCountMismatch,
                  "sent_id '" + tree->sent_id() +
                      "' does not match XML sentence id '" + sentence->id + "'");
    }
    for (const AspectTerm& term : sentence->aspects) {
      ReviewInstance inst;
      try {
        inst.aspect_span =
            AlignSpan(*tree, sentence->text, term.span.from, term.span.to);
      } catch (const Error& e) {
        throw Error(e.code(), "sentence " + sentence->id + ": " + e.what());
      }
      inst.tree = *tree;
      inst.label = term.polarity;
      inst.sentence_id = sentence->id;
      inst.char_span = term.span;
      ++local.per_class[LabelCode(inst.label)];
      out.push_back(std::move(inst));
    }
  }
  local.instances = static_cast<int>(out.size());
  if (summary != nullptr) *summary = local;
  return out;
}

std::string SerializeDataset(const std::vector<ReviewInstance>& data) {
  std::string out;
  for (const auto& inst : data) {
    nlohmann::json record;
    record["sentence_id"] = inst.sentence_id;
    auto& forms = record["forms"] = nlohmann::json::array();
    auto& heads = record["heads"] = nlohmann::json::array();
    auto& deprels = record["deprels"] = nlohmann::json::array();
    for (const Token& t : inst.tree.tokens()) {
      forms.push_back(t.form);
      heads.push_back(t.head);
      deprels.push_back(t.deprel);
    }
    record["aspect_span"] = {inst.aspect_span.begin, inst.aspect_span.end};
    record["label"] = LabelCode(inst.label);
    record["char_span"] = {inst.char_span.from, inst.char_span.to};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<ReviewInstance> DeserializeDataset(std::string_view text) {
  std::vector<ReviewInstance> out;
  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      const auto forms = record.at("forms").get<std::vector<std::string>>();
      const auto heads = record.at("heads").get<std::vector<int>>();
      const auto deprels = record.at("deprels").get<std::vector<std::string>>();
      if (forms.size() != heads.size() || forms.size() != deprels.size()) {
        throw Error(ErrorCode::kMalformedLine, "field lengths differ");
      }
      std::vector<Token> tokens;
      for (size_t i = 0; i < forms.size(); ++i) {
        tokens.push_back(
            Token{static_cast<int>(i) + 1, forms[i], heads[i], deprels[i]});
      }
      ReviewInstance inst;
      inst.tree = DepTree::FromTokens(std::move(tokens));
      const auto span = record.at("aspect_span").get<std::vector<int>>();
      if (span.size() != 2 || span[0] < 1 || span[0] > span[1] ||
          span[1] > inst.tree.size()) {
        throw Error(ErrorCode::kSpanOutOfBounds, "bad aspect_span");
      }
      inst.aspect_span = TokenSpan{span[0], span[1]};
      inst.label = LabelFromCode(record.at("label").get<int>());
      inst.sentence_id = record.at("sentence_id").get<std::string>();
      if (record.contains("char_span")) {
        const auto cs = record.at("char_span").get<std::vector<int>>();
        if (cs.size() == 2) inst.char_span = CharSpan{cs[0], cs[1]};
      }
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedLine,
                  "dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(),
                  "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace atp
