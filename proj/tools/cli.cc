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

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "atp/checkpoint.h"
#include "atp/config.h"
#include "atp/dep_position.h"
#include "atp/error.h"
#include "atp/heatmap.h"
#include "atp/ingest.h"
#include "atp/model.h"
#include "atp/model_gradcheck.h"
#include "atp/training.h"
#include "json.hpp"

namespace atp {
namespace {

// ATP_LOG_LEVEL: 0 quiet, 1 info (default), 2 debug.
int LogLevel() {
  const char* env = std::getenv("ATP_LOG_LEVEL");
  if (env == nullptr) return 1;
  return std::atoi(env);
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TokenSpan ParseSpan(const std::string& text) {
  const auto colon = text.find(':');
  int begin = 0, end = 0;
  auto parse = [](std::string_view s, int& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  if (colon == std::string::npos ||
      !parse(std::string_view(text).substr(0, colon), begin) ||
      !parse(std::string_view(text).substr(colon + 1), end)) {
    throw UsageError("--span must look like s:e, got '" + text + "'");
  }
  return TokenSpan{begin, end};
}

std::string FormatVector(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

const DepTree& SelectSentence(const std::vector<DepTree>& trees, int sentence) {
  if (sentence < 1 || sentence > static_cast<int>(trees.size())) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "--sentence " + std::to_string(sentence) + " outside [1, " +
                    std::to_string(trees.size()) + "]");
  }
  return trees[sentence - 1];
}

void CheckSpanIn(const DepTree& tree, TokenSpan span) {
  if (span.begin < 1 || span.begin > span.end || span.end > tree.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "span " + std::to_string(span.begin) + ":" + std::to_string(span.end) +
                    " outside sentence of length " + std::to_string(tree.size()));
  }
}

struct Options {
  // ingest
  std::string xml, conllu, out;
  // train / eval / export
  std::string data, config, ckpt, dev, embeddings, log, ids;
  int epochs = 0;
  // predict / distance
  std::string span;
  int sentence = 1;
  int clamp = kDefaultMaxDistance;
  bool offset = false;
  // gradcheck
  std::string dims = "d_e=8,d_h=5,d_p=3,d_w=7,T=6";
  std::uint64_t seed = 1;
  double eps = 1e-5;
  double tol = 1e-4;
};

int CmdIngest(const Options& o, std::ostream& out, std::ostream& err) {
  IngestSummary summary;
  const auto data = BuildDataset(ReadFile(o.xml), ReadFile(o.conllu), &summary);
  WriteFile(o.out, SerializeDataset(data));
  nlohmann::json j;
  j["sentences_read"] = summary.sentences_read;
  j["sentences_filtered"] = summary.sentences_filtered;
  j["sentences_retained"] = summary.sentences_retained;
  j["instances"] = summary.instances;
  for (PolarityLabel label : kAllPolarities) {
    j["per_class"][std::string(PolarityName(label))] = summary.per_class[LabelCode(label)];
  }
  out << j.dump() << "\n";
  if (LogLevel() >= 1) err << "wrote " << data.size() << " instances to " << o.out << "\n";
  return kExitOk;
}

int CmdTrain(const Options& o, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  if (!o.config.empty()) config = ParseConfig(ReadFile(o.config));
  if (o.epochs > 0) config.epochs = o.epochs;
  const auto train = DeserializeDataset(ReadFile(o.data));
  std::vector<ReviewInstance> dev;
  if (!o.dev.empty()) dev = DeserializeDataset(ReadFile(o.dev));

  std::ofstream log_file;
  if (!o.log.empty()) {
    log_file.open(o.log);
    if (!log_file) throw Error(ErrorCode::kIo, "cannot write " + o.log);
  }
  TrainOptions options;
  if (!o.embeddings.empty()) options.embeddings_text = ReadFile(o.embeddings);
  options.on_epoch = [&](const EpochReport& report) {
    const std::string line = ToJsonLine(report);
    out << line << "\n" << std::flush;
    if (log_file) log_file << line << "\n" << std::flush;
  };
  const TrainResult result =
      Train(config, train, o.dev.empty() ? nullptr : &dev, options);
  SaveCheckpoint(o.out, result.params, result.config);
  if (LogLevel() >= 1) {
    err << "saved checkpoint from epoch " << result.best_epoch << " to " << o.out << "\n";
  }
  return kExitOk;
}

int CmdEval(const Options& o, std::ostream& out, std::ostream&) {
  const Checkpoint ckpt = LoadCheckpoint(o.ckpt);
  const auto data = DeserializeDataset(ReadFile(o.data));
  const EvalResult result = Evaluate(ckpt.params, data, ckpt.config.position_mode);
  out << ToJson(result) << "\n";
  return kExitOk;
}

int CmdPredict(const Options& o, std::ostream& out, std::ostream&) {
  const Checkpoint ckpt = LoadCheckpoint(o.ckpt);
  const auto trees = ParseConllu(ReadFile(o.conllu));
  ReviewInstance inst;
  inst.tree = SelectSentence(trees, o.sentence);
  inst.aspect_span = ParseSpan(o.span);
  CheckSpanIn(inst.tree, inst.aspect_span);
  inst.sentence_id = inst.tree.sent_id();
  const auto pv = ComputePositions(inst, ckpt.config.position_mode,
                                   ckpt.config.max_distance);
  const Prediction p = Predict(ckpt.params, inst, pv);
  nlohmann::json j;
  j["label"] = PolarityName(p.label);
  j["probabilities"] = p.probabilities;
  auto& tokens = j["attention"] = nlohmann::json::array();
  for (int k = 1; k <= inst.tree.size(); ++k) {
    tokens.push_back({{"token", inst.tree.token(k).form}, {"alpha", p.alpha[k - 1]}});
  }
  out << j.dump() << "\n";
  return kExitOk;
}

int CmdAttnExport(const Options& o, std::ostream& out, std::ostream& err) {
  const Checkpoint ckpt = LoadCheckpoint(o.ckpt);
  const auto data = DeserializeDataset(ReadFile(o.data));
  std::set<std::string> wanted;
  std::stringstream ids(o.ids);
  for (std::string id; std::getline(ids, id, ',');) {
    if (!id.empty()) wanted.insert(id);
  }
  std::filesystem::create_directories(o.out);
  int written = 0;
  for (const auto& inst : data) {
    if (!wanted.empty() && !wanted.contains(inst.sentence_id)) continue;
    const auto pv = ComputePositions(inst, ckpt.config.position_mode,
                                     ckpt.config.max_distance);
    const HeatmapDoc doc = MakeHeatmapDoc(inst, Predict(ckpt.params, inst, pv));
    const auto path = std::filesystem::path(o.out) / HeatmapFileName(doc);
    WriteFile(path.string(), RenderHeatmapHtml(doc));
    out << path.string() << "\n";
    ++written;
  }
  if (LogLevel() >= 1) err << "wrote " << written << " heatmaps\n";
  return kExitOk;
}

int CmdGradCheck(const Options& o, std::ostream& out, std::ostream& err) {
  const GradCheckDims dims = ParseGradCheckDims(o.dims);
  const GradCheckReport report = RunModelGradCheck(dims, o.seed, o.eps, o.tol);
  for (const auto& block : report.blocks) {
    out << (block.passed() ? "PASS " : "FAIL ") << block.name
        << " entries=" << block.entries << " failures=" << block.failures
        << " max_rel_err=" << block.max_error << "\n";
  }
  if (!report.passed()) {
    err << "error code=" << ErrorCodeName(ErrorCode::kGradCheckFailed)
        << " message=gradient check failed\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int CmdDistance(const Options& o, std::ostream& out, std::ostream&) {
  const auto trees = ParseConllu(ReadFile(o.conllu));
  const DepTree& tree = SelectSentence(trees, o.sentence);
  const TokenSpan span = ParseSpan(o.span);
  const PositionVector pv = o.offset ? WordOffsetVector(tree.size(), span, o.clamp)
                                     : TreePositionVector(tree, span, o.clamp);
  out << FormatVector(pv.dists) << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aspect-term sentiment classification with dependency-distance attention"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Align SemEval XML with CoNLL-U parses");
  ingest->add_option("--xml", o.xml, "SemEval-2014 Task 4 XML file")->required();
  ingest->add_option("--conllu", o.conllu, "CoNLL-U parses of the XML sentences")->required();
  ingest->add_option("--out", o.out, "Output dataset (JSON lines)")->required();

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--data", o.data, "Training dataset")->required();
  train->add_option("--config", o.config, "key = value config file");
  train->add_option("--out", o.out, "Checkpoint to write")->required();
  train->add_option("--dev", o.dev, "Dev dataset (default: held-out split)");
  train->add_option("--embeddings", o.embeddings, "Text word vectors");
  train->add_option("--log", o.log, "Also write epoch reports here");
  train->add_option("--epochs", o.epochs, "Override the configured epoch count");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--data", o.data, "Dataset")->required();
  eval->add_option("--ckpt", o.ckpt, "Checkpoint")->required();

  auto* predict = app.add_subcommand("predict", "Classify one aspect of a parsed sentence");
  predict->add_option("--ckpt", o.ckpt, "Checkpoint")->required();
  predict->add_option("--conllu", o.conllu, "CoNLL-U file")->required();
  predict->add_option("--span", o.span, "Aspect token span s:e (1-based)")->required();
  predict->add_option("--sentence", o.sentence, "1-based sentence in the file");

  auto* attn = app.add_subcommand("attn-export", "Write attention heatmaps");
  attn->add_option("--ckpt", o.ckpt, "Checkpoint")->required();
  attn->add_option("--data", o.data, "Dataset")->required();
  attn->add_option("--ids", o.ids, "Comma-separated sentence ids (default: all)");
  attn->add_option("--out", o.out, "Output directory")->required();

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of backprop");
  grad->add_option("--dims", o.dims, "e.g. d_e=8,d_h=5,d_p=3,d_w=7,T=6");
  grad->add_option("--seed", o.seed, "Random seed");
  grad->add_option("--eps", o.eps, "Central difference step");
  grad->add_option("--tol", o.tol, "Relative error tolerance");

  auto* dist = app.add_subcommand("distance", "Print a position vector");
  dist->add_option("--conllu", o.conllu, "CoNLL-U file")->required();
  dist->add_option("--span", o.span, "Aspect token span s:e (1-based)")->required();
  dist->add_option("--sentence", o.sentence, "1-based sentence in the file");
  dist->add_option("--clamp", o.clamp, "Maximum distance");
  dist->add_flag("--offset", o.offset, "Word-offset distances instead of tree paths");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error code=Usage message=" << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*ingest) return CmdIngest(o, out, err);
    if (*train) return CmdTrain(o, out, err);
    if (*eval) return CmdEval(o, out, err);
    if (*predict) return CmdPredict(o, out, err);
    if (*attn) return CmdAttnExport(o, out, err);
    if (*grad) return CmdGradCheck(o, out, err);
    if (*dist) return CmdDistance(o, out, err);
  } catch (const UsageError& e) {
    err << "error code=Usage message=" << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error code=" << ErrorCodeName(e.code()) << " message=" << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error code=" << ErrorCodeName(ErrorCode::kIo) << " message=" << e.what()
        << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace atp
