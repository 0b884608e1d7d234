// tools/cli.cc

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ramdec/am-backend.h"
#include "ramdec/dataset.h"
#include "ramdec/kaldi-archive.h"
#include "ramdec/lattice-decoder.h"
#include "ramdec/mlp.h"
#include "ramdec/scoring.h"
#include "ramdec/toy-task.h"
#include "ramdec/wfst.h"

namespace ramdec {

namespace {

struct MakeEgsOptions {
  std::string feats, ali, out;
  SplicingConfig splice;
  int num_pdfs = 0;
  int shards = 1;
};

struct PriorsOptions {
  std::string ali, out;
  int num_pdfs = 0;
  double floor = 1e-8;
};

struct TrainOptions {
  std::string egs, out, layers, activation = "relu";
  TrainConfig train;
};

struct DecodeOptions {
  std::string graph, words, feats, priors, am = "local", model, out, lattice_out;
  SplicingConfig splice;
  RemoteConfig remote;
  DecodeConfig decode;
  int jobs = 1;
};

struct ScoreOptions {
  std::string ref, hyp;
};

struct GenToyOptions {
  ToySpec spec;
  std::string out;
};

std::ofstream OpenOutput(const std::string &path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot write " + path);
  return os;
}

std::vector<int> ParseLayerDims(const std::string &text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      int d = std::stoi(item, &used);
      if (used != item.size() || d < 1) throw std::invalid_argument(item);
      dims.push_back(d);
    } catch (const std::logic_error &) {
      throw CLI::ValidationError("--layers", "bad layer dimension '" + item + "'");
    }
  }
  if (dims.empty()) throw CLI::ValidationError("--layers", "no layer dimensions given");
  return dims;
}

void RunMakeEgs(const MakeEgsOptions &opt) {
  std::map<std::string, AlignmentVector> alis;
  for (auto &ali : ReadIntVectorArchiveFile(opt.ali)) alis[ali.key] = std::move(ali);

  ShardAssigner assigner(opt.shards);
  std::vector<std::ofstream> feat_out, label_out;
  for (int i = 0; i < opt.shards; ++i) {
    std::string dir = ShardDir(opt.out, i);
    std::filesystem::create_directories(dir);
    feat_out.push_back(OpenOutput(dir + "/feats.ark", true));
    label_out.push_back(OpenOutput(dir + "/labels.ark", true));
  }

  std::ifstream is(opt.feats, std::ios::binary);
  if (!is) throw Error("cannot open " + opt.feats);
  MatrixArchiveReader reader(is);
  FeatureMatrix feats;
  int num_done = 0, num_missing = 0;
  std::int64_t num_frames = 0;
  while (reader.Next(&feats)) {
    auto it = alis.find(feats.key);
    if (it == alis.end()) {
      std::cerr << "make-egs: warning: no alignment for '" << feats.key << "', skipping\n";
      ++num_missing;
      continue;
    }
    ExampleSet egs = BuildExamples(feats, it->second, opt.splice, opt.num_pdfs);
    int shard = assigner.Assign(egs.NumExamples());
    MatrixArchiveWriter(feat_out[shard], ArchiveMode::kBinary)
        .Write(FeatureMatrix{feats.key, std::move(egs.inputs)});
    IntVectorArchiveWriter(label_out[shard], ArchiveMode::kBinary)
        .Write(AlignmentVector{feats.key, std::move(egs.labels)});
    ++num_done;
    num_frames += feats.NumRows();
  }
  for (const auto &w : reader.Warnings()) std::cerr << "make-egs: warning: " << w << '\n';
  for (int i = 0; i < opt.shards; ++i)
    if (!feat_out[i] || !label_out[i]) throw Error("error writing shard " + std::to_string(i));
  std::cerr << "make-egs: " << num_done << " utterances, " << num_frames << " frames in "
            << opt.shards << " shards; " << num_missing << " without alignment\n";
}

void RunPriors(const PriorsOptions &opt) {
  PriorVector priors = ComputePriors(ReadIntVectorArchiveFile(opt.ali), opt.num_pdfs, opt.floor);
  WritePriors(priors, opt.out);
}

void RunTrain(const TrainOptions &opt) {
  std::vector<ExampleSet> shards = ReadShards(opt.egs);
  int input_dim = 0;
  for (const auto &s : shards)
    if (s.NumExamples() > 0) input_dim = s.inputs.NumCols();
  if (input_dim == 0) throw Error("no training examples in " + opt.egs);
  MlpModel model = InitModel(input_dim, ParseLayerDims(opt.layers), opt.train.seed,
                             ActivationFromName(opt.activation));
  TrainResult result = TrainSgd(std::move(model), shards, opt.train);
  for (const auto &r : result.report)
    std::cerr << "train: epoch " << r.epoch << " cross-entropy " << r.mean_cross_entropy
              << " accuracy " << r.frame_accuracy << '\n';
  SaveModel(result.model, opt.out);
}

struct UtteranceOutput {
  std::string key;
  std::string hyp_line;
  std::string lattice_text;
  std::string error;
  bool partial = false;
};

void RunDecode(DecodeOptions opt) {
  if (opt.jobs < 1) throw Error("--jobs must be >= 1");
  const DecodingGraph graph = ReadFstTextFile(opt.graph);
  const SymbolTable words = ReadSymbolTableFile(opt.words);
  const PriorVector priors = ReadPriors(opt.priors);
  const int num_pdfs = priors.NumPdfs();
  auto problems = ValidateGraph(graph, num_pdfs);
  if (!problems.empty()) {
    std::string msg = opt.graph + " is not usable with " + std::to_string(num_pdfs) + " pdfs:";
    for (const auto &p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  opt.decode.Check();

  std::optional<MlpModel> model;
  if (opt.am == "local") {
    if (opt.model.empty()) throw CLI::RequiredError("--model (with --am local)");
    model = LoadModel(opt.model);
    if (model->OutputDim() != num_pdfs)
      throw Error("model has " + std::to_string(model->OutputDim()) + " outputs but " +
                  std::to_string(num_pdfs) + " priors were given");
  } else {
    if (opt.remote.base_url.empty()) {
      const char *env = std::getenv("RAMDEC_URL");
      if (!env || !*env) throw CLI::RequiredError("--url (or RAMDEC_URL, with --am remote)");
      opt.remote.base_url = env;
    }
    opt.remote.num_pdfs = num_pdfs;
    RemoteComputer check(opt.remote);  // validates the configuration up front
  }

  auto decode_one = [&](const FeatureMatrix &feats) {
    UtteranceOutput out;
    out.key = feats.key;
    try {
      FeatureMatrix spliced = Splice(feats, opt.splice);
      std::unique_ptr<AcousticComputer> computer;
      if (model)
        computer = std::make_unique<LocalComputer>(*model);
      else
        computer = std::make_unique<RemoteComputer>(opt.remote);
      LoglikeMatrix loglikes = ComputeLoglikes(computer->Propagate(spliced), priors);
      Lattice lattice = PruneLattice(Decode(graph, loglikes, opt.decode), opt.decode.lattice_beam);
      DecodeResult best = BestPath(lattice);
      out.partial = best.partial;
      out.hyp_line = FormatTranscript(feats.key, best.words, words);
      if (!opt.lattice_out.empty()) out.lattice_text = WriteLatticeText(lattice);
    } catch (const Error &e) {
      out.error = e.what();
    }
    return out;
  };

  std::ifstream is(opt.feats, std::ios::binary);
  if (!is) throw Error("cannot open " + opt.feats);
  std::ofstream hyp_os = OpenOutput(opt.out);
  std::ofstream lat_os;
  if (!opt.lattice_out.empty()) lat_os = OpenOutput(opt.lattice_out);

  MatrixArchiveReader reader(is);
  int num_done = 0, num_failed = 0, num_partial = 0;
  bool more = true;
  while (more) {
    // Up to `jobs` utterances in flight; results are written in input order.
    std::vector<FeatureMatrix> batch;
    FeatureMatrix feats;
    while (static_cast<int>(batch.size()) < opt.jobs && (more = reader.Next(&feats)))
      batch.push_back(std::move(feats));
    std::vector<UtteranceOutput> results(batch.size());
    if (opt.jobs == 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) results[i] = decode_one(batch[i]);
    } else {
      std::vector<std::future<UtteranceOutput>> futures;
      for (const auto &f : batch)
        futures.push_back(std::async(std::launch::async, decode_one, std::cref(f)));
      for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    }
    for (const auto &r : results) {
      if (!r.error.empty()) {
        std::cerr << "decode: error: utterance '" << r.key << "': " << r.error << '\n';
        ++num_failed;
        continue;
      }
      if (r.partial) {
        std::cerr << "decode: warning: no final state reached for '" << r.key
                  << "', using partial hypothesis\n";
        ++num_partial;
      }
      hyp_os << r.hyp_line << '\n';
      if (lat_os.is_open()) lat_os << r.key << '\n' << r.lattice_text << '\n';
      ++num_done;
    }
  }
  for (const auto &w : reader.Warnings()) std::cerr << "decode: warning: " << w << '\n';
  if (!hyp_os) throw Error("error writing " + opt.out);
  std::cerr << "decode: " << num_done << " utterances decoded, " << num_partial
            << " partial, " << num_failed << " failed\n";
  if (num_failed > 0)
    throw Error(std::to_string(num_failed) + " utterance(s) failed to decode");
}

void RunScore(const ScoreOptions &opt) {
  ScoreReport report = ScoreCorpus(ReadTranscriptFile(opt.ref), ReadTranscriptFile(opt.hyp));
  std::cout << report.ToText();
}

void RunGenToy(const GenToyOptions &opt) {
  ToyManifest m = GenerateToyFiles(opt.spec, opt.out);
  std::cerr << "gen-toy: wrote " << m.manifest << '\n';
}

}  // namespace

int RunCommandLine(const std::vector<std::string> &args) {
  CLI::App app{"ramdec: hybrid acoustic-model training and WFST decoding"};
  app.name("ramdec");
  app.require_subcommand(1);

  MakeEgsOptions egs;
  auto *make_egs = app.add_subcommand("make-egs", "Splice features and shard labeled examples");
  make_egs->add_option("--feats", egs.feats, "Feature archive")->required();
  make_egs->add_option("--ali", egs.ali, "Alignment (pdf id) archive")->required();
  make_egs->add_option("--left", egs.splice.left, "Left context frames")->check(CLI::NonNegativeNumber);
  make_egs->add_option("--right", egs.splice.right, "Right context frames")->check(CLI::NonNegativeNumber);
  make_egs->add_option("--num-pdfs", egs.num_pdfs, "Number of pdfs")->required()->check(CLI::PositiveNumber);
  make_egs->add_option("--shards", egs.shards, "Number of shards")->check(CLI::PositiveNumber);
  make_egs->add_option("--out", egs.out, "Output directory")->required();

  PriorsOptions pri;
  auto *priors = app.add_subcommand("priors", "Estimate pdf priors from alignments");
  priors->add_option("--ali", pri.ali, "Alignment archive")->required();
  priors->add_option("--num-pdfs", pri.num_pdfs, "Number of pdfs")->required()->check(CLI::PositiveNumber);
  priors->add_option("--floor", pri.floor, "Minimum prior")->check(CLI::NonNegativeNumber);
  priors->add_option("--out", pri.out, "Output priors file")->required();

  TrainOptions tr;
  auto *train = app.add_subcommand("train", "Train the MLP acoustic model with SGD");
  train->add_option("--egs", tr.egs, "Directory written by make-egs")->required();
  train->add_option("--layers", tr.layers, "Comma-separated layer widths; last = num pdfs")->required();
  train->add_option("--activation", tr.activation, "Hidden activation")
      ->check(CLI::IsMember({"relu", "sigmoid", "tanh"}));
  train->add_option("--epochs", tr.train.epochs, "Epochs")->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.train.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber);
  train->add_option("--batch", tr.train.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
  train->add_option("--seed", tr.train.seed, "Seed for init and shuffling");
  train->add_option("--out", tr.out, "Output model file")->required();

  DecodeOptions dec;
  auto *decode = app.add_subcommand("decode", "Decode feature archives to transcripts");
  decode->add_option("--graph", dec.graph, "Decoding graph (text FST)")->required();
  decode->add_option("--words", dec.words, "Word symbol table")->required();
  decode->add_option("--feats", dec.feats, "Feature archive")->required();
  decode->add_option("--left", dec.splice.left, "Left context frames")->check(CLI::NonNegativeNumber);
  decode->add_option("--right", dec.splice.right, "Right context frames")->check(CLI::NonNegativeNumber);
  decode->add_option("--priors", dec.priors, "Priors file")->required();
  decode->add_option("--am", dec.am, "Acoustic model backend")->check(CLI::IsMember({"local", "remote"}));
  decode->add_option("--model", dec.model, "Model file (local backend)");
  decode->add_option("--url", dec.remote.base_url, "Serving base URL (remote backend)");
  decode->add_option("--model-name", dec.remote.model_name, "Served model name");
  decode->add_option("--chunk-size", dec.remote.chunk_size, "Frames per request")->check(CLI::PositiveNumber);
  decode->add_option("--timeout-ms", dec.remote.timeout_ms, "Request timeout")->check(CLI::PositiveNumber);
  decode->add_option("--max-retries", dec.remote.max_retries, "Retries per request")->check(CLI::NonNegativeNumber);
  decode->add_option("--beam", dec.decode.beam, "Search beam");
  decode->add_option("--max-active", dec.decode.max_active, "Maximum active tokens");
  decode->add_option("--lattice-beam", dec.decode.lattice_beam, "Lattice pruning beam");
  decode->add_option("--acoustic-scale", dec.decode.acoustic_scale, "Acoustic scale");
  decode->add_option("--lattice-out", dec.lattice_out, "Write pruned lattices here");
  decode->add_option("--jobs", dec.jobs, "Utterances decoded in parallel")->check(CLI::PositiveNumber);
  decode->add_option("--out", dec.out, "Hypothesis transcript file")->required();

  ScoreOptions sc;
  auto *score = app.add_subcommand("score", "Word error rate of hypotheses against references");
  score->add_option("--ref", sc.ref, "Reference transcripts")->required();
  score->add_option("--hyp", sc.hyp, "Hypothesis transcripts")->required();

  GenToyOptions toy;
  auto *gen_toy = app.add_subcommand("gen-toy", "Generate a miniature end-to-end task");
  gen_toy->add_option("--seed", toy.spec.seed, "Generator seed");
  gen_toy->add_option("--num-words", toy.spec.num_words, "Vocabulary size");
  gen_toy->add_option("--num-pdfs", toy.spec.num_pdfs, "Number of pdfs");
  gen_toy->add_option("--feature-dim", toy.spec.feature_dim, "Feature dimension");
  gen_toy->add_option("--utterances", toy.spec.utterances, "Number of utterances");
  gen_toy->add_option("--frames-per-word", toy.spec.frames_per_word, "Frames per word");
  gen_toy->add_option("--separation", toy.spec.class_mean_separation, "Distance between class means");
  gen_toy->add_option("--noise", toy.spec.noise_stddev, "Feature noise standard deviation");
  gen_toy->add_option("--out", toy.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    std::cout << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError &e) {
    std::cerr << "ramdec: " << e.what() << "\n";
    CLI::App *sub = nullptr;
    for (auto *s : app.get_subcommands()) sub = s;
    std::cerr << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*make_egs) RunMakeEgs(egs);
    else if (*priors) RunPriors(pri);
    else if (*train) RunTrain(tr);
    else if (*decode) RunDecode(dec);
    else if (*score) RunScore(sc);
    else if (*gen_toy) RunGenToy(toy);
  } catch (const CLI::Error &e) {
    std::cerr << "ramdec " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "ramdec " << name << ": error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitSuccess;
}

}  // namespace ramdec
