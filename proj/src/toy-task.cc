// toy-task.cc

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

#include "ramdec/toy-task.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ramdec/random.h"

namespace ramdec {

namespace {

int FirstPdf(const ToySpec &spec, int word) {
  return static_cast<int>(static_cast<std::int64_t>(word) * spec.num_pdfs / spec.num_words);
}

int NumPdfsOfWord(const ToySpec &spec, int word) {
  return FirstPdf(spec, word + 1) - FirstPdf(spec, word);
}

void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << contents;
  if (!os) throw Error("error writing " + path);
}

}  // namespace

void ToySpec::Check() const {
  if (num_words < 1 || num_pdfs < 1 || feature_dim < 1 || utterances < 1 ||
      frames_per_word < 1 || min_words_per_utterance < 1 ||
      max_words_per_utterance < min_words_per_utterance)
    throw Error("toy task sizes must be positive");
  if (!(class_mean_separation > 0) || !(noise_stddev > 0))
    throw Error("toy task separation and noise must be positive");
  if (num_pdfs < num_words) throw Error("toy task needs at least one pdf per word");
  int longest = (num_pdfs + num_words - 1) / num_words;
  if (frames_per_word < longest)
    throw Error("frames_per_word must be at least " + std::to_string(longest));
  if (class_mean_separation < 4.0 * noise_stddev)
    throw Error("class_mean_separation must be at least 4 x noise_stddev");
}

ToyTask GenerateToyTask(const ToySpec &spec) {
  spec.Check();
  ToyTask task;

  // Graph: state 0 is start and the only final state.
  DecodingGraph &g = task.graph;
  g.AddState();
  g.SetStart(0);
  g.SetFinal(0, 0.0f);
  const float enter_cost = static_cast<float>(std::log(spec.num_words));
  const float step_cost = static_cast<float>(std::log(2.0));
  for (int w = 0; w < spec.num_words; ++w) {
    const int first_pdf = FirstPdf(spec, w);
    const int m = NumPdfsOfWord(spec, w);
    int prev = 0;
    for (int j = 0; j < m; ++j) {
      int s = g.AddState();
      // Entering the chain consumes its first frame; the word label sits on
      // the entry arc.
      g.AddArc(prev, {first_pdf + j + 1, j == 0 ? w + 1 : 0,
                      j == 0 ? enter_cost : step_cost, s});
      g.AddArc(s, {first_pdf + j + 1, 0, step_cost, s});
      prev = s;
    }
    g.AddArc(prev, {0, 0, step_cost, 0});
  }

  task.words.Add(SymbolTable::kEpsilon, 0);
  for (int w = 0; w < spec.num_words; ++w)
    task.words.Add("w" + std::to_string(w + 1), w + 1);

  // Class means on a grid with `side` points per dimension.
  int side = 1;
  while (std::pow(static_cast<double>(side), spec.feature_dim) < spec.num_pdfs) ++side;
  std::vector<std::vector<double>> means(spec.num_pdfs, std::vector<double>(spec.feature_dim));
  for (int k = 0; k < spec.num_pdfs; ++k) {
    int rest = k;
    for (int d = 0; d < spec.feature_dim; ++d) {
      means[k][d] = spec.class_mean_separation * (rest % side);
      rest /= side;
    }
  }

  RandomGenerator rng(spec.seed);
  const int key_width = static_cast<int>(std::to_string(spec.utterances).size());
  for (int u = 0; u < spec.utterances; ++u) {
    char key[32];
    std::snprintf(key, sizeof(key), "toy_%0*d", key_width, u + 1);
    int num_words = rng.UniformInt(spec.min_words_per_utterance, spec.max_words_per_utterance);
    std::vector<int> words(num_words);
    for (int i = 0; i < num_words; ++i)
      words[i] = i == 0 ? u % spec.num_words : rng.UniformInt(0, spec.num_words - 1);

    AlignmentVector ali{key, {}};
    WordSequence text;
    for (int w : words) {
      text.push_back("w" + std::to_string(w + 1));
      const int m = NumPdfsOfWord(spec, w);
      for (int j = 0; j < m; ++j) {
        int frames = spec.frames_per_word / m + (j < spec.frames_per_word % m ? 1 : 0);
        ali.pdf_ids.insert(ali.pdf_ids.end(), frames, FirstPdf(spec, w) + j);
      }
    }
    FeatureMatrix feats{key, Matrix<float>(static_cast<int>(ali.pdf_ids.size()),
                                           spec.feature_dim)};
    for (int t = 0; t < feats.NumRows(); ++t)
      for (int d = 0; d < spec.feature_dim; ++d)
        feats.values(t, d) = static_cast<float>(means[ali.pdf_ids[t]][d] +
                                                spec.noise_stddev * rng.Normal());
    task.refs.Add(key, std::move(text));
    task.feats.push_back(std::move(feats));
    task.alis.push_back(std::move(ali));
  }
  return task;
}

ToyManifest GenerateToyFiles(const ToySpec &spec, const std::string &out_dir) {
  ToyTask task = GenerateToyTask(spec);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const char *name) { return (fs::path(out_dir) / name).string(); };
  ToyManifest m{path("fst.txt"), path("words.txt"), path("feats.ark"),
                path("ali.ark"), path("ref.txt"),   path("manifest.txt")};

  WriteFile(m.graph, WriteFstText(task.graph));
  WriteFile(m.words, task.words.ToText());
  {
    std::ofstream os(m.feats, std::ios::binary);
    WriteMatrixArchive(task.feats, ArchiveMode::kBinary, os);
    if (!os) throw Error("error writing " + m.feats);
  }
  {
    std::ofstream os(m.ali, std::ios::binary);
    WriteIntVectorArchive(task.alis, ArchiveMode::kBinary, os);
    if (!os) throw Error("error writing " + m.ali);
  }
  std::string ref;
  for (const auto &[key, words] : task.refs.Entries()) {
    ref += key;
    for (const auto &w : words) ref += ' ' + w;
    ref += '\n';
  }
  WriteFile(m.ref, ref);

  std::string manifest;
  auto echo = [&](const char *name, const std::string &value) {
    manifest += std::string(name) + ' ' + value + '\n';
  };
  echo("seed", std::to_string(spec.seed));
  echo("num_words", std::to_string(spec.num_words));
  echo("num_pdfs", std::to_string(spec.num_pdfs));
  echo("feature_dim", std::to_string(spec.feature_dim));
  echo("utterances", std::to_string(spec.utterances));
  echo("frames_per_word", std::to_string(spec.frames_per_word));
  echo("class_mean_separation", FormatDouble(spec.class_mean_separation));
  echo("noise_stddev", FormatDouble(spec.noise_stddev));
  echo("graph", "fst.txt");
  echo("words", "words.txt");
  echo("feats", "feats.ark");
  echo("ali", "ali.ark");
  echo("ref", "ref.txt");
  WriteFile(m.manifest, manifest);
  return m;
}

}  // namespace ramdec
