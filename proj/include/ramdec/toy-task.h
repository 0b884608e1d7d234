// ramdec/toy-task.h

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

#ifndef RAMDEC_TOY_TASK_H_
#define RAMDEC_TOY_TASK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ramdec/kaldi-archive.h"
#include "ramdec/scoring.h"
#include "ramdec/wfst.h"

namespace ramdec {

/// A miniature recognition task.  Word w owns a contiguous block of pdfs and
/// is modelled as a left-to-right chain of them; each pdf emits Gaussian
/// features around its own mean, the means sitting on a grid whose spacing
/// is class_mean_separation.
struct ToySpec {
  std::uint64_t seed = 1;
  int num_words = 3;
  int num_pdfs = 6;
  int feature_dim = 2;
  int utterances = 20;
  int frames_per_word = 5;
  double class_mean_separation = 4.0;
  double noise_stddev = 0.5;
  int min_words_per_utterance = 2;
  int max_words_per_utterance = 4;

  /// Throws unless every field is positive, num_pdfs >= num_words,
  /// frames_per_word covers the longest pdf chain and the separation is at
  /// least four times the noise.
  void Check() const;
};

struct ToyTask {
  DecodingGraph graph;
  SymbolTable words;
  std::vector<FeatureMatrix> feats;
  std::vector<AlignmentVector> alis;
  TranscriptSet refs;
};

ToyTask GenerateToyTask(const ToySpec &spec);

/// Paths written by WriteToyTask.
struct ToyManifest {
  std::string graph, words, feats, ali, ref, manifest;
};

/// Writes fst.txt, words.txt, feats.ark, ali.ark (binary), ref.txt and
/// manifest.txt into out_dir, creating it if needed.  Output is a pure
/// function of the spec.
ToyManifest GenerateToyFiles(const ToySpec &spec, const std::string &out_dir);

}  // namespace ramdec

#endif  // RAMDEC_TOY_TASK_H_
