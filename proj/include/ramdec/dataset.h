// ramdec/dataset.h

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

#ifndef RAMDEC_DATASET_H_
#define RAMDEC_DATASET_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ramdec/kaldi-archive.h"

namespace ramdec {

/// Number of neighbouring frames appended on each side of the centre frame.
struct SplicingConfig {
  int left = 0;
  int right = 0;
  int Window() const { return left + right + 1; }
};

/// Row t of the result is frames t-left ... t+right concatenated, with
/// indices outside [0, T) clamped to the first/last frame.
FeatureMatrix Splice(const FeatureMatrix &feats, const SplicingConfig &cfg);

/// Spliced inputs and their labels, one row per frame.
struct ExampleSet {
  Matrix<float> inputs;
  std::vector<std::int32_t> labels;

  int NumExamples() const { return inputs.NumRows(); }
};

/// Pairs every spliced frame of `feats` with its pdf label.  Throws if keys
/// or frame counts differ or a label is >= num_pdfs.
ExampleSet BuildExamples(const FeatureMatrix &feats, const AlignmentVector &ali,
                         const SplicingConfig &cfg, int num_pdfs);

/// Whole-utterance shard assignment.
struct ShardPlan {
  int num_shards = 0;
  std::vector<int> assignment;                // utterance index -> shard
  std::vector<std::int64_t> frames_per_shard;
};

// Online form of Shard(): each call places one utterance on the currently
// lightest shard (lowest index on ties).  Lets make-egs stream utterances.
class ShardAssigner {
 public:
  explicit ShardAssigner(int num_shards);
  int Assign(std::int64_t frames);
  const std::vector<std::int64_t> &FramesPerShard() const { return frames_; }

 private:
  std::vector<std::int64_t> frames_;
};

/// Greedy assignment in input order.  More shards than utterances is fine;
/// the surplus shards stay empty.
ShardPlan Shard(const std::vector<std::pair<std::string, std::int64_t>> &utterances,
                int num_shards);

/// Probability of each pdf, estimated from alignment label frequencies.
struct PriorVector {
  std::vector<double> probs;
  int NumPdfs() const { return static_cast<int>(probs.size()); }
};

/// Relative label frequencies, with every probability lifted to at least
/// `floor` and the remaining mass rescaled so the vector still sums to one.
PriorVector ComputePriors(const std::vector<AlignmentVector> &alis, int num_pdfs,
                          double floor = 1e-8);

/// Line 1 holds K, line 2 the K probabilities.
void WritePriors(const PriorVector &priors, const std::string &path);
PriorVector ReadPriors(const std::string &path);

/// Shard directory IO: shard_<i>/feats.ark holds the spliced inputs and
/// shard_<i>/labels.ark the labels, both binary archives keyed by utterance.
std::string ShardDir(const std::string &root, int shard);

/// Reads every shard_<i> below `root`, in shard order.
std::vector<ExampleSet> ReadShards(const std::string &root);

}  // namespace ramdec

#endif  // RAMDEC_DATASET_H_
