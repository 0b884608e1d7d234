// dataset.cc

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

#include "ramdec/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ramdec {

FeatureMatrix Splice(const FeatureMatrix &feats, const SplicingConfig &cfg) {
  if (cfg.left < 0 || cfg.right < 0)
    throw Error("splicing context must be non-negative");
  const int num_frames = feats.NumRows(), dim = feats.NumCols();
  const int window = cfg.Window();
  FeatureMatrix out{feats.key, Matrix<float>(num_frames, window * dim)};
  for (int t = 0; t < num_frames; ++t) {
    auto dst = out.values.Row(t);
    for (int w = 0; w < window; ++w) {
      int src = std::clamp(t - cfg.left + w, 0, num_frames - 1);
      auto row = feats.values.Row(src);
      std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::size_t>(w) * dim);
    }
  }
  return out;
}

ExampleSet BuildExamples(const FeatureMatrix &feats, const AlignmentVector &ali,
                         const SplicingConfig &cfg, int num_pdfs) {
  if (feats.key != ali.key)
    throw Error("feature key '" + feats.key + "' does not match alignment key '" +
                ali.key + "'");
  if (static_cast<std::size_t>(feats.NumRows()) != ali.pdf_ids.size())
    throw Error("frame count mismatch for '" + feats.key + "': " +
                std::to_string(feats.NumRows()) + " feature frames vs " +
                std::to_string(ali.pdf_ids.size()) + " alignment frames");
  for (std::int32_t label : ali.pdf_ids)
    if (label < 0 || label >= num_pdfs)
      throw Error("label " + std::to_string(label) + " of '" + feats.key +
                  "' is out of range for " + std::to_string(num_pdfs) + " pdfs");
  return ExampleSet{Splice(feats, cfg).values, ali.pdf_ids};
}

ShardAssigner::ShardAssigner(int num_shards) {
  if (num_shards < 1) throw Error("number of shards must be >= 1");
  frames_.assign(num_shards, 0);
}

int ShardAssigner::Assign(std::int64_t frames) {
  // min_element returns the first minimum, i.e. the lowest index on ties.
  auto it = std::min_element(frames_.begin(), frames_.end());
  *it += frames;
  return static_cast<int>(it - frames_.begin());
}

ShardPlan Shard(const std::vector<std::pair<std::string, std::int64_t>> &utterances,
                int num_shards) {
  ShardAssigner assigner(num_shards);
  ShardPlan plan;
  plan.num_shards = num_shards;
  plan.assignment.reserve(utterances.size());
  for (const auto &utt : utterances) plan.assignment.push_back(assigner.Assign(utt.second));
  plan.frames_per_shard = assigner.FramesPerShard();
  return plan;
}

PriorVector ComputePriors(const std::vector<AlignmentVector> &alis, int num_pdfs,
                          double floor) {
  if (num_pdfs < 1) throw Error("number of pdfs must be >= 1");
  if (floor < 0.0) throw Error("prior floor must be non-negative");
  if (floor * num_pdfs > 1.0)
    throw Error("prior floor " + FormatDouble(floor) + " is too large for " +
                std::to_string(num_pdfs) + " pdfs");
  std::vector<std::int64_t> counts(num_pdfs, 0);
  std::int64_t total = 0;
  for (const auto &ali : alis) {
    for (std::int32_t label : ali.pdf_ids) {
      if (label < 0 || label >= num_pdfs)
        throw Error("label " + std::to_string(label) + " of '" + ali.key +
                    "' is out of range for " + std::to_string(num_pdfs) + " pdfs");
      ++counts[label];
      ++total;
    }
  }
  if (total == 0) throw Error("cannot estimate priors from zero frames");

  PriorVector priors;
  priors.probs.resize(num_pdfs);
  for (int k = 0; k < num_pdfs; ++k)
    priors.probs[k] = static_cast<double>(counts[k]) / static_cast<double>(total);

  // Pin entries below the floor to it and rescale the rest; rescaling can
  // push further entries below the floor, so repeat until stable.
  std::vector<bool> pinned(num_pdfs, false);
  while (true) {
    int num_pinned = 0;
    double free_mass = 0.0;
    for (int k = 0; k < num_pdfs; ++k) {
      if (!pinned[k] && priors.probs[k] < floor) pinned[k] = true;
      if (pinned[k])
        ++num_pinned;
      else
        free_mass += priors.probs[k];
    }
    double target = 1.0 - num_pinned * floor;
    bool changed = false;
    for (int k = 0; k < num_pdfs; ++k) {
      if (pinned[k]) {
        priors.probs[k] = floor;
      } else {
        priors.probs[k] *= target / free_mass;
        if (priors.probs[k] < floor) changed = true;
      }
    }
    if (!changed) break;
  }
  return priors;
}

void WritePriors(const PriorVector &priors, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << priors.NumPdfs() << '\n';
  for (int k = 0; k < priors.NumPdfs(); ++k)
    os << (k ? " " : "") << FormatDouble(priors.probs[k]);
  os << '\n';
  if (!os) throw Error("error writing " + path);
}

PriorVector ReadPriors(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  int num_pdfs = 0;
  if (!(is >> num_pdfs) || num_pdfs < 1) throw Error("bad pdf count in " + path);
  PriorVector priors;
  priors.probs.resize(num_pdfs);
  double sum = 0.0;
  for (int k = 0; k < num_pdfs; ++k) {
    if (!(is >> priors.probs[k]))
      throw Error("expected " + std::to_string(num_pdfs) + " priors in " + path);
    if (!(priors.probs[k] > 0.0) || !std::isfinite(priors.probs[k]))
      throw Error("prior " + std::to_string(k) + " in " + path + " is not positive");
    sum += priors.probs[k];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw Error("priors in " + path + " sum to " + FormatDouble(sum));
  std::string extra;
  if (is >> extra) throw Error("trailing data in " + path);
  return priors;
}

std::string ShardDir(const std::string &root, int shard) {
  return (std::filesystem::path(root) / ("shard_" + std::to_string(shard))).string();
}

std::vector<ExampleSet> ReadShards(const std::string &root) {
  std::vector<ExampleSet> shards;
  for (int i = 0;; ++i) {
    std::filesystem::path dir = ShardDir(root, i);
    if (!std::filesystem::is_directory(dir)) break;
    auto feats = ReadMatrixArchiveFile((dir / "feats.ark").string());
    auto labels = ReadIntVectorArchiveFile((dir / "labels.ark").string());
    if (feats.size() != labels.size())
      throw Error(dir.string() + ": " + std::to_string(feats.size()) +
                  " feature entries vs " + std::to_string(labels.size()) +
                  " label entries");
    ExampleSet set;
    int dim = feats.empty() ? 0 : feats.front().NumCols();
    std::int64_t rows = 0;
    for (std::size_t u = 0; u < feats.size(); ++u) {
      if (feats[u].key != labels[u].key)
        throw Error(dir.string() + ": key '" + feats[u].key + "' paired with '" +
                    labels[u].key + "'");
      if (feats[u].NumCols() != dim)
        throw Error(dir.string() + ": inconsistent input dimension for '" +
                    feats[u].key + "'");
      if (static_cast<std::size_t>(feats[u].NumRows()) != labels[u].pdf_ids.size())
        throw Error(dir.string() + ": frame count mismatch for '" + feats[u].key + "'");
      rows += feats[u].NumRows();
    }
    set.inputs = Matrix<float>(static_cast<int>(rows), dim);
    int row = 0;
    for (std::size_t u = 0; u < feats.size(); ++u) {
      std::copy(feats[u].values.Data().begin(), feats[u].values.Data().end(),
                set.inputs.Data().begin() + static_cast<std::ptrdiff_t>(row) * dim);
      row += feats[u].NumRows();
      set.labels.insert(set.labels.end(), labels[u].pdf_ids.begin(),
                        labels[u].pdf_ids.end());
    }
    shards.push_back(std::move(set));
  }
  if (shards.empty()) throw Error("no shard_0 directory below " + root);
  return shards;
}

}  // namespace ramdec
