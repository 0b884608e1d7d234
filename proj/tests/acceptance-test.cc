// acceptance-test.cc

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

// Acceptance run: one PASS/FAIL line per criterion, each with its runtime
// limit.  Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "ramdec/am-backend.h"
#include "ramdec/dataset.h"
#include "ramdec/kaldi-archive.h"
#include "ramdec/lattice-decoder.h"
#include "ramdec/mlp.h"
#include "ramdec/scoring.h"
#include "test-util.h"
#include "toy-pipeline.h"

namespace ramdec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kDecoderSeed = 4004;
constexpr int kDecoderTrials = 200;

// Collects the first few failure descriptions of a criterion.
class Findings {
 public:
  void Fail(const std::string &what) {
    if (count_++ < 3) text_ += (text_.empty() ? "" : "; ") + what;
  }
  bool Ok() const { return count_ == 0; }
  std::string Text() const {
    return count_ > 3 ? text_ + "; ... " + std::to_string(count_) + " failures" : text_;
  }

 private:
  int count_ = 0;
  std::string text_;
};

// Silences std::cout and std::cerr while the tool runs in process.
class Quiet {
 public:
  Quiet() : out_(std::cout.rdbuf(sink_.rdbuf())), err_(std::cerr.rdbuf(sink_.rdbuf())) {}
  ~Quiet() {
    std::cout.rdbuf(out_);
    std::cerr.rdbuf(err_);
  }
  std::string Text() const { return sink_.str(); }

 private:
  std::ostringstream sink_;
  std::streambuf *out_, *err_;
};

std::string Trial(int i) { return "trial " + std::to_string(i); }

// Archive codec.
void CheckArchiveCodec(Findings *f) {
  RandomGenerator rng(1001);
  std::vector<FeatureMatrix> mats;
  std::vector<AlignmentVector> vecs;
  for (int i = 0; i < 100; ++i) {
    mats.push_back(testing::RandomFeatureMatrix(rng, 30, 20));
    vecs.push_back(testing::RandomAlignment(rng, 40, 2000));
  }
  for (ArchiveMode mode : {ArchiveMode::kBinary, ArchiveMode::kText}) {
    const char *name = mode == ArchiveMode::kBinary ? "binary" : "text";
    std::stringstream ms, vs;
    WriteMatrixArchive(mats, mode, ms);
    WriteIntVectorArchive(vecs, mode, vs);
    auto mats_back = ReadMatrixArchive(ms);
    auto vecs_back = ReadIntVectorArchive(vs);
    if (mats_back.size() != mats.size()) f->Fail(std::string(name) + " matrix count");
    if (vecs_back != vecs) f->Fail(std::string(name) + " int vectors differ");
    for (std::size_t i = 0; i < std::min(mats.size(), mats_back.size()); ++i) {
      const auto &a = mats[i].values.Data(), &b = mats_back[i].values.Data();
      if (mats_back[i].key != mats[i].key || mats_back[i].NumRows() != mats[i].NumRows() ||
          mats_back[i].NumCols() != mats[i].NumCols()) {
        f->Fail(std::string(name) + " key/shape of entry " + std::to_string(i));
        continue;
      }
      for (std::size_t j = 0; j < a.size(); ++j) {
        bool ok = mode == ArchiveMode::kBinary
                      ? std::memcmp(&a[j], &b[j], sizeof(float)) == 0
                      : std::fabs(a[j] - b[j]) <= 1e-6 * std::fabs(a[j]);
        if (!ok) {
          f->Fail(std::string(name) + " value in entry " + std::to_string(i));
          break;
        }
      }
    }
  }
  const std::string dir = RAMDEC_TEST_DATA;
  std::ostringstream golden;
  std::vector<FeatureMatrix> fixture(2);
  fixture[0] = {"utt1", Matrix<float>(1, 2)};
  fixture[0].values.Data() = {1.0f, 2.0f};
  fixture[1] = {"utt2", Matrix<float>(2, 3)};
  fixture[1].values.Data() = {0.5f, -1.25f, 3.0f, 1e-3f, 65504.0f, -0.0f};
  WriteMatrixArchive(fixture, ArchiveMode::kBinary, golden);
  if (golden.str() != testing::ReadFileBytes(dir + "/golden_feats.ark"))
    f->Fail("matrix writer differs from golden fixture");
  std::string hand;
  for (const auto &m : fixture)
    hand += testing::HandEncodeMatrix(m.key, m.NumRows(), m.NumCols(), m.values.Data());
  if (hand != golden.str()) f->Fail("hand encoding differs from writer");
  std::ostringstream ali;
  std::vector<AlignmentVector> ali_fixture = {{"utt1", {3, 0, 7}}, {"utt2", {}}};
  WriteIntVectorArchive(ali_fixture, ArchiveMode::kBinary, ali);
  if (ali.str() != testing::ReadFileBytes(dir + "/golden_ali.ark"))
    f->Fail("int vector writer differs from golden fixture");
}

// Splicing laws.
void CheckSplicing(Findings *f) {
  RandomGenerator rng(1002);
  for (int i = 0; i < 1000; ++i) {
    const int T = i < 100 ? 1 : rng.UniformInt(1, 40);
    const int D = rng.UniformInt(1, 16);
    SplicingConfig cfg{rng.UniformInt(0, 10), rng.UniformInt(0, 10)};
    FeatureMatrix m{"u", Matrix<float>(T, D)};
    for (float &v : m.values.Data()) v = static_cast<float>(rng.Normal());
    FeatureMatrix s = Splice(m, cfg);
    if (s.NumCols() != (cfg.left + cfg.right + 1) * D || s.NumRows() != T) {
      f->Fail(Trial(i) + " dim law");
      continue;
    }
    for (int t = 0; t < T; ++t)
      for (int d = 0; d < D; ++d)
        if (s.values(t, cfg.left * D + d) != m.values(t, d)) f->Fail(Trial(i) + " center slice");
  }
}

// Gradient check.
void CheckGradients(Findings *f) {
  for (Activation a : {Activation::kRelu, Activation::kSigmoid, Activation::kTanh}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      double err = testing::GradientCheckError(a, seed);
      if (!(err < 1e-4))
        f->Fail(std::string(ActivationName(a)) + " seed " + std::to_string(seed) +
                " relative error " + std::to_string(err));
    }
  }
}

std::optional<DecodeResult> TryDecode(const testing::DecoderTrial &t, const DecodeConfig &cfg,
                                      Lattice *lattice = nullptr) {
  try {
    Lattice lat = Decode(t.graph, t.loglikes, cfg);
    DecodeResult r = BestPath(lat);
    if (lattice) *lattice = std::move(lat);
    return r;
  } catch (const Error &) {
    return std::nullopt;
  }
}

// Decoder oracle and beam monotonicity.
void CheckDecoderOracle(Findings *f) {
  RandomGenerator rng(kDecoderSeed);
  for (int i = 0; i < kDecoderTrials; ++i) {
    testing::DecoderTrial t = testing::RandomDecoderTrial(rng);
    auto oracle = testing::BruteForceDecode(t.graph, t.loglikes, t.acoustic_scale);
    auto full = TryDecode(t, testing::UnprunedConfig(t.acoustic_scale));
    if (oracle.best_partial == kInf) {
      if (full) f->Fail(Trial(i) + " decoded a graph with no path");
      continue;
    }
    if (!full) {
      f->Fail(Trial(i) + " unpruned search collapsed");
      continue;
    }
    const double want = oracle.best_complete < kInf ? oracle.best_complete : oracle.best_partial;
    if (full->partial != (oracle.best_complete == kInf) || std::fabs(full->cost - want) > 1e-4)
      f->Fail(Trial(i) + " cost " + std::to_string(full->cost) + " vs oracle " +
              std::to_string(want));

    std::optional<DecodeResult> prev;
    for (double beam : {1.0, 4.0, 16.0, kInf}) {
      DecodeConfig cfg = testing::UnprunedConfig(t.acoustic_scale);
      cfg.beam = beam;
      auto r = TryDecode(t, cfg);
      if (prev && !prev->partial && (!r || r->partial || r->cost > prev->cost + 1e-6))
        f->Fail(Trial(i) + " beam " + std::to_string(beam) + " worse than a narrower beam");
      if (r) prev = r;
    }
  }
}

// Lattice pruning.
void CheckLatticePruning(Findings *f) {
  RandomGenerator rng(kDecoderSeed);
  int checked = 0;
  for (int i = 0; i < kDecoderTrials; ++i) {
    testing::DecoderTrial t = testing::RandomDecoderTrial(rng);
    DecodeConfig cfg = testing::UnprunedConfig(t.acoustic_scale);
    Lattice lat;
    if (!TryDecode(t, cfg, &lat)) continue;
    const DecodeResult best = BestPath(lat);
    for (double beam : {0.1, 1.0, 4.0, DecodeConfig{}.lattice_beam}) {
      Lattice pruned = PruneLattice(lat, beam);
      DecodeResult kept = BestPath(pruned);
      if (std::fabs(kept.cost - best.cost) > 1e-9 || kept.words != best.words)
        f->Fail(Trial(i) + " best path lost at lattice beam " + std::to_string(beam));
      std::vector<double> through(pruned.links.size(), kInf);
      for (const auto &p : testing::EnumerateLatticePaths(pruned))
        for (int l : p.links) through[l] = std::min(through[l], p.cost);
      for (double c : through)
        if (c > best.cost + beam + 1e-5)
          f->Fail(Trial(i) + " link outside lattice beam " + std::to_string(beam));
    }
    ++checked;
  }
  if (checked < kDecoderTrials / 4) f->Fail("too few decodable instances");
}

// End-to-end toy pipeline.
void CheckToyPipeline(Findings *f) {
  testing::TempDir dir("acceptance_toy");
  testing::ToyRun run(dir.Path().string());
  Quiet quiet;
  if (int status = testing::PrepareToyModel(run)) {
    f->Fail("preparation exited " + std::to_string(status) + ": " + quiet.Text());
    return;
  }
  const std::string hyp = run.Path("hyp.txt");
  if (int status = RunCommandLine(testing::LocalDecodeArgs(run, hyp))) {
    f->Fail("decode exited " + std::to_string(status) + ": " + quiet.Text());
    return;
  }
  if (int status = RunCommandLine({"score", "--ref", run.Path("ref.txt"), "--hyp", hyp})) {
    f->Fail("score exited " + std::to_string(status));
    return;
  }
  const std::string report = quiet.Text();
  const auto pos = report.find("%WER ");
  if (pos == std::string::npos) {
    f->Fail("no %WER line");
    return;
  }
  const std::string line = report.substr(pos, report.find('\n', pos) - pos);
  if (line.rfind("%WER 0.00 ", 0) != 0) f->Fail(line);
}

// Remote parity against the protocol test double.
void CheckRemoteParity(Findings *f) {
  testing::TempDir dir("acceptance_remote");
  testing::ToyRun run(dir.Path().string());
  Quiet quiet;
  if (testing::PrepareToyModel(run) != 0) {
    f->Fail("toy preparation failed");
    return;
  }
  MlpModel model = LoadModel(run.Path("model.bin"));
  testing::PredictServer server(model);
  const std::string local = run.Path("hyp_local.txt");
  if (RunCommandLine(testing::LocalDecodeArgs(run, local)) != 0) {
    f->Fail("local decode failed");
    return;
  }
  const std::string local_bytes = testing::ReadFileBytes(local);
  for (int chunk : {1, 2, 64}) {
    const std::string hyp = run.Path("hyp_remote_" + std::to_string(chunk) + ".txt");
    if (RunCommandLine(testing::RemoteDecodeArgs(run, hyp, server.Url(), chunk)) != 0) {
      f->Fail("remote decode failed at chunk " + std::to_string(chunk));
      continue;
    }
    if (testing::ReadFileBytes(hyp) != local_bytes)
      f->Fail("hypotheses differ at chunk " + std::to_string(chunk));
  }
  double worst = 0;
  for (const auto &feats : ReadMatrixArchiveFile(run.Path("feats.ark"))) {
    FeatureMatrix spliced = Splice(feats, {1, 1});
    PosteriorMatrix a = LocalPropagate(model, spliced);
    for (int chunk : {1, 2, 64}) {
      RemoteConfig cfg;
      cfg.base_url = server.Url();
      cfg.chunk_size = chunk;
      PosteriorMatrix b = RemotePropagate(cfg, spliced);
      if (b.NumRows() != a.NumRows() || b.NumCols() != a.NumCols()) {
        f->Fail("posterior shape differs for " + feats.key);
        continue;
      }
      for (std::size_t i = 0; i < a.Data().size(); ++i)
        worst = std::max(worst, double(std::fabs(a.Data()[i] - b.Data()[i])));
    }
  }
  if (worst > 1e-4) f->Fail("posterior difference " + std::to_string(worst));
}

// WER scorer.
void CheckScorer(Findings *f) {
  static const char *kVocab[] = {"a", "b", "c", "d", "e"};
  RandomGenerator rng(1008);
  auto words = [&] {
    WordSequence w(rng.UniformInt(0, 8));
    for (auto &x : w) x = kVocab[rng.UniformInt(0, 4)];
    return w;
  };
  for (int i = 0; i < 500; ++i) {
    WordSequence ref = words(), hyp = words();
    ErrorCounts c = CountErrors(ref, hyp);
    const int want = testing::NaiveLevenshtein(ref, hyp);
    if (c.Errors() != want || c.num_ref != static_cast<std::int64_t>(ref.size()))
      f->Fail(Trial(i) + " distance " + std::to_string(c.Errors()) + " vs " +
              std::to_string(want));
  }
}

struct Criterion {
  const char *name;
  double limit_seconds;
  std::function<void(Findings *)> check;
};

}  // namespace
}  // namespace ramdec

int main() {
  using namespace ramdec;
  const std::vector<Criterion> criteria = {
      {"archive codec roundtrip and golden fixture", 5, CheckArchiveCodec},
      {"splicing laws on 1000 random cases", 5, CheckSplicing},
      {"gradient check relu/sigmoid/tanh at 64-bit", 10, CheckGradients},
      {"decoder oracle and beam monotonicity", 30, CheckDecoderOracle},
      {"lattice pruning keeps best path and beam", 30, CheckLatticePruning},
      {"toy pipeline reaches 0.00% WER", 60, CheckToyPipeline},
      {"remote decode parity with local", 30, CheckRemoteParity},
      {"WER matches naive Levenshtein", 5, CheckScorer},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion &c = criteria[i];
    Findings findings;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.check(&findings);
    } catch (const std::exception &e) {
      findings.Fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= c.limit_seconds)
      findings.Fail("took " + std::to_string(seconds) + " s, limit " +
                    std::to_string(c.limit_seconds) + " s");
    const bool ok = findings.Ok();
    failed += !ok;
    std::printf("AC%zu %s  %s  (%.2f s, limit %.0f s)%s%s\n", i + 1, ok ? "PASS" : "FAIL", c.name,
                seconds, c.limit_seconds, ok ? "" : ": ", ok ? "" : findings.Text().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
