// toy-pipeline.cc

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

#include "toy-pipeline.h"

#include "ramdec/scoring.h"
#include "cli.h"

namespace ramdec::testing {

namespace {

// Context and decode settings shared by every toy run.  The toy graph's
// per-frame loop costs are comparable to an acoustic frame, so the acoustic
// scale is raised from its default to let the model separate repeated words.
const std::vector<std::string> kContext = {"--left", "1", "--right", "1"};

std::vector<std::string> Concat(std::vector<std::string> a, const std::vector<std::string> &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> CommonDecodeArgs(const ToyRun &run, const std::string &hyp) {
  return Concat({"decode", "--graph", run.Path("fst.txt"), "--words", run.Path("words.txt"),
                 "--feats", run.Path("feats.ark"), "--priors", run.Path("priors.txt"),
                 "--acoustic-scale", "1.0", "--out", hyp},
                kContext);
}

}  // namespace

int PrepareToyModel(const ToyRun &run, unsigned seed) {
  const std::vector<std::vector<std::string>> steps = {
      {"gen-toy", "--seed", std::to_string(seed), "--out", run.root},
      Concat({"make-egs", "--feats", run.Path("feats.ark"), "--ali", run.Path("ali.ark"),
              "--num-pdfs", "6", "--shards", "2", "--out", run.Path("egs")},
             kContext),
      {"priors", "--ali", run.Path("ali.ark"), "--num-pdfs", "6", "--out", run.Path("priors.txt")},
      {"train", "--egs", run.Path("egs"), "--layers", "32,6", "--epochs", "20", "--lr", "0.1",
       "--batch", "16", "--seed", "1", "--out", run.Path("model.bin")},
  };
  for (const auto &args : steps) {
    int status = RunCommandLine(args);
    if (status != 0) return status;
  }
  return 0;
}

std::vector<std::string> LocalDecodeArgs(const ToyRun &run, const std::string &hyp) {
  return Concat(CommonDecodeArgs(run, hyp), {"--am", "local", "--model", run.Path("model.bin")});
}

std::vector<std::string> RemoteDecodeArgs(const ToyRun &run, const std::string &hyp,
                                          const std::string &url, int chunk_size) {
  return Concat(CommonDecodeArgs(run, hyp),
                {"--am", "remote", "--url", url, "--chunk-size", std::to_string(chunk_size)});
}

double ToyWer(const ToyRun &run, const std::string &hyp) {
  return ScoreCorpus(ReadTranscriptFile(run.Path("ref.txt")), ReadTranscriptFile(hyp))
      .total.WerPercent();
}

}  // namespace ramdec::testing
