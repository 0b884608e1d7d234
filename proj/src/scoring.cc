// scoring.cc

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

#include "ramdec/scoring.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ramdec/base.h"
#include "ramdec/wfst.h"

namespace ramdec {

std::vector<EditOp> AlignWords(const WordSequence &ref, const WordSequence &hyp) {
  const int m = static_cast<int>(ref.size()), n = static_cast<int>(hyp.size());
  std::vector<std::vector<int>> d(m + 1, std::vector<int>(n + 1, 0));
  for (int i = 0; i <= m; ++i) d[i][0] = i;
  for (int j = 0; j <= n; ++j) d[0][j] = j;
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= n; ++j) {
      int diag = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<EditOp> ops;
  int i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      ops.push_back({EditType::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      ops.push_back({EditType::kSubstitution, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back({EditType::kDeletion, i - 1, -1});
      --i;
    } else {
      ops.push_back({EditType::kInsertion, -1, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

void TranscriptSet::Add(const std::string &key, WordSequence words) {
  if (index_.count(key)) throw Error("duplicate transcript key '" + key + "'");
  index_.emplace(key, entries_.size());
  entries_.emplace_back(key, std::move(words));
}

const WordSequence *TranscriptSet::Find(const std::string &key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

TranscriptSet ParseTranscripts(std::string_view text) {
  TranscriptSet set;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    WordSequence words;
    for (std::string w; fields >> w;) words.push_back(std::move(w));
    set.Add(key, std::move(words));
  }
  return set;
}

TranscriptSet ReadTranscriptFile(const std::string &path) {
  try {
    return ParseTranscripts(ReadTextFile(path));
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

double ErrorCounts::WerPercent() const {
  if (num_ref == 0)
    return Errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return 100.0 * static_cast<double>(Errors()) / static_cast<double>(num_ref);
}

ErrorCounts &ErrorCounts::operator+=(const ErrorCounts &o) {
  num_ref += o.num_ref;
  sub += o.sub;
  del += o.del;
  ins += o.ins;
  return *this;
}

ErrorCounts CountErrors(const WordSequence &ref, const WordSequence &hyp) {
  ErrorCounts counts;
  counts.num_ref = static_cast<std::int64_t>(ref.size());
  for (const EditOp &op : AlignWords(ref, hyp)) {
    switch (op.type) {
      case EditType::kMatch: break;
      case EditType::kSubstitution: ++counts.sub; break;
      case EditType::kDeletion: ++counts.del; break;
      case EditType::kInsertion: ++counts.ins; break;
    }
  }
  return counts;
}

ScoreReport ScoreCorpus(const TranscriptSet &refs, const TranscriptSet &hyps) {
  for (const auto &[key, words] : hyps.Entries())
    if (!refs.Find(key))
      throw Error("hypothesis key '" + key + "' has no reference transcript");
  ScoreReport report;
  static const WordSequence kNoWords;
  for (const auto &[key, ref] : refs.Entries()) {
    const WordSequence *hyp = hyps.Find(key);
    ErrorCounts counts = CountErrors(ref, hyp ? *hyp : kNoWords);
    report.total += counts;
    report.utterances.emplace_back(key, counts);
  }
  return report;
}

std::string ScoreReport::SummaryLine() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%%WER %.2f [ %lld / %lld, %lld ins, %lld del, %lld sub ]",
                total.WerPercent(), static_cast<long long>(total.Errors()),
                static_cast<long long>(total.num_ref), static_cast<long long>(total.ins),
                static_cast<long long>(total.del), static_cast<long long>(total.sub));
  return buf;
}

std::string ScoreReport::ToText() const {
  std::size_t width = 3;
  for (const auto &u : utterances) width = std::max(width, u.first.size());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %6s %5s %5s %5s %8s\n", static_cast<int>(width),
                "utt", "N", "S", "D", "I", "WER");
  os << buf;
  for (const auto &[key, c] : utterances) {
    std::snprintf(buf, sizeof(buf), "%-*s %6lld %5lld %5lld %5lld %7.2f%%\n",
                  static_cast<int>(width), key.c_str(), static_cast<long long>(c.num_ref),
                  static_cast<long long>(c.sub), static_cast<long long>(c.del),
                  static_cast<long long>(c.ins), c.WerPercent());
    os << buf;
  }
  os << SummaryLine() << '\n';
  return os.str();
}

}  // namespace ramdec
