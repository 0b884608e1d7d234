// ramdec/scoring.h

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

#ifndef RAMDEC_SCORING_H_
#define RAMDEC_SCORING_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ramdec {

using WordSequence = std::vector<std::string>;

enum class EditType { kMatch, kSubstitution, kDeletion, kInsertion };

struct EditOp {
  EditType type;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

/// Minimum-edit alignment with unit costs.  The backtrace prefers match,
/// then substitution, deletion, insertion, so the result is deterministic.
std::vector<EditOp> AlignWords(const WordSequence &ref, const WordSequence &hyp);

/// Utterance key -> words, in file order.
class TranscriptSet {
 public:
  /// Throws on a duplicate key.
  void Add(const std::string &key, WordSequence words);
  const WordSequence *Find(const std::string &key) const;
  std::size_t Size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, WordSequence>> &Entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, WordSequence>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One "key w1 w2 ..." line per utterance.
TranscriptSet ParseTranscripts(std::string_view text);
TranscriptSet ReadTranscriptFile(const std::string &path);

struct ErrorCounts {
  std::int64_t num_ref = 0;  // N
  std::int64_t sub = 0;
  std::int64_t del = 0;
  std::int64_t ins = 0;

  std::int64_t Errors() const { return sub + del + ins; }
  /// 100 (S + D + I) / N; may exceed 100.  Zero when N = 0 and there are no
  /// errors, +inf when N = 0 and there are insertions.
  double WerPercent() const;
  ErrorCounts &operator+=(const ErrorCounts &o);
};

ErrorCounts CountErrors(const WordSequence &ref, const WordSequence &hyp);

struct ScoreReport {
  std::vector<std::pair<std::string, ErrorCounts>> utterances;  // reference order
  ErrorCounts total;

  /// Per-utterance table followed by the %WER summary line.
  std::string ToText() const;
  /// "%WER 33.33 [ 1 / 3, 0 ins, 0 del, 1 sub ]"
  std::string SummaryLine() const;
};

/// Scores every reference utterance; one without a hypothesis counts all
/// its words as deletions.  A hypothesis key missing from the references
/// throws Error.
ScoreReport ScoreCorpus(const TranscriptSet &refs, const TranscriptSet &hyps);

}  // namespace ramdec

#endif  // RAMDEC_SCORING_H_
