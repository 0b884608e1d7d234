// ramdec/wfst.h

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

#ifndef RAMDEC_WFST_H_
#define RAMDEC_WFST_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ramdec {

/// Input label 0 is epsilon; input label k > 0 consumes a frame scored by
/// pdf k-1.  Output label 0 is epsilon, otherwise a word id.  The weight is a
/// tropical cost (negative log probability).
struct Arc {
  std::int32_t ilabel = 0;
  std::int32_t olabel = 0;
  float weight = 0.0f;
  std::int32_t nextstate = 0;

  bool operator==(const Arc &other) const = default;
};

constexpr float kInfinity = std::numeric_limits<float>::infinity();

/// Immutable once built; safe to share between decoding threads.
class DecodingGraph {
 public:
  int NumStates() const { return static_cast<int>(arcs_.size()); }
  int Start() const { return start_; }
  std::span<const Arc> Arcs(int state) const { return arcs_[state]; }
  /// +infinity for non-final states.
  float Final(int state) const { return finals_[state]; }
  bool IsFinal(int state) const { return finals_[state] != kInfinity; }
  std::size_t NumArcs() const;

  /// Grows the state set to at least num_states.
  void ResizeStates(int num_states);
  int AddState();
  void SetStart(int state) { start_ = state; }
  void AddArc(int src, const Arc &arc);
  void SetFinal(int state, float cost);

  bool operator==(const DecodingGraph &other) const = default;

 private:
  int start_ = -1;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<float> finals_;
};

/// Text FST: arc lines "src dst ilabel olabel [weight]" and final lines
/// "state [weight]", missing weights being 0.  The first line's source is
/// the start state.  Throws Error naming the line on bad input.
DecodingGraph ParseFstText(std::string_view text);
DecodingGraph ReadFstTextFile(const std::string &path);

/// Inverse of ParseFstText.  Arcs of the start state come first, so the
/// start survives a round trip; states above the highest referenced id do
/// not.
std::string WriteFstText(const DecodingGraph &graph);

/// Every problem found (empty when the graph is usable with num_pdfs pdfs).
/// Reachability of a final state is not checked.
std::vector<std::string> ValidateGraph(const DecodingGraph &graph, int num_pdfs);

/// Word <-> id bijection; id 0 is <eps>.
class SymbolTable {
 public:
  static constexpr const char *kEpsilon = "<eps>";

  /// Throws on a duplicate word or id.
  void Add(const std::string &word, int id);
  std::optional<int> Find(std::string_view word) const;
  /// nullptr for unknown ids.
  const std::string *Find(int id) const;
  std::size_t Size() const { return by_id_.size(); }
  std::string ToText() const;  // ascending id order

 private:
  std::unordered_map<std::string, int> by_word_;
  std::unordered_map<int, std::string> by_id_;
};

/// Lines "word id"; "<eps> 0" must be present.
SymbolTable ParseSymbolTable(std::string_view text);
SymbolTable ReadSymbolTableFile(const std::string &path);

/// Whole file as a string.
std::string ReadTextFile(const std::string &path);

}  // namespace ramdec

#endif  // RAMDEC_WFST_H_
