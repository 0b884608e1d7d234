// wfst.cc

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

#include "ramdec/wfst.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ramdec/base.h"

namespace ramdec {

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

class LineParser {
 public:
  explicit LineParser(int line) : line_(line) {}

  int Id(std::string_view field, const char *what) const {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
      Fail(std::string("non-numeric ") + what + " '" + std::string(field) + "'");
    if (value < 0) Fail(std::string("negative ") + what + " " + std::string(field));
    if (value > std::numeric_limits<std::int32_t>::max())
      Fail(std::string(what) + " out of range");
    return static_cast<int>(value);
  }

  float Weight(std::string_view field) const {
    float value = 0.0f;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
      Fail("non-numeric weight '" + std::string(field) + "'");
    if (!std::isfinite(value)) Fail("non-finite weight '" + std::string(field) + "'");
    return value;
  }

  [[noreturn]] void Fail(const std::string &msg) const {
    throw Error("line " + std::to_string(line_) + ": " + msg);
  }

 private:
  int line_;
};

}  // namespace

std::size_t DecodingGraph::NumArcs() const {
  std::size_t n = 0;
  for (const auto &a : arcs_) n += a.size();
  return n;
}

void DecodingGraph::ResizeStates(int num_states) {
  if (num_states > NumStates()) {
    arcs_.resize(num_states);
    finals_.resize(num_states, kInfinity);
  }
}

int DecodingGraph::AddState() {
  ResizeStates(NumStates() + 1);
  return NumStates() - 1;
}

void DecodingGraph::AddArc(int src, const Arc &arc) {
  ResizeStates(std::max(src, arc.nextstate) + 1);
  arcs_[src].push_back(arc);
}

void DecodingGraph::SetFinal(int state, float cost) {
  ResizeStates(state + 1);
  finals_[state] = cost;
}

DecodingGraph ParseFstText(std::string_view text) {
  DecodingGraph graph;
  bool have_start = false;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    LineParser parser(line_number);
    int src = parser.Id(fields[0], "state id");
    if (fields.size() == 4 || fields.size() == 5) {
      Arc arc;
      arc.nextstate = parser.Id(fields[1], "state id");
      arc.ilabel = parser.Id(fields[2], "input label");
      arc.olabel = parser.Id(fields[3], "output label");
      arc.weight = fields.size() == 5 ? parser.Weight(fields[4]) : 0.0f;
      graph.AddArc(src, arc);
    } else if (fields.size() <= 2) {
      graph.SetFinal(src, fields.size() == 2 ? parser.Weight(fields[1]) : 0.0f);
    } else {
      parser.Fail("expected 1, 2, 4 or 5 fields, got " + std::to_string(fields.size()));
    }
    if (!have_start) {
      graph.SetStart(src);
      have_start = true;
    }
  }
  if (!have_start) throw Error("empty FST text");
  return graph;
}

DecodingGraph ReadFstTextFile(const std::string &path) {
  try {
    return ParseFstText(ReadTextFile(path));
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string WriteFstText(const DecodingGraph &graph) {
  const int start = graph.Start();
  if (start < 0 || start >= graph.NumStates()) throw Error("graph has no start state");
  if (graph.Arcs(start).empty() && !graph.IsFinal(start))
    throw Error("start state without arcs or final cost cannot be written");
  std::ostringstream os;
  auto write_arcs = [&](int s) {
    for (const Arc &arc : graph.Arcs(s))
      os << s << ' ' << arc.nextstate << ' ' << arc.ilabel << ' ' << arc.olabel << ' '
         << FormatFloat(arc.weight) << '\n';
  };
  auto write_final = [&](int s) { os << s << ' ' << FormatFloat(graph.Final(s)) << '\n'; };
  bool start_final_written = false;
  if (graph.Arcs(start).empty()) {
    write_final(start);
    start_final_written = true;
  }
  write_arcs(start);
  for (int s = 0; s < graph.NumStates(); ++s)
    if (s != start) write_arcs(s);
  for (int s = 0; s < graph.NumStates(); ++s)
    if (graph.IsFinal(s) && !(s == start && start_final_written)) write_final(s);
  return os.str();
}

std::vector<std::string> ValidateGraph(const DecodingGraph &graph, int num_pdfs) {
  std::vector<std::string> problems;
  if (graph.Start() < 0 || graph.Start() >= graph.NumStates())
    problems.push_back("start state " + std::to_string(graph.Start()) + " is undefined");
  for (int s = 0; s < graph.NumStates(); ++s) {
    for (const Arc &arc : graph.Arcs(s)) {
      std::string where = "arc " + std::to_string(s) + "->" + std::to_string(arc.nextstate);
      if (arc.ilabel < 0 || arc.ilabel > num_pdfs)
        problems.push_back(where + ": input label " + std::to_string(arc.ilabel) +
                           " exceeds " + std::to_string(num_pdfs) + " pdfs");
      if (arc.olabel < 0) problems.push_back(where + ": negative output label");
      if (arc.nextstate < 0 || arc.nextstate >= graph.NumStates())
        problems.push_back(where + ": destination out of range");
      if (!std::isfinite(arc.weight)) problems.push_back(where + ": non-finite weight");
    }
  }
  return problems;
}

void SymbolTable::Add(const std::string &word, int id) {
  if (id < 0) throw Error("negative symbol id for '" + word + "'");
  if (by_word_.count(word)) throw Error("duplicate symbol '" + word + "'");
  if (by_id_.count(id)) throw Error("duplicate symbol id " + std::to_string(id));
  by_word_.emplace(word, id);
  by_id_.emplace(id, word);
}

std::optional<int> SymbolTable::Find(std::string_view word) const {
  auto it = by_word_.find(std::string(word));
  if (it == by_word_.end()) return std::nullopt;
  return it->second;
}

const std::string *SymbolTable::Find(int id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::string SymbolTable::ToText() const {
  std::map<int, std::string> sorted(by_id_.begin(), by_id_.end());
  std::string out;
  for (const auto &[id, word] : sorted) out += word + ' ' + std::to_string(id) + '\n';
  return out;
}

SymbolTable ParseSymbolTable(std::string_view text) {
  SymbolTable table;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    LineParser parser(line_number);
    if (fields.size() != 2) parser.Fail("expected 'word id'");
    int id = parser.Id(fields[1], "symbol id");
    try {
      table.Add(std::string(fields[0]), id);
    } catch (const Error &e) {
      parser.Fail(e.what());
    }
  }
  auto eps = table.Find(SymbolTable::kEpsilon);
  if (!eps || *eps != 0) throw Error("symbol table must map <eps> to 0");
  return table;
}

SymbolTable ReadSymbolTableFile(const std::string &path) {
  try {
    return ParseSymbolTable(ReadTextFile(path));
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ramdec
