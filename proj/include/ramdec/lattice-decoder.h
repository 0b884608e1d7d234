// ramdec/lattice-decoder.h

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

#ifndef RAMDEC_LATTICE_DECODER_H_
#define RAMDEC_LATTICE_DECODER_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ramdec/am-backend.h"
#include "ramdec/wfst.h"

namespace ramdec {

struct DecodeConfig {
  double beam = 16.0;
  int max_active = 7000;
  double lattice_beam = 8.0;
  double acoustic_scale = 0.1;

  /// Throws unless beam, lattice_beam and acoustic_scale are positive and
  /// max_active >= 1.
  void Check() const;
};

struct LatticeNode {
  int frame = 0;    // number of frames consumed when the token was alive
  int state = 0;    // graph state
  double cost = 0;  // best forward cost found by the search
};

struct LatticeLink {
  int from = 0;
  int to = 0;
  std::int32_t olabel = 0;
  double graph_cost = 0;
  double acoustic_cost = 0;

  double Cost() const { return graph_cost + acoustic_cost; }
};

/// Surviving search tokens and the links between them.  Nodes are stored in
/// topological order with the start at index 0, every link goes from a
/// lower to a higher node index, and links are sorted by source node.
struct Lattice {
  std::vector<LatticeNode> nodes;
  std::vector<LatticeLink> links;
  std::vector<double> final_costs;  // per node; +inf unless final in the graph
  int num_frames = 0;
  bool reached_final = false;       // some last-frame node is final

  bool Empty() const { return nodes.empty(); }

  /// Cost of ending at `node`.  Only last-frame nodes can end a path.  When
  /// no final state survived every last-frame node ends at cost 0.
  double EndCost(int node) const;
};

struct DecodeResult {
  std::vector<std::int32_t> words;  // epsilons removed
  double cost = 0;                  // graph + acoustic + final
  double graph_cost = 0;            // includes the final cost
  double acoustic_cost = 0;
  bool partial = false;             // no final state survived
};

/// Frame-synchronous token passing.  Each frame: extend every surviving
/// token along arcs with ilabel > 0 (cost += weight - acoustic_scale *
/// loglike), keep the cheapest token per state, close over epsilon input
/// arcs, then prune to best + beam and at most max_active tokens (cheapest
/// first, lower state id on ties).  All links into surviving tokens are
/// kept, so the result is a lattice, not just a traceback.
class LatticeDecoder {
 public:
  LatticeDecoder(const DecodingGraph &graph, const DecodeConfig &config);

  /// Throws Error on beam collapse or an improving epsilon cycle.
  Lattice Decode(const LoglikeMatrix &loglikes);

 private:
  struct Token {
    int state;
    double cost;
    int eps_parent;      // local token that gave the best cost, -1 if none
    int eps_parent_arc;  // index of that arc in the parent's arc list
    int depth;           // epsilon steps from a token entered by a frame
    bool changed;
  };
  struct PendingLink {
    int from;            // global node id (emitting) or local token (epsilon)
    int to;              // local token
    std::int32_t olabel;
    double graph_cost;
    double acoustic_cost;
    bool epsilon;
  };

  int FindOrAddToken(int state);
  void ProcessEmitting(const LoglikeMatrix &loglikes, int frame);
  void ProcessNonemitting(int frame);
  void PruneAndCommit(int frame);

  const DecodingGraph &graph_;
  DecodeConfig config_;

  Lattice lattice_;
  std::vector<int> prev_nodes_;   // global ids of the previous frame's nodes
  std::vector<Token> toks_;       // tokens of the frame being built
  std::vector<int> state_to_tok_;
  std::vector<PendingLink> pending_;
};

/// Convenience wrapper around LatticeDecoder.
Lattice Decode(const DecodingGraph &graph, const LoglikeMatrix &loglikes,
               const DecodeConfig &config);

/// Cheapest start-to-end path.  Throws on an empty lattice or when no end
/// node is reachable.
DecodeResult BestPath(const Lattice &lattice);

/// Drops every link whose best complete path costs more than the best path
/// plus lattice_beam, and every node left without such a path; renumbers the
/// remaining nodes densely in their original (topological) order.
Lattice PruneLattice(const Lattice &lattice, double lattice_beam);

/// One "from to olabel graph_cost acoustic_cost" line per link, then
/// "node end_cost" for every node that can end a path.
std::string WriteLatticeText(const Lattice &lattice);

/// "key word1 word2 ...".  Throws on a word id missing from the table.
std::string FormatTranscript(const std::string &key,
                             const std::vector<std::int32_t> &words,
                             const SymbolTable &table);

}  // namespace ramdec

#endif  // RAMDEC_LATTICE_DECODER_H_
