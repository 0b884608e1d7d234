// lattice-decoder.cc

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

#include "ramdec/lattice-decoder.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace ramdec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Epsilon relaxation ignores improvements smaller than this.
constexpr double kRelaxDelta = 1e-6;
// Absolute slack for lattice pruning comparisons.
constexpr double kPruneSlack = 1e-6;

std::string FormatCost(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void SortLinksBySource(std::vector<LatticeLink> *links) {
  std::stable_sort(links->begin(), links->end(),
                   [](const LatticeLink &a, const LatticeLink &b) { return a.from < b.from; });
}

}  // namespace

void DecodeConfig::Check() const {
  if (!(beam > 0)) throw Error("beam must be positive");
  if (!(lattice_beam > 0)) throw Error("lattice beam must be positive");
  if (max_active < 1) throw Error("max-active must be >= 1");
  if (!(acoustic_scale > 0) || !std::isfinite(acoustic_scale))
    throw Error("acoustic scale must be positive and finite");
}

double Lattice::EndCost(int node) const {
  if (nodes[node].frame != num_frames) return kInf;
  return reached_final ? final_costs[node] : 0.0;
}

LatticeDecoder::LatticeDecoder(const DecodingGraph &graph, const DecodeConfig &config)
    : graph_(graph), config_(config) {
  config_.Check();
  if (graph_.Start() < 0 || graph_.Start() >= graph_.NumStates())
    throw Error("decoding graph has no start state");
}

int LatticeDecoder::FindOrAddToken(int state) {
  int &index = state_to_tok_[state];
  if (index < 0) {
    index = static_cast<int>(toks_.size());
    toks_.push_back({state, kInf, -1, -1, 0, false});
  }
  return index;
}

Lattice LatticeDecoder::Decode(const LoglikeMatrix &loglikes) {
  lattice_ = Lattice();
  lattice_.num_frames = loglikes.NumRows();
  prev_nodes_.clear();
  toks_.clear();
  pending_.clear();
  state_to_tok_.assign(graph_.NumStates(), -1);

  int start = FindOrAddToken(graph_.Start());
  toks_[start].cost = 0.0;
  toks_[start].changed = true;
  ProcessNonemitting(0);
  PruneAndCommit(0);
  for (int t = 0; t < loglikes.NumRows(); ++t) {
    ProcessEmitting(loglikes, t);
    ProcessNonemitting(t + 1);
    PruneAndCommit(t + 1);
  }

  lattice_.final_costs.assign(lattice_.nodes.size(), kInf);
  for (int id : prev_nodes_) {
    float final_cost = graph_.Final(lattice_.nodes[id].state);
    if (final_cost != kInfinity) {
      lattice_.final_costs[id] = final_cost;
      lattice_.reached_final = true;
    }
  }
  SortLinksBySource(&lattice_.links);
  return std::move(lattice_);
}

void LatticeDecoder::ProcessEmitting(const LoglikeMatrix &loglikes, int frame) {
  const int num_pdfs = loglikes.NumCols();
  auto ll = loglikes.Row(frame);
  for (int id : prev_nodes_) {
    const LatticeNode &node = lattice_.nodes[id];
    for (const Arc &arc : graph_.Arcs(node.state)) {
      if (arc.ilabel == 0) continue;
      if (arc.ilabel > num_pdfs)
        throw Error("arc input label " + std::to_string(arc.ilabel) + " exceeds the " +
                    std::to_string(num_pdfs) + " acoustic scores");
      const double acoustic = -config_.acoustic_scale * ll[arc.ilabel - 1];
      const double cost = node.cost + arc.weight + acoustic;
      int to = FindOrAddToken(arc.nextstate);
      pending_.push_back({id, to, arc.olabel, arc.weight, acoustic, false});
      Token &tok = toks_[to];
      if (cost < tok.cost) {
        tok.cost = cost;
        tok.changed = true;
      }
    }
  }
  if (toks_.empty())
    throw Error("no active tokens after frame " + std::to_string(frame) +
                " (no arc can consume it)");
}

void LatticeDecoder::ProcessNonemitting(int frame) {
  // Bellman-Ford over epsilon arcs, relaxing only tokens that changed.
  // Without an improving cycle everything settles within NumStates() - 1
  // improving passes.
  const int max_passes = std::max(1, graph_.NumStates());
  for (int pass = 1;; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (!toks_[i].changed) continue;
      toks_[i].changed = false;
      auto arcs = graph_.Arcs(toks_[i].state);
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        const Arc &arc = arcs[a];
        if (arc.ilabel != 0) continue;
        const double cost = toks_[i].cost + arc.weight;
        int to = FindOrAddToken(arc.nextstate);
        Token &dst = toks_[to];
        if (cost < dst.cost - kRelaxDelta) {
          dst.cost = cost;
          dst.eps_parent = static_cast<int>(i);
          dst.eps_parent_arc = static_cast<int>(a);
          dst.changed = true;
          improved = true;
        }
      }
    }
    if (!improved) break;
    if (pass >= max_passes)
      throw Error("improving epsilon cycle at frame " + std::to_string(frame));
  }

  // Depth in the tree of best epsilon predecessors.
  const int n = static_cast<int>(toks_.size());
  std::vector<int> depth(n, -1);
  std::vector<int> chain;
  for (int i = 0; i < n; ++i) {
    int j = i;
    chain.clear();
    while (depth[j] < 0 && toks_[j].eps_parent >= 0) {
      chain.push_back(j);
      if (static_cast<int>(chain.size()) > n)
        throw Error("improving epsilon cycle at frame " + std::to_string(frame));
      j = toks_[j].eps_parent;
    }
    if (depth[j] < 0) depth[j] = 0;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      depth[*it] = depth[toks_[*it].eps_parent] + 1;
  }
  for (int i = 0; i < n; ++i) toks_[i].depth = depth[i];

  // Epsilon links: the best-predecessor tree plus any other epsilon arc that
  // goes to a deeper token.  Both kinds increase depth, so no cycles.
  for (int i = 0; i < n; ++i) {
    auto arcs = graph_.Arcs(toks_[i].state);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const Arc &arc = arcs[a];
      if (arc.ilabel != 0) continue;
      int to = state_to_tok_[arc.nextstate];
      const Token &dst = toks_[to];
      bool tree = dst.eps_parent == i && dst.eps_parent_arc == static_cast<int>(a);
      if (tree || toks_[i].depth < dst.depth)
        pending_.push_back({i, to, arc.olabel, arc.weight, 0.0, true});
    }
  }
}

void LatticeDecoder::PruneAndCommit(int frame) {
  const int n = static_cast<int>(toks_.size());
  double best = kInf;
  for (const Token &tok : toks_) best = std::min(best, tok.cost);
  const double cutoff = best + config_.beam;

  std::vector<int> survivors;
  for (int i = 0; i < n; ++i)
    if (toks_[i].cost <= cutoff) survivors.push_back(i);
  if (static_cast<int>(survivors.size()) > config_.max_active) {
    std::sort(survivors.begin(), survivors.end(), [&](int a, int b) {
      if (toks_[a].cost != toks_[b].cost) return toks_[a].cost < toks_[b].cost;
      return toks_[a].state < toks_[b].state;
    });
    survivors.resize(config_.max_active);
  }
  std::vector<char> keep(n, 0);
  for (int i : survivors) keep[i] = 1;
  // A survivor's epsilon ancestors stay too, so its best path stays intact.
  for (int i : survivors)
    for (int j = toks_[i].eps_parent; j >= 0 && !keep[j]; j = toks_[j].eps_parent)
      keep[j] = 1;
  if (survivors.empty())
    throw Error("beam collapse: no active tokens at frame " + std::to_string(frame));

  std::vector<int> order;
  for (int i = 0; i < n; ++i)
    if (keep[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return toks_[a].depth < toks_[b].depth; });
  std::vector<int> global(n, -1);
  std::vector<int> committed;
  for (int i : order) {
    global[i] = static_cast<int>(lattice_.nodes.size());
    lattice_.nodes.push_back({frame, toks_[i].state, toks_[i].cost});
    committed.push_back(global[i]);
  }
  for (const PendingLink &link : pending_) {
    if (global[link.to] < 0) continue;
    int from = link.from;
    if (link.epsilon) {
      from = global[link.from];
      if (from < 0) continue;
    }
    lattice_.links.push_back(
        {from, global[link.to], link.olabel, link.graph_cost, link.acoustic_cost});
  }

  for (const Token &tok : toks_) state_to_tok_[tok.state] = -1;
  toks_.clear();
  pending_.clear();
  prev_nodes_ = std::move(committed);
}

Lattice Decode(const DecodingGraph &graph, const LoglikeMatrix &loglikes,
               const DecodeConfig &config) {
  LatticeDecoder decoder(graph, config);
  return decoder.Decode(loglikes);
}

DecodeResult BestPath(const Lattice &lattice) {
  if (lattice.Empty()) throw Error("empty lattice");
  const int n = static_cast<int>(lattice.nodes.size());
  std::vector<double> alpha(n, kInf);
  std::vector<int> back(n, -1);
  alpha[0] = 0.0;
  for (std::size_t l = 0; l < lattice.links.size(); ++l) {
    const LatticeLink &link = lattice.links[l];
    double cost = alpha[link.from] + link.Cost();
    if (cost < alpha[link.to]) {
      alpha[link.to] = cost;
      back[link.to] = static_cast<int>(l);
    }
  }
  int best_node = -1;
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    double total = alpha[i] + lattice.EndCost(i);
    if (total < best) {
      best = total;
      best_node = i;
    }
  }
  if (best_node < 0) throw Error("lattice has no complete path");

  DecodeResult result;
  result.partial = !lattice.reached_final;
  result.cost = best;
  result.graph_cost = lattice.EndCost(best_node);
  for (int node = best_node; back[node] >= 0; node = lattice.links[back[node]].from) {
    const LatticeLink &link = lattice.links[back[node]];
    if (link.olabel != 0) result.words.push_back(link.olabel);
    result.graph_cost += link.graph_cost;
    result.acoustic_cost += link.acoustic_cost;
  }
  std::reverse(result.words.begin(), result.words.end());
  return result;
}

Lattice PruneLattice(const Lattice &lattice, double lattice_beam) {
  if (!(lattice_beam > 0)) throw Error("lattice beam must be positive");
  if (lattice.Empty()) return lattice;
  const int n = static_cast<int>(lattice.nodes.size());
  std::vector<double> alpha(n, kInf), beta(n, kInf);
  alpha[0] = 0.0;
  for (const LatticeLink &link : lattice.links)
    alpha[link.to] = std::min(alpha[link.to], alpha[link.from] + link.Cost());
  for (int i = 0; i < n; ++i) beta[i] = lattice.EndCost(i);
  for (auto it = lattice.links.rbegin(); it != lattice.links.rend(); ++it)
    beta[it->from] = std::min(beta[it->from], it->Cost() + beta[it->to]);
  double best = kInf;
  for (int i = 0; i < n; ++i) best = std::min(best, alpha[i] + lattice.EndCost(i));
  const double limit = best + lattice_beam + kPruneSlack;

  std::vector<int> remap(n, -1);
  Lattice out;
  out.num_frames = lattice.num_frames;
  out.reached_final = lattice.reached_final;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] + beta[i] <= limit) {
      remap[i] = static_cast<int>(out.nodes.size());
      out.nodes.push_back(lattice.nodes[i]);
      out.final_costs.push_back(lattice.final_costs[i]);
    }
  }
  for (const LatticeLink &link : lattice.links) {
    if (remap[link.from] < 0 || remap[link.to] < 0) continue;
    if (alpha[link.from] + link.Cost() + beta[link.to] > limit) continue;
    LatticeLink copy = link;
    copy.from = remap[link.from];
    copy.to = remap[link.to];
    out.links.push_back(copy);
  }
  return out;
}

std::string WriteLatticeText(const Lattice &lattice) {
  std::ostringstream os;
  for (const LatticeLink &link : lattice.links)
    os << link.from << ' ' << link.to << ' ' << link.olabel << ' '
       << FormatCost(link.graph_cost) << ' ' << FormatCost(link.acoustic_cost) << '\n';
  for (int i = 0; i < static_cast<int>(lattice.nodes.size()); ++i) {
    double end = lattice.EndCost(i);
    if (end != kInf) os << i << ' ' << FormatCost(end) << '\n';
  }
  return os.str();
}

std::string FormatTranscript(const std::string &key,
                             const std::vector<std::int32_t> &words,
                             const SymbolTable &table) {
  std::string line = key;
  for (std::int32_t id : words) {
    const std::string *word = table.Find(id);
    if (!word) throw Error("word id " + std::to_string(id) + " is not in the symbol table");
    line += ' ';
    line += *word;
  }
  return line;
}

}  // namespace ramdec
