// test-util.cc

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

#include "test-util.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace ramdec::testing {

namespace {

void AppendLe32(std::string *out, std::uint32_t u) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

std::vector<double> ForwardDouble(const BasicMlp<double> &model, std::vector<double> x) {
  for (const auto &layer : model.layers) {
    std::vector<double> y(layer.out_dim);
    for (int o = 0; o < layer.out_dim; ++o) {
      double z = layer.bias[o];
      for (int i = 0; i < layer.in_dim; ++i) z += layer.weights[o * layer.in_dim + i] * x[i];
      y[o] = z;
    }
    switch (layer.activation) {
      case Activation::kRelu:
        for (double &v : y) v = std::max(v, 0.0);
        break;
      case Activation::kSigmoid:
        for (double &v : y) v = 1.0 / (1.0 + std::exp(-v));
        break;
      case Activation::kTanh:
        for (double &v : y) v = std::tanh(v);
        break;
      case Activation::kSoftmax: {
        double m = y[0];
        for (double v : y) m = std::max(m, v);
        double s = 0;
        for (double &v : y) s += (v = std::exp(v - m));
        for (double &v : y) v /= s;
        break;
      }
    }
    x = std::move(y);
  }
  return x;
}

double MeanCrossEntropy(const BasicMlp<double> &model, const Matrix<double> &batch,
                        const std::vector<std::int32_t> &labels) {
  double loss = 0;
  for (int b = 0; b < batch.NumRows(); ++b) {
    auto row = batch.Row(b);
    auto p = ForwardDouble(model, std::vector<double>(row.begin(), row.end()));
    loss -= std::log(p[labels[b]]);
  }
  return loss / batch.NumRows();
}

std::string FormatG9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string HandEncodeMatrix(const std::string &key, std::int32_t rows, std::int32_t cols,
                             const std::vector<float> &values) {
  std::string out = key;
  out += ' ';
  out += '\0';
  out += 'B';
  out += "FM ";
  out += '\x04';
  AppendLe32(&out, static_cast<std::uint32_t>(rows));
  out += '\x04';
  AppendLe32(&out, static_cast<std::uint32_t>(cols));
  for (float v : values) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    AppendLe32(&out, u);
  }
  return out;
}

std::string HandEncodeIntVector(const std::string &key, const std::vector<std::int32_t> &values) {
  std::string out = key;
  out += ' ';
  out += '\0';
  out += 'B';
  out += '\x04';
  out += '\x04';
  AppendLe32(&out, static_cast<std::uint32_t>(values.size()));
  for (std::int32_t v : values) AppendLe32(&out, static_cast<std::uint32_t>(v));
  return out;
}

std::string RandomKey(RandomGenerator &rng) {
  static const char kChars[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.";
  int len = rng.UniformInt(1, 12);
  std::string key;
  for (int i = 0; i < len; ++i) key += kChars[rng.UniformInt(0, sizeof(kChars) - 2)];
  return key;
}

FeatureMatrix RandomFeatureMatrix(RandomGenerator &rng, int max_rows, int max_cols) {
  int rows = rng.UniformInt(1, max_rows), cols = rng.UniformInt(1, max_cols);
  FeatureMatrix m{RandomKey(rng), Matrix<float>(rows, cols)};
  for (float &v : m.values.Data()) {
    // Mix magnitudes so text printing is exercised on tiny and huge values.
    double scale = std::pow(10.0, rng.UniformInt(-8, 8));
    v = static_cast<float>(rng.Normal() * scale);
  }
  return m;
}

AlignmentVector RandomAlignment(RandomGenerator &rng, int max_len, int num_pdfs) {
  AlignmentVector a{RandomKey(rng), {}};
  int len = rng.UniformInt(0, max_len);
  for (int i = 0; i < len; ++i) a.pdf_ids.push_back(rng.UniformInt(0, num_pdfs - 1));
  return a;
}

DecodingGraph RandomGraph(RandomGenerator &rng, int max_states, int max_arcs, int num_pdfs) {
  DecodingGraph g;
  const int num_states = rng.UniformInt(1, max_states);
  g.ResizeStates(num_states);
  g.SetStart(0);
  const int num_arcs = rng.UniformInt(0, max_arcs);
  for (int a = 0; a < num_arcs; ++a) {
    Arc arc;
    int src = rng.UniformInt(0, num_states - 1);
    arc.nextstate = rng.UniformInt(0, num_states - 1);
    arc.ilabel = rng.Uniform() < 0.25 ? 0 : rng.UniformInt(1, num_pdfs);
    arc.olabel = rng.Uniform() < 0.5 ? 0 : rng.UniformInt(1, 3);
    arc.weight = static_cast<float>(rng.Uniform(0.0, 2.0));
    g.AddArc(src, arc);
  }
  bool any_final = false;
  for (int s = 0; s < num_states; ++s) {
    if (rng.Uniform() < 0.4) {
      g.SetFinal(s, static_cast<float>(rng.Uniform(0.0, 1.0)));
      any_final = true;
    }
  }
  if (!any_final) g.SetFinal(rng.UniformInt(0, num_states - 1), 0.0f);
  return g;
}

Matrix<float> RandomLoglikes(RandomGenerator &rng, int num_frames, int num_pdfs) {
  Matrix<float> ll(num_frames, num_pdfs);
  for (float &v : ll.Data()) v = static_cast<float>(rng.Uniform(-4.0, 2.0));
  return ll;
}

DecoderTrial RandomDecoderTrial(RandomGenerator &rng) {
  DecoderTrial trial;
  const int num_pdfs = rng.UniformInt(1, 4);
  trial.graph = RandomGraph(rng, 8, 12, num_pdfs);
  trial.loglikes = RandomLoglikes(rng, rng.UniformInt(0, 6), num_pdfs);
  trial.acoustic_scale = rng.Uniform(0.1, 2.0);
  return trial;
}

DecodeConfig UnprunedConfig(double acoustic_scale) {
  DecodeConfig cfg;
  cfg.beam = std::numeric_limits<double>::infinity();
  cfg.lattice_beam = std::numeric_limits<double>::infinity();
  cfg.max_active = std::numeric_limits<int>::max();
  cfg.acoustic_scale = acoustic_scale;
  return cfg;
}

BruteForceResult BruteForceDecode(const DecodingGraph &graph, const Matrix<float> &loglikes,
                                  double acoustic_scale) {
  BruteForceResult result;
  const int num_frames = loglikes.NumRows();
  std::vector<char> on_segment(graph.NumStates(), 0);
  std::vector<std::int32_t> words;
  std::function<void(int, int, double)> visit = [&](int state, int frame, double cost) {
    if (frame == num_frames) {
      result.best_partial = std::min(result.best_partial, cost);
      if (graph.IsFinal(state)) {
        const double total = cost + graph.Final(state);
        result.best_complete = std::min(result.best_complete, total);
        auto [it, added] = result.complete_by_words.emplace(words, total);
        if (!added) it->second = std::min(it->second, total);
      }
    }
    for (const Arc &arc : graph.Arcs(state)) {
      if (arc.ilabel == 0 && on_segment[arc.nextstate]) continue;
      if (arc.ilabel != 0 && frame == num_frames) continue;
      if (arc.olabel != 0) words.push_back(arc.olabel);
      if (arc.ilabel == 0) {
        on_segment[arc.nextstate] = 1;
        visit(arc.nextstate, frame, cost + arc.weight);
        on_segment[arc.nextstate] = 0;
      } else if (frame < num_frames) {
        // A new epsilon segment starts after each consumed frame.
        std::vector<char> saved(graph.NumStates(), 0);
        std::swap(saved, on_segment);
        on_segment[arc.nextstate] = 1;
        visit(arc.nextstate, frame + 1,
              cost + arc.weight - acoustic_scale * loglikes(frame, arc.ilabel - 1));
        std::swap(saved, on_segment);
      }
      if (arc.olabel != 0) words.pop_back();
    }
  };
  on_segment[graph.Start()] = 1;
  visit(graph.Start(), 0, 0.0);
  return result;
}

std::vector<LatticePath> EnumerateLatticePaths(const Lattice &lattice) {
  std::vector<LatticePath> paths;
  if (lattice.Empty()) return paths;
  std::vector<std::vector<int>> out(lattice.nodes.size());
  for (std::size_t l = 0; l < lattice.links.size(); ++l)
    out[lattice.links[l].from].push_back(static_cast<int>(l));
  LatticePath current;
  std::function<void(int)> visit = [&](int node) {
    double end = lattice.EndCost(node);
    if (end != std::numeric_limits<double>::infinity()) {
      LatticePath done = current;
      done.cost += end;
      paths.push_back(std::move(done));
    }
    for (int l : out[node]) {
      const LatticeLink &link = lattice.links[l];
      current.links.push_back(l);
      if (link.olabel != 0) current.words.push_back(link.olabel);
      current.cost += link.graph_cost + link.acoustic_cost;
      visit(link.to);
      current.cost -= link.graph_cost + link.acoustic_cost;
      if (link.olabel != 0) current.words.pop_back();
      current.links.pop_back();
    }
  };
  visit(0);
  return paths;
}

std::string CheckLatticeAgainstGraph(const Lattice &lattice, const DecodingGraph &graph,
                                     const Matrix<float> &loglikes, double acoustic_scale) {
  if (!lattice.Empty() &&
      (lattice.nodes[0].frame != 0 || lattice.nodes[0].state != graph.Start()))
    return "lattice does not start at the graph's start state";
  for (const LatticeLink &link : lattice.links) {
    const LatticeNode &a = lattice.nodes[link.from];
    const LatticeNode &b = lattice.nodes[link.to];
    bool found = false;
    for (const Arc &arc : graph.Arcs(a.state)) {
      if (arc.nextstate != b.state || arc.olabel != link.olabel ||
          static_cast<double>(arc.weight) != link.graph_cost)
        continue;
      if (b.frame == a.frame && arc.ilabel == 0 && link.acoustic_cost == 0.0) found = true;
      if (b.frame == a.frame + 1 && arc.ilabel > 0 &&
          std::abs(link.acoustic_cost +
                   acoustic_scale * loglikes(a.frame, arc.ilabel - 1)) < 1e-9)
        found = true;
      if (found) break;
    }
    if (!found) {
      std::ostringstream os;
      os << "link " << link.from << "->" << link.to << " (states " << a.state << "->"
         << b.state << ", frames " << a.frame << "->" << b.frame
         << ") has no matching graph arc";
      return os.str();
    }
  }
  return "";
}

int NaiveLevenshtein(const WordSequence &a, const WordSequence &b) {
  std::function<int(std::size_t, std::size_t)> dist = [&](std::size_t i, std::size_t j) -> int {
    if (i == a.size()) return static_cast<int>(b.size() - j);
    if (j == b.size()) return static_cast<int>(a.size() - i);
    if (a[i] == b[j]) return dist(i + 1, j + 1);
    return 1 + std::min({dist(i + 1, j), dist(i, j + 1), dist(i + 1, j + 1)});
  };
  return dist(0, 0);
}

std::vector<double> FiniteDifferenceGradient(const BasicMlp<double> &model,
                                             const Matrix<double> &batch,
                                             const std::vector<std::int32_t> &labels,
                                             double step) {
  std::vector<double> grad;
  BasicMlp<double> probe = model;
  auto central = [&](double *param) {
    const double saved = *param;
    *param = saved + step;
    double plus = MeanCrossEntropy(probe, batch, labels);
    *param = saved - step;
    double minus = MeanCrossEntropy(probe, batch, labels);
    *param = saved;
    grad.push_back((plus - minus) / (2 * step));
  };
  for (auto &layer : probe.layers) {
    for (double &w : layer.weights) central(&w);
    for (double &b : layer.bias) central(&b);
  }
  return grad;
}

double GradientCheckError(Activation hidden, std::uint64_t seed) {
  BasicMlp<double> model = ConvertModel<double>(InitModel(3, {4, 3}, seed, hidden));
  RandomGenerator rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (auto &layer : model.layers)
    for (double &b : layer.bias) b = rng.Uniform(-0.5, 0.5);
  Matrix<double> batch(5, 3);
  for (double &v : batch.Data()) v = rng.Uniform(-2, 2);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < batch.NumRows(); ++i) labels.push_back(rng.UniformInt(0, 2));

  BasicMlp<double> grad;
  ComputeGradient<double>(model, batch, labels, &grad);
  std::vector<double> analytic;
  for (const auto &layer : grad.layers) {
    analytic.insert(analytic.end(), layer.weights.begin(), layer.weights.end());
    analytic.insert(analytic.end(), layer.bias.begin(), layer.bias.end());
  }
  std::vector<double> numeric = FiniteDifferenceGradient(model, batch, labels, 1e-6);
  if (numeric.size() != analytic.size()) return std::numeric_limits<double>::infinity();
  double diff = 0, norm_a = 0, norm_n = 0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    norm_a += analytic[i] * analytic[i];
    norm_n += numeric[i] * numeric[i];
  }
  double denom = std::sqrt(std::max(norm_a, norm_n));
  return denom > 0 ? std::sqrt(diff) / denom : std::sqrt(diff);
}

std::vector<double> ReferenceForward(const MlpModel &model, std::span<const float> input) {
  return ForwardDouble(ConvertModel<double>(model),
                       std::vector<double>(input.begin(), input.end()));
}

PredictServer::PredictServer(MlpModel model, std::string name)
    : model_(std::move(model)), name_(std::move(name)),
      server_(std::make_unique<httplib::Server>()) {
  server_->Post(R"(/v1/models/([A-Za-z0-9_.-]+):predict)", [this](const httplib::Request &req,
                                                         httplib::Response &res) {
    ++requests_;
    auto error = [&](int status, const std::string &msg) {
      nlohmann::json body = {{"error", msg}};
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };
    if (fail_next_.load() > 0) {
      --fail_next_;
      return error(503, "temporarily unavailable");
    }
    if (req.matches[1] != name_) return error(404, "model not found");
    auto doc = nlohmann::json::parse(req.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("instances") || !doc["instances"].is_array())
      return error(400, "malformed request");
    const auto &instances = doc["instances"];
    {
      std::lock_guard<std::mutex> lock(mutex_);
      sizes_.push_back(static_cast<int>(instances.size()));
    }
    std::string body = "{\"predictions\":[";
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto &inst = instances[i];
      if (!inst.is_array() || static_cast<int>(inst.size()) != model_.input_dim)
        return error(400, "instance " + std::to_string(i) + " has the wrong dimension");
      std::vector<float> x;
      for (const auto &v : inst) x.push_back(v.get<float>());
      auto p = ReferenceForward(model_, x);
      body += i ? ",[" : "[";
      for (std::size_t k = 0; k < p.size(); ++k) body += (k ? "," : "") + FormatG9(p[k]);
      body += "]";
    }
    body += "]}";
    res.set_content(body, "application/json");
  });
  server_->Get(R"(/v1/models/([A-Za-z0-9_.-]+))", [this](const httplib::Request &req,
                                                httplib::Response &res) {
    if (req.matches[1] != name_) {
      res.status = 404;
      res.set_content(R"({"error":"model not found"})", "application/json");
      return;
    }
    nlohmann::json body = {{"name", name_},
                           {"input_dim", model_.input_dim},
                           {"num_pdfs", model_.OutputDim()}};
    res.set_content(body.dump(), "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

PredictServer::~PredictServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string PredictServer::Url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<int> PredictServer::RequestSizes() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return sizes_;
}

TempDir::TempDir(const std::string &tag) {
  std::string pattern =
      (std::filesystem::temp_directory_path() / ("ramdec-" + tag + "-XXXXXX")).string();
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
  path_ = buf.data();
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string ReadFileBytes(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ramdec::testing
