// mlp.cc

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

#include "ramdec/mlp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "ramdec/random.h"

namespace ramdec {

namespace {

constexpr char kMagic[] = "RAMDEC01";
constexpr std::size_t kMagicLen = 8;

template <typename Real>
void ApplyActivation(Activation act, std::span<Real> row) {
  switch (act) {
    case Activation::kRelu:
      for (Real &v : row) v = v > Real(0) ? v : Real(0);
      break;
    case Activation::kSigmoid:
      for (Real &v : row) v = Real(1) / (Real(1) + std::exp(-v));
      break;
    case Activation::kTanh:
      for (Real &v : row) v = std::tanh(v);
      break;
    case Activation::kSoftmax: {
      Real max = *std::max_element(row.begin(), row.end());
      Real sum = 0;
      for (Real &v : row) {
        v = std::exp(v - max);
        sum += v;
      }
      for (Real &v : row) v /= sum;
      break;
    }
  }
}

// Derivative of the activation expressed through its output.
template <typename Real>
Real ActivationDerivative(Activation act, Real out) {
  switch (act) {
    case Activation::kRelu:
      return out > Real(0) ? Real(1) : Real(0);
    case Activation::kSigmoid:
      return out * (Real(1) - out);
    case Activation::kTanh:
      return Real(1) - out * out;
    case Activation::kSoftmax:
      break;
  }
  return Real(1);  // softmax is folded into the cross-entropy delta
}

// out = act(in * W^T + b)
template <typename Real>
Matrix<Real> PropagateLayer(const BasicLayer<Real> &layer, const Matrix<Real> &in) {
  Matrix<Real> out(in.NumRows(), layer.out_dim);
  for (int b = 0; b < in.NumRows(); ++b) {
    auto x = in.Row(b);
    auto y = out.Row(b);
    for (int o = 0; o < layer.out_dim; ++o) {
      const Real *w = layer.weights.data() + static_cast<std::size_t>(o) * layer.in_dim;
      Real sum = layer.bias[o];
      for (int i = 0; i < layer.in_dim; ++i) sum += w[i] * x[i];
      y[o] = sum;
    }
    ApplyActivation(layer.activation, y);
  }
  return out;
}

template <typename Real>
std::vector<Matrix<Real>> ForwardAll(const BasicMlp<Real> &model,
                                     const Matrix<Real> &batch) {
  if (batch.NumCols() != model.input_dim)
    throw Error("input dimension " + std::to_string(batch.NumCols()) +
                " does not match model input dimension " +
                std::to_string(model.input_dim));
  std::vector<Matrix<Real>> acts;
  acts.reserve(model.layers.size());
  const Matrix<Real> *in = &batch;
  for (const auto &layer : model.layers) {
    acts.push_back(PropagateLayer(layer, *in));
    in = &acts.back();
  }
  return acts;
}

template <typename T>
void PutLe(std::ostream &os, T value) {
  static_assert(sizeof(T) == 4);
  std::uint32_t u;
  std::memcpy(&u, &value, 4);
  char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                   static_cast<char>((u >> 16) & 0xff),
                   static_cast<char>((u >> 24) & 0xff)};
  os.write(bytes, 4);
}

class ModelFileReader {
 public:
  explicit ModelFileReader(std::istream &is) : is_(is) {}

  void Read(char *buf, std::size_t n, const char *what) {
    is_.read(buf, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n)
      Fail(std::string("truncated model file while reading ") + what);
    offset_ += static_cast<std::int64_t>(n);
  }

  template <typename T>
  T ReadLe(const char *what) {
    static_assert(sizeof(T) == 4);
    unsigned char b[4];
    Read(reinterpret_cast<char *>(b), 4, what);
    std::uint32_t u = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                      (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
    T value;
    std::memcpy(&value, &u, 4);
    return value;
  }

  std::uint8_t ReadByte(const char *what) {
    char c;
    Read(&c, 1, what);
    return static_cast<std::uint8_t>(c);
  }

  [[noreturn]] void Fail(const std::string &msg) const {
    throw Error("model file, byte " + std::to_string(offset_) + ": " + msg);
  }

  std::int64_t Offset() const { return offset_; }

 private:
  std::istream &is_;
  std::int64_t offset_ = 0;
};

}  // namespace

const char *ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
  }
  return "?";
}

Activation ActivationFromName(const std::string &name) {
  for (auto a : {Activation::kRelu, Activation::kSigmoid, Activation::kTanh,
                 Activation::kSoftmax})
    if (name == ActivationName(a)) return a;
  throw Error("unknown activation '" + name + "'");
}

template <typename Real>
std::size_t BasicMlp<Real>::NumParams() const {
  std::size_t n = 0;
  for (const auto &l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

template <typename Real>
void ValidateModel(const BasicMlp<Real> &model) {
  if (model.layers.empty()) throw Error("model has no layers");
  if (model.input_dim < 1) throw Error("model input dimension must be positive");
  int in_dim = model.input_dim;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto &layer = model.layers[i];
    std::string where = "layer " + std::to_string(i) + ": ";
    if (layer.in_dim != in_dim)
      throw Error(where + "input dimension " + std::to_string(layer.in_dim) +
                  " does not chain with " + std::to_string(in_dim));
    if (layer.out_dim < 1) throw Error(where + "output dimension must be positive");
    bool last = i + 1 == model.layers.size();
    if (last != (layer.activation == Activation::kSoftmax))
      throw Error(where + (last ? "final layer must be softmax"
                                : "softmax is only allowed on the final layer"));
    if (layer.weights.size() != static_cast<std::size_t>(layer.in_dim) * layer.out_dim ||
        layer.bias.size() != static_cast<std::size_t>(layer.out_dim))
      throw Error(where + "parameter sizes do not match dimensions");
    for (Real w : layer.weights)
      if (!std::isfinite(w)) throw Error(where + "non-finite weight");
    for (Real b : layer.bias)
      if (!std::isfinite(b)) throw Error(where + "non-finite bias");
    in_dim = layer.out_dim;
  }
}

MlpModel InitModel(int input_dim, const std::vector<int> &layer_dims,
                   std::uint64_t seed, Activation hidden) {
  if (layer_dims.empty()) throw Error("at least one layer is required");
  if (input_dim < 1) throw Error("input dimension must be positive");
  if (hidden == Activation::kSoftmax)
    throw Error("softmax cannot be a hidden activation");
  RandomGenerator rng(seed);
  MlpModel model;
  model.input_dim = input_dim;
  int in_dim = input_dim;
  for (std::size_t i = 0; i < layer_dims.size(); ++i) {
    int out_dim = layer_dims[i];
    if (out_dim < 1) throw Error("layer dimensions must be positive");
    BasicLayer<float> layer;
    layer.activation = i + 1 == layer_dims.size() ? Activation::kSoftmax : hidden;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    const double bound = std::sqrt(6.0 / (in_dim + out_dim));
    layer.weights.resize(static_cast<std::size_t>(in_dim) * out_dim);
    for (float &w : layer.weights) {
      // Uniform(-bound, bound) can round to +-bound in float; keep strictly inside.
      float v = static_cast<float>(rng.Uniform(-bound, bound));
      w = std::clamp(v, std::nextafter(static_cast<float>(-bound), 0.0f),
                     std::nextafter(static_cast<float>(bound), 0.0f));
    }
    layer.bias.assign(out_dim, 0.0f);
    model.layers.push_back(std::move(layer));
    in_dim = out_dim;
  }
  return model;
}

template <typename Real>
Matrix<Real> Forward(const BasicMlp<Real> &model, const Matrix<Real> &batch) {
  auto acts = ForwardAll(model, batch);
  return std::move(acts.back());
}

template <typename Real>
BatchStats<Real> ComputeGradient(const BasicMlp<Real> &model,
                                 const Matrix<Real> &batch,
                                 std::span<const std::int32_t> labels,
                                 BasicMlp<Real> *grad) {
  const int batch_size = batch.NumRows();
  if (static_cast<std::size_t>(batch_size) != labels.size())
    throw Error("batch has " + std::to_string(batch_size) + " rows but " +
                std::to_string(labels.size()) + " labels");
  if (batch_size == 0) throw Error("empty batch");
  auto acts = ForwardAll(model, batch);
  const int num_layers = static_cast<int>(model.layers.size());
  const int num_pdfs = model.OutputDim();

  BatchStats<Real> stats;
  // delta = dLoss/dZ of the current layer; for softmax + cross-entropy this
  // is (posterior - onehot) / B.
  Matrix<Real> delta = acts.back();
  for (int b = 0; b < batch_size; ++b) {
    int label = labels[b];
    if (label < 0 || label >= num_pdfs)
      throw Error("label " + std::to_string(label) + " out of range");
    auto row = delta.Row(b);
    Real p = std::max(row[label], std::numeric_limits<Real>::min());
    stats.loss -= std::log(p);
    if (std::max_element(row.begin(), row.end()) - row.begin() == label) ++stats.correct;
    row[label] -= Real(1);
    for (Real &v : row) v /= static_cast<Real>(batch_size);
  }
  stats.loss /= static_cast<Real>(batch_size);

  *grad = model;
  for (int l = num_layers - 1; l >= 0; --l) {
    const auto &layer = model.layers[l];
    auto &g = grad->layers[l];
    const Matrix<Real> &input = l == 0 ? batch : acts[l - 1];
    std::fill(g.weights.begin(), g.weights.end(), Real(0));
    std::fill(g.bias.begin(), g.bias.end(), Real(0));
    for (int b = 0; b < batch_size; ++b) {
      auto d = delta.Row(b);
      auto x = input.Row(b);
      for (int o = 0; o < layer.out_dim; ++o) {
        Real *gw = g.weights.data() + static_cast<std::size_t>(o) * layer.in_dim;
        for (int i = 0; i < layer.in_dim; ++i) gw[i] += d[o] * x[i];
        g.bias[o] += d[o];
      }
    }
    if (l == 0) break;
    Matrix<Real> prev(batch_size, layer.in_dim);
    const Activation prev_act = model.layers[l - 1].activation;
    for (int b = 0; b < batch_size; ++b) {
      auto d = delta.Row(b);
      auto out = prev.Row(b);
      for (int o = 0; o < layer.out_dim; ++o) {
        const Real *w = layer.weights.data() + static_cast<std::size_t>(o) * layer.in_dim;
        for (int i = 0; i < layer.in_dim; ++i) out[i] += d[o] * w[i];
      }
      auto a = acts[l - 1].Row(b);
      for (int i = 0; i < layer.in_dim; ++i)
        out[i] *= ActivationDerivative(prev_act, a[i]);
    }
    delta = std::move(prev);
  }
  return stats;
}

TrainResult TrainSgd(MlpModel model, const std::vector<ExampleSet> &shards,
                     const TrainConfig &cfg) {
  ValidateModel(model);
  if (cfg.epochs < 1 || cfg.batch_size < 1)
    throw Error("epochs and batch size must be positive");
  if (!(cfg.learning_rate >= 0.0)) throw Error("learning rate must be non-negative");

  // (shard, row) of every example, in shard order.
  std::vector<std::pair<int, int>> order;
  for (std::size_t s = 0; s < shards.size(); ++s) {
    const auto &shard = shards[s];
    if (shard.NumExamples() == 0) continue;
    if (shard.inputs.NumCols() != model.input_dim)
      throw Error("shard " + std::to_string(s) + " has input dimension " +
                  std::to_string(shard.inputs.NumCols()) + ", model expects " +
                  std::to_string(model.input_dim));
    for (std::int32_t label : shard.labels)
      if (label < 0 || label >= model.OutputDim())
        throw Error("shard " + std::to_string(s) + " has label " +
                    std::to_string(label) + " outside the model's " +
                    std::to_string(model.OutputDim()) + " outputs");
    for (int r = 0; r < shard.NumExamples(); ++r)
      order.emplace_back(static_cast<int>(s), r);
  }
  if (order.empty()) throw Error("no training examples");

  RandomGenerator rng(cfg.seed);
  TrainResult result;
  MlpModel grad;
  const float lr = static_cast<float>(cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.Shuffle(&order);
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    int batch_index = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const int rows = static_cast<int>(end - begin);
      Matrix<float> batch(rows, model.input_dim);
      std::vector<std::int32_t> labels(rows);
      for (int r = 0; r < rows; ++r) {
        const auto [s, row] = order[begin + r];
        auto src = shards[s].inputs.Row(row);
        std::copy(src.begin(), src.end(), batch.Row(r).begin());
        labels[r] = shards[s].labels[row];
      }
      BatchStats<float> stats = ComputeGradient(model, batch, labels, &grad);
      if (!std::isfinite(stats.loss))
        throw Error("non-finite loss in epoch " + std::to_string(epoch + 1) +
                    ", batch " + std::to_string(batch_index + 1));
      loss_sum += static_cast<double>(stats.loss) * rows;
      correct += stats.correct;
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto &layer = model.layers[l];
        const auto &g = grad.layers[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i)
          layer.weights[i] -= lr * g.weights[i];
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
          layer.bias[i] -= lr * g.bias[i];
      }
    }
    result.report.push_back(
        {epoch + 1, loss_sum / static_cast<double>(order.size()),
         static_cast<double>(correct) / static_cast<double>(order.size())});
  }
  result.model = std::move(model);
  return result;
}

void WriteModel(const MlpModel &model, std::ostream &os) {
  ValidateModel(model);
  os.write(kMagic, kMagicLen);
  PutLe(os, static_cast<std::uint32_t>(model.layers.size()));
  PutLe(os, static_cast<std::uint32_t>(model.input_dim));
  for (const auto &layer : model.layers) {
    PutLe(os, static_cast<std::uint32_t>(layer.out_dim));
    os.put(static_cast<char>(layer.activation));
    for (float w : layer.weights) PutLe(os, w);
    for (float b : layer.bias) PutLe(os, b);
  }
}

MlpModel ReadModel(std::istream &is) {
  ModelFileReader reader(is);
  char magic[kMagicLen];
  reader.Read(magic, kMagicLen, "magic");
  if (std::memcmp(magic, kMagic, kMagicLen) != 0) {
    if (std::memcmp(magic, kMagic, kMagicLen - 2) == 0)
      reader.Fail("unsupported model version '" + std::string(magic, kMagicLen) + "'");
    reader.Fail("bad magic");
  }
  const auto num_layers = reader.ReadLe<std::uint32_t>("layer count");
  const auto input_dim = reader.ReadLe<std::uint32_t>("input dimension");
  if (num_layers == 0) reader.Fail("model has no layers");
  if (input_dim == 0 || input_dim > (1u << 24)) reader.Fail("bad input dimension");
  MlpModel model;
  model.input_dim = static_cast<int>(input_dim);
  int in_dim = model.input_dim;
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    const auto out_dim = reader.ReadLe<std::uint32_t>("layer output dimension");
    if (out_dim == 0 || out_dim > (1u << 24))
      reader.Fail("bad output dimension for layer " + std::to_string(l));
    const std::uint8_t code = reader.ReadByte("activation");
    if (code > static_cast<std::uint8_t>(Activation::kSoftmax))
      reader.Fail("unknown activation code " + std::to_string(code));
    BasicLayer<float> layer;
    layer.activation = static_cast<Activation>(code);
    layer.in_dim = in_dim;
    layer.out_dim = static_cast<int>(out_dim);
    layer.weights.resize(static_cast<std::size_t>(in_dim) * out_dim);
    for (float &w : layer.weights) w = reader.ReadLe<float>("weights");
    layer.bias.resize(out_dim);
    for (float &b : layer.bias) b = reader.ReadLe<float>("biases");
    model.layers.push_back(std::move(layer));
    in_dim = static_cast<int>(out_dim);
  }
  if (is.peek() != std::char_traits<char>::eof())
    reader.Fail("trailing bytes after last layer");
  try {
    ValidateModel(model);
  } catch (const Error &e) {
    reader.Fail(std::string("invalid model: ") + e.what());
  }
  return model;
}

void SaveModel(const MlpModel &model, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  WriteModel(model, os);
  if (!os) throw Error("error writing " + path);
}

MlpModel LoadModel(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return ReadModel(is);
}

template struct BasicMlp<float>;
template struct BasicMlp<double>;
template void ValidateModel(const BasicMlp<float> &);
template void ValidateModel(const BasicMlp<double> &);
template Matrix<float> Forward(const BasicMlp<float> &, const Matrix<float> &);
template Matrix<double> Forward(const BasicMlp<double> &, const Matrix<double> &);
template BatchStats<float> ComputeGradient(const BasicMlp<float> &, const Matrix<float> &,
                                           std::span<const std::int32_t>,
                                           BasicMlp<float> *);
template BatchStats<double> ComputeGradient(const BasicMlp<double> &,
                                            const Matrix<double> &,
                                            std::span<const std::int32_t>,
                                            BasicMlp<double> *);

}  // namespace ramdec
