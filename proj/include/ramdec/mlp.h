// ramdec/mlp.h

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

#ifndef RAMDEC_MLP_H_
#define RAMDEC_MLP_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ramdec/dataset.h"
#include "ramdec/matrix.h"

namespace ramdec {

// The numeric values are the activation codes of the model file.
enum class Activation : std::uint8_t {
  kRelu = 0,
  kSigmoid = 1,
  kTanh = 2,
  kSoftmax = 3,
};

const char *ActivationName(Activation a);
Activation ActivationFromName(const std::string &name);

template <typename Real>
struct BasicLayer {
  Activation activation = Activation::kRelu;
  int in_dim = 0;
  int out_dim = 0;
  std::vector<Real> weights;  // out_dim x in_dim, row-major
  std::vector<Real> bias;     // out_dim

  bool operator==(const BasicLayer &other) const = default;
};

/// Feed-forward network whose final layer is a softmax over pdfs.  The
/// model proper is MlpModel (32-bit); the 64-bit instantiation exists so
/// gradients can be checked against finite differences.
template <typename Real>
struct BasicMlp {
  int input_dim = 0;
  std::vector<BasicLayer<Real>> layers;

  int OutputDim() const { return layers.empty() ? 0 : layers.back().out_dim; }
  std::size_t NumParams() const;
  bool operator==(const BasicMlp &other) const = default;
};

using MlpModel = BasicMlp<float>;

/// Throws Error unless dimensions chain, the final (and only the final)
/// layer is softmax and all weights are finite.
template <typename Real>
void ValidateModel(const BasicMlp<Real> &model);

/// Glorot-uniform weights in (-a, a), a = sqrt(6 / (in + out)); zero biases.
/// layer_dims lists the output width of each layer; the last is the number
/// of pdfs and gets a softmax, the others get `hidden`.
MlpModel InitModel(int input_dim, const std::vector<int> &layer_dims,
                   std::uint64_t seed, Activation hidden = Activation::kRelu);

template <typename To, typename From>
BasicMlp<To> ConvertModel(const BasicMlp<From> &model) {
  BasicMlp<To> out;
  out.input_dim = model.input_dim;
  for (const auto &layer : model.layers) {
    BasicLayer<To> l;
    l.activation = layer.activation;
    l.in_dim = layer.in_dim;
    l.out_dim = layer.out_dim;
    l.weights.assign(layer.weights.begin(), layer.weights.end());
    l.bias.assign(layer.bias.begin(), layer.bias.end());
    out.layers.push_back(std::move(l));
  }
  return out;
}

/// Posteriors for a B x input_dim batch; every row sums to one.
template <typename Real>
Matrix<Real> Forward(const BasicMlp<Real> &model, const Matrix<Real> &batch);

template <typename Real>
struct BatchStats {
  Real loss = 0;     // mean cross-entropy over the batch
  int correct = 0;   // frames whose arg-max equals the label
};

/// Mean cross-entropy of `labels` under the model and its gradient with
/// respect to every weight and bias (`grad` takes the model's shape).
template <typename Real>
BatchStats<Real> ComputeGradient(const BasicMlp<Real> &model,
                                 const Matrix<Real> &batch,
                                 std::span<const std::int32_t> labels,
                                 BasicMlp<Real> *grad);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 777;
};

struct EpochReport {
  int epoch = 0;
  double mean_cross_entropy = 0.0;
  double frame_accuracy = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochReport> report;
};

/// Minibatch SGD on cross-entropy.  Examples of all shards are pooled and
/// reshuffled each epoch with a generator seeded from cfg.seed; loss and
/// accuracy are measured on each batch before its update.  A non-finite loss
/// aborts with an Error naming the epoch and batch.
TrainResult TrainSgd(MlpModel model, const std::vector<ExampleSet> &shards,
                     const TrainConfig &cfg);

void WriteModel(const MlpModel &model, std::ostream &os);
MlpModel ReadModel(std::istream &is);
void SaveModel(const MlpModel &model, const std::string &path);
MlpModel LoadModel(const std::string &path);

}  // namespace ramdec

#endif  // RAMDEC_MLP_H_
