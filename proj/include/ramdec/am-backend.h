// ramdec/am-backend.h

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

#ifndef RAMDEC_AM_BACKEND_H_
#define RAMDEC_AM_BACKEND_H_

#include <memory>
#include <string>
#include <string_view>

#include "ramdec/dataset.h"
#include "ramdec/kaldi-archive.h"
#include "ramdec/matrix.h"
#include "ramdec/mlp.h"

namespace ramdec {

/// T x K, rows are per-frame pdf posteriors.
using PosteriorMatrix = Matrix<float>;
/// T x K log pseudo-likelihoods, log p(pdf|x) - log p(pdf).
using LoglikeMatrix = Matrix<float>;

struct RemoteConfig {
  std::string base_url;        // e.g. http://localhost:8501
  std::string model_name = "am";
  int chunk_size = 64;         // frames per request
  int timeout_ms = 5000;
  int max_retries = 2;         // extra attempts after the first
  int backoff_ms = 100;
  int num_pdfs = 0;            // expected posterior width; 0 accepts any
};

/// Produces posteriors for the spliced frames of one utterance.  An instance
/// handles one utterance at a time; separate instances share nothing.
class AcousticComputer {
 public:
  virtual ~AcousticComputer() = default;
  virtual PosteriorMatrix Propagate(const FeatureMatrix &spliced) = 0;
};

/// Runs the model in process.
class LocalComputer : public AcousticComputer {
 public:
  explicit LocalComputer(const MlpModel &model) : model_(model) {}
  PosteriorMatrix Propagate(const FeatureMatrix &spliced) override;

 private:
  const MlpModel &model_;
};

/// Sends chunks of frames to a serving endpoint
///   POST {base_url}/v1/models/{model_name}:predict
/// as {"instances": [[...], ...]} and reads {"predictions": [[...], ...]}.
/// Transport failures and 5xx/429 answers are retried up to max_retries
/// times, backing off backoff_ms between attempts; any other failure throws
/// at once.
class RemoteComputer : public AcousticComputer {
 public:
  explicit RemoteComputer(RemoteConfig cfg);
  PosteriorMatrix Propagate(const FeatureMatrix &spliced) override;

  std::string PredictPath() const;

 private:
  std::string Serialize(const Matrix<float> &chunk) const;
  PosteriorMatrix Deserialize(std::string_view body, int rows) const;
  std::string Post(const std::string &body);

  RemoteConfig cfg_;
  std::string host_;    // scheme://host:port
  std::string prefix_;  // path part of base_url, without trailing '/'
};

PosteriorMatrix LocalPropagate(const MlpModel &model, const FeatureMatrix &spliced);
PosteriorMatrix RemotePropagate(const RemoteConfig &cfg, const FeatureMatrix &spliced);

/// {"instances":[[1.0,2.0],[3.0,4.0]]}; 9 significant digits per value.
std::string SerializeRequest(const Matrix<float> &chunk);

/// Parses a predict response.  Throws RemoteError for an {"error": ...}
/// body and ProtocolError if the shape is not expected_rows x expected_cols
/// (expected_cols <= 0 skips the width check), an entry is negative or
/// non-finite, or a row sum is off by more than 1e-3.
PosteriorMatrix ParseResponse(std::string_view body, int expected_rows,
                              int expected_cols);

/// out[t][k] = log(post[t][k] + eps) - log(prior[k]).
LoglikeMatrix ComputeLoglikes(const PosteriorMatrix &post, const PriorVector &priors,
                              double eps = 1e-10);

}  // namespace ramdec

#endif  // RAMDEC_AM_BACKEND_H_
