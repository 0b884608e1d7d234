// am-backend.cc

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

#include "ramdec/am-backend.h"

#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace ramdec {

namespace {

constexpr int kLocalBatch = 256;
constexpr double kRowSumTolerance = 1e-3;

}  // namespace

PosteriorMatrix LocalComputer::Propagate(const FeatureMatrix &spliced) {
  return LocalPropagate(model_, spliced);
}

PosteriorMatrix LocalPropagate(const MlpModel &model, const FeatureMatrix &spliced) {
  if (spliced.NumCols() != model.input_dim)
    throw Error("utterance '" + spliced.key + "' has dimension " +
                std::to_string(spliced.NumCols()) + ", model expects " +
                std::to_string(model.input_dim));
  const int num_frames = spliced.NumRows();
  PosteriorMatrix post(num_frames, model.OutputDim());
  for (int begin = 0; begin < num_frames; begin += kLocalBatch) {
    int count = std::min(kLocalBatch, num_frames - begin);
    Matrix<float> out = Forward(model, spliced.values.RowRange(begin, count));
    std::copy(out.Data().begin(), out.Data().end(),
              post.Data().begin() + static_cast<std::ptrdiff_t>(begin) * post.NumCols());
  }
  return post;
}

std::string SerializeRequest(const Matrix<float> &chunk) {
  std::string body = "{\"instances\":[";
  for (int r = 0; r < chunk.NumRows(); ++r) {
    if (r) body += ',';
    body += '[';
    auto row = chunk.Row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) body += ',';
      body += FormatJsonFloat(row[c]);
    }
    body += ']';
  }
  body += "]}";
  return body;
}

PosteriorMatrix ParseResponse(std::string_view body, int expected_rows,
                              int expected_cols) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ProtocolError("response is not valid JSON");
  if (!doc.is_object()) throw ProtocolError("response is not a JSON object");
  if (auto it = doc.find("error"); it != doc.end())
    throw RemoteError(it->is_string() ? it->get<std::string>() : it->dump());
  auto it = doc.find("predictions");
  if (it == doc.end() || !it->is_array())
    throw ProtocolError("response has no \"predictions\" array");
  const auto &rows = *it;
  if (static_cast<int>(rows.size()) != expected_rows)
    throw ProtocolError("expected " + std::to_string(expected_rows) +
                        " prediction rows, got " + std::to_string(rows.size()));
  int cols = expected_cols;
  if (cols <= 0) cols = rows.empty() || !rows[0].is_array() ? 0 : static_cast<int>(rows[0].size());
  PosteriorMatrix post(expected_rows, cols);
  for (int r = 0; r < expected_rows; ++r) {
    const auto &row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ProtocolError("prediction row " + std::to_string(r) + " does not have " +
                          std::to_string(cols) + " values");
    double sum = 0.0;
    for (int k = 0; k < cols; ++k) {
      if (!row[k].is_number())
        throw ProtocolError("non-numeric value in prediction row " + std::to_string(r));
      double v = row[k].get<double>();
      if (!std::isfinite(v) || v < 0.0)
        throw ProtocolError("invalid probability in prediction row " + std::to_string(r));
      post(r, k) = static_cast<float>(v);
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw ProtocolError("prediction row " + std::to_string(r) + " sums to " +
                          FormatDouble(sum));
  }
  return post;
}

RemoteComputer::RemoteComputer(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.chunk_size < 1) throw Error("chunk size must be >= 1");
  if (cfg_.max_retries < 0) throw Error("max retries must be >= 0");
  if (cfg_.base_url.empty()) throw Error("no serving URL given");
  std::string url = cfg_.base_url;
  std::size_t scheme = url.find("://");
  std::size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  host_ = url.substr(0, path);
  if (path != std::string::npos) prefix_ = url.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

std::string RemoteComputer::PredictPath() const {
  return prefix_ + "/v1/models/" + cfg_.model_name + ":predict";
}

std::string RemoteComputer::Serialize(const Matrix<float> &chunk) const {
  return SerializeRequest(chunk);
}

PosteriorMatrix RemoteComputer::Deserialize(std::string_view body, int rows) const {
  return ParseResponse(body, rows, cfg_.num_pdfs);
}

std::string RemoteComputer::Post(const std::string &body) {
  httplib::Client client(host_);
  const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const std::string path = PredictPath();

  std::string last_error;
  const int attempts = cfg_.max_retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.backoff_ms));
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "request to " + host_ + path + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    // Non-2xx: surface the server's message if it sent one.
    std::string message = "HTTP " + std::to_string(res->status);
    nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (!doc.is_discarded() && doc.is_object() && doc.contains("error") &&
        doc["error"].is_string())
      message = doc["error"].get<std::string>();
    if (res->status >= 500 || res->status == 429) {
      last_error = message;
      continue;
    }
    throw RemoteError(message);
  }
  throw Error("serving request failed after " + std::to_string(attempts) +
              " attempts: " + last_error);
}

PosteriorMatrix RemoteComputer::Propagate(const FeatureMatrix &spliced) {
  const int num_frames = spliced.NumRows();
  PosteriorMatrix post(0, std::max(cfg_.num_pdfs, 0));
  for (int begin = 0; begin < num_frames; begin += cfg_.chunk_size) {
    const int count = std::min(cfg_.chunk_size, num_frames - begin);
    PosteriorMatrix part = Deserialize(Post(Serialize(spliced.values.RowRange(begin, count))), count);
    if (begin == 0) {
      post = PosteriorMatrix(num_frames, part.NumCols());
    } else if (part.NumCols() != post.NumCols()) {
      throw ProtocolError("posterior width changed between chunks of '" + spliced.key + "'");
    }
    std::copy(part.Data().begin(), part.Data().end(),
              post.Data().begin() + static_cast<std::ptrdiff_t>(begin) * post.NumCols());
  }
  return post;
}

PosteriorMatrix RemotePropagate(const RemoteConfig &cfg, const FeatureMatrix &spliced) {
  RemoteComputer computer(cfg);
  return computer.Propagate(spliced);
}

LoglikeMatrix ComputeLoglikes(const PosteriorMatrix &post, const PriorVector &priors,
                              double eps) {
  if (post.NumCols() != priors.NumPdfs())
    throw Error("posterior width " + std::to_string(post.NumCols()) +
                " does not match " + std::to_string(priors.NumPdfs()) + " priors");
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  std::vector<double> log_priors(priors.NumPdfs());
  for (int k = 0; k < priors.NumPdfs(); ++k) log_priors[k] = std::log(priors.probs[k]);
  LoglikeMatrix out(post.NumRows(), post.NumCols());
  for (int t = 0; t < post.NumRows(); ++t)
    for (int k = 0; k < post.NumCols(); ++k)
      out(t, k) = static_cast<float>(std::log(static_cast<double>(post(t, k)) + eps) -
                                     log_priors[k]);
  return out;
}

}  // namespace ramdec
