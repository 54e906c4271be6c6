/* Copyright 2026 The tibadv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Oracle clients speaking the JSON-over-HTTP model protocol:
//
//   POST /v1/classify  {"texts":[...]}
//        -> {"results":[{"probs":[...],"labels":[...]}]}
//   POST /v1/fill-mask {"text_with_mask":"...","mask_token_index":i,
//                       "top_k":k}
//        -> {"candidates":[{"token":"...","score":f}]}
//   GET  /v1/info      -> {"model_id":"...","unk_literal":"...",
//                          "max_batch":n,"labels":[...]}
//
// Non-2xx responses carry {"error":{"code":"...","message":"..."}}.

#ifndef TIBADV_HTTP_ORACLE_HPP_
#define TIBADV_HTTP_ORACLE_HPP_

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"
#include "tibadv/oracle.hpp"

namespace tibadv {

struct HttpOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};
  // Extra attempts after a transport failure. Server-reported errors are
  // never retried.
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{100};
};

// Thin request layer shared by both clients. Safe for concurrent use; each
// request opens its own connection.
class HttpTransport {
 public:
  // `base_url` is "http://host[:port][/prefix]". Throws InvalidArgumentError
  // for other schemes.
  HttpTransport(const std::string& base_url, HttpOptions options);

  nlohmann::json Get(const std::string& path) const;
  nlohmann::json Post(const std::string& path,
                      const nlohmann::json& body) const;

  const std::string& base_url() const { return base_url_; }

 private:
  template <typename Send>
  nlohmann::json Request(const std::string& path, Send&& send) const;

  std::string base_url_;
  std::string host_;  // scheme://host:port
  std::string prefix_;
  HttpOptions options_;
};

// Parses and validates a /v1/info body. Classifiers must declare a non-empty
// unk_literal and at least two labels.
OracleInfo ParseInfo(const nlohmann::json& body, bool classifier);

std::vector<LabelDistribution> ParseClassifyResponse(
    const nlohmann::json& body, std::size_t expected);

std::vector<MaskPrediction> ParseFillMaskResponse(const nlohmann::json& body,
                                                  std::size_t top_k);

class HttpClassifier : public Classifier {
 public:
  explicit HttpClassifier(const std::string& base_url,
                          HttpOptions options = {});

  // Fetched once and cached.
  OracleInfo Info() const override;
  std::vector<LabelDistribution> Classify(
      std::span<const std::string> texts) const override;

 private:
  HttpTransport transport_;
  mutable std::mutex mu_;
  mutable std::optional<OracleInfo> info_;
};

class HttpMaskedLanguageModel : public MaskedLanguageModel {
 public:
  explicit HttpMaskedLanguageModel(const std::string& base_url,
                                   HttpOptions options = {});

  OracleInfo Info() const override;
  // The unit is replaced with the model's mask literal ("[MASK]" when the
  // server does not declare one).
  std::vector<MaskPrediction> FillMask(const SegmentedText& seg,
                                       std::size_t index,
                                       std::size_t k) const override;

 private:
  HttpTransport transport_;
  mutable std::mutex mu_;
  mutable std::optional<OracleInfo> info_;
};

// ---------------------------------------------------------------------------
// Protocol conformance probe.

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::optional<OracleInfo> classifier_info;
  std::optional<OracleInfo> masked_lm_info;
  std::vector<ConformanceCheck> checks;

  bool conformant() const;
};

// Calls info() on both oracles, sends canned classify and fill-mask
// requests and checks schema, normalization and original-token exclusion.
// Never throws for oracle failures; they become failed checks.
ConformanceReport ProbeOracles(const Classifier& classifier,
                               const MaskedLanguageModel& masked_lm);

nlohmann::json ConformanceReportToJson(const ConformanceReport& report);

}  // namespace tibadv

#endif  // TIBADV_HTTP_ORACLE_HPP_
