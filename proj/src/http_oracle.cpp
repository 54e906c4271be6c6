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

#include "tibadv/http_oracle.hpp"

#include <regex>
#include <thread>

#include "httplib.h"
#include "tibadv/error.hpp"

namespace tibadv {

using nlohmann::json;

namespace {

constexpr const char* kInfoPath = "/v1/info";
constexpr const char* kClassifyPath = "/v1/classify";
constexpr const char* kFillMaskPath = "/v1/fill-mask";

const char* kProbeTexts[] = {
    "བཀྲ་ཤིས་བདེ་ལེགས།",
    "ཁ་ལག་ཞིམ་པོ་འདུག",
};

json ParseBody(const std::string& body, const std::string& what) {
  json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw ProtocolError(what + ": response body is not valid JSON");
  }
  return parsed;
}

[[noreturn]] void ThrowServerError(const httplib::Response& response,
                                   const std::string& what) {
  json body = json::parse(response.body, nullptr, false);
  std::string message = what + ": HTTP " + std::to_string(response.status);
  if (!body.is_discarded() && body.is_object() && body.contains("error") &&
      body["error"].is_object()) {
    const json& error = body["error"];
    message += " " + error.value("code", std::string("unknown")) + ": " +
               error.value("message", std::string());
  }
  throw ModelError(message);
}

template <typename T>
T Field(const json& body, const char* name, const std::string& what) {
  if (!body.is_object() || !body.contains(name)) {
    throw ProtocolError(what + ": missing field '" + name + "'");
  }
  try {
    return body.at(name).get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(what + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

HttpTransport::HttpTransport(const std::string& base_url, HttpOptions options)
    : base_url_(base_url), options_(options) {
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(base_url, match, kUrl)) {
    throw InvalidArgumentError("unsupported oracle URL (http:// only): " +
                               base_url);
  }
  host_ = match[1].str();
  prefix_ = match[2].str();
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

template <typename Send>
json HttpTransport::Request(const std::string& path, Send&& send) const {
  const std::string what = base_url_ + path;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.retry_backoff * attempt);
    httplib::Client client(host_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    httplib::Result result = send(client, prefix_ + path);
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      ThrowServerError(*result, what);
    }
    return ParseBody(result->body, what);
  }
  throw TransportError(what + ": " + last_error);
}

json HttpTransport::Get(const std::string& path) const {
  return Request(path, [](httplib::Client& client, const std::string& full) {
    return client.Get(full);
  });
}

json HttpTransport::Post(const std::string& path, const json& body) const {
  const std::string payload = body.dump();
  return Request(path, [&payload](httplib::Client& client,
                                  const std::string& full) {
    return client.Post(full, payload, "application/json");
  });
}

OracleInfo ParseInfo(const json& body, bool classifier) {
  const std::string what = "info";
  OracleInfo info;
  info.model_id = Field<std::string>(body, "model_id", what);
  info.max_batch = Field<std::size_t>(body, "max_batch", what);
  if (info.max_batch == 0) throw ProtocolError("info: max_batch must be >= 1");
  if (body.contains("unk_literal")) {
    info.unk_literal = Field<std::string>(body, "unk_literal", what);
  }
  if (body.contains("labels")) {
    info.labels = Field<std::vector<std::string>>(body, "labels", what);
  }
  if (body.contains("mask_literal")) {
    info.mask_literal = Field<std::string>(body, "mask_literal", what);
  }
  if (body.contains("granularity")) {
    auto granularity =
        ParseGranularity(Field<std::string>(body, "granularity", what));
    if (!granularity) throw ProtocolError("info: unknown granularity");
    info.granularity = granularity;
  }
  if (classifier) {
    if (info.unk_literal.empty()) {
      throw ProtocolError("info: classifier must declare unk_literal");
    }
    if (info.labels.size() < 2) {
      throw ProtocolError("info: classifier must declare at least 2 labels");
    }
  }
  return info;
}

std::vector<LabelDistribution> ParseClassifyResponse(const json& body,
                                                     std::size_t expected) {
  const json results = Field<json>(body, "results", "classify");
  if (!results.is_array() || results.size() != expected) {
    throw ProtocolError("classify: expected " + std::to_string(expected) +
                        " results");
  }
  std::vector<LabelDistribution> out;
  out.reserve(expected);
  for (const json& result : results) {
    LabelDistribution dist;
    dist.probs = Field<std::vector<double>>(result, "probs", "classify");
    dist.labels = Field<std::vector<std::string>>(result, "labels", "classify");
    ValidateDistribution(dist);
    if (!out.empty() && dist.labels != out.front().labels) {
      throw ProtocolError("classify: label order differs between results");
    }
    out.push_back(std::move(dist));
  }
  return out;
}

std::vector<MaskPrediction> ParseFillMaskResponse(const json& body,
                                                  std::size_t top_k) {
  const json candidates = Field<json>(body, "candidates", "fill-mask");
  if (!candidates.is_array()) {
    throw ProtocolError("fill-mask: candidates must be an array");
  }
  if (candidates.size() > top_k) {
    throw ProtocolError("fill-mask: " + std::to_string(candidates.size()) +
                        " candidates exceed top_k " + std::to_string(top_k));
  }
  std::vector<MaskPrediction> out;
  for (const json& candidate : candidates) {
    MaskPrediction prediction;
    prediction.token = Field<std::string>(candidate, "token", "fill-mask");
    prediction.score = Field<double>(candidate, "score", "fill-mask");
    prediction.rank = out.size();
    if (!out.empty() && prediction.score > out.back().score) {
      throw ProtocolError("fill-mask: scores are not in descending order");
    }
    out.push_back(std::move(prediction));
  }
  return out;
}

HttpClassifier::HttpClassifier(const std::string& base_url,
                               HttpOptions options)
    : transport_(base_url, options) {}

OracleInfo HttpClassifier::Info() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!info_) info_ = ParseInfo(transport_.Get(kInfoPath), true);
  return *info_;
}

std::vector<LabelDistribution> HttpClassifier::Classify(
    std::span<const std::string> texts) const {
  json request = {{"texts", json::array()}};
  for (const std::string& text : texts) request["texts"].push_back(text);
  return ParseClassifyResponse(transport_.Post(kClassifyPath, request),
                               texts.size());
}

HttpMaskedLanguageModel::HttpMaskedLanguageModel(const std::string& base_url,
                                                 HttpOptions options)
    : transport_(base_url, options) {}

OracleInfo HttpMaskedLanguageModel::Info() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!info_) info_ = ParseInfo(transport_.Get(kInfoPath), false);
  return *info_;
}

std::vector<MaskPrediction> HttpMaskedLanguageModel::FillMask(
    const SegmentedText& seg, std::size_t index, std::size_t k) const {
  std::string mask = Info().mask_literal;
  if (mask.empty()) mask = "[MASK]";
  json request = {{"text_with_mask", SubstituteLiteral(seg, index, mask)},
                  {"mask_token_index", index},
                  {"top_k", k}};
  return ParseFillMaskResponse(transport_.Post(kFillMaskPath, request), k);
}

// ---------------------------------------------------------------------------

bool ConformanceReport::conformant() const {
  if (checks.empty()) return false;
  for (const ConformanceCheck& check : checks) {
    if (!check.passed) return false;
  }
  return true;
}

namespace {

template <typename Fn>
void RunCheck(ConformanceReport& report, std::string name, Fn&& fn) {
  ConformanceCheck check{std::move(name), false, {}};
  try {
    check.detail = fn();
    check.passed = check.detail.empty();
    if (check.passed) check.detail = "ok";
  } catch (const std::exception& e) {
    check.detail = e.what();
  }
  report.checks.push_back(std::move(check));
}

}  // namespace

ConformanceReport ProbeOracles(const Classifier& classifier,
                               const MaskedLanguageModel& masked_lm) {
  ConformanceReport report;
  RunCheck(report, "classifier.info", [&]() -> std::string {
    OracleInfo info = classifier.Info();
    report.classifier_info = info;
    if (info.unk_literal.empty()) return "unk_literal is empty";
    if (info.labels.size() < 2) return "fewer than 2 labels";
    if (info.max_batch == 0) return "max_batch is 0";
    return {};
  });
  RunCheck(report, "classifier.classify", [&]() -> std::string {
    std::vector<std::string> texts(std::begin(kProbeTexts),
                                   std::end(kProbeTexts));
    std::vector<LabelDistribution> dists = classifier.Classify(texts);
    if (dists.size() != texts.size()) return "wrong number of results";
    for (const LabelDistribution& dist : dists) ValidateDistribution(dist);
    if (report.classifier_info &&
        dists.front().labels != report.classifier_info->labels) {
      return "result labels differ from info labels";
    }
    return {};
  });
  RunCheck(report, "masked_lm.info", [&]() -> std::string {
    OracleInfo info = masked_lm.Info();
    report.masked_lm_info = info;
    if (info.max_batch == 0) return "max_batch is 0";
    return {};
  });
  RunCheck(report, "masked_lm.fill_mask", [&]() -> std::string {
    constexpr std::size_t kTopK = 5;
    const SegmentedText seg = SegmentSyllables(kProbeTexts[0]);
    const std::string& original = seg.units.front().token;
    std::vector<MaskPrediction> fills = masked_lm.FillMask(seg, 0, kTopK);
    if (fills.size() > kTopK) return "more than top_k candidates";
    for (std::size_t i = 0; i < fills.size(); ++i) {
      const std::string token = StripDelimiters(NormalizeNfc(fills[i].token));
      if (token.empty()) return "empty candidate token";
      if (token == original) return "candidate echoes the original token";
      if (i > 0 && fills[i].score > fills[i - 1].score) {
        return "scores are not in descending order";
      }
    }
    return {};
  });
  return report;
}

json ConformanceReportToJson(const ConformanceReport& report) {
  json checks = json::array();
  for (const ConformanceCheck& check : report.checks) {
    checks.push_back({{"name", check.name},
                      {"passed", check.passed},
                      {"detail", check.detail}});
  }
  json out = {{"conformant", report.conformant()}, {"checks", checks}};
  out["classifier"] = report.classifier_info
                          ? InfoToJson(*report.classifier_info)
                          : json(nullptr);
  out["masked_lm"] = report.masked_lm_info ? InfoToJson(*report.masked_lm_info)
                                           : json(nullptr);
  return out;
}

}  // namespace tibadv
