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

#include "tibadv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "tibadv/error.hpp"

namespace tibadv {

using nlohmann::json;

std::size_t LabelDistribution::Argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

json InfoToJson(const OracleInfo& info) {
  json out = {{"model_id", info.model_id},
              {"unk_literal", info.unk_literal},
              {"max_batch", info.max_batch},
              {"labels", info.labels}};
  if (!info.mask_literal.empty()) out["mask_literal"] = info.mask_literal;
  if (info.granularity) {
    out["granularity"] = std::string(GranularityName(*info.granularity));
  }
  return out;
}

std::vector<LabelDistribution> ClassifyInBatches(
    const Classifier& classifier, std::span<const std::string> texts,
    std::size_t max_batch) {
  if (max_batch == 0) max_batch = 1;
  std::vector<LabelDistribution> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += max_batch) {
    const std::size_t count = std::min(max_batch, texts.size() - start);
    std::vector<LabelDistribution> batch =
        classifier.Classify(texts.subspan(start, count));
    if (batch.size() != count) {
      throw ProtocolError("classifier returned " +
                          std::to_string(batch.size()) +
                          " distributions for " + std::to_string(count) +
                          " texts");
    }
    for (LabelDistribution& dist : batch) out.push_back(std::move(dist));
  }
  return out;
}

std::vector<MaskPrediction> FilterCandidates(std::vector<MaskPrediction> raw,
                                             std::string_view original_token,
                                             Granularity granularity,
                                             std::size_t k,
                                             const TokenPolicy& policy) {
  std::vector<MaskPrediction> kept;
  std::unordered_set<std::string> seen;
  for (MaskPrediction& prediction : raw) {
    if (kept.size() >= k) break;
    std::string token = StripDelimiters(NormalizeNfc(prediction.token));
    if (token == original_token) continue;
    if (!IsValidToken(token, granularity, policy)) continue;
    if (!seen.insert(token).second) continue;
    prediction.token = std::move(token);
    prediction.rank = kept.size();
    kept.push_back(std::move(prediction));
  }
  return kept;
}

void ValidateDistribution(const LabelDistribution& dist) {
  if (dist.probs.empty() || dist.probs.size() != dist.labels.size()) {
    throw ProtocolError("distribution has " +
                        std::to_string(dist.probs.size()) +
                        " probabilities for " +
                        std::to_string(dist.labels.size()) + " labels");
  }
  double sum = 0.0;
  for (double p : dist.probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ProtocolError("probability outside [0, 1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw ProtocolError("probabilities sum to " + std::to_string(sum));
  }
}

// ---------------------------------------------------------------------------

UnigramMockClassifier::UnigramMockClassifier(UnigramMockSpec spec)
    : spec_(std::move(spec)) {
  if (spec_.labels.size() < 2) {
    throw InvalidArgumentError("unigram mock needs at least two labels");
  }
  if (spec_.unk_literal.empty()) {
    throw InvalidArgumentError("unigram mock needs an unknown-token literal");
  }
  for (const auto& [token, marker] : spec_.markers) {
    if (marker.label >= spec_.labels.size() || marker.weight < 0.0) {
      throw InvalidArgumentError("bad marker entry for token " + token);
    }
  }
  if (spec_.max_batch == 0) spec_.max_batch = 1;
}

OracleInfo UnigramMockClassifier::Info() const {
  OracleInfo info;
  info.model_id = spec_.model_id;
  info.unk_literal = spec_.unk_literal;
  info.max_batch = spec_.max_batch;
  info.labels = spec_.labels;
  return info;
}

LabelDistribution UnigramMockClassifier::ClassifyOne(
    std::string_view text) const {
  std::vector<double> weight(spec_.labels.size(), 0.0);
  for (const TextUnit& unit : SegmentSyllables(text).units) {
    auto it = spec_.markers.find(unit.token);
    if (it != spec_.markers.end()) weight[it->second.label] += it->second.weight;
  }
  double total = static_cast<double>(spec_.labels.size());
  for (double w : weight) total += w;
  LabelDistribution dist;
  dist.labels = spec_.labels;
  dist.probs.reserve(weight.size());
  for (double w : weight) dist.probs.push_back((1.0 + w) / total);
  return dist;
}

std::vector<LabelDistribution> UnigramMockClassifier::Classify(
    std::span<const std::string> texts) const {
  std::vector<LabelDistribution> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(ClassifyOne(text));
  return out;
}

TableMockMaskedLanguageModel::TableMockMaskedLanguageModel(TableMockSpec spec)
    : spec_(std::move(spec)) {
  auto by_weight = [](const WeightedToken& a, const WeightedToken& b) {
    return a.weight > b.weight;
  };
  std::stable_sort(spec_.syllables.begin(), spec_.syllables.end(), by_weight);
  std::stable_sort(spec_.words.begin(), spec_.words.end(), by_weight);
  if (spec_.max_batch == 0) spec_.max_batch = 1;
}

OracleInfo TableMockMaskedLanguageModel::Info() const {
  OracleInfo info;
  info.model_id = spec_.model_id;
  info.mask_literal = spec_.mask_literal;
  info.max_batch = spec_.max_batch;
  info.granularity = spec_.granularity_hint;
  return info;
}

std::vector<MaskPrediction> TableMockMaskedLanguageModel::FillMask(
    const SegmentedText& seg, std::size_t index, std::size_t k) const {
  if (index >= seg.units.size()) {
    throw IndexOutOfRangeError("mask index out of range");
  }
  const std::string& original = seg.units[index].token;
  const std::vector<WeightedToken>& table =
      seg.granularity == Granularity::kWord ? spec_.words : spec_.syllables;
  std::vector<MaskPrediction> out;
  for (const WeightedToken& entry : table) {
    if (out.size() >= k) break;
    if (entry.token.empty() || entry.token == original) continue;
    out.push_back({entry.token, entry.weight, out.size()});
  }
  return out;
}

// ---------------------------------------------------------------------------

UnigramMockSpec DefaultUnigramMockSpec() {
  UnigramMockSpec spec;
  spec.labels = {"positive", "negative"};
  for (const char* token : {"བདེ", "སྐྱིད", "ལེགས", "དགའ"}) {
    spec.markers[token] = {0, 1.0};
  }
  for (const char* token : {"སྡུག", "ངན", "ཉེས", "འཁྲུག"}) {
    spec.markers[token] = {1, 1.0};
  }
  return spec;
}

TableMockSpec DefaultTableMockSpec() {
  TableMockSpec spec;
  spec.syllables = {{"ཡིན", 9}, {"ངན", 8},   {"བདེ", 7}, {"དེ", 6},
                    {"སྡུག", 5}, {"སྐྱིད", 4}, {"ནི", 3},   {"ལ", 2}};
  spec.words = {{"སྡུག་བསྔལ", 6}, {"བདེ་སྐྱིད", 5}, {"ཡག་པོ", 4},
                {"ངན་པ", 3},      {"དགའ་བ", 2}};
  return spec;
}

namespace {

std::vector<WeightedToken> TableFromJson(const json& entries,
                                         const char* field) {
  std::vector<WeightedToken> out;
  if (entries.is_null()) return out;
  if (!entries.is_array()) {
    throw InvalidArgumentError(std::string(field) + " must be an array");
  }
  for (const json& entry : entries) {
    out.push_back({entry.at("token").get<std::string>(),
                   entry.at("weight").get<double>()});
  }
  return out;
}

json TableToJson(const std::vector<WeightedToken>& table) {
  json out = json::array();
  for (const WeightedToken& entry : table) {
    out.push_back({{"token", entry.token}, {"weight", entry.weight}});
  }
  return out;
}

}  // namespace

UnigramMockSpec UnigramMockSpecFromJson(const json& in) {
  try {
    UnigramMockSpec spec;
    spec.model_id = in.value("model_id", spec.model_id);
    spec.labels = in.at("labels").get<std::vector<std::string>>();
    spec.unk_literal = in.value("unk_literal", spec.unk_literal);
    spec.max_batch = in.value("max_batch", spec.max_batch);
    for (const json& marker : in.value("markers", json::array())) {
      spec.markers[marker.at("token").get<std::string>()] = {
          marker.at("label").get<std::size_t>(), marker.value("weight", 1.0)};
    }
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad unigram mock spec: ") +
                               e.what());
  }
}

TableMockSpec TableMockSpecFromJson(const json& in) {
  try {
    TableMockSpec spec;
    spec.model_id = in.value("model_id", spec.model_id);
    spec.syllables = TableFromJson(in.value("syllables", json()), "syllables");
    spec.words = TableFromJson(in.value("words", json()), "words");
    spec.mask_literal = in.value("mask_literal", spec.mask_literal);
    spec.max_batch = in.value("max_batch", spec.max_batch);
    const std::string hint = in.value("granularity", std::string("syllable"));
    auto granularity = ParseGranularity(hint);
    if (!granularity) throw InvalidArgumentError("bad granularity: " + hint);
    spec.granularity_hint = *granularity;
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("bad table mock spec: ") +
                               e.what());
  }
}

json UnigramMockSpecToJson(const UnigramMockSpec& spec) {
  // Sorted so the rendering is stable.
  std::vector<std::pair<std::string, MarkerWeight>> markers(
      spec.markers.begin(), spec.markers.end());
  std::sort(markers.begin(), markers.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  json marker_json = json::array();
  for (const auto& [token, marker] : markers) {
    marker_json.push_back(
        {{"token", token}, {"label", marker.label}, {"weight", marker.weight}});
  }
  return {{"model_id", spec.model_id},   {"labels", spec.labels},
          {"markers", marker_json},      {"unk_literal", spec.unk_literal},
          {"max_batch", spec.max_batch}};
}

json TableMockSpecToJson(const TableMockSpec& spec) {
  return {{"model_id", spec.model_id},
          {"syllables", TableToJson(spec.syllables)},
          {"words", TableToJson(spec.words)},
          {"mask_literal", spec.mask_literal},
          {"granularity", std::string(GranularityName(spec.granularity_hint))},
          {"max_batch", spec.max_batch}};
}

}  // namespace tibadv
