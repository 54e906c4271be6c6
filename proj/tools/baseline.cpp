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

#include "baseline.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "capi.hpp"
#include "json.hpp"

namespace tibadv_tools {

using nlohmann::json;

namespace {

struct Prediction {
  std::vector<std::string> labels;
  std::size_t argmax = 0;
};

bool IsSampleFailure(tibadv_status status) {
  return status == TIBADV_TRANSPORT_ERROR || status == TIBADV_PROTOCOL_ERROR ||
         status == TIBADV_MODEL_ERROR || status == TIBADV_SEGMENTER_ERROR;
}

Prediction Classify(const tibadv_classifier* classifier,
                    const std::string& text) {
  const char* texts[] = {text.c_str()};
  char* raw = nullptr;
  Check(tibadv_classify(classifier, texts, 1, &raw), "classify");
  const json result = json::parse(TakeString(raw)).at(0);
  return {result.at("labels").get<std::vector<std::string>>(),
          result.at("argmax").get<std::size_t>()};
}

json LabelName(const std::optional<std::size_t>& label,
               const std::vector<std::string>& labels) {
  if (!label || *label >= labels.size()) return nullptr;
  return labels[*label];
}

}  // namespace

RandomBaseline::RandomBaseline(const tibadv_classifier* classifier,
                               const tibadv_masked_lm* masked_lm,
                               const tibadv_segmenter* segmenter,
                               const tibadv_attack_config& config,
                               std::uint64_t seed)
    : classifier_(classifier),
      masked_lm_(masked_lm),
      segmenter_(segmenter),
      config_(config),
      seed_(seed) {
  if (config_.k == 0) {
    throw StatusError(TIBADV_INVALID_ARGUMENT, "k must be >= 1");
  }
}

std::string RandomBaseline::Run(std::string_view text,
                                std::size_t sample_index) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_),
                    static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(
                        static_cast<std::uint64_t>(sample_index) >> 32)};
  std::mt19937_64 rng(seq);

  const std::string input(text);
  const char* granularity =
      config_.granularity == TIBADV_WORD ? "word" : "syllable";
  std::string status = "failure";
  std::string original_text = input;
  std::optional<std::string> adversarial_text;
  std::optional<std::size_t> original_label;
  std::optional<std::size_t> adversarial_label;
  std::optional<std::size_t> ld;
  std::vector<std::string> labels;
  json substitutions = json::array();
  std::size_t queries = 0;
  std::size_t fill_mask_calls = 0;
  std::string error;

  try {
    tibadv_segmentation* raw_seg = nullptr;
    Check(tibadv_segment(input.c_str(), config_.granularity, segmenter_,
                         &raw_seg),
          "segment");
    SegmentationPtr seg(raw_seg);
    original_text = tibadv_segmentation_text(seg.get());
    const std::size_t n = tibadv_segmentation_size(seg.get());
    if (n == 0) {
      status = "skipped";
    } else {
      auto affordable = [&] {
        return config_.query_budget == 0 || queries + 1 <= config_.query_budget;
      };
      const Prediction original = Classify(classifier_, original_text);
      ++queries;
      labels = original.labels;
      original_label = original.argmax;

      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);

      std::vector<std::size_t> indices;
      std::vector<std::string> replacements;
      for (std::size_t index : order) {
        if (config_.max_substitutions > 0 &&
            indices.size() >= config_.max_substitutions) {
          break;
        }
        if (!affordable()) break;
        char* raw = nullptr;
        Check(tibadv_candidates(masked_lm_, seg.get(), index, config_.k, &raw),
              "fill-mask");
        ++fill_mask_calls;
        const json candidates = json::parse(TakeString(raw));
        if (candidates.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0,
                                                        candidates.size() - 1);
        const std::string token =
            candidates.at(pick(rng)).at("token").get<std::string>();
        if (config_.isolated_substitutions) {
          indices.clear();
          replacements.clear();
        }
        indices.push_back(index);
        replacements.push_back(token);

        std::vector<const char*> tokens;
        for (const std::string& r : replacements) tokens.push_back(r.c_str());
        char* rendered = nullptr;
        Check(tibadv_substitute_many(seg.get(), indices.data(), tokens.data(),
                                     indices.size(), &rendered),
              "substitute");
        const std::string candidate = TakeString(rendered);
        const Prediction after = Classify(classifier_, candidate);
        ++queries;
        substitutions.push_back(
            {{"index", index},
             {"original", tibadv_segmentation_token(seg.get(), index)},
             {"replacement", token}});
        if (after.argmax != original.argmax) {
          if (config_.isolated_substitutions) {
            substitutions = json::array({substitutions.back()});
          }
          status = "success";
          adversarial_text = candidate;
          adversarial_label = after.argmax;
          std::size_t distance = 0;
          Check(tibadv_levenshtein(original_text.c_str(), candidate.c_str(),
                                   &distance),
                "levenshtein");
          ld = distance;
          break;
        }
      }
    }
  } catch (const StatusError& e) {
    if (!IsSampleFailure(e.status())) throw;
    status = "error";
    adversarial_text.reset();
    original_label.reset();
    adversarial_label.reset();
    ld.reset();
    labels.clear();
    substitutions = json::array();
    error = e.what();
  }

  auto nullable = [](const auto& value) {
    return value ? json(*value) : json(nullptr);
  };
  json out = {
      {"status", status},
      {"granularity", granularity},
      {"original_text", original_text},
      {"adversarial_text", nullable(adversarial_text)},
      {"original_label", nullable(original_label)},
      {"original_label_name", LabelName(original_label, labels)},
      {"adversarial_label", nullable(adversarial_label)},
      {"adversarial_label_name", LabelName(adversarial_label, labels)},
      {"labels", labels},
      {"substitutions", substitutions},
      {"queries_used", queries},
      {"fill_mask_calls", fill_mask_calls},
      {"ld", nullable(ld)},
      {"plan", json::array()},
  };
  if (!error.empty()) out["error"] = error;
  return out.dump();
}

tibadv_status RandomBaseline::Callback(void* user, const char* /*sample_id*/,
                                       size_t sample_index, const char* text,
                                       char** outcome_json) {
  try {
    const auto* self = static_cast<const RandomBaseline*>(user);
    const std::string outcome = self->Run(text, sample_index);
    *outcome_json = tibadv_string_dup(outcome.c_str());
    return TIBADV_OK;
  } catch (const StatusError& e) {
    return e.status();
  } catch (...) {
    return TIBADV_INTERNAL_ERROR;
  }
}

}  // namespace tibadv_tools
