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

// Greedy masked-LM substitution attack against a soft-label classifier.
//
// For a text x with predicted label y and p = P(y|x):
//   saliency   S_i  = p - P(y | x with unit i set to the unknown literal)
//   best fill  s_i* = argmax over fills s' of  p - P(y | x with s_i = s')
//   gain       dP_i* = the maximum above
//   score      H_i  = softmax(S)_i * dP_i*
// Units are then replaced in descending H order, re-classifying after each
// replacement, until the predicted label changes.

#ifndef TIBADV_ATTACK_HPP_
#define TIBADV_ATTACK_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tibadv/oracle.hpp"
#include "tibadv/tibetan_text.hpp"

namespace tibadv {

struct AttackConfig {
  Granularity granularity = Granularity::kSyllable;
  std::size_t k = 50;
  // Counts classified texts, including the original.
  std::optional<std::size_t> query_budget;
  // Drops positions whose best gain is <= 0 from the substitution order.
  bool skip_nonpositive_gain = false;
  std::optional<std::size_t> max_substitutions;
  // false: each substitution is tried alone on the original text instead of
  // on top of the previous ones.
  bool cumulative = true;
  TokenPolicy token_policy = TokenPolicy::Default();
};

// Throws InvalidArgumentError.
void ValidateConfig(const AttackConfig& config);

nlohmann::json AttackConfigToJson(const AttackConfig& config);

struct PositionPlan {
  std::size_t index = 0;
  std::string best_token;
  double delta_p_star = 0.0;
  double saliency = 0.0;
  double score = 0.0;
};

enum class AttackStatus { kSuccess, kFailure, kSkipped, kError };

std::string_view AttackStatusName(AttackStatus status);
std::optional<AttackStatus> ParseAttackStatus(std::string_view name);

struct AppliedSubstitution {
  std::size_t index = 0;
  std::string original_token;
  std::string new_token;

  bool operator==(const AppliedSubstitution&) const = default;
};

struct AttackOutcome {
  AttackStatus status = AttackStatus::kFailure;
  Granularity granularity = Granularity::kSyllable;
  std::string original_text;  // NFC-normalized
  std::optional<std::string> adversarial_text;
  std::optional<std::size_t> original_label;
  std::optional<std::size_t> adversarial_label;
  std::vector<std::string> labels;
  std::vector<AppliedSubstitution> substitutions_applied;
  std::size_t queries_used = 0;
  std::size_t fill_mask_calls = 0;
  std::optional<std::size_t> ld;
  std::string error;
  // Substitution order; empty unless planning completed.
  std::vector<PositionPlan> plan;
};

nlohmann::json OutcomeToJson(const AttackOutcome& outcome);
AttackOutcome OutcomeFromJson(const nlohmann::json& json);

// Classification query accounting with an optional budget.
class QueryMeter {
 public:
  explicit QueryMeter(std::optional<std::size_t> budget = std::nullopt)
      : budget_(budget) {}

  bool CanAfford(std::size_t queries) const {
    return !budget_ || used_ + queries <= *budget_;
  }
  // Throws BudgetExhausted when the charge does not fit.
  void Charge(std::size_t queries);
  std::size_t used() const { return used_; }

 private:
  std::optional<std::size_t> budget_;
  std::size_t used_ = 0;
};

struct BudgetExhausted {};

// One saliency per unit, computed with the classifier's unknown literal.
std::vector<double> ComputeSaliency(const SegmentedText& seg,
                                    const Classifier& classifier,
                                    std::size_t label, double p_orig,
                                    QueryMeter* meter = nullptr);

struct BestSubstitution {
  std::string token;
  double delta_p = 0.0;
};

// Candidates must already be filtered. Ties go to the lower rank. Returns
// nullopt for an empty candidate list.
std::optional<BestSubstitution> FindBestSubstitution(
    const SegmentedText& seg, std::size_t index,
    std::span<const MaskPrediction> candidates, const Classifier& classifier,
    std::size_t label, double p_orig, QueryMeter* meter = nullptr);

// Max-shifted softmax. Throws EmptyInputError for an empty input.
std::vector<double> SoftmaxWeights(std::span<const double> values);

// H_i = softmax(saliencies)_i * gains_i. Throws EmptyInputError for empty
// input and InvalidArgumentError for mismatched lengths.
std::vector<double> ScorePositions(std::span<const double> saliencies,
                                   std::span<const double> gains);

// Descending score, then descending gain, then ascending index.
void SortPlan(std::vector<PositionPlan>& plan);

// Runs the whole attack. Oracle failures yield status kError; they are not
// thrown. Word granularity without a segmenter falls back to one word per
// syllable.
AttackOutcome Attack(std::string_view text, const Classifier& classifier,
                     const MaskedLanguageModel& masked_lm,
                     const AttackConfig& config,
                     const WordSegmenter* segmenter = nullptr);

}  // namespace tibadv

#endif  // TIBADV_ATTACK_HPP_
