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

#include "tibadv/attack.hpp"

#include <algorithm>
#include <cmath>

#include "tibadv/error.hpp"

namespace tibadv {

using nlohmann::json;

void ValidateConfig(const AttackConfig& config) {
  if (config.k == 0) throw InvalidArgumentError("k must be >= 1");
  if (config.query_budget && *config.query_budget == 0) {
    throw InvalidArgumentError("query budget must be >= 1");
  }
  if (config.max_substitutions && *config.max_substitutions == 0) {
    throw InvalidArgumentError("max_substitutions must be >= 1");
  }
}

json AttackConfigToJson(const AttackConfig& config) {
  json out = {
      {"granularity", std::string(GranularityName(config.granularity))},
      {"k", config.k},
      {"query_budget", config.query_budget ? json(*config.query_budget)
                                           : json(nullptr)},
      {"skip_nonpositive_gain", config.skip_nonpositive_gain},
      {"max_substitutions", config.max_substitutions
                                ? json(*config.max_substitutions)
                                : json(nullptr)},
      {"cumulative", config.cumulative},
  };
  return out;
}

std::string_view AttackStatusName(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSuccess:
      return "success";
    case AttackStatus::kFailure:
      return "failure";
    case AttackStatus::kSkipped:
      return "skipped";
    case AttackStatus::kError:
      return "error";
  }
  return "error";
}

std::optional<AttackStatus> ParseAttackStatus(std::string_view name) {
  for (AttackStatus status : {AttackStatus::kSuccess, AttackStatus::kFailure,
                              AttackStatus::kSkipped, AttackStatus::kError}) {
    if (AttackStatusName(status) == name) return status;
  }
  return std::nullopt;
}

void QueryMeter::Charge(std::size_t queries) {
  if (!CanAfford(queries)) throw BudgetExhausted{};
  used_ += queries;
}

namespace {

std::vector<LabelDistribution> ClassifyMetered(
    const Classifier& classifier, const std::vector<std::string>& texts,
    QueryMeter* meter) {
  if (meter != nullptr) meter->Charge(texts.size());
  return ClassifyInBatches(classifier, texts, classifier.Info().max_batch);
}

template <typename T>
json Nullable(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

json LabelName(const std::optional<std::size_t>& label,
               const std::vector<std::string>& labels) {
  if (!label || *label >= labels.size()) return nullptr;
  return labels[*label];
}

}  // namespace

std::vector<double> ComputeSaliency(const SegmentedText& seg,
                                    const Classifier& classifier,
                                    std::size_t label, double p_orig,
                                    QueryMeter* meter) {
  const std::string unk = classifier.Info().unk_literal;
  std::vector<std::string> masked;
  masked.reserve(seg.size());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    masked.push_back(SubstituteLiteral(seg, i, unk));
  }
  const std::vector<LabelDistribution> dists =
      ClassifyMetered(classifier, masked, meter);
  std::vector<double> saliency;
  saliency.reserve(dists.size());
  for (const LabelDistribution& dist : dists) {
    saliency.push_back(p_orig - dist.Prob(label));
  }
  return saliency;
}

std::optional<BestSubstitution> FindBestSubstitution(
    const SegmentedText& seg, std::size_t index,
    std::span<const MaskPrediction> candidates, const Classifier& classifier,
    std::size_t label, double p_orig, QueryMeter* meter) {
  if (candidates.empty()) return std::nullopt;
  std::vector<std::string> texts;
  texts.reserve(candidates.size());
  for (const MaskPrediction& candidate : candidates) {
    texts.push_back(SubstituteLiteral(seg, index, candidate.token));
  }
  const std::vector<LabelDistribution> dists =
      ClassifyMetered(classifier, texts, meter);
  // Candidates arrive in rank order, so strict '>' keeps the lower rank.
  std::size_t best = 0;
  double best_gain = p_orig - dists[0].Prob(label);
  for (std::size_t i = 1; i < dists.size(); ++i) {
    const double gain = p_orig - dists[i].Prob(label);
    if (gain > best_gain) {
      best = i;
      best_gain = gain;
    }
  }
  return BestSubstitution{candidates[best].token, best_gain};
}

std::vector<double> SoftmaxWeights(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("softmax of an empty vector");
  const double max = *std::max_element(values.begin(), values.end());
  std::vector<double> weights;
  weights.reserve(values.size());
  double total = 0.0;
  for (double v : values) {
    weights.push_back(std::exp(v - max));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<double> ScorePositions(std::span<const double> saliencies,
                                   std::span<const double> gains) {
  if (saliencies.size() != gains.size()) {
    throw InvalidArgumentError("saliency and gain lists differ in length");
  }
  std::vector<double> scores = SoftmaxWeights(saliencies);
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] *= gains[i];
  return scores;
}

void SortPlan(std::vector<PositionPlan>& plan) {
  std::sort(plan.begin(), plan.end(),
            [](const PositionPlan& a, const PositionPlan& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.delta_p_star != b.delta_p_star) {
                return a.delta_p_star > b.delta_p_star;
              }
              return a.index < b.index;
            });
}

namespace {

// Phase one: saliency and best substitution per unit, then ordering.
std::vector<PositionPlan> PlanSubstitutions(
    const SegmentedText& seg, const Classifier& classifier,
    const MaskedLanguageModel& masked_lm, const AttackConfig& config,
    std::size_t label, double p_orig, QueryMeter& meter,
    AttackOutcome& outcome) {
  const std::vector<double> saliency =
      ComputeSaliency(seg, classifier, label, p_orig, &meter);

  std::vector<PositionPlan> plan;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    std::vector<MaskPrediction> raw = masked_lm.FillMask(seg, i, config.k);
    ++outcome.fill_mask_calls;
    const std::vector<MaskPrediction> candidates =
        FilterCandidates(std::move(raw), seg.units[i].token, seg.granularity,
                         config.k, config.token_policy);
    auto best = FindBestSubstitution(seg, i, candidates, classifier, label,
                                     p_orig, &meter);
    if (!best) continue;
    plan.push_back({i, std::move(best->token), best->delta_p, saliency[i], 0});
  }
  if (plan.empty()) return plan;

  std::vector<double> saliencies;
  std::vector<double> gains;
  for (const PositionPlan& entry : plan) {
    saliencies.push_back(entry.saliency);
    gains.push_back(entry.delta_p_star);
  }
  const std::vector<double> scores = ScorePositions(saliencies, gains);
  for (std::size_t i = 0; i < plan.size(); ++i) plan[i].score = scores[i];
  SortPlan(plan);
  if (config.skip_nonpositive_gain) {
    std::erase_if(plan, [](const PositionPlan& entry) {
      return entry.delta_p_star <= 0.0;
    });
  }
  return plan;
}

// Phase two: apply substitutions in plan order until the label flips.
void ApplySubstitutions(const SegmentedText& seg,
                        const Classifier& classifier,
                        const AttackConfig& config, std::size_t label,
                        QueryMeter& meter, AttackOutcome& outcome) {
  SegmentedText working = seg;
  for (const PositionPlan& entry : outcome.plan) {
    if (config.max_substitutions &&
        outcome.substitutions_applied.size() >= *config.max_substitutions) {
      return;
    }
    if (!meter.CanAfford(1)) return;
    if (!config.cumulative) working = seg;
    working.units[entry.index].token = entry.best_token;
    const std::string candidate = Reconstruct(working);
    const LabelDistribution dist =
        ClassifyMetered(classifier, {candidate}, &meter).front();
    outcome.substitutions_applied.push_back(
        {entry.index, seg.units[entry.index].token, entry.best_token});
    const std::size_t predicted = dist.Argmax();
    if (predicted != label) {
      if (!config.cumulative) {
        outcome.substitutions_applied = {outcome.substitutions_applied.back()};
      }
      outcome.status = AttackStatus::kSuccess;
      outcome.adversarial_text = candidate;
      outcome.adversarial_label = predicted;
      outcome.ld = Levenshtein(outcome.original_text, candidate);
      return;
    }
  }
}

}  // namespace

AttackOutcome Attack(std::string_view text, const Classifier& classifier,
                     const MaskedLanguageModel& masked_lm,
                     const AttackConfig& config,
                     const WordSegmenter* segmenter) {
  ValidateConfig(config);
  AttackOutcome outcome;
  outcome.granularity = config.granularity;
  outcome.original_text = NormalizeNfc(text);
  QueryMeter meter(config.query_budget);
  try {
    const SegmentedText seg = Segment(text, config.granularity, segmenter);
    if (seg.empty()) {
      outcome.status = AttackStatus::kSkipped;
      return outcome;
    }
    outcome.status = AttackStatus::kFailure;

    const LabelDistribution original =
        ClassifyMetered(classifier, {seg.original}, &meter).front();
    const std::size_t label = original.Argmax();
    const double p_orig = original.Prob(label);
    outcome.labels = original.labels;
    outcome.original_label = label;

    outcome.plan = PlanSubstitutions(seg, classifier, masked_lm, config, label,
                                     p_orig, meter, outcome);
    ApplySubstitutions(seg, classifier, config, label, meter, outcome);
  } catch (const BudgetExhausted&) {
    outcome.status = AttackStatus::kFailure;
  } catch (const OracleError& e) {
    outcome = AttackOutcome{};
    outcome.granularity = config.granularity;
    outcome.original_text = NormalizeNfc(text);
    outcome.status = AttackStatus::kError;
    outcome.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
  } catch (const SegmenterError& e) {
    outcome.status = AttackStatus::kError;
    outcome.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
  }
  outcome.queries_used = meter.used();
  return outcome;
}

json OutcomeToJson(const AttackOutcome& outcome) {
  json substitutions = json::array();
  for (const AppliedSubstitution& sub : outcome.substitutions_applied) {
    substitutions.push_back({{"index", sub.index},
                             {"original", sub.original_token},
                             {"replacement", sub.new_token}});
  }
  json plan = json::array();
  for (const PositionPlan& entry : outcome.plan) {
    plan.push_back({{"index", entry.index},
                    {"token", entry.best_token},
                    {"delta_p", entry.delta_p_star},
                    {"saliency", entry.saliency},
                    {"score", entry.score}});
  }
  json out = {
      {"status", std::string(AttackStatusName(outcome.status))},
      {"granularity", std::string(GranularityName(outcome.granularity))},
      {"original_text", outcome.original_text},
      {"adversarial_text", Nullable(outcome.adversarial_text)},
      {"original_label", Nullable(outcome.original_label)},
      {"original_label_name", LabelName(outcome.original_label, outcome.labels)},
      {"adversarial_label", Nullable(outcome.adversarial_label)},
      {"adversarial_label_name",
       LabelName(outcome.adversarial_label, outcome.labels)},
      {"labels", outcome.labels},
      {"substitutions", substitutions},
      {"queries_used", outcome.queries_used},
      {"fill_mask_calls", outcome.fill_mask_calls},
      {"ld", Nullable(outcome.ld)},
      {"plan", plan},
  };
  if (!outcome.error.empty()) out["error"] = outcome.error;
  return out;
}

AttackOutcome OutcomeFromJson(const json& in) {
  try {
    AttackOutcome outcome;
    const std::string status = in.at("status").get<std::string>();
    auto parsed = ParseAttackStatus(status);
    if (!parsed) throw InvalidArgumentError("unknown status: " + status);
    outcome.status = *parsed;
    auto granularity =
        ParseGranularity(in.value("granularity", std::string("syllable")));
    if (!granularity) throw InvalidArgumentError("unknown granularity");
    outcome.granularity = *granularity;
    outcome.original_text = in.at("original_text").get<std::string>();
    auto optional_string = [&in](const char* key) -> std::optional<std::string> {
      if (!in.contains(key) || in[key].is_null()) return std::nullopt;
      return in[key].get<std::string>();
    };
    auto optional_size = [&in](const char* key) -> std::optional<std::size_t> {
      if (!in.contains(key) || in[key].is_null()) return std::nullopt;
      return in[key].get<std::size_t>();
    };
    outcome.adversarial_text = optional_string("adversarial_text");
    outcome.original_label = optional_size("original_label");
    outcome.adversarial_label = optional_size("adversarial_label");
    outcome.ld = optional_size("ld");
    outcome.labels = in.value("labels", std::vector<std::string>{});
    for (const json& sub : in.value("substitutions", json::array())) {
      outcome.substitutions_applied.push_back(
          {sub.at("index").get<std::size_t>(),
           sub.at("original").get<std::string>(),
           sub.at("replacement").get<std::string>()});
    }
    for (const json& entry : in.value("plan", json::array())) {
      outcome.plan.push_back({entry.at("index").get<std::size_t>(),
                              entry.at("token").get<std::string>(),
                              entry.at("delta_p").get<double>(),
                              entry.at("saliency").get<double>(),
                              entry.at("score").get<double>()});
    }
    outcome.queries_used = in.value("queries_used", std::size_t{0});
    outcome.fill_mask_calls = in.value("fill_mask_calls", std::size_t{0});
    outcome.error = in.value("error", std::string());
    return outcome;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("malformed outcome record: ") +
                               e.what());
  }
}

}  // namespace tibadv
