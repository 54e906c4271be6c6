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

// Dataset-level attack runs and the ADV / ASR / LD metrics.
//
// Outcomes are streamed to a JSON-lines file, one record per sample, so a
// run can be resumed and the report re-derived from the file alone.

#ifndef TIBADV_CAMPAIGN_HPP_
#define TIBADV_CAMPAIGN_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tibadv/attack.hpp"

namespace tibadv {

inline constexpr int kOutcomeSchemaVersion = 1;

struct Sample {
  std::string id;
  std::string text;
  // Label name or numeric label id as written in the dataset.
  std::optional<std::string> gold_label;
};

// ".jsonl"/".json" files hold {"id","label","text"} records; anything else
// is read as tab-separated id, label, text (label may be empty). Throws
// IoError or DatasetError (duplicate ids, empty text, bad rows).
std::vector<Sample> LoadDataset(const std::filesystem::path& path);

// Maps a gold label to a label id: by name first, then as an index.
std::optional<std::size_t> ResolveLabel(std::string_view gold,
                                        const std::vector<std::string>& labels);

struct OutcomeRecord {
  std::string id;
  std::optional<std::size_t> gold_label;
  AttackOutcome outcome;
};

nlohmann::json RecordToJson(const OutcomeRecord& record);
OutcomeRecord RecordFromJson(const nlohmann::json& json);

// Skips lines that do not parse (a run killed mid-write leaves at most one).
std::vector<OutcomeRecord> ReadOutcomeFile(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Metrics

struct Accuracy {
  double pre = 0.0;
  double post = 0.0;
};

// Over records with an original prediction. Post-attack predictions are the
// adversarial label for successes and the original label otherwise. Throws
// MissingGoldError if any such record lacks a gold label, EmptyInputError if
// there are none.
Accuracy ComputeAccuracy(std::span<const OutcomeRecord> records);

double AccuracyDrop(double accuracy_pre, double accuracy_post);
double AttackSuccessRate(std::size_t successes, std::size_t attacked);

struct MeanLd {
  double value = 0.0;
  bool empty = true;  // no successful attacks
};

// Mean LD over successful outcomes only.
MeanLd MeanLevenshtein(std::span<const OutcomeRecord> records);

struct OutcomeCounts {
  std::size_t total = 0;
  std::size_t success = 0;
  std::size_t failure = 0;
  std::size_t skipped = 0;
  std::size_t error = 0;
};

struct CampaignReport {
  std::string attack_name;
  OutcomeCounts counts;
  // Unset when gold labels are missing.
  std::optional<double> accuracy_pre;
  std::optional<double> accuracy_post;
  std::optional<double> adv;
  double asr = 0.0;
  MeanLd mean_ld;
  double mean_queries = 0.0;
  nlohmann::json config = nlohmann::json::object();
  std::string outcome_file;
};

// A pure fold over the records. ASR's denominator counts every attacked
// sample (successes, failures and errors); skipped samples are excluded.
CampaignReport BuildReport(std::span<const OutcomeRecord> records,
                           std::string attack_name = "greedy",
                           nlohmann::json config = nlohmann::json::object(),
                           std::string outcome_file = {});

nlohmann::json ReportToJson(const CampaignReport& report);
CampaignReport ReportFromJson(const nlohmann::json& json);

// Metric rows by attack columns.
std::string FormatReportTable(std::span<const CampaignReport> reports);

// ---------------------------------------------------------------------------
// Orchestration

using SampleAttack =
    std::function<AttackOutcome(const Sample& sample, std::size_t index)>;

struct CampaignOptions {
  std::size_t parallelism = 1;
  std::filesystem::path outcome_path;
  // Keep records already in outcome_path and attack only the other ids.
  bool resume = false;
  // Polled between samples; in-flight samples finish and are written.
  std::function<bool()> should_stop;
  std::string attack_name = "greedy";
  nlohmann::json config = nlohmann::json::object();
};

// Attacks every sample not already recorded, streaming records to
// options.outcome_path, and reports over all records in the file. Throws
// IoError for an unwritable outcome file, DatasetError for gold labels that
// match no classifier label, and Error(kCancelled) if cancelled.
CampaignReport RunCampaign(std::span<const Sample> samples,
                           const std::vector<std::string>& labels,
                           const SampleAttack& attack,
                           const CampaignOptions& options);

// Preflights both oracles with Info() (oracle errors propagate) and runs
// Attack on every sample.
CampaignReport RunCampaign(std::span<const Sample> samples,
                           const Classifier& classifier,
                           const MaskedLanguageModel& masked_lm,
                           const AttackConfig& config,
                           const CampaignOptions& options,
                           const WordSegmenter* segmenter = nullptr);

}  // namespace tibadv

#endif  // TIBADV_CAMPAIGN_HPP_
