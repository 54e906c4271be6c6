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

#include "tibadv/campaign.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "tibadv/error.hpp"

namespace tibadv {

using nlohmann::json;

namespace {

bool HasJsonExtension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json" || ext == ".ndjson";
}

std::string ScalarToString(const json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw DatasetError(where + ": expected a string or integer");
}

void CheckSample(const Sample& sample, std::unordered_set<std::string>& ids,
                 const std::string& where) {
  if (sample.id.empty()) throw DatasetError(where + ": empty id");
  if (sample.text.empty()) throw DatasetError(where + ": empty text");
  if (!ids.insert(sample.id).second) {
    throw DatasetError(where + ": duplicate id '" + sample.id + "'");
  }
}

}  // namespace

std::vector<Sample> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  const bool jsonl = HasJsonExtension(path);
  std::vector<Sample> samples;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    Sample sample;
    if (jsonl) {
      json record = json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.is_object()) {
        throw DatasetError(where + ": not a JSON object");
      }
      if (!record.contains("id") || !record.contains("text")) {
        throw DatasetError(where + ": missing id or text");
      }
      sample.id = ScalarToString(record["id"], where);
      if (!record["text"].is_string()) {
        throw DatasetError(where + ": text must be a string");
      }
      sample.text = record["text"].get<std::string>();
      if (record.contains("label") && !record["label"].is_null()) {
        sample.gold_label = ScalarToString(record["label"], where);
      }
    } else {
      const std::size_t first = line.find('\t');
      const std::size_t second =
          first == std::string::npos ? first : line.find('\t', first + 1);
      if (second == std::string::npos) {
        throw DatasetError(where + ": expected id<TAB>label<TAB>text");
      }
      sample.id = line.substr(0, first);
      std::string label = line.substr(first + 1, second - first - 1);
      sample.text = line.substr(second + 1);
      if (line_no == 1 && sample.id == "id" && label == "label") continue;
      if (!label.empty()) sample.gold_label = std::move(label);
    }
    CheckSample(sample, ids, where);
    samples.push_back(std::move(sample));
  }
  if (in.bad()) throw IoError("error reading dataset: " + path.string());
  return samples;
}

std::optional<std::size_t> ResolveLabel(
    std::string_view gold, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == gold) return i;
  }
  std::size_t index = 0;
  const char* end = gold.data() + gold.size();
  auto [ptr, ec] = std::from_chars(gold.data(), end, index);
  if (ec == std::errc() && ptr == end && index < labels.size()) return index;
  return std::nullopt;
}

json RecordToJson(const OutcomeRecord& record) {
  json out = OutcomeToJson(record.outcome);
  out["schema_version"] = kOutcomeSchemaVersion;
  out["id"] = record.id;
  out["gold_label"] =
      record.gold_label ? json(*record.gold_label) : json(nullptr);
  return out;
}

OutcomeRecord RecordFromJson(const json& in) {
  if (!in.is_object() || in.value("schema_version", 0) != kOutcomeSchemaVersion) {
    throw InvalidArgumentError("unsupported outcome record schema");
  }
  OutcomeRecord record;
  try {
    record.id = in.at("id").get<std::string>();
    if (in.contains("gold_label") && !in["gold_label"].is_null()) {
      record.gold_label = in["gold_label"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed outcome record: ") +
                               e.what());
  }
  record.outcome = OutcomeFromJson(in);
  return record;
}

std::vector<OutcomeRecord> ReadOutcomeFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open outcome file: " + path.string());
  std::vector<OutcomeRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded()) continue;
    try {
      records.push_back(RecordFromJson(parsed));
    } catch (const InvalidArgumentError&) {
      continue;
    }
  }
  return records;
}

// ---------------------------------------------------------------------------

Accuracy ComputeAccuracy(std::span<const OutcomeRecord> records) {
  std::size_t considered = 0;
  std::size_t correct_pre = 0;
  std::size_t correct_post = 0;
  for (const OutcomeRecord& record : records) {
    const AttackOutcome& outcome = record.outcome;
    if (!outcome.original_label) continue;
    if (!record.gold_label) {
      throw MissingGoldError("sample '" + record.id + "' has no gold label");
    }
    ++considered;
    const std::size_t post_label =
        outcome.status == AttackStatus::kSuccess && outcome.adversarial_label
            ? *outcome.adversarial_label
            : *outcome.original_label;
    if (*outcome.original_label == *record.gold_label) ++correct_pre;
    if (post_label == *record.gold_label) ++correct_post;
  }
  if (considered == 0) {
    throw EmptyInputError("no classified samples to compute accuracy over");
  }
  const double n = static_cast<double>(considered);
  return {static_cast<double>(correct_pre) / n,
          static_cast<double>(correct_post) / n};
}

double AccuracyDrop(double accuracy_pre, double accuracy_post) {
  return accuracy_pre - accuracy_post;
}

double AttackSuccessRate(std::size_t successes, std::size_t attacked) {
  if (attacked == 0) return 0.0;
  return static_cast<double>(successes) / static_cast<double>(attacked);
}

MeanLd MeanLevenshtein(std::span<const OutcomeRecord> records) {
  std::size_t count = 0;
  double total = 0.0;
  for (const OutcomeRecord& record : records) {
    const AttackOutcome& outcome = record.outcome;
    if (outcome.status != AttackStatus::kSuccess || !outcome.ld) continue;
    total += static_cast<double>(*outcome.ld);
    ++count;
  }
  if (count == 0) return {0.0, true};
  return {total / static_cast<double>(count), false};
}

CampaignReport BuildReport(std::span<const OutcomeRecord> records,
                           std::string attack_name, json config,
                           std::string outcome_file) {
  CampaignReport report;
  report.attack_name = std::move(attack_name);
  report.config = std::move(config);
  report.outcome_file = std::move(outcome_file);
  double queries = 0.0;
  for (const OutcomeRecord& record : records) {
    ++report.counts.total;
    queries += static_cast<double>(record.outcome.queries_used);
    switch (record.outcome.status) {
      case AttackStatus::kSuccess:
        ++report.counts.success;
        break;
      case AttackStatus::kFailure:
        ++report.counts.failure;
        break;
      case AttackStatus::kSkipped:
        ++report.counts.skipped;
        break;
      case AttackStatus::kError:
        ++report.counts.error;
        break;
    }
  }
  if (report.counts.total > 0) {
    report.mean_queries = queries / static_cast<double>(report.counts.total);
  }
  report.asr = AttackSuccessRate(report.counts.success,
                                 report.counts.total - report.counts.skipped);
  report.mean_ld = MeanLevenshtein(records);
  try {
    const Accuracy accuracy = ComputeAccuracy(records);
    report.accuracy_pre = accuracy.pre;
    report.accuracy_post = accuracy.post;
    report.adv = AccuracyDrop(accuracy.pre, accuracy.post);
  } catch (const MissingGoldError&) {
  } catch (const EmptyInputError&) {
  }
  return report;
}

namespace {

json OptionalNumber(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<double> NumberOrNull(const json& in, const char* key) {
  if (!in.contains(key) || in[key].is_null()) return std::nullopt;
  return in[key].get<double>();
}

}  // namespace

json ReportToJson(const CampaignReport& report) {
  return {
      {"attack", report.attack_name},
      {"counts",
       {{"total", report.counts.total},
        {"success", report.counts.success},
        {"failure", report.counts.failure},
        {"skipped", report.counts.skipped},
        {"error", report.counts.error}}},
      {"accuracy_pre", OptionalNumber(report.accuracy_pre)},
      {"accuracy_post", OptionalNumber(report.accuracy_post)},
      {"adv", OptionalNumber(report.adv)},
      {"asr", report.asr},
      {"mean_ld", report.mean_ld.value},
      {"mean_ld_empty", report.mean_ld.empty},
      {"mean_queries", report.mean_queries},
      {"config", report.config},
      {"outcome_file", report.outcome_file},
  };
}

CampaignReport ReportFromJson(const json& in) {
  try {
    CampaignReport report;
    report.attack_name = in.value("attack", std::string("greedy"));
    const json& counts = in.at("counts");
    report.counts.total = counts.at("total").get<std::size_t>();
    report.counts.success = counts.at("success").get<std::size_t>();
    report.counts.failure = counts.at("failure").get<std::size_t>();
    report.counts.skipped = counts.at("skipped").get<std::size_t>();
    report.counts.error = counts.at("error").get<std::size_t>();
    report.accuracy_pre = NumberOrNull(in, "accuracy_pre");
    report.accuracy_post = NumberOrNull(in, "accuracy_post");
    report.adv = NumberOrNull(in, "adv");
    report.asr = in.at("asr").get<double>();
    report.mean_ld.value = in.at("mean_ld").get<double>();
    report.mean_ld.empty = in.value("mean_ld_empty", false);
    report.mean_queries = in.value("mean_queries", 0.0);
    report.config = in.value("config", json::object());
    report.outcome_file = in.value("outcome_file", std::string());
    return report;
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("malformed report: ") + e.what());
  }
}

std::string FormatReportTable(std::span<const CampaignReport> reports) {
  auto fixed = [](std::optional<double> value) -> std::string {
    if (!value) return "n/a";
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << *value;
    return out.str();
  };
  std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"ADV", {}}, {"ASR", {}}, {"LD", {}},
      {"Acc-pre", {}}, {"Acc-post", {}}, {"Samples", {}}, {"Queries", {}}};
  std::vector<std::string> header;
  for (const CampaignReport& report : reports) {
    header.push_back(report.attack_name);
    rows[0].second.push_back(fixed(report.adv));
    rows[1].second.push_back(fixed(report.asr));
    rows[2].second.push_back(report.mean_ld.empty
                                 ? "n/a"
                                 : fixed(report.mean_ld.value));
    rows[3].second.push_back(fixed(report.accuracy_pre));
    rows[4].second.push_back(fixed(report.accuracy_post));
    rows[5].second.push_back(std::to_string(report.counts.total));
    rows[6].second.push_back(fixed(report.mean_queries));
  }
  std::size_t first_width = 8;
  std::vector<std::size_t> widths;
  for (const std::string& name : header) {
    widths.push_back(std::max<std::size_t>(name.size(), 10));
  }
  std::ostringstream out;
  auto line = [&](const std::string& first,
                  const std::vector<std::string>& cells) {
    out << std::left << std::setw(static_cast<int>(first_width)) << first;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << " | " << std::right << std::setw(static_cast<int>(widths[i]))
          << cells[i];
    }
    out << "\n";
  };
  line("Metric", header);
  out << std::string(first_width, '-');
  for (std::size_t width : widths) out << "-+-" << std::string(width, '-');
  out << "\n";
  for (const auto& [name, cells] : rows) line(name, cells);
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

void WriteRecords(const std::filesystem::path& path,
                  const std::vector<OutcomeRecord>& records) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write outcome file: " + tmp.string());
    for (const OutcomeRecord& record : records) {
      out << RecordToJson(record).dump() << "\n";
    }
    if (!out) throw IoError("cannot write outcome file: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace outcome file: " + path.string());
}

}  // namespace

CampaignReport RunCampaign(std::span<const Sample> samples,
                           const std::vector<std::string>& labels,
                           const SampleAttack& attack,
                           const CampaignOptions& options) {
  if (samples.empty()) throw DatasetError("dataset is empty");
  if (options.outcome_path.empty()) {
    throw InvalidArgumentError("outcome path is required");
  }
  std::vector<std::optional<std::size_t>> golds(samples.size());
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    position[samples[i].id] = i;
    if (!samples[i].gold_label) continue;
    golds[i] = ResolveLabel(*samples[i].gold_label, labels);
    if (!golds[i]) {
      throw DatasetError("sample '" + samples[i].id + "' has unknown label '" +
                         *samples[i].gold_label + "'");
    }
  }

  // Records by dataset position; previously completed ones come first.
  std::vector<std::optional<OutcomeRecord>> done(samples.size());
  if (options.resume && std::filesystem::exists(options.outcome_path)) {
    std::vector<OutcomeRecord> kept;
    for (OutcomeRecord& record : ReadOutcomeFile(options.outcome_path)) {
      auto it = position.find(record.id);
      if (it == position.end() || done[it->second]) continue;
      done[it->second] = record;
      kept.push_back(std::move(record));
    }
    // Rewriting drops a torn trailing line before appending.
    WriteRecords(options.outcome_path, kept);
  } else {
    WriteRecords(options.outcome_path, {});
  }

  std::ofstream out(options.outcome_path, std::ios::app);
  if (!out) {
    throw IoError("cannot open outcome file: " + options.outcome_path.string());
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!done[i]) pending.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;  // guards out, done, first_error
  std::exception_ptr first_error;
  auto cancelled = [&options]() {
    return options.should_stop && options.should_stop();
  };
  auto worker = [&]() {
    while (!failed.load() && !cancelled()) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const std::size_t index = pending[slot];
      try {
        OutcomeRecord record{samples[index].id, golds[index],
                             attack(samples[index], index)};
        const std::string line = RecordToJson(record).dump();
        bool written = false;
        {
          std::lock_guard<std::mutex> lock(mu);
          out << line << "\n";
          out.flush();
          written = static_cast<bool>(out);
          if (written) done[index] = std::move(record);
        }
        if (!written) throw IoError("write to outcome file failed");
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(options.parallelism, pending.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  out.close();
  if (first_error) std::rethrow_exception(first_error);
  if (cancelled() && next.load() < pending.size()) {
    throw Error(ErrorCode::kCancelled, "campaign cancelled");
  }

  std::vector<OutcomeRecord> records;
  for (auto& record : done) {
    if (record) records.push_back(std::move(*record));
  }
  return BuildReport(records, options.attack_name, options.config,
                     options.outcome_path.string());
}

CampaignReport RunCampaign(std::span<const Sample> samples,
                           const Classifier& classifier,
                           const MaskedLanguageModel& masked_lm,
                           const AttackConfig& config,
                           const CampaignOptions& options,
                           const WordSegmenter* segmenter) {
  ValidateConfig(config);
  const OracleInfo classifier_info = classifier.Info();
  masked_lm.Info();
  CampaignOptions effective = options;
  if (effective.config.empty()) effective.config = AttackConfigToJson(config);
  return RunCampaign(
      samples, classifier_info.labels,
      [&](const Sample& sample, std::size_t) {
        return Attack(sample.text, classifier, masked_lm, config, segmenter);
      },
      effective);
}

}  // namespace tibadv
