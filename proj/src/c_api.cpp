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

#include "tibadv/tibadv.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "tibadv/attack.hpp"
#include "tibadv/campaign.hpp"
#include "tibadv/error.hpp"
#include "tibadv/http_oracle.hpp"
#include "tibadv/oracle.hpp"
#include "tibadv/tibetan_text.hpp"

using nlohmann::json;

struct tibadv_classifier {
  std::unique_ptr<tibadv::Classifier> impl;
};

struct tibadv_masked_lm {
  std::unique_ptr<tibadv::MaskedLanguageModel> impl;
};

struct tibadv_segmenter {
  std::unique_ptr<tibadv::WordSegmenter> impl;
};

struct tibadv_segmentation {
  tibadv::SegmentedText seg;
};

namespace {

thread_local std::string g_last_error;

char* CopyString(const std::string& value) {
  char* out = static_cast<char*>(std::malloc(value.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, value.data(), value.size());
  out[value.size()] = '\0';
  return out;
}

template <typename Fn>
tibadv_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TIBADV_OK;
  } catch (const tibadv::Error& e) {
    g_last_error = e.what();
    return static_cast<tibadv_status>(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return TIBADV_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TIBADV_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return TIBADV_INTERNAL_ERROR;
  }
}

void Require(bool condition, const char* message) {
  if (!condition) throw tibadv::InvalidArgumentError(message);
}

tibadv::Granularity ToGranularity(tibadv_granularity granularity) {
  switch (granularity) {
    case TIBADV_SYLLABLE:
      return tibadv::Granularity::kSyllable;
    case TIBADV_WORD:
      return tibadv::Granularity::kWord;
  }
  throw tibadv::InvalidArgumentError("unknown granularity");
}

tibadv::HttpOptions ToHttpOptions(const tibadv_http_options* options) {
  tibadv_http_options defaults;
  tibadv_http_options_init(&defaults);
  const tibadv_http_options& in = options != nullptr ? *options : defaults;
  auto ms = [](double seconds) {
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000));
  };
  tibadv::HttpOptions out;
  out.connect_timeout = ms(in.connect_timeout_seconds);
  out.read_timeout = ms(in.read_timeout_seconds);
  out.max_retries = in.max_retries < 0 ? 0 : in.max_retries;
  out.retry_backoff = ms(in.retry_backoff_seconds);
  return out;
}

tibadv::AttackConfig ToAttackConfig(const tibadv_attack_config* config) {
  tibadv_attack_config defaults;
  tibadv_attack_config_init(&defaults);
  const tibadv_attack_config& in = config != nullptr ? *config : defaults;
  tibadv::AttackConfig out;
  out.granularity = ToGranularity(in.granularity);
  out.k = in.k;
  if (in.query_budget > 0) out.query_budget = in.query_budget;
  if (in.max_substitutions > 0) out.max_substitutions = in.max_substitutions;
  out.skip_nonpositive_gain = in.skip_nonpositive_gain != 0;
  out.cumulative = in.isolated_substitutions == 0;
  tibadv::ValidateConfig(out);
  return out;
}

json CandidatesToJson(const std::vector<tibadv::MaskPrediction>& predictions) {
  json out = json::array();
  for (const tibadv::MaskPrediction& p : predictions) {
    out.push_back({{"token", p.token}, {"score", p.score}, {"rank", p.rank}});
  }
  return out;
}

const tibadv::SegmentedText& CheckedSeg(const tibadv_segmentation* seg) {
  Require(seg != nullptr, "segmentation is NULL");
  return seg->seg;
}

}  // namespace

extern "C" {

const char* tibadv_version(void) { return "0.1.0"; }

const char* tibadv_status_name(tibadv_status status) {
  if (status == TIBADV_OK) return "OK";
  return tibadv::ErrorCodeName(static_cast<tibadv::ErrorCode>(status));
}

const char* tibadv_last_error_message(void) { return g_last_error.c_str(); }

void tibadv_string_free(char* str) { std::free(str); }

char* tibadv_string_dup(const char* str) {
  if (str == nullptr) return nullptr;
  try {
    return CopyString(str);
  } catch (...) {
    return nullptr;
  }
}

void tibadv_http_options_init(tibadv_http_options* options) {
  if (options == nullptr) return;
  options->connect_timeout_seconds = 5.0;
  options->read_timeout_seconds = 60.0;
  options->max_retries = 2;
  options->retry_backoff_seconds = 0.1;
}

tibadv_status tibadv_classifier_open_http(const char* base_url,
                                          const tibadv_http_options* options,
                                          tibadv_classifier** out) {
  return Guard([&] {
    Require(base_url != nullptr && out != nullptr, "NULL argument");
    auto handle = std::make_unique<tibadv_classifier>();
    handle->impl = std::make_unique<tibadv::HttpClassifier>(
        base_url, ToHttpOptions(options));
    *out = handle.release();
  });
}

tibadv_status tibadv_classifier_open_mock(const char* spec_json,
                                          tibadv_classifier** out) {
  return Guard([&] {
    Require(out != nullptr, "NULL argument");
    tibadv::UnigramMockSpec spec =
        spec_json == nullptr
            ? tibadv::DefaultUnigramMockSpec()
            : tibadv::UnigramMockSpecFromJson(json::parse(spec_json));
    auto handle = std::make_unique<tibadv_classifier>();
    handle->impl =
        std::make_unique<tibadv::UnigramMockClassifier>(std::move(spec));
    *out = handle.release();
  });
}

void tibadv_classifier_close(tibadv_classifier* classifier) {
  delete classifier;
}

tibadv_status tibadv_classifier_info(const tibadv_classifier* classifier,
                                     char** info_json) {
  return Guard([&] {
    Require(classifier != nullptr && info_json != nullptr, "NULL argument");
    *info_json = CopyString(InfoToJson(classifier->impl->Info()).dump());
  });
}

tibadv_status tibadv_classify(const tibadv_classifier* classifier,
                              const char* const* texts, size_t count,
                              char** results_json) {
  return Guard([&] {
    Require(classifier != nullptr && results_json != nullptr,
            "NULL argument");
    Require(count > 0 && texts != nullptr, "no texts to classify");
    std::vector<std::string> batch;
    batch.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      Require(texts[i] != nullptr, "NULL text");
      batch.emplace_back(texts[i]);
    }
    const auto dists = tibadv::ClassifyInBatches(
        *classifier->impl, batch, classifier->impl->Info().max_batch);
    json out = json::array();
    for (const tibadv::LabelDistribution& dist : dists) {
      out.push_back({{"labels", dist.labels},
                     {"probs", dist.probs},
                     {"argmax", dist.Argmax()}});
    }
    *results_json = CopyString(out.dump());
  });
}

tibadv_status tibadv_masked_lm_open_http(const char* base_url,
                                         const tibadv_http_options* options,
                                         tibadv_masked_lm** out) {
  return Guard([&] {
    Require(base_url != nullptr && out != nullptr, "NULL argument");
    auto handle = std::make_unique<tibadv_masked_lm>();
    handle->impl = std::make_unique<tibadv::HttpMaskedLanguageModel>(
        base_url, ToHttpOptions(options));
    *out = handle.release();
  });
}

tibadv_status tibadv_masked_lm_open_mock(const char* spec_json,
                                         tibadv_masked_lm** out) {
  return Guard([&] {
    Require(out != nullptr, "NULL argument");
    tibadv::TableMockSpec spec =
        spec_json == nullptr
            ? tibadv::DefaultTableMockSpec()
            : tibadv::TableMockSpecFromJson(json::parse(spec_json));
    auto handle = std::make_unique<tibadv_masked_lm>();
    handle->impl =
        std::make_unique<tibadv::TableMockMaskedLanguageModel>(std::move(spec));
    *out = handle.release();
  });
}

void tibadv_masked_lm_close(tibadv_masked_lm* masked_lm) { delete masked_lm; }

tibadv_status tibadv_masked_lm_info(const tibadv_masked_lm* masked_lm,
                                    char** info_json) {
  return Guard([&] {
    Require(masked_lm != nullptr && info_json != nullptr, "NULL argument");
    *info_json = CopyString(InfoToJson(masked_lm->impl->Info()).dump());
  });
}

tibadv_status tibadv_fill_mask(const tibadv_masked_lm* masked_lm,
                               const tibadv_segmentation* seg, size_t index,
                               size_t k, char** candidates_json) {
  return Guard([&] {
    Require(masked_lm != nullptr && candidates_json != nullptr,
            "NULL argument");
    Require(k > 0, "k must be >= 1");
    const tibadv::SegmentedText& text = CheckedSeg(seg);
    if (index >= text.size()) {
      throw tibadv::IndexOutOfRangeError("mask index out of range");
    }
    *candidates_json = CopyString(
        CandidatesToJson(masked_lm->impl->FillMask(text, index, k)).dump());
  });
}

tibadv_status tibadv_candidates(const tibadv_masked_lm* masked_lm,
                                const tibadv_segmentation* seg, size_t index,
                                size_t k, char** candidates_json) {
  return Guard([&] {
    Require(masked_lm != nullptr && candidates_json != nullptr,
            "NULL argument");
    Require(k > 0, "k must be >= 1");
    const tibadv::SegmentedText& text = CheckedSeg(seg);
    if (index >= text.size()) {
      throw tibadv::IndexOutOfRangeError("mask index out of range");
    }
    auto filtered = tibadv::FilterCandidates(
        masked_lm->impl->FillMask(text, index, k), text.units[index].token,
        text.granularity, k);
    *candidates_json = CopyString(CandidatesToJson(filtered).dump());
  });
}

tibadv_status tibadv_probe(const tibadv_classifier* classifier,
                           const tibadv_masked_lm* masked_lm,
                           char** report_json, int* conformant) {
  return Guard([&] {
    Require(classifier != nullptr && masked_lm != nullptr &&
                report_json != nullptr,
            "NULL argument");
    const tibadv::ConformanceReport report =
        tibadv::ProbeOracles(*classifier->impl, *masked_lm->impl);
    *report_json = CopyString(tibadv::ConformanceReportToJson(report).dump());
    if (conformant != nullptr) *conformant = report.conformant() ? 1 : 0;
  });
}

tibadv_status tibadv_segmenter_open_lexicon(const char* path,
                                            tibadv_segmenter** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    auto handle = std::make_unique<tibadv_segmenter>();
    handle->impl = std::make_unique<tibadv::LexiconSegmenter>(
        tibadv::LexiconSegmenter::FromFile(path));
    *out = handle.release();
  });
}

tibadv_status tibadv_segmenter_open_per_syllable(tibadv_segmenter** out) {
  return Guard([&] {
    Require(out != nullptr, "NULL argument");
    auto handle = std::make_unique<tibadv_segmenter>();
    handle->impl = std::make_unique<tibadv::PerSyllableSegmenter>();
    *out = handle.release();
  });
}

void tibadv_segmenter_close(tibadv_segmenter* segmenter) { delete segmenter; }

tibadv_status tibadv_segment(const char* text, tibadv_granularity granularity,
                             const tibadv_segmenter* segmenter,
                             tibadv_segmentation** out) {
  return Guard([&] {
    Require(text != nullptr && out != nullptr, "NULL argument");
    auto handle = std::make_unique<tibadv_segmentation>();
    handle->seg = tibadv::Segment(text, ToGranularity(granularity),
                                  segmenter ? segmenter->impl.get() : nullptr);
    *out = handle.release();
  });
}

void tibadv_segmentation_free(tibadv_segmentation* seg) { delete seg; }

size_t tibadv_segmentation_size(const tibadv_segmentation* seg) {
  return seg == nullptr ? 0 : seg->seg.size();
}

const char* tibadv_segmentation_token(const tibadv_segmentation* seg,
                                      size_t index) {
  if (seg == nullptr || index >= seg->seg.size()) return nullptr;
  return seg->seg.units[index].token.c_str();
}

const char* tibadv_segmentation_text(const tibadv_segmentation* seg) {
  return seg == nullptr ? nullptr : seg->seg.original.c_str();
}

tibadv_status tibadv_substitute(const tibadv_segmentation* seg, size_t index,
                                const char* replacement, char** text_out) {
  return Guard([&] {
    Require(replacement != nullptr && text_out != nullptr, "NULL argument");
    *text_out = CopyString(tibadv::Substitute(CheckedSeg(seg), index,
                                              replacement));
  });
}

tibadv_status tibadv_substitute_many(const tibadv_segmentation* seg,
                                     const size_t* indices,
                                     const char* const* replacements,
                                     size_t count, char** text_out) {
  return Guard([&] {
    Require(text_out != nullptr, "NULL argument");
    Require(count == 0 || (indices != nullptr && replacements != nullptr),
            "NULL argument");
    tibadv::SegmentedText working = CheckedSeg(seg);
    for (size_t i = 0; i < count; ++i) {
      Require(replacements[i] != nullptr, "NULL replacement");
      if (indices[i] >= working.size()) {
        throw tibadv::IndexOutOfRangeError("unit index out of range");
      }
      if (!tibadv::IsValidToken(replacements[i], working.granularity)) {
        throw tibadv::InvalidReplacementError(
            std::string("replacement is not a valid token: ") +
            replacements[i]);
      }
      working.units[indices[i]].token = replacements[i];
    }
    *text_out = CopyString(tibadv::Reconstruct(working));
  });
}

int tibadv_is_valid_token(const char* candidate,
                          tibadv_granularity granularity) {
  if (candidate == nullptr) return 0;
  try {
    return tibadv::IsValidToken(candidate, ToGranularity(granularity)) ? 1 : 0;
  } catch (...) {
    return 0;
  }
}

tibadv_status tibadv_levenshtein(const char* a, const char* b,
                                 size_t* distance) {
  return Guard([&] {
    Require(a != nullptr && b != nullptr && distance != nullptr,
            "NULL argument");
    *distance = tibadv::Levenshtein(a, b);
  });
}

void tibadv_attack_config_init(tibadv_attack_config* config) {
  if (config == nullptr) return;
  config->granularity = TIBADV_SYLLABLE;
  config->k = 50;
  config->query_budget = 0;
  config->max_substitutions = 0;
  config->skip_nonpositive_gain = 0;
  config->isolated_substitutions = 0;
}

tibadv_status tibadv_attack(const char* text,
                            const tibadv_classifier* classifier,
                            const tibadv_masked_lm* masked_lm,
                            const tibadv_segmenter* segmenter,
                            const tibadv_attack_config* config,
                            char** outcome_json) {
  return Guard([&] {
    Require(text != nullptr && classifier != nullptr && masked_lm != nullptr &&
                outcome_json != nullptr,
            "NULL argument");
    const tibadv::AttackOutcome outcome = tibadv::Attack(
        text, *classifier->impl, *masked_lm->impl, ToAttackConfig(config),
        segmenter ? segmenter->impl.get() : nullptr);
    *outcome_json = CopyString(tibadv::OutcomeToJson(outcome).dump());
  });
}

void tibadv_campaign_options_init(tibadv_campaign_options* options) {
  if (options == nullptr) return;
  tibadv_attack_config_init(&options->attack);
  options->parallelism = 1;
  options->outcome_path = nullptr;
  options->resume = 0;
  options->cancel_flag = nullptr;
  options->attack_name = nullptr;
  options->attack_fn = nullptr;
  options->attack_user = nullptr;
}

tibadv_status tibadv_campaign_run(const char* dataset_path,
                                  const tibadv_classifier* classifier,
                                  const tibadv_masked_lm* masked_lm,
                                  const tibadv_segmenter* segmenter,
                                  const tibadv_campaign_options* options,
                                  char** report_json) {
  return Guard([&] {
    Require(dataset_path != nullptr && classifier != nullptr &&
                masked_lm != nullptr && options != nullptr &&
                report_json != nullptr,
            "NULL argument");
    Require(options->outcome_path != nullptr, "outcome_path is required");
    Require(options->parallelism > 0, "parallelism must be >= 1");
    const tibadv::AttackConfig config = ToAttackConfig(&options->attack);
    const std::vector<tibadv::Sample> samples =
        tibadv::LoadDataset(dataset_path);

    tibadv::CampaignOptions campaign;
    campaign.parallelism = options->parallelism;
    campaign.outcome_path = options->outcome_path;
    campaign.resume = options->resume != 0;
    if (options->cancel_flag != nullptr) {
      const volatile sig_atomic_t* flag = options->cancel_flag;
      campaign.should_stop = [flag] { return *flag != 0; };
    }
    campaign.attack_name = options->attack_name != nullptr
                               ? options->attack_name
                               : std::string("greedy-") +
                                     (config.granularity ==
                                              tibadv::Granularity::kWord
                                          ? "w"
                                          : "s");
    campaign.config = tibadv::AttackConfigToJson(config);
    campaign.config["attack"] = campaign.attack_name;
    campaign.config["dataset"] = dataset_path;
    campaign.config["parallelism"] = options->parallelism;

    tibadv::CampaignReport report;
    if (options->attack_fn == nullptr) {
      report = tibadv::RunCampaign(samples, *classifier->impl,
                                   *masked_lm->impl, config, campaign,
                                   segmenter ? segmenter->impl.get() : nullptr);
    } else {
      const tibadv::OracleInfo info = classifier->impl->Info();
      masked_lm->impl->Info();
      tibadv_attack_fn fn = options->attack_fn;
      void* user = options->attack_user;
      report = tibadv::RunCampaign(
          samples, info.labels,
          [fn, user](const tibadv::Sample& sample, std::size_t index) {
            char* raw = nullptr;
            const tibadv_status status = fn(user, sample.id.c_str(), index,
                                            sample.text.c_str(), &raw);
            std::unique_ptr<char, decltype(&std::free)> owned(raw, &std::free);
            if (status != TIBADV_OK || raw == nullptr) {
              throw tibadv::Error(
                  status == TIBADV_OK ? tibadv::ErrorCode::kInternal
                                      : static_cast<tibadv::ErrorCode>(status),
                  "attack callback failed for sample '" + sample.id + "'");
            }
            return tibadv::OutcomeFromJson(json::parse(raw));
          },
          campaign);
    }
    *report_json = CopyString(tibadv::ReportToJson(report).dump());
  });
}

tibadv_status tibadv_report_from_outcomes(const char* outcome_path,
                                          const char* attack_name,
                                          char** report_json) {
  return Guard([&] {
    Require(outcome_path != nullptr && report_json != nullptr,
            "NULL argument");
    const auto records = tibadv::ReadOutcomeFile(outcome_path);
    const tibadv::CampaignReport report = tibadv::BuildReport(
        records, attack_name != nullptr ? attack_name : "greedy",
        json::object(), outcome_path);
    *report_json = CopyString(tibadv::ReportToJson(report).dump());
  });
}

tibadv_status tibadv_report_table(const char* const* report_jsons,
                                  size_t count, char** table) {
  return Guard([&] {
    Require(report_jsons != nullptr && table != nullptr, "NULL argument");
    std::vector<tibadv::CampaignReport> reports;
    for (size_t i = 0; i < count; ++i) {
      Require(report_jsons[i] != nullptr, "NULL report");
      reports.push_back(tibadv::ReportFromJson(json::parse(report_jsons[i])));
    }
    *table = CopyString(tibadv::FormatReportTable(reports));
  });
}

}  // extern "C"
