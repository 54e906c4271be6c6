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

/*
 * C interface to libtibadv, a black-box adversarial attack engine for
 * Tibetan text classifiers.
 *
 * Conventions:
 *   - Every fallible call returns tibadv_status. On failure a message is
 *     available from tibadv_last_error_message() on the calling thread.
 *   - Strings are UTF-8. Strings returned through char** are owned by the
 *     caller and released with tibadv_string_free().
 *   - Structured results (outcomes, reports, oracle metadata) are JSON
 *     documents.
 *   - Handles are opaque. Oracle and segmenter handles may be shared across
 *     threads; segmentation handles are immutable after creation.
 */

#ifndef TIBADV_TIBADV_H_
#define TIBADV_TIBADV_H_

#include <signal.h>
#include <stddef.h>

#if defined(_WIN32)
#define TIBADV_API __declspec(dllexport)
#else
#define TIBADV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tibadv_status {
  TIBADV_OK = 0,
  TIBADV_INVALID_ARGUMENT = 1,
  TIBADV_INDEX_OUT_OF_RANGE = 2,
  TIBADV_INVALID_REPLACEMENT = 3,
  TIBADV_SEGMENTER_ERROR = 4,
  TIBADV_TRANSPORT_ERROR = 5,
  TIBADV_PROTOCOL_ERROR = 6,
  TIBADV_MODEL_ERROR = 7,
  TIBADV_EMPTY_INPUT = 8,
  TIBADV_MISSING_GOLD = 9,
  TIBADV_IO_ERROR = 10,
  TIBADV_DATASET_ERROR = 11,
  TIBADV_CANCELLED = 12,
  TIBADV_INTERNAL_ERROR = 13
} tibadv_status;

typedef enum tibadv_granularity {
  TIBADV_SYLLABLE = 0,
  TIBADV_WORD = 1
} tibadv_granularity;

typedef struct tibadv_classifier tibadv_classifier;
typedef struct tibadv_masked_lm tibadv_masked_lm;
typedef struct tibadv_segmenter tibadv_segmenter;
typedef struct tibadv_segmentation tibadv_segmentation;

TIBADV_API const char* tibadv_version(void);
TIBADV_API const char* tibadv_status_name(tibadv_status status);
/* Message of the last failed call on this thread; "" if none. */
TIBADV_API const char* tibadv_last_error_message(void);
TIBADV_API void tibadv_string_free(char* str);
/* Copies `str` into library-owned memory, e.g. for attack callbacks. */
TIBADV_API char* tibadv_string_dup(const char* str);

/* ------------------------------------------------------------------------ */
/* Oracles */

typedef struct tibadv_http_options {
  double connect_timeout_seconds; /* default 5 */
  double read_timeout_seconds;    /* default 60 */
  int max_retries;                /* transport failures only; default 2 */
  double retry_backoff_seconds;   /* default 0.1 */
} tibadv_http_options;

TIBADV_API void tibadv_http_options_init(tibadv_http_options* options);

/* `options` may be NULL for defaults. No request is made until first use. */
TIBADV_API tibadv_status tibadv_classifier_open_http(
    const char* base_url, const tibadv_http_options* options,
    tibadv_classifier** out);
/* `spec_json` may be NULL for the built-in mock. */
TIBADV_API tibadv_status tibadv_classifier_open_mock(
    const char* spec_json, tibadv_classifier** out);
TIBADV_API void tibadv_classifier_close(tibadv_classifier* classifier);
TIBADV_API tibadv_status tibadv_classifier_info(
    const tibadv_classifier* classifier, char** info_json);
/* Result: [{"labels":[...],"probs":[...],"argmax":i}, ...]. */
TIBADV_API tibadv_status tibadv_classify(const tibadv_classifier* classifier,
                                         const char* const* texts,
                                         size_t count, char** results_json);

TIBADV_API tibadv_status tibadv_masked_lm_open_http(
    const char* base_url, const tibadv_http_options* options,
    tibadv_masked_lm** out);
TIBADV_API tibadv_status tibadv_masked_lm_open_mock(const char* spec_json,
                                                    tibadv_masked_lm** out);
TIBADV_API void tibadv_masked_lm_close(tibadv_masked_lm* masked_lm);
TIBADV_API tibadv_status tibadv_masked_lm_info(
    const tibadv_masked_lm* masked_lm, char** info_json);
/* Raw model output: [{"token":...,"score":...,"rank":...}, ...]. */
TIBADV_API tibadv_status tibadv_fill_mask(const tibadv_masked_lm* masked_lm,
                                          const tibadv_segmentation* seg,
                                          size_t index, size_t k,
                                          char** candidates_json);
/* As tibadv_fill_mask, after delimiter stripping, token validation and
 * removal of the original token. */
TIBADV_API tibadv_status tibadv_candidates(const tibadv_masked_lm* masked_lm,
                                           const tibadv_segmentation* seg,
                                           size_t index, size_t k,
                                           char** candidates_json);

/* Protocol conformance check of both oracles. The report is always written
 * when the return value is TIBADV_OK; `conformant` receives 1 or 0. */
TIBADV_API tibadv_status tibadv_probe(const tibadv_classifier* classifier,
                                      const tibadv_masked_lm* masked_lm,
                                      char** report_json, int* conformant);

/* ------------------------------------------------------------------------ */
/* Text */

TIBADV_API tibadv_status tibadv_segmenter_open_lexicon(
    const char* path, tibadv_segmenter** out);
TIBADV_API tibadv_status tibadv_segmenter_open_per_syllable(
    tibadv_segmenter** out);
TIBADV_API void tibadv_segmenter_close(tibadv_segmenter* segmenter);

/* `segmenter` is only used for TIBADV_WORD and may be NULL. */
TIBADV_API tibadv_status tibadv_segment(const char* text,
                                        tibadv_granularity granularity,
                                        const tibadv_segmenter* segmenter,
                                        tibadv_segmentation** out);
TIBADV_API void tibadv_segmentation_free(tibadv_segmentation* seg);
TIBADV_API size_t tibadv_segmentation_size(const tibadv_segmentation* seg);
/* NULL when out of range. Valid until the segmentation is freed. */
TIBADV_API const char* tibadv_segmentation_token(
    const tibadv_segmentation* seg, size_t index);
TIBADV_API const char* tibadv_segmentation_text(
    const tibadv_segmentation* seg);
TIBADV_API tibadv_status tibadv_substitute(const tibadv_segmentation* seg,
                                           size_t index,
                                           const char* replacement,
                                           char** text_out);
/* Applies several replacements at once; a repeated index keeps the last. */
TIBADV_API tibadv_status tibadv_substitute_many(
    const tibadv_segmentation* seg, const size_t* indices,
    const char* const* replacements, size_t count, char** text_out);
TIBADV_API int tibadv_is_valid_token(const char* candidate,
                                     tibadv_granularity granularity);
TIBADV_API tibadv_status tibadv_levenshtein(const char* a, const char* b,
                                            size_t* distance);

/* ------------------------------------------------------------------------ */
/* Attack */

typedef struct tibadv_attack_config {
  tibadv_granularity granularity;
  size_t k;                  /* default 50 */
  size_t query_budget;       /* 0 = unlimited */
  size_t max_substitutions;  /* 0 = unlimited */
  int skip_nonpositive_gain; /* default 0 */
  int isolated_substitutions; /* default 0: substitutions accumulate */
} tibadv_attack_config;

TIBADV_API void tibadv_attack_config_init(tibadv_attack_config* config);

/* Writes the outcome JSON. Oracle failures are reported inside the outcome
 * (status "error"), not through the return value. */
TIBADV_API tibadv_status tibadv_attack(const char* text,
                                       const tibadv_classifier* classifier,
                                       const tibadv_masked_lm* masked_lm,
                                       const tibadv_segmenter* segmenter,
                                       const tibadv_attack_config* config,
                                       char** outcome_json);

/* ------------------------------------------------------------------------ */
/* Campaigns */

/* Custom per-sample attack. Must write an outcome JSON document allocated
 * with tibadv_string_dup(). Called concurrently when parallelism > 1. */
typedef tibadv_status (*tibadv_attack_fn)(void* user, const char* sample_id,
                                          size_t sample_index,
                                          const char* text,
                                          char** outcome_json);

typedef struct tibadv_campaign_options {
  tibadv_attack_config attack;
  size_t parallelism;       /* default 1 */
  const char* outcome_path; /* JSON lines; required */
  int resume;
  /* Polled between samples when non-NULL; non-zero stops the run. */
  const volatile sig_atomic_t* cancel_flag;
  const char* attack_name;  /* report column name; may be NULL */
  /* When set, replaces the built-in attack. */
  tibadv_attack_fn attack_fn;
  void* attack_user;
} tibadv_campaign_options;

TIBADV_API void tibadv_campaign_options_init(tibadv_campaign_options* options);

/* Loads the dataset (.jsonl or tab-separated), preflights both oracles and
 * attacks every sample. Records are appended to options->outcome_path as
 * they complete. */
TIBADV_API tibadv_status tibadv_campaign_run(
    const char* dataset_path, const tibadv_classifier* classifier,
    const tibadv_masked_lm* masked_lm, const tibadv_segmenter* segmenter,
    const tibadv_campaign_options* options, char** report_json);

/* Recomputes a report from an outcome file alone. */
TIBADV_API tibadv_status tibadv_report_from_outcomes(const char* outcome_path,
                                                     const char* attack_name,
                                                     char** report_json);

/* Renders reports side by side, one column per report. */
TIBADV_API tibadv_status tibadv_report_table(const char* const* report_jsons,
                                             size_t count, char** table);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* TIBADV_TIBADV_H_ */
