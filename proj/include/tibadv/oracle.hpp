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

// Model oracles: the victim classifier and the masked language model that
// proposes substitutions, plus deterministic in-process mocks.

#ifndef TIBADV_ORACLE_HPP_
#define TIBADV_ORACLE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tibadv/tibetan_text.hpp"

namespace tibadv {

inline constexpr double kDistributionTolerance = 1e-6;

// Label ids are indices into `labels`.
struct LabelDistribution {
  std::vector<std::string> labels;
  std::vector<double> probs;

  // Lowest label id wins ties.
  std::size_t Argmax() const;
  double Prob(std::size_t label) const { return probs.at(label); }
};

struct MaskPrediction {
  std::string token;
  double score = 0.0;
  std::size_t rank = 0;
};

struct OracleInfo {
  std::string model_id;
  std::string unk_literal;
  std::string mask_literal;
  std::size_t max_batch = 1;
  std::vector<std::string> labels;           // classifiers
  std::optional<Granularity> granularity;    // masked LMs
};

nlohmann::json InfoToJson(const OracleInfo& info);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual OracleInfo Info() const = 0;
  // One distribution per text, in input order.
  virtual std::vector<LabelDistribution> Classify(
      std::span<const std::string> texts) const = 0;
};

class MaskedLanguageModel {
 public:
  virtual ~MaskedLanguageModel() = default;
  virtual OracleInfo Info() const = 0;
  // Top-k fills for unit `index`, in model order. Remote models are not
  // trusted to filter; callers run FilterCandidates on the result.
  virtual std::vector<MaskPrediction> FillMask(const SegmentedText& seg,
                                               std::size_t index,
                                               std::size_t k) const = 0;
};

// Splits `texts` into requests of at most `max_batch` texts and checks that
// every response has the expected length.
std::vector<LabelDistribution> ClassifyInBatches(
    const Classifier& classifier, std::span<const std::string> texts,
    std::size_t max_batch);

// Strips delimiters, drops invalid tokens, the original token and
// duplicates, keeps at most k and renumbers ranks from zero.
std::vector<MaskPrediction> FilterCandidates(
    std::vector<MaskPrediction> raw, std::string_view original_token,
    Granularity granularity, std::size_t k,
    const TokenPolicy& policy = TokenPolicy::Default());

// Throws ProtocolError unless probs are finite, in [0, 1], sized like labels
// and sum to one within kDistributionTolerance.
void ValidateDistribution(const LabelDistribution& dist);

// ---------------------------------------------------------------------------
// Mocks

struct MarkerWeight {
  std::size_t label = 0;
  double weight = 1.0;
};

struct UnigramMockSpec {
  std::string model_id = "mock-unigram";
  std::vector<std::string> labels;
  // Syllable -> the label it votes for.
  std::unordered_map<std::string, MarkerWeight> markers;
  std::string unk_literal = "[UNK]";
  std::size_t max_batch = 64;
};

// P(label) = (1 + w_label) / (|labels| + sum of w), where w_label sums the
// weights of the label's marker syllables found in the text.
class UnigramMockClassifier : public Classifier {
 public:
  explicit UnigramMockClassifier(UnigramMockSpec spec);

  OracleInfo Info() const override;
  std::vector<LabelDistribution> Classify(
      std::span<const std::string> texts) const override;

  LabelDistribution ClassifyOne(std::string_view text) const;
  const UnigramMockSpec& spec() const { return spec_; }

 private:
  UnigramMockSpec spec_;
};

struct WeightedToken {
  std::string token;
  double weight = 0.0;
};

struct TableMockSpec {
  std::string model_id = "mock-table";
  std::vector<WeightedToken> syllables;
  std::vector<WeightedToken> words;
  std::string mask_literal = "[MASK]";
  Granularity granularity_hint = Granularity::kSyllable;
  std::size_t max_batch = 64;
};

// Context-independent: the fills for a position are the table for the
// segmentation's granularity sorted by descending weight (stable), minus the
// original token, truncated to k.
class TableMockMaskedLanguageModel : public MaskedLanguageModel {
 public:
  explicit TableMockMaskedLanguageModel(TableMockSpec spec);

  OracleInfo Info() const override;
  std::vector<MaskPrediction> FillMask(const SegmentedText& seg,
                                       std::size_t index,
                                       std::size_t k) const override;

  const TableMockSpec& spec() const { return spec_; }

 private:
  TableMockSpec spec_;
};

UnigramMockSpec DefaultUnigramMockSpec();
TableMockSpec DefaultTableMockSpec();

// JSON layout:
//   {"labels": [...], "markers": [{"token":..,"label":..,"weight":..}],
//    "unk_literal": .., "max_batch": .., "model_id": ..}
//   {"syllables": [{"token":..,"weight":..}], "words": [...],
//    "mask_literal": .., "granularity": "syllable", "max_batch": ..}
// Throws InvalidArgumentError on malformed specs.
UnigramMockSpec UnigramMockSpecFromJson(const nlohmann::json& json);
TableMockSpec TableMockSpecFromJson(const nlohmann::json& json);
nlohmann::json UnigramMockSpecToJson(const UnigramMockSpec& spec);
nlohmann::json TableMockSpecToJson(const TableMockSpec& spec);

}  // namespace tibadv

#endif  // TIBADV_ORACLE_HPP_
