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

// Segmentation of Tibetan text into syllables or words, lossless
// reconstruction, candidate-token validation and letter-level edit distance.
//
// All byte offsets refer to the NFC-normalized text stored in
// SegmentedText::original, never to the caller's raw input.

#ifndef TIBADV_TIBETAN_TEXT_HPP_
#define TIBADV_TIBETAN_TEXT_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace tibadv {

inline constexpr char32_t kTsheg = U'\u0F0B';
// UTF-8 encoding of U+0F0B.
inline constexpr std::string_view kTshegUtf8 = "\xE0\xBC\x8B";

enum class Granularity { kSyllable, kWord };

std::string_view GranularityName(Granularity granularity);
std::optional<Granularity> ParseGranularity(std::string_view name);

// Half-open byte range [begin, end).
struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const ByteRange&) const = default;
};

struct TextUnit {
  std::string token;
  Granularity kind = Granularity::kSyllable;
  ByteRange span;
  std::string leading_delims;
};

// Invariant: leading_delims[0] + token[0] + ... + trailing_delims == original.
struct SegmentedText {
  std::string original;
  std::vector<TextUnit> units;
  std::string trailing_delims;
  Granularity granularity = Granularity::kSyllable;

  std::size_t size() const { return units.size(); }
  bool empty() const { return units.empty(); }
};

// Unicode helpers. Malformed UTF-8 sequences decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view scalars);
std::string NormalizeNfc(std::string_view text);

// Tsheg, the Tsheg-shad family U+0F0C..U+0F14, and Unicode whitespace.
bool IsDelimiter(char32_t c);

// Removes leading and trailing delimiters.
std::string StripDelimiters(std::string_view text);

// Candidate-token validation settings. The deny-list holds substrings that
// mark tokenizer fragments or special tokens.
struct TokenPolicy {
  std::vector<std::string> deny_list;

  static const TokenPolicy& Default();
};

std::vector<std::string> DefaultDenyList();

bool IsValidToken(std::string_view candidate, Granularity granularity,
                  const TokenPolicy& policy = TokenPolicy::Default());

SegmentedText SegmentSyllables(std::string_view text);

// Supplies word boundaries for NFC text as byte ranges. Ranges must be
// sorted, disjoint, start and end on non-delimiter scalar values, and cover
// every non-delimiter scalar value. Implementations must be thread-safe.
class WordSegmenter {
 public:
  virtual ~WordSegmenter() = default;
  virtual std::vector<ByteRange> Boundaries(
      std::string_view normalized_text) const = 0;
};

// Degenerate fallback: every syllable is a word.
class PerSyllableSegmenter : public WordSegmenter {
 public:
  std::vector<ByteRange> Boundaries(
      std::string_view normalized_text) const override;
};

// Greedy longest-match over syllables. A multi-syllable lexicon entry only
// matches syllables that are joined by exactly one Tsheg in the text;
// syllables not covered by any entry become single-syllable words.
class LexiconSegmenter : public WordSegmenter {
 public:
  explicit LexiconSegmenter(const std::vector<std::string>& words);

  // UTF-8, one word per line. Blank lines and lines starting with '#' are
  // skipped. Throws IoError if the file cannot be read.
  static LexiconSegmenter FromFile(const std::filesystem::path& path);

  std::vector<ByteRange> Boundaries(
      std::string_view normalized_text) const override;

  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;  // syllables joined by one Tsheg
  std::size_t max_syllables_ = 1;
};

// Throws SegmenterError if the boundaries are not a valid partition.
SegmentedText SegmentWords(std::string_view text,
                           const WordSegmenter& segmenter);

// Word granularity without a segmenter uses PerSyllableSegmenter.
SegmentedText Segment(std::string_view text, Granularity granularity,
                      const WordSegmenter* segmenter = nullptr);

std::string Reconstruct(const SegmentedText& seg);

// Replaces unit `index` and renders the text. Throws IndexOutOfRangeError or
// InvalidReplacementError.
std::string Substitute(const SegmentedText& seg, std::size_t index,
                       std::string_view replacement,
                       const TokenPolicy& policy = TokenPolicy::Default());

// As Substitute, without validating the replacement. Used for the unknown
// and mask literals of the oracles.
std::string SubstituteLiteral(const SegmentedText& seg, std::size_t index,
                              std::string_view literal);

// Edit distance over Unicode scalar values.
std::size_t Levenshtein(std::string_view a, std::string_view b);

}  // namespace tibadv

#endif  // TIBADV_TIBETAN_TEXT_HPP_
