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

#include "tibadv/tibetan_text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>

#include "tibadv/error.hpp"

namespace tibadv {
namespace {

constexpr char32_t kReplacementChar = 0xFFFD;
constexpr char32_t kTibetanFirst = 0x0F00;
constexpr char32_t kTibetanLast = 0x0FFF;

// Reads one scalar value starting at `pos` and advances `pos`.
char32_t NextScalar(std::string_view text, std::size_t& pos) {
  int32_t i = static_cast<int32_t>(pos);
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), i,
          static_cast<int32_t>(text.size()), c);
  pos = static_cast<std::size_t>(i);
  return c < 0 ? kReplacementChar : static_cast<char32_t>(c);
}

bool IsContinuationByte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

bool IsScalarBoundary(std::string_view text, std::size_t pos) {
  return pos == 0 || pos >= text.size() || !IsContinuationByte(text[pos]);
}

bool IsTibetanPunctuation(char32_t c) {
  return IsDelimiter(c) || u_ispunct(static_cast<UChar32>(c));
}

bool OnlyDelimiters(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!IsDelimiter(NextScalar(text, pos))) return false;
  }
  return true;
}

// First and last scalar values of a non-empty range.
char32_t FirstScalar(std::string_view text) {
  std::size_t pos = 0;
  return NextScalar(text, pos);
}

char32_t LastScalar(std::string_view text) {
  std::size_t start = text.size() - 1;
  while (start > 0 && IsContinuationByte(text[start])) --start;
  std::size_t pos = start;
  return NextScalar(text, pos);
}

std::string Render(const SegmentedText& seg, std::size_t index,
                   std::string_view replacement) {
  std::string out;
  out.reserve(seg.original.size() + replacement.size());
  for (std::size_t i = 0; i < seg.units.size(); ++i) {
    const TextUnit& unit = seg.units[i];
    out += unit.leading_delims;
    if (i == index) {
      out += replacement;
    } else {
      out += unit.token;
    }
  }
  out += seg.trailing_delims;
  return out;
}

void CheckIndex(const SegmentedText& seg, std::size_t index) {
  if (index >= seg.units.size()) {
    throw IndexOutOfRangeError("unit index " + std::to_string(index) +
                               " out of range for " +
                               std::to_string(seg.units.size()) + " units");
  }
}

}  // namespace

std::string_view GranularityName(Granularity granularity) {
  return granularity == Granularity::kWord ? "word" : "syllable";
}

std::optional<Granularity> ParseGranularity(std::string_view name) {
  if (name == "syllable") return Granularity::kSyllable;
  if (name == "word") return Granularity::kWord;
  return std::nullopt;
}

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) out.push_back(NextScalar(text, pos));
  return out;
}

std::string EncodeUtf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size() * 3);
  for (char32_t c : scalars) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
      len = 0;
      U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(kReplacementChar));
    }
    out.append(reinterpret_cast<const char*>(buf), len);
  }
  return out;
}

std::string NormalizeNfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInternal, "ICU NFC normalizer unavailable");
  }
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
    std::string out;
    source.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) {
    throw InvalidArgumentError("NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool IsDelimiter(char32_t c) {
  if (c >= 0x0F0B && c <= 0x0F14) return true;
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

std::string StripDelimiters(std::string_view text) {
  std::size_t begin = 0;
  std::size_t first_kept = text.size();
  while (begin < text.size()) {
    std::size_t start = begin;
    if (!IsDelimiter(NextScalar(text, begin))) {
      first_kept = start;
      break;
    }
  }
  std::size_t last_end = first_kept;
  std::size_t pos = first_kept;
  while (pos < text.size()) {
    if (!IsDelimiter(NextScalar(text, pos))) last_end = pos;
  }
  return std::string(text.substr(first_kept, last_end - first_kept));
}

std::vector<std::string> DefaultDenyList() {
  return {"##", "\xE2\x96\x81" /* U+2581 */, "\xC4\xA0" /* U+0120 */,
          "[UNK]", "[MASK]", "[CLS]", "[SEP]", "[PAD]",
          "<unk>", "<mask>", "<s>", "</s>", "<pad>"};
}

const TokenPolicy& TokenPolicy::Default() {
  static const TokenPolicy* policy = new TokenPolicy{DefaultDenyList()};
  return *policy;
}

bool IsValidToken(std::string_view candidate, Granularity granularity,
                  const TokenPolicy& policy) {
  if (candidate.empty()) return false;
  for (const std::string& denied : policy.deny_list) {
    if (!denied.empty() && candidate.find(denied) != std::string_view::npos) {
      return false;
    }
  }
  const std::u32string scalars = DecodeUtf8(candidate);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const char32_t c = scalars[i];
    if (c < kTibetanFirst || c > kTibetanLast) return false;
    if (u_charType(static_cast<UChar32>(c)) == U_UNASSIGNED) return false;
    if (!IsTibetanPunctuation(c)) continue;
    const bool internal_tsheg =
        c == kTsheg && i > 0 && i + 1 < scalars.size();
    if (granularity == Granularity::kWord && internal_tsheg) continue;
    return false;
  }
  return true;
}

SegmentedText SegmentSyllables(std::string_view text) {
  SegmentedText seg;
  seg.original = NormalizeNfc(text);
  seg.granularity = Granularity::kSyllable;
  const std::string_view source = seg.original;

  std::size_t pos = 0;
  std::size_t delim_start = 0;
  while (pos < source.size()) {
    std::size_t start = pos;
    if (IsDelimiter(NextScalar(source, pos))) continue;
    std::size_t end = pos;
    while (end < source.size()) {
      std::size_t probe = end;
      if (IsDelimiter(NextScalar(source, probe))) break;
      end = probe;
    }
    TextUnit unit;
    unit.kind = Granularity::kSyllable;
    unit.span = {start, end};
    unit.token = std::string(source.substr(start, end - start));
    unit.leading_delims =
        std::string(source.substr(delim_start, start - delim_start));
    seg.units.push_back(std::move(unit));
    pos = end;
    delim_start = end;
  }
  seg.trailing_delims = std::string(source.substr(delim_start));
  return seg;
}

std::vector<ByteRange> PerSyllableSegmenter::Boundaries(
    std::string_view normalized_text) const {
  const SegmentedText syllables = SegmentSyllables(normalized_text);
  std::vector<ByteRange> ranges;
  ranges.reserve(syllables.units.size());
  for (const TextUnit& unit : syllables.units) ranges.push_back(unit.span);
  return ranges;
}

LexiconSegmenter::LexiconSegmenter(const std::vector<std::string>& words) {
  for (const std::string& word : words) {
    const SegmentedText parts = SegmentSyllables(word);
    if (parts.empty()) continue;
    std::string key;
    for (std::size_t i = 0; i < parts.units.size(); ++i) {
      if (i > 0) key += kTshegUtf8;
      key += parts.units[i].token;
    }
    max_syllables_ = std::max(max_syllables_, parts.units.size());
    words_.insert(std::move(key));
  }
}

LexiconSegmenter LexiconSegmenter::FromFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  if (in.bad()) throw IoError("error reading lexicon file: " + path.string());
  return LexiconSegmenter(words);
}

std::vector<ByteRange> LexiconSegmenter::Boundaries(
    std::string_view normalized_text) const {
  const SegmentedText syllables = SegmentSyllables(normalized_text);
  const std::vector<TextUnit>& units = syllables.units;
  std::vector<ByteRange> ranges;
  std::size_t i = 0;
  while (i < units.size()) {
    std::size_t best_end = i;
    std::string key = units[i].token;
    for (std::size_t j = i + 1;
         j < units.size() && j - i < max_syllables_; ++j) {
      if (units[j].leading_delims != kTshegUtf8) break;
      key += kTshegUtf8;
      key += units[j].token;
      if (words_.contains(key)) best_end = j;
    }
    ranges.push_back({units[i].span.begin, units[best_end].span.end});
    i = best_end + 1;
  }
  return ranges;
}

SegmentedText SegmentWords(std::string_view text,
                           const WordSegmenter& segmenter) {
  SegmentedText seg;
  seg.original = NormalizeNfc(text);
  seg.granularity = Granularity::kWord;
  const std::string_view source = seg.original;

  const std::vector<ByteRange> ranges = segmenter.Boundaries(source);
  std::size_t cursor = 0;
  for (const ByteRange& range : ranges) {
    if (range.begin < cursor || range.end <= range.begin ||
        range.end > source.size()) {
      throw SegmenterError("word boundaries overlap, are unsorted or empty");
    }
    if (!IsScalarBoundary(source, range.begin) ||
        !IsScalarBoundary(source, range.end)) {
      throw SegmenterError("word boundary splits a Unicode scalar value");
    }
    const std::string_view gap = source.substr(cursor, range.begin - cursor);
    if (!OnlyDelimiters(gap)) {
      throw SegmenterError("word boundaries do not cover the text");
    }
    const std::string_view token = source.substr(range.begin, range.size());
    if (IsDelimiter(FirstScalar(token)) || IsDelimiter(LastScalar(token))) {
      throw SegmenterError("word boundary starts or ends on a delimiter");
    }
    TextUnit unit;
    unit.kind = Granularity::kWord;
    unit.span = range;
    unit.token = std::string(token);
    unit.leading_delims = std::string(gap);
    seg.units.push_back(std::move(unit));
    cursor = range.end;
  }
  const std::string_view tail = source.substr(cursor);
  if (!OnlyDelimiters(tail)) {
    throw SegmenterError("word boundaries do not cover the text");
  }
  seg.trailing_delims = std::string(tail);
  return seg;
}

SegmentedText Segment(std::string_view text, Granularity granularity,
                      const WordSegmenter* segmenter) {
  if (granularity == Granularity::kSyllable) return SegmentSyllables(text);
  if (segmenter != nullptr) return SegmentWords(text, *segmenter);
  return SegmentWords(text, PerSyllableSegmenter());
}

std::string Reconstruct(const SegmentedText& seg) {
  return Render(seg, seg.units.size(), {});
}

std::string Substitute(const SegmentedText& seg, std::size_t index,
                       std::string_view replacement,
                       const TokenPolicy& policy) {
  CheckIndex(seg, index);
  if (!IsValidToken(replacement, seg.granularity, policy)) {
    throw InvalidReplacementError("replacement is not a valid " +
                                  std::string(GranularityName(seg.granularity)) +
                                  " token");
  }
  return Render(seg, index, replacement);
}

std::string SubstituteLiteral(const SegmentedText& seg, std::size_t index,
                              std::string_view literal) {
  CheckIndex(seg, index);
  return Render(seg, index, literal);
}

std::size_t Levenshtein(std::string_view a, std::string_view b) {
  std::u32string s = DecodeUtf8(a);
  std::u32string t = DecodeUtf8(b);
  if (s.size() < t.size()) std::swap(s, t);
  std::vector<std::size_t> row(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t above = row[j];
      if (s[i - 1] == t[j - 1]) {
        row[j] = diagonal;
      } else {
        row[j] = 1 + std::min({above, row[j - 1], diagonal});
      }
      diagonal = above;
    }
  }
  return row[t.size()];
}

}  // namespace tibadv
