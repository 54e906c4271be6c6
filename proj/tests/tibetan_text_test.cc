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

#include <gtest/gtest.h>

#include <fstream>

#include "test_util.hpp"
#include "tibadv/error.hpp"

namespace tibadv {
namespace {

using ::tibadv::testing::DpLevenshtein;
using ::tibadv::testing::Join;
using ::tibadv::testing::kShad;
using ::tibadv::testing::kTsheg;
using ::tibadv::testing::Rng;
using ::tibadv::testing::Utf8;

// U+0F40 U+0F42, U+0F41
const std::string kKaGa = "\xE0\xBD\x80\xE0\xBD\x82";
const std::string kKha = "\xE0\xBD\x81";

std::vector<std::string> Tokens(const SegmentedText& seg) {
  std::vector<std::string> out;
  for (const TextUnit& unit : seg.units) out.push_back(unit.token);
  return out;
}

// Returns a ranges-only segmenter for SegmentWords error paths.
class FixedSegmenter : public WordSegmenter {
 public:
  explicit FixedSegmenter(std::vector<ByteRange> ranges)
      : ranges_(std::move(ranges)) {}
  std::vector<ByteRange> Boundaries(std::string_view) const override {
    return ranges_;
  }

 private:
  std::vector<ByteRange> ranges_;
};

TEST(SegmentSyllablesTest, SplitsOnTsheg) {
  const SegmentedText seg = SegmentSyllables(kKaGa + kTsheg + kKha);
  ASSERT_EQ(seg.size(), 2u);
  EXPECT_EQ(seg.units[0].token, kKaGa);
  EXPECT_EQ(seg.units[0].leading_delims, "");
  EXPECT_EQ(seg.units[1].token, kKha);
  EXPECT_EQ(seg.units[1].leading_delims, kTsheg);
  EXPECT_EQ(seg.units[1].span, (ByteRange{9, 12}));
  EXPECT_EQ(seg.trailing_delims, "");
  EXPECT_EQ(seg.granularity, Granularity::kSyllable);
}

TEST(SegmentSyllablesTest, EmptyText) {
  const SegmentedText seg = SegmentSyllables("");
  EXPECT_TRUE(seg.empty());
  EXPECT_EQ(seg.trailing_delims, "");
  EXPECT_EQ(Reconstruct(seg), "");
}

TEST(SegmentSyllablesTest, TrailingTshegIsPreserved) {
  const std::string text = kKaGa + kTsheg;
  const SegmentedText seg = SegmentSyllables(text);
  ASSERT_EQ(seg.size(), 1u);
  EXPECT_EQ(seg.units[0].token, kKaGa);
  EXPECT_EQ(seg.trailing_delims, kTsheg);
  EXPECT_EQ(Reconstruct(seg), text);
}

TEST(SegmentSyllablesTest, ShadWhitespaceAndNewlinesAreDelimiters) {
  const std::string text = " " + kKha + kTsheg + kShad + "\n" + kKaGa + " \t";
  const SegmentedText seg = SegmentSyllables(text);
  EXPECT_EQ(Tokens(seg), (std::vector<std::string>{kKha, kKaGa}));
  EXPECT_EQ(seg.units[0].leading_delims, " ");
  EXPECT_EQ(seg.units[1].leading_delims, kTsheg + kShad + "\n");
  EXPECT_EQ(seg.trailing_delims, " \t");
  EXPECT_EQ(Reconstruct(seg), text);
}

TEST(SegmentSyllablesTest, OnlyDelimitersYieldsNoUnits) {
  const std::string text = kTsheg + " " + kShad;
  const SegmentedText seg = SegmentSyllables(text);
  EXPECT_TRUE(seg.empty());
  EXPECT_EQ(seg.trailing_delims, text);
}

TEST(SegmentSyllablesTest, NormalizesToNfc) {
  // U+0F73 is excluded from composition; NFC yields U+0F71 U+0F72.
  const std::string raw = Utf8(0x0F40) + Utf8(0x0F73);
  const std::string nfc = Utf8(0x0F40) + Utf8(0x0F71) + Utf8(0x0F72);
  const SegmentedText seg = SegmentSyllables(raw);
  EXPECT_EQ(seg.original, nfc);
  EXPECT_EQ(Reconstruct(seg), nfc);
  EXPECT_EQ(NormalizeNfc(nfc), nfc);
}

TEST(SegmentWordsTest, SingleSyllableAnySegmenter) {
  LexiconSegmenter lexicon({kKaGa + kTsheg + kKha});
  for (const WordSegmenter* segmenter :
       std::vector<const WordSegmenter*>{&lexicon}) {
    const SegmentedText seg = SegmentWords(kKha, *segmenter);
    ASSERT_EQ(seg.size(), 1u);
    EXPECT_EQ(seg.units[0].token, kKha);
    EXPECT_EQ(seg.units[0].kind, Granularity::kWord);
  }
  const SegmentedText fallback = SegmentWords(kKha, PerSyllableSegmenter());
  EXPECT_EQ(Tokens(fallback), std::vector<std::string>{kKha});
}

TEST(SegmentWordsTest, LongestMatchJoinsLexiconWord) {
  // Scan by hand: at syllable 0 the only continuation is syllable 1 joined
  // by one Tsheg, and "KaGa་Kha" is in the lexicon, so both form one word.
  LexiconSegmenter lexicon({kKaGa + kTsheg + kKha, kKha + kTsheg + kKaGa});
  const std::string text = kKaGa + kTsheg + kKha;
  const SegmentedText seg = SegmentWords(text, lexicon);
  ASSERT_EQ(seg.size(), 1u);
  EXPECT_EQ(seg.units[0].token, text);
  EXPECT_EQ(seg.granularity, Granularity::kWord);
  EXPECT_EQ(Reconstruct(seg), text);
}

TEST(SegmentWordsTest, PrefersLongerEntries) {
  const std::string a = Utf8(0x0F40);
  const std::string b = Utf8(0x0F41);
  const std::string c = Utf8(0x0F42);
  LexiconSegmenter lexicon({Join({a, b}), Join({a, b, c})});
  const SegmentedText seg = SegmentWords(Join({a, b, c, a, b}) + kShad, lexicon);
  EXPECT_EQ(Tokens(seg),
            (std::vector<std::string>{Join({a, b, c}), Join({a, b})}));
  EXPECT_EQ(seg.units[1].leading_delims, kTsheg);
  EXPECT_EQ(seg.trailing_delims, kShad);
}

TEST(SegmentWordsTest, EntriesDoNotSpanOtherDelimiters) {
  const std::string a = Utf8(0x0F40);
  const std::string b = Utf8(0x0F41);
  LexiconSegmenter lexicon({Join({a, b})});
  const SegmentedText seg = SegmentWords(a + " " + b, lexicon);
  EXPECT_EQ(Tokens(seg), (std::vector<std::string>{a, b}));
}

TEST(SegmentWordsTest, RejectsBoundarySplittingScalar) {
  const std::string text = kKaGa;  // two 3-byte scalars
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 4}, {4, 6}})),
               SegmenterError);
}

TEST(SegmentWordsTest, RejectsOverlapAndGaps) {
  const std::string text = kKaGa + kTsheg + kKha;  // bytes 0-6, 6-9, 9-12
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 6}, {3, 12}})),
               SegmenterError);
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 6}})), SegmenterError);
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 3}, {9, 12}})),
               SegmenterError);
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 9}, {9, 12}})),
               SegmenterError);
  EXPECT_THROW(SegmentWords(text, FixedSegmenter({{0, 0}, {0, 12}})),
               SegmenterError);
  // Words may be adjacent without a delimiter between them.
  const SegmentedText ok =
      SegmentWords(text, FixedSegmenter({{0, 3}, {3, 6}, {9, 12}}));
  EXPECT_EQ(ok.size(), 3u);
  EXPECT_EQ(Reconstruct(ok), text);
}

TEST(LexiconSegmenterTest, FromFileSkipsCommentsAndBlankLines) {
  const auto path = testing::TempPath("lexicon_test.txt");
  {
    std::ofstream out(path);
    out << "# comment\n\n" << kKaGa << kTsheg << kKha << kTsheg << "\r\n";
  }
  const LexiconSegmenter lexicon = LexiconSegmenter::FromFile(path);
  EXPECT_EQ(lexicon.size(), 1u);
  const SegmentedText seg = SegmentWords(kKaGa + kTsheg + kKha, lexicon);
  EXPECT_EQ(seg.size(), 1u);
  EXPECT_THROW(LexiconSegmenter::FromFile(testing::TempPath("missing.txt")),
               IoError);
}

TEST(SubstituteTest, IdentityReturnsOriginal) {
  const std::string text = kKaGa + kTsheg + kKha + kShad;
  const SegmentedText seg = SegmentSyllables(text);
  EXPECT_EQ(Substitute(seg, 1, kKha), text);
}

TEST(SubstituteTest, MiddleSyllableKeepsBothTshegs) {
  const std::string a = Utf8(0x0F40);
  const std::string b = Utf8(0x0F41);
  const std::string c = Utf8(0x0F42);
  const std::string d = Utf8(0x0F44) + Utf8(0x0F72);
  const SegmentedText seg = SegmentSyllables(Join({a, b, c}));
  EXPECT_EQ(Substitute(seg, 1, d), Join({a, d, c}));
  EXPECT_EQ(seg.units[1].token, b);  // not mutated
}

TEST(SubstituteTest, Errors) {
  const SegmentedText seg = SegmentSyllables(kKaGa + kTsheg + kKha);
  EXPECT_THROW(Substitute(seg, 2, kKha), IndexOutOfRangeError);
  EXPECT_THROW(Substitute(seg, 0, kKha + " " + kKha), InvalidReplacementError);
  EXPECT_THROW(Substitute(seg, 0, kKha + kTsheg + kKha),
               InvalidReplacementError);
  EXPECT_THROW(Substitute(seg, 0, ""), InvalidReplacementError);
  EXPECT_THROW(Substitute(seg, 0, "[UNK]"), InvalidReplacementError);
  EXPECT_EQ(SubstituteLiteral(seg, 0, "[UNK]"), "[UNK]" + kTsheg + kKha);
}

TEST(SubstituteTest, WordGranularityAllowsInternalTsheg) {
  const SegmentedText seg = SegmentWords(kKha, PerSyllableSegmenter());
  const std::string word = kKaGa + kTsheg + kKha;
  EXPECT_EQ(Substitute(seg, 0, word), word);
}

TEST(ReconstructTest, SubstitutionIsLocal) {
  const std::string a = Utf8(0x0F40);
  const std::string b = Utf8(0x0F41) + Utf8(0x0F74);
  const std::string text = " " + Join({a, b, a}) + kShad + "\n";
  const SegmentedText seg = SegmentSyllables(text);
  const std::string replaced = Substitute(seg, 1, kKaGa);
  const ByteRange span = seg.units[1].span;
  EXPECT_EQ(replaced.substr(0, span.begin), text.substr(0, span.begin));
  EXPECT_EQ(replaced.substr(span.begin + kKaGa.size()), text.substr(span.end));
}

TEST(IsValidTokenTest, Rules) {
  EXPECT_TRUE(IsValidToken(kKaGa, Granularity::kSyllable));
  EXPECT_TRUE(IsValidToken(kKaGa, Granularity::kWord));
  EXPECT_FALSE(IsValidToken("", Granularity::kSyllable));
  EXPECT_FALSE(IsValidToken("[UNK]", Granularity::kSyllable));
  EXPECT_FALSE(IsValidToken("[UNK]", Granularity::kWord));
  EXPECT_FALSE(IsValidToken(kKha + "a", Granularity::kSyllable));
  EXPECT_FALSE(IsValidToken("##" + kKha, Granularity::kWord));

  const std::string two = kKaGa + kTsheg + kKha;
  EXPECT_FALSE(IsValidToken(two, Granularity::kSyllable));
  EXPECT_TRUE(IsValidToken(two, Granularity::kWord));
  // Only internal Tshegs are allowed.
  EXPECT_FALSE(IsValidToken(kKha + kTsheg, Granularity::kWord));
  EXPECT_FALSE(IsValidToken(kTsheg + kKha, Granularity::kWord));
  EXPECT_FALSE(IsValidToken(kKha + kShad + kKha, Granularity::kWord));
  // Unassigned code point inside the block.
  EXPECT_FALSE(IsValidToken(Utf8(0x0F48), Granularity::kSyllable));
}

TEST(IsValidTokenTest, DenyListIsConfigurable) {
  TokenPolicy policy{{kKha}};
  EXPECT_FALSE(IsValidToken(kKaGa + kKha, Granularity::kSyllable, policy));
  EXPECT_TRUE(IsValidToken(kKaGa, Granularity::kSyllable, policy));
}

TEST(StripDelimitersTest, StripsBothEnds) {
  EXPECT_EQ(StripDelimiters(kTsheg + " " + kKha + kTsheg + kKha + kShad),
            kKha + kTsheg + kKha);
  EXPECT_EQ(StripDelimiters(kTsheg), "");
  EXPECT_EQ(StripDelimiters(""), "");
}

TEST(LevenshteinTest, Examples) {
  EXPECT_EQ(Levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(Levenshtein(kKaGa, kKaGa), 0u);
  EXPECT_EQ(Levenshtein("", kKaGa + kTsheg + kKha), 4u);
  EXPECT_EQ(Levenshtein(kKaGa, ""), 2u);
  // Letters are scalar values, not bytes.
  EXPECT_EQ(Levenshtein(kKha, kKaGa), 2u);
}

TEST(LevenshteinTest, MatchesDpOracleOnRandomPairs) {
  Rng rng(7);
  const std::vector<char32_t> alphabet = {0x0F40, 0x0F41, 0x0F42, 0x0F0B,
                                          0x0F72, 'a', 'b'};
  for (int trial = 0; trial < 300; ++trial) {
    std::string a;
    std::string b;
    for (std::size_t i = rng.Below(9); i > 0; --i) a += Utf8(alphabet[rng.Below(7)]);
    for (std::size_t i = rng.Below(9); i > 0; --i) b += Utf8(alphabet[rng.Below(7)]);
    ASSERT_EQ(Levenshtein(a, b), DpLevenshtein(a, b)) << a << " / " << b;
    ASSERT_EQ(Levenshtein(a, b), Levenshtein(b, a));
  }
}

TEST(SegmentationPropertyTest, FuzzedRoundTripAndDelimiterFreeTokens) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t i = rng.Below(20); i > 0; --i) {
      const std::size_t pick = rng.Below(10);
      if (pick == 0) {
        text += " ";
      } else if (pick == 1) {
        text += kTsheg;
      } else {
        text += Utf8(0x0F00 + static_cast<char32_t>(rng.Below(0x100)));
      }
    }
    const SegmentedText seg = SegmentSyllables(text);
    ASSERT_EQ(Reconstruct(seg), NormalizeNfc(text));
    std::size_t last_end = 0;
    for (const TextUnit& unit : seg.units) {
      ASSERT_FALSE(unit.token.empty());
      ASSERT_GE(unit.span.begin, last_end);
      last_end = unit.span.end;
      for (char32_t c : DecodeUtf8(unit.token)) ASSERT_FALSE(IsDelimiter(c));
    }
    const SegmentedText words = SegmentWords(text, PerSyllableSegmenter());
    ASSERT_EQ(Reconstruct(words), seg.original);
  }
}

TEST(GranularityTest, NamesRoundTrip) {
  EXPECT_EQ(ParseGranularity("word"), Granularity::kWord);
  EXPECT_EQ(ParseGranularity(GranularityName(Granularity::kSyllable)),
            Granularity::kSyllable);
  EXPECT_FALSE(ParseGranularity("letter").has_value());
}

}  // namespace
}  // namespace tibadv
