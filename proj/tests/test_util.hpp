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

// Test-only helpers and independent oracles. Nothing here calls into the
// code paths it is used to check.

#ifndef TIBADV_TESTS_TEST_UTIL_HPP_
#define TIBADV_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tibadv::testing {

inline const std::string kTsheg = "\xE0\xBC\x8B";  // U+0F0B
inline const std::string kShad = "\xE0\xBC\x8D";   // U+0F0D

inline std::string Join(const std::vector<std::string>& syllables,
                        const std::string& sep = kTsheg) {
  std::string out;
  for (std::size_t i = 0; i < syllables.size(); ++i) {
    if (i > 0) out += sep;
    out += syllables[i];
  }
  return out;
}

// Minimal UTF-8 encoder/decoder for well-formed input; independent of ICU.
inline std::string Utf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

inline std::vector<char32_t> Scalars(const std::string& s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    char32_t c = len == 1   ? b
                 : len == 2 ? (b & 0x1F)
                 : len == 3 ? (b & 0x0F)
                            : (b & 0x07);
    for (int j = 1; j < len; ++j) {
      c = (c << 6) | (static_cast<unsigned char>(s[i + j]) & 0x3F);
    }
    out.push_back(c);
    i += len;
  }
  return out;
}

// Full (m+1)x(n+1) table straight from the recurrence:
//   D(i,j) = max(i,j) if min(i,j) = 0
//          = D(i-1,j-1) if a_i = b_j
//          = 1 + min(D(i-1,j), D(i,j-1), D(i-1,j-1)) otherwise
inline std::size_t DpLevenshtein(const std::string& a, const std::string& b) {
  const std::vector<char32_t> x = Scalars(a);
  const std::vector<char32_t> y = Scalars(b);
  std::vector<std::vector<std::size_t>> d(
      x.size() + 1, std::vector<std::size_t>(y.size() + 1, 0));
  for (std::size_t i = 0; i <= x.size(); ++i) {
    for (std::size_t j = 0; j <= y.size(); ++j) {
      if (std::min(i, j) == 0) {
        d[i][j] = std::max(i, j);
      } else if (x[i - 1] == y[j - 1]) {
        d[i][j] = d[i - 1][j - 1];
      } else {
        d[i][j] = 1 + std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
      }
    }
  }
  return d[x.size()][y.size()];
}

// Closed form of the unigram mock classifier over an explicit syllable list:
// P(l) = (1 + w_l) / (L + sum w).
struct MockModel {
  std::size_t num_labels = 2;
  std::map<std::string, std::pair<std::size_t, double>> markers;

  double Prob(const std::vector<std::string>& syllables,
              std::size_t label) const {
    std::vector<double> w(num_labels, 0.0);
    for (const std::string& s : syllables) {
      auto it = markers.find(s);
      if (it != markers.end()) w[it->second.first] += it->second.second;
    }
    double total = static_cast<double>(num_labels);
    for (double v : w) total += v;
    return (1.0 + w[label]) / total;
  }

  std::size_t Argmax(const std::vector<std::string>& syllables) const {
    std::size_t best = 0;
    for (std::size_t l = 1; l < num_labels; ++l) {
      if (Prob(syllables, l) > Prob(syllables, best)) best = l;
    }
    return best;
  }
};

// Straight-line restatement of the greedy attack over syllable lists, for a
// unigram classifier and a context-independent fill table. Texts are
// syllables joined by single Tshegs.
struct ReferencePlanEntry {
  std::size_t index = 0;
  std::string token;
  double delta_p = 0.0;
  double saliency = 0.0;
  double score = 0.0;
};

struct ReferenceResult {
  std::size_t label = 0;
  std::vector<ReferencePlanEntry> plan;
  bool success = false;
  std::vector<std::string> final_syllables;
  std::size_t substitutions = 0;
  std::size_t queries = 0;
};

inline ReferenceResult ReferenceAttack(
    const MockModel& model,
    const std::vector<std::pair<std::string, double>>& table,
    const std::vector<std::string>& syllables, std::size_t k,
    const std::string& unk = "[UNK]") {
  ReferenceResult r;
  r.label = model.Argmax(syllables);
  const double p = model.Prob(syllables, r.label);
  r.queries = 1;

  std::vector<std::pair<std::string, double>> sorted = table;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<double> saliency;
  for (std::size_t i = 0; i < syllables.size(); ++i) {
    std::vector<std::string> masked = syllables;
    masked[i] = unk;
    saliency.push_back(p - model.Prob(masked, r.label));
    ++r.queries;
  }
  for (std::size_t i = 0; i < syllables.size(); ++i) {
    std::vector<std::string> fills;
    for (const auto& [token, weight] : sorted) {
      if (fills.size() == k) break;
      if (token != syllables[i]) fills.push_back(token);
    }
    if (fills.empty()) continue;
    ReferencePlanEntry entry{i, "", -1e300, saliency[i], 0.0};
    for (const std::string& fill : fills) {
      std::vector<std::string> x = syllables;
      x[i] = fill;
      const double gain = p - model.Prob(x, r.label);
      ++r.queries;
      if (gain > entry.delta_p) {
        entry.delta_p = gain;
        entry.token = fill;
      }
    }
    r.plan.push_back(entry);
  }
  if (!r.plan.empty()) {
    double max = r.plan[0].saliency;
    for (const auto& e : r.plan) max = std::max(max, e.saliency);
    double z = 0.0;
    for (const auto& e : r.plan) z += std::exp(e.saliency - max);
    for (auto& e : r.plan) e.score = std::exp(e.saliency - max) / z * e.delta_p;
  }
  std::sort(r.plan.begin(), r.plan.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.delta_p != b.delta_p) return a.delta_p > b.delta_p;
    return a.index < b.index;
  });

  r.final_syllables = syllables;
  for (const auto& e : r.plan) {
    r.final_syllables[e.index] = e.token;
    ++r.substitutions;
    ++r.queries;
    if (model.Argmax(r.final_syllables) != r.label) {
      r.success = true;
      break;
    }
  }
  if (!r.success) r.final_syllables = syllables;
  return r;
}

// Deterministic draws that do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t Below(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }
  double Unit() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::filesystem::path TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "tibadv_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace tibadv::testing

#endif  // TIBADV_TESTS_TEST_UTIL_HPP_
