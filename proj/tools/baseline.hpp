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

// Random-substitution baseline: units are visited in a random order and each
// receives a candidate drawn uniformly from the filtered fill list. Stopping
// rule, query accounting and outcome format match the greedy attack.

#ifndef TIBADV_TOOLS_BASELINE_HPP_
#define TIBADV_TOOLS_BASELINE_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "tibadv/tibadv.h"

namespace tibadv_tools {

class RandomBaseline {
 public:
  // Handles are borrowed and must outlive the baseline. `segmenter` may be
  // NULL.
  RandomBaseline(const tibadv_classifier* classifier,
                 const tibadv_masked_lm* masked_lm,
                 const tibadv_segmenter* segmenter,
                 const tibadv_attack_config& config, std::uint64_t seed);

  // Outcome JSON for one text. The draw sequence depends only on the seed
  // and `sample_index`, so results do not depend on scheduling.
  std::string Run(std::string_view text, std::size_t sample_index) const;

  // tibadv_attack_fn adapter; `user` is a RandomBaseline*.
  static tibadv_status Callback(void* user, const char* sample_id,
                                size_t sample_index, const char* text,
                                char** outcome_json);

 private:
  const tibadv_classifier* classifier_;
  const tibadv_masked_lm* masked_lm_;
  const tibadv_segmenter* segmenter_;
  tibadv_attack_config config_;
  std::uint64_t seed_;
};

}  // namespace tibadv_tools

#endif  // TIBADV_TOOLS_BASELINE_HPP_
