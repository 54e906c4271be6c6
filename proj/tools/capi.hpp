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

// Owning wrappers around the C API handles for the command-line tools.

#ifndef TIBADV_TOOLS_CAPI_HPP_
#define TIBADV_TOOLS_CAPI_HPP_

#include <memory>
#include <stdexcept>
#include <string>

#include "tibadv/tibadv.h"

namespace tibadv_tools {

class StatusError : public std::runtime_error {
 public:
  StatusError(tibadv_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  tibadv_status status() const { return status_; }

 private:
  tibadv_status status_;
};

inline void Check(tibadv_status status, const std::string& what) {
  if (status == TIBADV_OK) return;
  std::string message = what + ": " + tibadv_status_name(status);
  const std::string detail = tibadv_last_error_message();
  if (!detail.empty()) message += ": " + detail;
  throw StatusError(status, message);
}

struct StringDeleter {
  void operator()(char* s) const { tibadv_string_free(s); }
};
struct ClassifierDeleter {
  void operator()(tibadv_classifier* h) const { tibadv_classifier_close(h); }
};
struct MaskedLmDeleter {
  void operator()(tibadv_masked_lm* h) const { tibadv_masked_lm_close(h); }
};
struct SegmenterDeleter {
  void operator()(tibadv_segmenter* h) const { tibadv_segmenter_close(h); }
};
struct SegmentationDeleter {
  void operator()(tibadv_segmentation* h) const {
    tibadv_segmentation_free(h);
  }
};

using OwnedString = std::unique_ptr<char, StringDeleter>;
using ClassifierPtr = std::unique_ptr<tibadv_classifier, ClassifierDeleter>;
using MaskedLmPtr = std::unique_ptr<tibadv_masked_lm, MaskedLmDeleter>;
using SegmenterPtr = std::unique_ptr<tibadv_segmenter, SegmenterDeleter>;
using SegmentationPtr =
    std::unique_ptr<tibadv_segmentation, SegmentationDeleter>;

// Takes ownership of a library-allocated string.
inline std::string TakeString(char* raw) {
  OwnedString owned(raw);
  return owned ? std::string(owned.get()) : std::string();
}

}  // namespace tibadv_tools

#endif  // TIBADV_TOOLS_CAPI_HPP_
