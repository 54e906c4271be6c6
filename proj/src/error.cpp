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

#include "tibadv/error.hpp"

namespace tibadv {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::kInvalidReplacement:
      return "InvalidReplacement";
    case ErrorCode::kSegmenter:
      return "SegmenterError";
    case ErrorCode::kTransport:
      return "TransportError";
    case ErrorCode::kProtocol:
      return "ProtocolError";
    case ErrorCode::kModel:
      return "ModelError";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kMissingGold:
      return "MissingGold";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kDataset:
      return "DatasetError";
    case ErrorCode::kCancelled:
      return "Cancelled";
    case ErrorCode::kInternal:
      return "Internal";
  }
  return "Unknown";
}

}  // namespace tibadv
