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

#ifndef TIBADV_ERROR_HPP_
#define TIBADV_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tibadv {

// Numeric values are mirrored by tibadv_status in tibadv.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIndexOutOfRange = 2,
  kInvalidReplacement = 3,
  kSegmenter = 4,
  kTransport = 5,
  kProtocol = 6,
  kModel = 7,
  kEmptyInput = 8,
  kMissingGold = 9,
  kIo = 10,
  kDataset = 11,
  kCancelled = 12,
  kInternal = 13,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Failures talking to a model oracle. Attacks catch these and record the
// sample as errored; campaigns keep going.
class OracleError : public Error {
 public:
  using Error::Error;
};

class TransportError : public OracleError {
 public:
  explicit TransportError(const std::string& message)
      : OracleError(ErrorCode::kTransport, message) {}
};

class ProtocolError : public OracleError {
 public:
  explicit ProtocolError(const std::string& message)
      : OracleError(ErrorCode::kProtocol, message) {}
};

class ModelError : public OracleError {
 public:
  explicit ModelError(const std::string& message)
      : OracleError(ErrorCode::kModel, message) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& message)
      : Error(ErrorCode::kInvalidArgument, message) {}
};

class IndexOutOfRangeError : public Error {
 public:
  explicit IndexOutOfRangeError(const std::string& message)
      : Error(ErrorCode::kIndexOutOfRange, message) {}
};

class InvalidReplacementError : public Error {
 public:
  explicit InvalidReplacementError(const std::string& message)
      : Error(ErrorCode::kInvalidReplacement, message) {}
};

class SegmenterError : public Error {
 public:
  explicit SegmenterError(const std::string& message)
      : Error(ErrorCode::kSegmenter, message) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message)
      : Error(ErrorCode::kEmptyInput, message) {}
};

class MissingGoldError : public Error {
 public:
  explicit MissingGoldError(const std::string& message)
      : Error(ErrorCode::kMissingGold, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCode::kIo, message) {}
};

class DatasetError : public Error {
 public:
  explicit DatasetError(const std::string& message)
      : Error(ErrorCode::kDataset, message) {}
};

}  // namespace tibadv

#endif  // TIBADV_ERROR_HPP_
