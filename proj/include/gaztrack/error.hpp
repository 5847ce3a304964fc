// Copyright 2026 The gaztrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZTRACK_ERROR_HPP
#define GAZTRACK_ERROR_HPP

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaztrack {

// Numeric values are part of the C ABI (see gaztrack.h, gt_status).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kMalformedRecord = 3,
  kDuplicateId = 4,
  kSyntaxError = 5,
  kDuplicateTheme = 6,
  kUnknownClass = 7,
  kMissingField = 8,
  kBadDate = 9,
  kEmptyDataset = 10,
  kEmptyVocabulary = 11,
  kNoExamples = 12,
  kZeroAlpha = 13,
  kBadK = 14,
  kEmptyMatrix = 15,
  kMissingPrediction = 16,
  kDuplicateDocument = 17,
  kNotPending = 18,
  kEmptyField = 19,
  kInsufficientFeedback = 20,
  kNotFound = 21,
  kEmptyFold = 22,
  kInternal = 99,
};

/// Stable identifier for an error code, e.g. "DuplicateId".
std::string_view error_name(ErrorCode code);

/// The single exception type thrown by the library. `detail` carries the
/// structured payload of the error variant (row, column, offending value).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string const& message,
        nlohmann::json detail = nlohmann::json::object());

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }
  nlohmann::json const& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

}  // namespace gaztrack

#endif  // GAZTRACK_ERROR_HPP
