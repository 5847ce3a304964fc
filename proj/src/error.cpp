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

#include "gaztrack/error.hpp"

namespace gaztrack {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kDuplicateTheme: return "DuplicateTheme";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kBadDate: return "BadDate";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kEmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::kNoExamples: return "NoExamples";
    case ErrorCode::kZeroAlpha: return "ZeroAlpha";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kDuplicateDocument: return "DuplicateDocument";
    case ErrorCode::kNotPending: return "NotPending";
    case ErrorCode::kEmptyField: return "EmptyField";
    case ErrorCode::kInsufficientFeedback: return "InsufficientFeedback";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kEmptyFold: return "EmptyFold";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Internal";
}

Error::Error(ErrorCode code, std::string const& message, nlohmann::json detail)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

}  // namespace gaztrack
