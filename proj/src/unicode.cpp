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

#include "gaztrack/unicode.hpp"

#include "gaztrack/error.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>
#include <unicode/unistr.h>

namespace gaztrack::unicode {
namespace {

icu::UnicodeString from_utf8(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string to_utf8(icu::UnicodeString const& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

icu::Normalizer2 const& instance(icu::Normalizer2 const* (*get)(UErrorCode&)) {
  UErrorCode status = U_ZERO_ERROR;
  auto const* n = get(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error(ErrorCode::kInternal,
                std::string("ICU normalizer unavailable: ") +
                    u_errorName(status));
  }
  return *n;
}

icu::UnicodeString normalize_with(icu::Normalizer2 const& n,
                                  icu::UnicodeString const& s) {
  UErrorCode status = U_ZERO_ERROR;
  auto out = n.normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInternal,
                std::string("ICU normalization failed: ") + u_errorName(status));
  }
  return out;
}

bool is_space_like(UChar32 c) {
  return u_isUWhiteSpace(c) || u_charType(c) == U_CONTROL_CHAR;
}

}  // namespace

std::string to_nfc(std::string_view utf8) {
  static auto const& nfc = instance(&icu::Normalizer2::getNFCInstance);
  return to_utf8(normalize_with(nfc, from_utf8(utf8)));
}

std::string fold(std::string_view utf8) {
  static auto const& nfkc_cf = instance(&icu::Normalizer2::getNFKCCasefoldInstance);
  static auto const& nfd = instance(&icu::Normalizer2::getNFDInstance);
  static auto const& nfc = instance(&icu::Normalizer2::getNFCInstance);

  auto decomposed = normalize_with(nfd, normalize_with(nfkc_cf, from_utf8(utf8)));
  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) stripped.append(c);
    i += U16_LENGTH(c);
  }
  return to_utf8(normalize_with(nfc, stripped));
}

std::vector<std::string> fold_words(std::string_view utf8) {
  auto folded = from_utf8(fold(utf8));
  std::vector<std::string> words;
  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) {
      words.push_back(to_utf8(current));
      current.remove();
    }
  };
  for (int32_t i = 0; i < folded.length();) {
    UChar32 c = folded.char32At(i);
    if (u_isalnum(c)) {
      current.append(c);
    } else {
      flush();
    }
    i += U16_LENGTH(c);
  }
  flush();
  return words;
}

std::vector<WordSpan> fold_words_with_offsets(std::string_view utf8) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  auto const n = static_cast<int32_t>(utf8.size());
  auto const* bytes = reinterpret_cast<uint8_t const*>(utf8.data());
  std::size_t run_begin = 0;
  bool in_run = false;
  auto flush = [&](std::size_t run_end) {
    for (auto& w : fold_words(utf8.substr(run_begin, run_end - run_begin))) {
      spans.push_back({std::move(w), run_begin, run_end});
    }
    in_run = false;
  };
  while (i < utf8.size()) {
    auto const start = i;
    int32_t pos = static_cast<int32_t>(i);
    UChar32 c;
    U8_NEXT(bytes, pos, n, c);
    i = static_cast<std::size_t>(pos);
    // Marks continue a word so "a" + U+0301 stays one run.
    bool word_char = c >= 0 && (u_isalnum(c) || (in_run && u_charType(c) == U_NON_SPACING_MARK));
    if (word_char && !in_run) {
      run_begin = start;
      in_run = true;
    } else if (!word_char && in_run) {
      flush(start);
    }
  }
  if (in_run) flush(utf8.size());
  return spans;
}

std::string collapse_space(std::string_view utf8) {
  auto s = from_utf8(utf8);
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    if (is_space_like(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) out.append(UChar32{' '});
    pending_space = false;
    out.append(c);
  }
  return to_utf8(out);
}

std::string to_upper(std::string_view utf8) {
  auto s = from_utf8(utf8);
  s.toUpper();
  return to_utf8(s);
}

}  // namespace gaztrack::unicode
