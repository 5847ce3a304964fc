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

#ifndef GAZTRACK_UNICODE_HPP
#define GAZTRACK_UNICODE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 text helpers. Invalid byte sequences are replaced by U+FFFD.
namespace gaztrack::unicode {

/// Canonical composition (NFC).
std::string to_nfc(std::string_view utf8);

/// Matching key: compatibility decomposition, full case folding, and
/// removal of nonspacing marks. "Amazônia" and "AMAZONIA" fold to
/// "amazonia"; "nº" folds to "no".
std::string fold(std::string_view utf8);

/// Maximal runs of letters and digits of `fold(utf8)`, in order.
std::vector<std::string> fold_words(std::string_view utf8);

struct WordSpan {
  std::string word;   // folded
  std::size_t begin;  // byte offsets into the unfolded input
  std::size_t end;
};

/// Like fold_words, but each word remembers where it came from. Words are
/// cut on the unfolded text first, so a compatibility character that
/// folds into several words maps every piece to the same span.
std::vector<WordSpan> fold_words_with_offsets(std::string_view utf8);

/// Collapses every run of whitespace and control characters to one
/// ASCII space and trims both ends. Input is assumed NFC.
std::string collapse_space(std::string_view utf8);

std::string to_upper(std::string_view utf8);

}  // namespace gaztrack::unicode

#endif  // GAZTRACK_UNICODE_HPP
