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

#ifndef GAZTRACK_TEXT_HPP
#define GAZTRACK_TEXT_HPP

#include "gaztrack/document.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gaztrack {

using TokenList = std::vector<std::string>;

/// Lower-cased, accent-folded runs of letters and digits, in order.
/// Punctuation separates tokens and is dropped; numbers are kept.
TokenList tokenize(NormalizedText const& text);

/// Dense token <-> index bijection.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Tokens in the given order; duplicates are rejected.
  static Vocabulary from_tokens(std::vector<std::string> tokens, std::size_t min_df = 1);

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_df() const { return min_df_; }
  /// Index of `token`, or -1.
  std::int64_t index(std::string const& token) const;
  std::string const& token(std::size_t index) const { return tokens_.at(index); }
  std::vector<std::string> const& tokens() const { return tokens_; }

  /// One token per line; line number (from 0) is the index.
  void save(std::filesystem::path const& path) const;
  static Vocabulary load(std::filesystem::path const& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t min_df_ = 1;
};

/// Tokens occurring in at least `min_df` distinct documents, indexed in
/// order of first appearance. Throws InvalidArgument for min_df == 0 and
/// EmptyVocabulary when nothing survives.
Vocabulary build_vocab(std::span<TokenList const> corpus, std::size_t min_df);

/// Sparse bag of words: (index, count) pairs sorted by index, counts >= 1.
struct CountVector {
  std::vector<std::pair<std::size_t, std::uint32_t>> entries;
  std::uint64_t total = 0;

  std::uint32_t count(std::size_t index) const;
};

/// Out-of-vocabulary tokens are dropped.
CountVector vectorize(std::span<std::string const> tokens, Vocabulary const& vocab);

}  // namespace gaztrack

#endif  // GAZTRACK_TEXT_HPP
