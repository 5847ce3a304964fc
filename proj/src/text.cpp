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

#include "gaztrack/text.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"
#include "gaztrack/unicode.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace gaztrack {

TokenList tokenize(NormalizedText const& text) { return unicode::fold_words(text.text); }

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::size_t min_df) {
  Vocabulary v;
  v.min_df_ = min_df;
  v.index_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty vocabulary token at index " + std::to_string(i));
    }
    if (!v.index_.emplace(tokens[i], i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate vocabulary token '" + tokens[i] + "'",
                  {{"token", tokens[i]}});
    }
  }
  v.tokens_ = std::move(tokens);
  return v;
}

std::int64_t Vocabulary::index(std::string const& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void Vocabulary::save(std::filesystem::path const& path) const {
  std::string out;
  for (auto const& t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

Vocabulary Vocabulary::load(std::filesystem::path const& path) {
  auto text = read_file(path);
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
    pos = end + 1;
  }
  return from_tokens(std::move(tokens));
}

Vocabulary build_vocab(std::span<TokenList const> corpus, std::size_t min_df) {
  if (min_df == 0) throw Error(ErrorCode::kInvalidArgument, "min_df must be >= 1");

  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::string> first_seen;
  for (auto const& doc : corpus) {
    std::unordered_set<std::string> seen_here;
    for (auto const& tok : doc) {
      if (!seen_here.insert(tok).second) continue;
      auto [it, inserted] = df.emplace(tok, 0);
      if (inserted) first_seen.push_back(tok);
      ++it->second;
    }
  }
  std::vector<std::string> kept;
  for (auto const& tok : first_seen) {
    if (df[tok] >= min_df) kept.push_back(tok);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no token occurs in at least " + std::to_string(min_df) + " documents",
                {{"min_df", min_df}});
  }
  return Vocabulary::from_tokens(std::move(kept), min_df);
}

std::uint32_t CountVector::count(std::size_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](auto const& e, std::size_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0;
}

CountVector vectorize(std::span<std::string const> tokens, Vocabulary const& vocab) {
  std::map<std::size_t, std::uint32_t> counts;
  for (auto const& t : tokens) {
    auto idx = vocab.index(t);
    if (idx >= 0) ++counts[static_cast<std::size_t>(idx)];
  }
  CountVector v;
  v.entries.assign(counts.begin(), counts.end());
  for (auto const& [_, c] : v.entries) v.total += c;
  return v;
}

}  // namespace gaztrack
