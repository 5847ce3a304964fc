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

#ifndef GAZTRACK_DOCUMENT_HPP
#define GAZTRACK_DOCUMENT_HPP

#include "gaztrack/date.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gaztrack {

/// Text with control characters replaced, whitespace collapsed to single
/// spaces, trimmed, and in Unicode canonical composed form.
struct NormalizedText {
  std::string text;
  std::size_t token_count = 0;

  friend bool operator==(NormalizedText const&, NormalizedText const&) = default;
};

NormalizedText normalize(std::string_view text);

/// Number of whitespace-separated words in `text`.
std::size_t word_count(std::string_view text);

/// One gazette act as ingested. Text fields are stored normalized.
struct RawDocument {
  std::string doc_id;
  Date published_at;
  std::string title;
  std::string body;
  std::string organ;
  std::string source_path;

  /// Title and body joined; the text the theme rules see.
  std::string match_text() const;

  friend bool operator==(RawDocument const&, RawDocument const&) = default;
};

nlohmann::json to_json(RawDocument const& doc);
RawDocument document_from_json(nlohmann::json const& j);

enum class CorpusFormat { kJsonl, kXmlDir };

/// Parses "jsonl" or "xml-dir".
CorpusFormat parse_corpus_format(std::string_view name);

/// Where each field lives inside one per-act XML file. Paths are
/// dot-separated element names from the document root; attributes are
/// addressed as `element.<xmlattr>.name`. The body element's text is the
/// concatenation of all text beneath it.
struct XmlMapping {
  std::string body = "act.body";
  std::string title = "act.title";
  std::string date = "act.date";
  std::string organ = "act.organ";
  /// "iso" (YYYY-MM-DD) or "dmy" (DD/MM/YYYY).
  std::string date_format = "iso";
  /// Drop anything that looks like an HTML/XML tag inside field text.
  bool strip_markup = true;

  static XmlMapping from_json(nlohmann::json const& j);
};

/// Loads a corpus. JSONL: one object per line, in file order. XML: every
/// `*.xml` file in the directory, sorted by path, doc_id = file stem.
/// Throws MalformedRecord (with file and line) and DuplicateId.
std::vector<RawDocument> load_corpus(std::filesystem::path const& path,
                                     CorpusFormat format,
                                     XmlMapping const& mapping = {});

/// JSONL records from an in-memory buffer. `source` labels error messages
/// and fills RawDocument::source_path.
std::vector<RawDocument> parse_jsonl(std::string_view text, std::string const& source);

}  // namespace gaztrack

#endif  // GAZTRACK_DOCUMENT_HPP
