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

#include "gaztrack/document.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"
#include "gaztrack/unicode.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace gaztrack {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

[[noreturn]] void malformed(std::string const& source, std::size_t line,
                            std::string const& what) {
  throw Error(ErrorCode::kMalformedRecord,
              source + ":" + std::to_string(line) + ": " + what,
              {{"file", source}, {"line", line}});
}

std::string optional_string(nlohmann::json const& obj, char const* key,
                            std::string const& source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) malformed(source, line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string strip_tags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_tag = false;
  for (char c : text) {
    if (c == '<') {
      in_tag = true;
      out.push_back(' ');
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out.push_back(c);
    }
  }
  return out;
}

// Text segments are separate "<xmltext>" children (no_concat_text), so
// mixed content keeps document order.
void collect_text(pt::ptree const& node, std::string& out) {
  if (!node.data().empty()) {
    out += node.data();
    out.push_back(' ');
  }
  for (auto const& [name, child] : node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    collect_text(child, out);
  }
}

std::optional<std::string> text_at(pt::ptree const& root, std::string const& path,
                                   bool strip) {
  if (path.empty()) return std::nullopt;
  auto node = root.get_child_optional(pt::ptree::path_type(path, '.'));
  if (!node) return std::nullopt;
  std::string out;
  collect_text(*node, out);
  return strip ? strip_tags(out) : out;
}

void check_unique(std::vector<RawDocument> const& docs) {
  std::unordered_set<std::string> seen;
  for (auto const& d : docs) {
    if (!seen.insert(d.doc_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate doc_id '" + d.doc_id + "'",
                  {{"doc_id", d.doc_id}});
    }
  }
}

RawDocument load_xml_act(fs::path const& file, XmlMapping const& mapping) {
  auto const source = file.string();
  pt::ptree tree;
  try {
    std::istringstream in(read_file(file));
    pt::read_xml(in, tree, pt::xml_parser::no_concat_text);
  } catch (pt::xml_parser_error const& e) {
    malformed(source, e.line(), e.message());
  }

  RawDocument doc;
  doc.doc_id = file.stem().string();
  doc.source_path = source;

  auto body = text_at(tree, mapping.body, mapping.strip_markup);
  if (!body) malformed(source, 0, "missing body element '" + mapping.body + "'");
  doc.body = normalize(*body).text;
  if (doc.body.empty()) malformed(source, 0, "empty body");

  auto date_text = text_at(tree, mapping.date, false);
  if (!date_text) malformed(source, 0, "missing date element '" + mapping.date + "'");
  auto trimmed = normalize(*date_text).text;
  auto date = mapping.date_format == "dmy" ? Date::parse_dmy(trimmed)
                                           : Date::parse_iso(trimmed);
  if (!date) malformed(source, 0, "invalid date '" + trimmed + "'");
  doc.published_at = *date;

  if (auto t = text_at(tree, mapping.title, mapping.strip_markup)) {
    doc.title = normalize(*t).text;
  }
  if (auto o = text_at(tree, mapping.organ, mapping.strip_markup)) {
    doc.organ = normalize(*o).text;
  }
  return doc;
}

}  // namespace

NormalizedText normalize(std::string_view text) {
  NormalizedText out;
  out.text = unicode::collapse_space(unicode::to_nfc(text));
  out.token_count = word_count(out.text);
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string RawDocument::match_text() const {
  if (title.empty()) return body;
  return title + " " + body;
}

nlohmann::json to_json(RawDocument const& doc) {
  return {{"doc_id", doc.doc_id},
          {"date", doc.published_at.iso()},
          {"title", doc.title},
          {"body", doc.body},
          {"organ", doc.organ},
          {"source_path", doc.source_path}};
}

RawDocument document_from_json(nlohmann::json const& j) {
  RawDocument doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  auto date = Date::parse_iso(j.at("date").get<std::string>());
  if (!date) throw Error(ErrorCode::kBadDate, "invalid stored date for " + doc.doc_id);
  doc.published_at = *date;
  doc.title = j.value("title", "");
  doc.body = j.at("body").get<std::string>();
  doc.organ = j.value("organ", "");
  doc.source_path = j.value("source_path", "");
  return doc;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "xml-dir" || name == "xml") return CorpusFormat::kXmlDir;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown corpus format '" + std::string(name) + "' (expected jsonl or xml-dir)");
}

XmlMapping XmlMapping::from_json(nlohmann::json const& j) {
  XmlMapping m;
  m.body = j.value("body", m.body);
  m.title = j.value("title", m.title);
  m.date = j.value("date", m.date);
  m.organ = j.value("organ", m.organ);
  m.date_format = j.value("date_format", m.date_format);
  m.strip_markup = j.value("strip_markup", m.strip_markup);
  if (m.date_format != "iso" && m.date_format != "dmy") {
    throw Error(ErrorCode::kInvalidArgument,
                "xml date_format must be \"iso\" or \"dmy\"");
  }
  return m;
}

std::vector<RawDocument> parse_jsonl(std::string_view text, std::string const& source) {
  std::vector<RawDocument> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (nlohmann::json::parse_error const& e) {
      malformed(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(source, line_no, "record is not a JSON object");

    RawDocument doc;
    doc.doc_id = normalize(optional_string(obj, "doc_id", source, line_no)).text;
    if (doc.doc_id.empty()) malformed(source, line_no, "missing doc_id");
    auto date_text = optional_string(obj, "date", source, line_no);
    auto date = Date::parse_iso(date_text);
    if (!date) malformed(source, line_no, "invalid or missing date '" + date_text + "'");
    doc.published_at = *date;
    doc.body = normalize(optional_string(obj, "body", source, line_no)).text;
    if (doc.body.empty()) malformed(source, line_no, "missing or empty body");
    doc.title = normalize(optional_string(obj, "title", source, line_no)).text;
    doc.organ = normalize(optional_string(obj, "organ", source, line_no)).text;
    doc.source_path = source;
    docs.push_back(std::move(doc));
    if (end == text.size()) break;
  }
  check_unique(docs);
  return docs;
}

std::vector<RawDocument> load_corpus(fs::path const& path, CorpusFormat format,
                                     XmlMapping const& mapping) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIo, "no such file or directory: " + path.string(),
                {{"path", path.string()}});
  }
  if (format == CorpusFormat::kJsonl) {
    return parse_jsonl(read_file(path), path.string());
  }

  if (!fs::is_directory(path)) {
    throw Error(ErrorCode::kIo, "not a directory: " + path.string(),
                {{"path", path.string()}});
  }
  std::vector<fs::path> files;
  for (auto const& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  docs.reserve(files.size());
  for (auto const& f : files) docs.push_back(load_xml_act(f, mapping));
  check_unique(docs);
  return docs;
}

}  // namespace gaztrack
