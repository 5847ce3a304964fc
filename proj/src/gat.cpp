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

#include "gaztrack/gat.hpp"

#include "gaztrack/csv.hpp"
#include "gaztrack/document.hpp"
#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace gaztrack {
namespace {

std::string canonical_key(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
    key.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
  }
  return key;
}

std::string lower_trim(std::string_view s) {
  auto t = normalize(s).text;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t;
}

[[noreturn]] void missing_field(std::string const& column, std::size_t row) {
  throw Error(ErrorCode::kMissingField,
              "missing value for '" + column + "' in row " + std::to_string(row),
              {{"column", column}, {"row", row}});
}

}  // namespace

GroupClass group_of(FineClass c) {
  switch (c) {
    case FineClass::kRegulation:
    case FineClass::kPlanning:
    case FineClass::kResponse:
      return GroupClass::kRegulation;
    case FineClass::kNeutral:
    case FineClass::kRetreat:
    case FineClass::kLegislation:
      return GroupClass::kNeutral;
    case FineClass::kPrivatization:
    case FineClass::kDeregulation:
    case FineClass::kFlexibilization:
    case FineClass::kInstitutionalReform:
    case FineClass::kLawConsolidation:
    case FineClass::kRevocation:
      return GroupClass::kDeregulation;
  }
  throw Error(ErrorCode::kInternal, "unhandled fine class");
}

std::string_view name(FineClass c) {
  switch (c) {
    case FineClass::kRegulation: return "Regulation";
    case FineClass::kDeregulation: return "Deregulation";
    case FineClass::kInstitutionalReform: return "InstitutionalReform";
    case FineClass::kResponse: return "Response";
    case FineClass::kFlexibilization: return "Flexibilization";
    case FineClass::kNeutral: return "Neutral";
    case FineClass::kRetreat: return "Retreat";
    case FineClass::kLawConsolidation: return "LawConsolidation";
    case FineClass::kRevocation: return "Revocation";
    case FineClass::kPrivatization: return "Privatization";
    case FineClass::kLegislation: return "Legislation";
    case FineClass::kPlanning: return "Planning";
  }
  return "?";
}

std::string_view name(GroupClass g) {
  switch (g) {
    case GroupClass::kRegulation: return "Regulation";
    case GroupClass::kNeutral: return "Neutral";
    case GroupClass::kDeregulation: return "Deregulation";
  }
  return "?";
}

std::optional<FineClass> parse_fine_class(std::string_view text) {
  auto key = canonical_key(text);
  for (auto c : kAllFineClasses) {
    if (canonical_key(name(c)) == key) return c;
  }
  return std::nullopt;
}

std::optional<GroupClass> parse_group_class(std::string_view text) {
  auto key = canonical_key(text);
  for (auto g : kAllGroups) {
    if (canonical_key(name(g)) == key) return g;
  }
  return std::nullopt;
}

std::string GatRecord::context() const { return action + " " + circumstance; }

GatRecord make_record(std::string record_id, Date date, std::string_view theme,
                      std::string_view action, std::string_view circumstance,
                      FineClass fine_class) {
  GatRecord r;
  r.record_id = normalize(record_id).text;
  r.date = date;
  r.theme = normalize(theme).text;
  r.action = normalize(action).text;
  r.circumstance = normalize(circumstance).text;
  r.fine_class = fine_class;
  for (auto [field, value] : {std::pair{"record_id", &r.record_id}, std::pair{"theme", &r.theme},
                              std::pair{"action", &r.action},
                              std::pair{"circumstance", &r.circumstance}}) {
    if (value->empty()) {
      throw Error(ErrorCode::kEmptyField, std::string("field '") + field + "' is empty",
                  {{"field", field}});
    }
  }
  return r;
}

nlohmann::json to_json(GatRecord const& r) {
  return {{"record_id", r.record_id},
          {"date", r.date.iso()},
          {"theme", r.theme},
          {"action", r.action},
          {"circumstance", r.circumstance},
          {"classification", name(r.fine_class)},
          {"context", r.context()},
          {"group_class", name(r.group_class())}};
}

GatRecord record_from_json(nlohmann::json const& j) {
  auto date = Date::parse_iso(j.at("date").get<std::string>());
  if (!date) throw Error(ErrorCode::kBadDate, "invalid record date");
  auto cls_text = j.at("classification").get<std::string>();
  auto cls = parse_fine_class(cls_text);
  if (!cls) {
    throw Error(ErrorCode::kUnknownClass, "unknown classification '" + cls_text + "'",
                {{"value", cls_text}});
  }
  return make_record(j.at("record_id").get<std::string>(), *date,
                     j.at("theme").get<std::string>(), j.at("action").get<std::string>(),
                     j.at("circumstance").get<std::string>(), *cls);
}

GatColumns GatColumns::from_json(nlohmann::json const& j) {
  GatColumns c;
  c.record_id = j.value("record_id", c.record_id);
  c.date = j.value("date", c.date);
  c.theme = j.value("theme", c.theme);
  c.action = j.value("action", c.action);
  c.circumstance = j.value("circumstance", c.circumstance);
  c.classification = j.value("classification", c.classification);
  return c;
}

std::vector<GatRecord> parse_gat(std::string_view csv_text, GatColumns const& columns) {
  auto rows = csv::parse(csv_text);
  if (rows.empty()) missing_field("header", 0);

  auto const& header = rows.front();
  auto column_index = [&](std::string const& wanted) -> std::optional<std::size_t> {
    auto key = lower_trim(wanted);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower_trim(header[i]) == key) return i;
    }
    return std::nullopt;
  };
  auto required = [&](std::string const& wanted, char const* logical) {
    auto idx = column_index(wanted);
    if (!idx) missing_field(logical, 0);
    return *idx;
  };

  auto id_col = column_index(columns.record_id);
  auto date_col = required(columns.date, "date");
  auto theme_col = required(columns.theme, "theme");
  auto action_col = required(columns.action, "action");
  auto circ_col = required(columns.circumstance, "circumstance");
  auto class_col = required(columns.classification, "classification");

  std::vector<GatRecord> records;
  records.reserve(rows.size() - 1);
  std::unordered_set<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto const& row = rows[i];
    std::size_t const row_no = i;
    auto cell = [&](std::size_t col) -> std::string {
      return col < row.size() ? normalize(row[col]).text : std::string();
    };

    GatRecord r;
    if (id_col) {
      r.record_id = cell(*id_col);
      if (r.record_id.empty()) missing_field("record_id", row_no);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%06zu", i - 1);
      r.record_id = buf;
    }

    auto date_text = cell(date_col);
    if (date_text.empty()) missing_field("date", row_no);
    auto date = Date::parse_iso(date_text);
    if (!date) {
      throw Error(ErrorCode::kBadDate,
                  "invalid date '" + date_text + "' in row " + std::to_string(row_no),
                  {{"row", row_no}, {"value", date_text}});
    }
    r.date = *date;

    r.theme = cell(theme_col);
    if (r.theme.empty()) missing_field("theme", row_no);
    r.action = cell(action_col);
    if (r.action.empty()) missing_field("action", row_no);
    r.circumstance = cell(circ_col);
    if (r.circumstance.empty()) missing_field("circumstance", row_no);

    auto cls_text = cell(class_col);
    if (cls_text.empty()) missing_field("classification", row_no);
    auto cls = parse_fine_class(cls_text);
    if (!cls) {
      throw Error(ErrorCode::kUnknownClass,
                  "unknown classification '" + cls_text + "' in row " + std::to_string(row_no),
                  {{"value", cls_text}, {"row", row_no}});
    }
    r.fine_class = *cls;

    if (!ids.insert(r.record_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate record_id '" + r.record_id + "'",
                  {{"record_id", r.record_id}, {"row", row_no}});
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<GatRecord> load_gat(std::filesystem::path const& path, GatColumns const& columns) {
  return parse_gat(read_file(path), columns);
}

std::string format_gat(std::span<GatRecord const> records) {
  std::string out = csv::format_row(
      {"record_id", "date", "theme", "action", "circumstance", "classification"});
  for (auto const& r : records) {
    out += csv::format_row({r.record_id, r.date.iso(), r.theme, r.action, r.circumstance,
                            std::string(name(r.fine_class))});
  }
  return out;
}

void export_gat(std::span<GatRecord const> records, std::filesystem::path const& path) {
  write_file_atomic(path, format_gat(records));
}

DatasetStats compute_stats(std::span<GatRecord const> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "no records");

  DatasetStats s;
  s.n_records = records.size();
  s.date_min = s.date_max = records.front().date;
  double n = static_cast<double>(records.size());
  double a_sum = 0, c_sum = 0;
  for (auto const& r : records) {
    a_sum += static_cast<double>(word_count(r.action));
    c_sum += static_cast<double>(word_count(r.circumstance));
    ++s.group_counts[index_of(r.group_class())];
    s.date_min = std::min(s.date_min, r.date);
    s.date_max = std::max(s.date_max, r.date);
  }
  s.action_words_mean = a_sum / n;
  s.circumstance_words_mean = c_sum / n;
  double a_sq = 0, c_sq = 0;
  for (auto const& r : records) {
    double da = static_cast<double>(word_count(r.action)) - s.action_words_mean;
    double dc = static_cast<double>(word_count(r.circumstance)) - s.circumstance_words_mean;
    a_sq += da * da;
    c_sq += dc * dc;
  }
  s.action_words_std = std::sqrt(a_sq / n);
  s.circumstance_words_std = std::sqrt(c_sq / n);
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    s.group_proportions[g] = static_cast<double>(s.group_counts[g]) / n;
  }
  return s;
}

nlohmann::json to_json(DatasetStats const& s) {
  nlohmann::json props = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (auto g : kAllGroups) {
    props[std::string(name(g))] = s.group_proportions[index_of(g)];
    counts[std::string(name(g))] = s.group_counts[index_of(g)];
  }
  return {{"n_records", s.n_records},
          {"action_words_mean", s.action_words_mean},
          {"action_words_std", s.action_words_std},
          {"circumstance_words_mean", s.circumstance_words_mean},
          {"circumstance_words_std", s.circumstance_words_std},
          {"group_proportions", props},
          {"group_counts", counts},
          {"date_min", s.date_min.iso()},
          {"date_max", s.date_max.iso()}};
}

}  // namespace gaztrack
