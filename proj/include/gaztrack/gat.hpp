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

#ifndef GAZTRACK_GAT_HPP
#define GAZTRACK_GAT_HPP

#include "gaztrack/date.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Government Actions Tracker records: expert-annotated acts with a
// 12-class classification regrouped into 3 regulatory directions.
namespace gaztrack {

enum class FineClass {
  kRegulation,
  kDeregulation,
  kInstitutionalReform,
  kResponse,
  kFlexibilization,
  kNeutral,
  kRetreat,
  kLawConsolidation,
  kRevocation,
  kPrivatization,
  kLegislation,
  kPlanning,
};

inline constexpr std::array<FineClass, 12> kAllFineClasses = {
    FineClass::kRegulation,      FineClass::kDeregulation, FineClass::kInstitutionalReform,
    FineClass::kResponse,        FineClass::kFlexibilization, FineClass::kNeutral,
    FineClass::kRetreat,         FineClass::kLawConsolidation, FineClass::kRevocation,
    FineClass::kPrivatization,   FineClass::kLegislation,  FineClass::kPlanning,
};

/// Declaration order is the canonical class order everywhere: model
/// class lists, confusion matrix rows, tie-breaking, fold offsets.
enum class GroupClass { kRegulation = 0, kNeutral = 1, kDeregulation = 2 };

inline constexpr std::size_t kGroupCount = 3;
inline constexpr std::array<GroupClass, kGroupCount> kAllGroups = {
    GroupClass::kRegulation, GroupClass::kNeutral, GroupClass::kDeregulation};

constexpr std::size_t index_of(GroupClass g) { return static_cast<std::size_t>(g); }

GroupClass group_of(FineClass c);

std::string_view name(FineClass c);
std::string_view name(GroupClass g);

/// Case-, space-, hyphen- and underscore-insensitive: "Law consolidation",
/// "LAW_CONSOLIDATION" and "LawConsolidation" all parse.
std::optional<FineClass> parse_fine_class(std::string_view text);
std::optional<GroupClass> parse_group_class(std::string_view text);

struct GatRecord {
  std::string record_id;
  Date date;
  std::string theme;
  std::string action;
  std::string circumstance;
  FineClass fine_class = FineClass::kNeutral;

  /// action + " " + circumstance.
  std::string context() const;
  GroupClass group_class() const { return group_of(fine_class); }

  friend bool operator==(GatRecord const&, GatRecord const&) = default;
};

/// Normalizes the text fields and validates the record. Throws EmptyField
/// naming the offending field.
GatRecord make_record(std::string record_id, Date date, std::string_view theme,
                      std::string_view action, std::string_view circumstance,
                      FineClass fine_class);

nlohmann::json to_json(GatRecord const& r);
GatRecord record_from_json(nlohmann::json const& j);

/// Header names for each logical column. Matching is case-insensitive.
struct GatColumns {
  std::string record_id = "record_id";
  std::string date = "date";
  std::string theme = "theme";
  std::string action = "action";
  std::string circumstance = "circumstance";
  std::string classification = "classification";

  static GatColumns from_json(nlohmann::json const& j);
};

/// Loads and validates a GAT CSV. A missing record_id column yields ids
/// synthesized from the zero-based data row index, zero-padded to six
/// digits. Errors carry 1-based data row numbers: UnknownClass {value,
/// row}, MissingField {column, row}, BadDate {row}, DuplicateId.
std::vector<GatRecord> load_gat(std::filesystem::path const& path,
                                GatColumns const& columns = {});
std::vector<GatRecord> parse_gat(std::string_view csv_text, GatColumns const& columns = {});

/// Same schema as load_gat input; always writes all six columns.
std::string format_gat(std::span<GatRecord const> records);
void export_gat(std::span<GatRecord const> records, std::filesystem::path const& path);

struct DatasetStats {
  std::size_t n_records = 0;
  double action_words_mean = 0, action_words_std = 0;
  double circumstance_words_mean = 0, circumstance_words_std = 0;
  std::array<double, kGroupCount> group_proportions{};
  std::array<std::size_t, kGroupCount> group_counts{};
  Date date_min, date_max;
};

/// Word counts are whitespace tokens; standard deviations are population
/// (divide by n). Throws EmptyDataset.
DatasetStats compute_stats(std::span<GatRecord const> records);
nlohmann::json to_json(DatasetStats const& s);

}  // namespace gaztrack

#endif  // GAZTRACK_GAT_HPP
