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


#ifndef GAZTRACK_STORE_HPP
#define GAZTRACK_STORE_HPP

#include "gaztrack/document.hpp"
#include "gaztrack/gat.hpp"
#include "gaztrack/naive_bayes.hpp"
#include "gaztrack/rules.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

// Review queue and GAT record store persisted in a single directory as a
// snapshot plus an append-only journal.
namespace gaztrack {

enum class ReviewStatus { kPending, kReviewed, kDiscarded };

std::string_view name(ReviewStatus s);
std::optional<ReviewStatus> parse_review_status(std::string_view text);

struct Annotation {
  std::string action;
  std::string circumstance;
  FineClass fine_class = FineClass::kNeutral;
  /// Themes the reviewer confirmed; defaults to the matched themes.
  std::vector<std::string> themes;
};

/// Unvalidated reviewer input as it arrives from a client.
struct AnnotationInput {
  std::string action;
  std::string circumstance;
  std::string classification;
  std::optional<std::vector<std::string>> themes;
};

struct ReviewItem {
  std::string item_id;
  RawDocument doc;
  std::vector<std::string> matched_themes;
  std::optional<GroupClass> robot_group_hint;
  ReviewStatus status = ReviewStatus::kPending;
  std::optional<Annotation> annotation;  // present iff status == kReviewed
  std::optional<std::string> reviewed_at;
  std::string rules_version;
};

nlohmann::json to_json(ReviewItem const& item);
ReviewItem item_from_json(nlohmann::json const& j);

class Store {
 public:
  using Clock = std::function<std::string()>;

  /// Opens or creates the store in `dir`, replaying the journal over the
  /// last snapshot. A torn final journal line is dropped.
  explicit Store(std::filesystem::path dir, Clock clock = {});
  ~Store();
  Store(Store const&) = delete;
  Store& operator=(Store const&) = delete;

  /// Queues every doc with at least one matching theme. Throws
  /// DuplicateDocument if a doc_id is already queued or recorded; nothing
  /// is written in that case.
  std::vector<ReviewItem> enqueue(std::span<RawDocument const> docs, RuleSet const& rules,
                                  NbTextClassifier const* model = nullptr);

  /// Throws NotFound, NotPending, EmptyField or UnknownClass.
  GatRecord submit_review(std::string const& item_id, AnnotationInput const& input);

  /// Pending item leaves the queue without producing a record.
  ReviewItem discard(std::string const& item_id);

  /// Adds baseline records; throws DuplicateId on collisions.
  std::size_t import_records(std::span<GatRecord const> records);

  /// Items ordered by publication date then doc_id. limit 0 means all.
  std::vector<ReviewItem> queue(std::optional<ReviewStatus> status, std::size_t limit = 0) const;
  std::optional<ReviewItem> item(std::string const& item_id) const;
  std::vector<ReviewItem> items() const;
  std::vector<GatRecord> records() const;
  std::string rules_version() const;

  void set_model(NbTextClassifier model);
  std::shared_ptr<NbTextClassifier const> model() const;

  /// Folds the journal into a fresh snapshot.
  void compact();
  std::uint64_t sequence() const;
  std::filesystem::path const& dir() const { return dir_; }

 private:
  void load();
  void commit(nlohmann::json event);
  void apply(nlohmann::json const& event);
  void write_snapshot();
  nlohmann::json snapshot_json() const;

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::shared_mutex mutex_;

  std::map<std::string, ReviewItem> items_;
  std::map<std::string, std::string> item_by_doc_;
  std::vector<GatRecord> records_;
  std::map<std::string, std::size_t> record_index_;
  std::shared_ptr<NbTextClassifier const> model_;
  std::string rules_version_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_item_ = 1;
  std::uint64_t events_since_snapshot_ = 0;
  int journal_fd_ = -1;
};

}  // namespace gaztrack

#endif  // GAZTRACK_STORE_HPP
