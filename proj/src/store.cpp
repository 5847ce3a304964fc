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


#include "gaztrack/store.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <set>

namespace gaztrack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char const* kSnapshotName = "snapshot.json";
constexpr char const* kJournalName = "journal.jsonl";
constexpr char const* kStoreFormat = "gaztrack.store";
constexpr int kStoreVersion = 1;
constexpr std::uint64_t kCompactEvery = 500;

[[noreturn]] void io_error(std::string const& what, fs::path const& path) {
  throw Error(ErrorCode::kIo, what + " " + path.string() + ": " + std::strerror(errno),
              {{"path", path.string()}});
}

void write_all(int fd, std::string_view bytes, fs::path const& path) {
  std::size_t written = 0;
  while (written < bytes.size()) {
    auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("cannot append to", path);
    }
    written += static_cast<std::size_t>(n);
  }
}

json annotation_json(Annotation const& a) {
  return {{"action", a.action},
          {"circumstance", a.circumstance},
          {"classification", name(a.fine_class)},
          {"group_class", name(group_of(a.fine_class))},
          {"themes", a.themes}};
}

Annotation annotation_from_json(json const& j) {
  Annotation a;
  a.action = j.at("action").get<std::string>();
  a.circumstance = j.at("circumstance").get<std::string>();
  auto fine = parse_fine_class(j.at("classification").get<std::string>());
  if (!fine) throw Error(ErrorCode::kUnknownClass, "stored annotation has unknown class");
  a.fine_class = *fine;
  a.themes = j.value("themes", std::vector<std::string>{});
  return a;
}

std::string join(std::vector<std::string> const& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

[[noreturn]] void empty_field(char const* field) {
  throw Error(ErrorCode::kEmptyField, std::string("field '") + field + "' must not be empty",
              {{"field", field}});
}

}  // namespace

std::string_view name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kReviewed: return "reviewed";
    case ReviewStatus::kDiscarded: return "discarded";
  }
  return "pending";
}

std::optional<ReviewStatus> parse_review_status(std::string_view text) {
  if (text == "pending") return ReviewStatus::kPending;
  if (text == "reviewed") return ReviewStatus::kReviewed;
  if (text == "discarded") return ReviewStatus::kDiscarded;
  return std::nullopt;
}

json to_json(ReviewItem const& item) {
  json j = {{"item_id", item.item_id},
            {"doc", to_json(item.doc)},
            {"matched_themes", item.matched_themes},
            {"robot_group_hint", nullptr},
            {"status", name(item.status)},
            {"annotation", nullptr},
            {"reviewed_at", nullptr},
            {"rules_version", item.rules_version}};
  if (item.robot_group_hint) j["robot_group_hint"] = name(*item.robot_group_hint);
  if (item.annotation) j["annotation"] = annotation_json(*item.annotation);
  if (item.reviewed_at) j["reviewed_at"] = *item.reviewed_at;
  return j;
}

ReviewItem item_from_json(json const& j) {
  ReviewItem item;
  item.item_id = j.at("item_id").get<std::string>();
  item.doc = document_from_json(j.at("doc"));
  item.matched_themes = j.at("matched_themes").get<std::vector<std::string>>();
  if (auto const& h = j.at("robot_group_hint"); !h.is_null()) {
    item.robot_group_hint = parse_group_class(h.get<std::string>());
  }
  auto status = parse_review_status(j.at("status").get<std::string>());
  if (!status) throw Error(ErrorCode::kMalformedRecord, "stored item has unknown status");
  item.status = *status;
  if (auto const& a = j.at("annotation"); !a.is_null()) item.annotation = annotation_from_json(a);
  if (auto const& r = j.at("reviewed_at"); !r.is_null()) item.reviewed_at = r.get<std::string>();
  item.rules_version = j.value("rules_version", "");
  return item;
}

Store::Store(fs::path dir, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
  if (!clock_) clock_ = utc_timestamp_now;
  load();
}

Store::~Store() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
}

void Store::load() {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create store directory " + dir_.string() + ": " +
                                    ec.message(),
                {{"path", dir_.string()}});
  }
  // Leftovers of an interrupted atomic write; the renamed target is intact.
  for (auto const& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() == ".tmp") fs::remove(entry.path(), ec);
  }

  auto const snapshot_path = dir_ / kSnapshotName;
  if (fs::exists(snapshot_path)) {
    json snap;
    try {
      snap = json::parse(read_file(snapshot_path));
    } catch (json::parse_error const& e) {
      throw Error(ErrorCode::kMalformedRecord, "corrupt snapshot: " + std::string(e.what()),
                  {{"file", snapshot_path.string()}});
    }
    if (snap.value("format", "") != kStoreFormat || snap.value("version", 0) != kStoreVersion) {
      throw Error(ErrorCode::kMalformedRecord, "unsupported snapshot format",
                  {{"file", snapshot_path.string()}});
    }
    seq_ = snap.at("seq").get<std::uint64_t>();
    next_item_ = snap.at("next_item").get<std::uint64_t>();
    rules_version_ = snap.value("rules_version", "");
    for (auto const& ij : snap.at("items")) {
      auto item = item_from_json(ij);
      item_by_doc_[item.doc.doc_id] = item.item_id;
      items_.emplace(item.item_id, std::move(item));
    }
    for (auto const& rj : snap.at("records")) {
      auto r = record_from_json(rj);
      record_index_[r.record_id] = records_.size();
      records_.push_back(std::move(r));
    }
    if (auto const& m = snap.at("model"); !m.is_null()) {
      model_ = std::make_shared<NbTextClassifier const>(NbTextClassifier::from_json(m));
    }
  }

  auto const journal_path = dir_ / kJournalName;
  if (fs::exists(journal_path)) {
    auto const text = read_file(journal_path);
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      ++line_no;
      if (end == std::string::npos) {
        // Torn tail: the commit never completed, so it was never acknowledged.
        fs::resize_file(journal_path, pos);
        break;
      }
      json event;
      try {
        event = json::parse(std::string_view(text).substr(pos, end - pos));
      } catch (json::parse_error const&) {
        if (end + 1 == text.size()) {
          fs::resize_file(journal_path, pos);
          break;
        }
        throw Error(ErrorCode::kMalformedRecord,
                    "corrupt journal line " + std::to_string(line_no),
                    {{"file", journal_path.string()}, {"line", line_no}});
      }
      pos = end + 1;
      auto const seq = event.at("seq").get<std::uint64_t>();
      if (seq <= seq_) continue;  // already folded into the snapshot
      apply(event);
      seq_ = seq;
      ++events_since_snapshot_;
    }
  }

  journal_fd_ = ::open(journal_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (journal_fd_ < 0) io_error("cannot open", journal_path);
}

void Store::commit(json event) {
  event["seq"] = seq_ + 1;
  auto const line = event.dump() + "\n";
  auto const journal_path = dir_ / kJournalName;
  auto const before = ::lseek(journal_fd_, 0, SEEK_END);
  try {
    write_all(journal_fd_, line, journal_path);
    if (::fsync(journal_fd_) != 0) io_error("cannot sync", journal_path);
  } catch (...) {
    if (before >= 0 && ::ftruncate(journal_fd_, before) != 0) {
      // Reload will drop the torn line.
    }
    throw;
  }
  apply(event);
  ++seq_;
  if (++events_since_snapshot_ >= kCompactEvery) write_snapshot();
}

void Store::apply(json const& event) {
  auto const type = event.at("type").get<std::string>();
  if (type == "enqueue") {
    rules_version_ = event.value("rules_version", rules_version_);
    for (auto const& ij : event.at("items")) {
      auto item = item_from_json(ij);
      item_by_doc_[item.doc.doc_id] = item.item_id;
      items_[item.item_id] = std::move(item);
    }
    next_item_ = event.at("next_item").get<std::uint64_t>();
  } else if (type == "review") {
    auto& item = items_.at(event.at("item_id").get<std::string>());
    item.status = ReviewStatus::kReviewed;
    item.annotation = annotation_from_json(event.at("annotation"));
    item.reviewed_at = event.at("reviewed_at").get<std::string>();
    auto record = record_from_json(event.at("record"));
    record_index_[record.record_id] = records_.size();
    records_.push_back(std::move(record));
  } else if (type == "discard") {
    auto& item = items_.at(event.at("item_id").get<std::string>());
    item.status = ReviewStatus::kDiscarded;
    item.reviewed_at = event.at("at").get<std::string>();
  } else if (type == "import") {
    for (auto const& rj : event.at("records")) {
      auto record = record_from_json(rj);
      record_index_[record.record_id] = records_.size();
      records_.push_back(std::move(record));
    }
  } else if (type == "model") {
    model_ = std::make_shared<NbTextClassifier const>(NbTextClassifier::from_json(event.at("model")));
  } else {
    throw Error(ErrorCode::kMalformedRecord, "unknown journal event type '" + type + "'");
  }
}

json Store::snapshot_json() const {
  json items = json::array();
  for (auto const& [id, item] : items_) items.push_back(to_json(item));
  json records = json::array();
  for (auto const& r : records_) records.push_back(to_json(r));
  return {{"format", kStoreFormat},
          {"version", kStoreVersion},
          {"seq", seq_},
          {"next_item", next_item_},
          {"rules_version", rules_version_},
          {"items", std::move(items)},
          {"records", std::move(records)},
          {"model", model_ ? model_->to_json() : json(nullptr)}};
}

void Store::write_snapshot() {
  auto const journal_path = dir_ / kJournalName;
  write_file_atomic(dir_ / kSnapshotName, snapshot_json().dump());
  // Events up to seq_ are now in the snapshot; replay skips them even if
  // the truncation below never happens.
  if (::ftruncate(journal_fd_, 0) != 0) io_error("cannot truncate", journal_path);
  if (::fsync(journal_fd_) != 0) io_error("cannot sync", journal_path);
  events_since_snapshot_ = 0;
}

std::vector<ReviewItem> Store::enqueue(std::span<RawDocument const> docs, RuleSet const& rules,
                                       NbTextClassifier const* model) {
  std::unique_lock lock(mutex_);
  std::set<std::string> batch;
  for (auto const& doc : docs) {
    if (item_by_doc_.contains(doc.doc_id) || record_index_.contains(doc.doc_id) ||
        !batch.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kDuplicateDocument, "document '" + doc.doc_id + "' already stored",
                  {{"doc_id", doc.doc_id}});
    }
  }

  std::vector<ReviewItem> created;
  auto next = next_item_;
  for (auto const& doc : docs) {
    auto themes = pre_classify(rules, doc);
    if (themes.empty()) continue;
    ReviewItem item;
    char id[32];
    std::snprintf(id, sizeof id, "it-%06llu", static_cast<unsigned long long>(next++));
    item.item_id = id;
    item.doc = doc;
    item.matched_themes = std::move(themes);
    if (model) item.robot_group_hint = model->predict_text(doc.match_text()).label;
    item.rules_version = rules.version;
    created.push_back(std::move(item));
  }
  if (created.empty()) return created;

  json items = json::array();
  for (auto const& item : created) items.push_back(to_json(item));
  commit({{"type", "enqueue"},
          {"items", std::move(items)},
          {"next_item", next},
          {"rules_version", rules.version}});
  return created;
}

GatRecord Store::submit_review(std::string const& item_id, AnnotationInput const& input) {
  std::unique_lock lock(mutex_);
  auto it = items_.find(item_id);
  if (it == items_.end()) {
    throw Error(ErrorCode::kNotFound, "no review item '" + item_id + "'", {{"item_id", item_id}});
  }
  auto const& item = it->second;
  if (item.status != ReviewStatus::kPending) {
    throw Error(ErrorCode::kNotPending,
                "item '" + item_id + "' is already " + std::string(name(item.status)),
                {{"item_id", item_id}, {"status", name(item.status)}});
  }

  if (normalize(input.action).text.empty()) empty_field("action");
  if (normalize(input.circumstance).text.empty()) empty_field("circumstance");
  auto const classification = normalize(input.classification).text;
  if (classification.empty()) empty_field("classification");
  auto fine = parse_fine_class(classification);
  if (!fine) {
    throw Error(ErrorCode::kUnknownClass, "unknown classification '" + classification + "'",
                {{"value", classification}});
  }

  Annotation annotation;
  annotation.fine_class = *fine;
  if (input.themes) {
    for (auto const& t : *input.themes) {
      auto theme = normalize(t).text;
      if (theme.empty()) empty_field("themes");
      annotation.themes.push_back(std::move(theme));
    }
  } else {
    annotation.themes = item.matched_themes;
  }

  auto record = make_record(item.doc.doc_id, item.doc.published_at, join(annotation.themes, "; "),
                            input.action, input.circumstance, *fine);
  if (record_index_.contains(record.record_id)) {
    throw Error(ErrorCode::kDuplicateId, "record '" + record.record_id + "' already exists",
                {{"record_id", record.record_id}});
  }
  annotation.action = record.action;
  annotation.circumstance = record.circumstance;

  commit({{"type", "review"},
          {"item_id", item_id},
          {"annotation", annotation_json(annotation)},
          {"reviewed_at", clock_()},
          {"record", to_json(record)}});
  return record;
}

ReviewItem Store::discard(std::string const& item_id) {
  std::unique_lock lock(mutex_);
  auto it = items_.find(item_id);
  if (it == items_.end()) {
    throw Error(ErrorCode::kNotFound, "no review item '" + item_id + "'", {{"item_id", item_id}});
  }
  if (it->second.status != ReviewStatus::kPending) {
    throw Error(ErrorCode::kNotPending,
                "item '" + item_id + "' is already " + std::string(name(it->second.status)),
                {{"item_id", item_id}, {"status", name(it->second.status)}});
  }
  commit({{"type", "discard"}, {"item_id", item_id}, {"at", clock_()}});
  return it->second;
}

std::size_t Store::import_records(std::span<GatRecord const> records) {
  std::unique_lock lock(mutex_);
  std::set<std::string> batch;
  for (auto const& r : records) {
    if (record_index_.contains(r.record_id) || item_by_doc_.contains(r.record_id) ||
        !batch.insert(r.record_id).second) {
      throw Error(ErrorCode::kDuplicateId, "record '" + r.record_id + "' already exists",
                  {{"record_id", r.record_id}});
    }
  }
  if (records.empty()) return 0;
  json rows = json::array();
  for (auto const& r : records) rows.push_back(to_json(r));
  commit({{"type", "import"}, {"records", std::move(rows)}});
  return records.size();
}

std::vector<ReviewItem> Store::queue(std::optional<ReviewStatus> status, std::size_t limit) const {
  std::shared_lock lock(mutex_);
  std::vector<ReviewItem const*> selected;
  for (auto const& [id, item] : items_) {
    if (!status || item.status == *status) selected.push_back(&item);
  }
  std::sort(selected.begin(), selected.end(), [](auto const* a, auto const* b) {
    if (a->doc.published_at != b->doc.published_at) {
      return a->doc.published_at < b->doc.published_at;
    }
    return a->doc.doc_id < b->doc.doc_id;
  });
  if (limit != 0 && selected.size() > limit) selected.resize(limit);
  std::vector<ReviewItem> out;
  out.reserve(selected.size());
  for (auto const* item : selected) out.push_back(*item);
  return out;
}

std::optional<ReviewItem> Store::item(std::string const& item_id) const {
  std::shared_lock lock(mutex_);
  auto it = items_.find(item_id);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

std::vector<ReviewItem> Store::items() const {
  std::shared_lock lock(mutex_);
  std::vector<ReviewItem> out;
  out.reserve(items_.size());
  for (auto const& [id, item] : items_) out.push_back(item);
  return out;
}

std::vector<GatRecord> Store::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::string Store::rules_version() const {
  std::shared_lock lock(mutex_);
  return rules_version_;
}

void Store::set_model(NbTextClassifier model) {
  std::unique_lock lock(mutex_);
  commit({{"type", "model"}, {"model", model.to_json()}});
}

std::shared_ptr<NbTextClassifier const> Store::model() const {
  std::shared_lock lock(mutex_);
  return model_;
}

void Store::compact() {
  std::unique_lock lock(mutex_);
  write_snapshot();
}

std::uint64_t Store::sequence() const {
  std::shared_lock lock(mutex_);
  return seq_;
}

}  // namespace gaztrack
