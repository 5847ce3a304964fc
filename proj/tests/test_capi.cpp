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


// Exercises the exported C interface only; no C++ headers from the core.
#include "gaztrack/gaztrack.h"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fixture(std::string const& name) { return (fs::path(GAZTRACK_FIXTURES) / name).string(); }

std::string take(char* s) {
  std::string out = s ? s : "";
  gt_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
};

using Rules = Handle<gt_ruleset, gt_ruleset_free>;
using Corpus = Handle<gt_corpus, gt_corpus_free>;
using Dataset = Handle<gt_dataset, gt_dataset_free>;
using Model = Handle<gt_model, gt_model_free>;
using StoreH = Handle<gt_store, gt_store_free>;

}  // namespace

TEST_CASE("status metadata") {
  CHECK(std::string(gt_version()) == "1.0.0");
  CHECK(std::string(gt_status_name(GT_E_NOT_PENDING)) == "NotPending");
  CHECK(gt_status_category(GT_OK) == GT_CATEGORY_OK);
  CHECK(gt_status_category(GT_E_INVALID_ARGUMENT) == GT_CATEGORY_USAGE);
  CHECK(gt_status_category(GT_E_BAD_K) == GT_CATEGORY_USAGE);
  CHECK(gt_status_category(GT_E_SYNTAX) == GT_CATEGORY_DATA);
  CHECK(gt_status_category(GT_E_INTERNAL) == GT_CATEGORY_INTERNAL);
  gt_string_free(nullptr);
  gt_ruleset_free(nullptr);
}

TEST_CASE("null arguments are rejected") {
  CHECK(gt_ruleset_parse(nullptr, nullptr) == GT_E_INVALID_ARGUMENT);
  CHECK(std::string(gt_last_error_message()).size() > 0);
  char* out = nullptr;
  CHECK(gt_normalize(nullptr, &out) == GT_E_INVALID_ARGUMENT);
  CHECK(out == nullptr);
}

TEST_CASE("rules parse, describe and report syntax errors") {
  Rules rules;
  REQUIRE(gt_ruleset_load(fixture("themes10.rules").c_str(), &rules.ptr) == GT_OK);
  char* out = nullptr;
  REQUIRE(gt_ruleset_describe(rules.ptr, &out) == GT_OK);
  auto d = json::parse(take(out));
  CHECK(d["themes"].size() == 10);
  CHECK(d["round_trip_stable"] == true);
  CHECK(d["version"].get<std::string>().rfind("fnv1a64:", 0) == 0);

  Rules bad;
  CHECK(gt_ruleset_load(fixture("bad.rules").c_str(), &bad.ptr) == GT_E_SYNTAX);
  CHECK(bad.ptr == nullptr);
  auto detail = json::parse(gt_last_error_detail());
  CHECK(detail["line"] == 3);
  CHECK(detail["column"] == 1);
}

TEST_CASE("corpus classification and store enqueue") {
  Rules rules;
  REQUIRE(gt_ruleset_load(fixture("themes5.rules").c_str(), &rules.ptr) == GT_OK);
  Corpus corpus;
  REQUIRE(gt_corpus_load(fixture("corpus.jsonl").c_str(), "jsonl", nullptr, &corpus.ptr) == GT_OK);
  CHECK(gt_corpus_size(corpus.ptr) == 20);
  char* out = nullptr;
  REQUIRE(gt_corpus_classify(corpus.ptr, rules.ptr, &out) == GT_OK);
  auto summary = json::parse(take(out));
  CHECK(summary["documents"] == 20);

  auto dir = fs::temp_directory_path() / ("gaztrack-capi-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  {
    StoreH store;
    REQUIRE(gt_store_open(dir.c_str(), &store.ptr) == GT_OK);
    REQUIRE(gt_store_enqueue(store.ptr, corpus.ptr, rules.ptr, &out) == GT_OK);
    auto r = json::parse(take(out));
    CHECK(r["enqueued"] == summary["matched"]);
    CHECK(gt_store_enqueue(store.ptr, corpus.ptr, rules.ptr, &out) == GT_E_DUPLICATE_DOCUMENT);
  }
  fs::remove_all(dir);

  Corpus missing;
  CHECK(gt_corpus_load("/nonexistent/x.jsonl", "jsonl", nullptr, &missing.ptr) == GT_E_IO);
  CHECK(gt_corpus_load(fixture("corpus.jsonl").c_str(), "pdf", nullptr, &missing.ptr) ==
        GT_E_INVALID_ARGUMENT);
}

TEST_CASE("dataset, model and evaluation") {
  Dataset ds;
  REQUIRE(gt_dataset_load(fixture("gat_small.csv").c_str(), nullptr, &ds.ptr) == GT_OK);
  CHECK(gt_dataset_size(ds.ptr) == 5);
  char* out = nullptr;
  REQUIRE(gt_dataset_stats(ds.ptr, &out) == GT_OK);
  CHECK(json::parse(take(out))["n_records"] == 5);

  Model model;
  CHECK(gt_model_train(ds.ptr, 0.0, 1, &model.ptr) == GT_E_ZERO_ALPHA);
  REQUIRE(gt_model_train(ds.ptr, 1.0, 1, &model.ptr) == GT_OK);
  auto path = fs::temp_directory_path() / ("gaztrack-capi-model-" + std::to_string(::getpid()) + ".json");
  REQUIRE(gt_model_save(model.ptr, path.c_str()) == GT_OK);
  Model loaded;
  REQUIRE(gt_model_load(path.c_str(), &loaded.ptr) == GT_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(gt_model_predict_csv(model.ptr, ds.ptr, &a) == GT_OK);
  REQUIRE(gt_model_predict_csv(loaded.ptr, ds.ptr, &b) == GT_OK);
  CHECK(take(a) == take(b));
  fs::remove(path);

  CHECK(gt_evaluate_cv(ds.ptr, 1, 42, 1.0, 1, &out) == GT_E_BAD_K);
  REQUIRE(gt_evaluate_cv(ds.ptr, 2, 42, 1.0, 1, &out) == GT_OK);
  auto report = take(out);
  CHECK(json::parse(report)["model"] == "MultinomialNB");
  REQUIRE(gt_format_report_table(report.c_str(), &out) == GT_OK);
  CHECK(take(out).find("MultinomialNB") != std::string::npos);
}

TEST_CASE("configuration resolution") {
  char* out = nullptr;
  REQUIRE(gt_config_resolve(nullptr, R"({"port": 0, "k": 3})", &out) == GT_OK);
  auto c = json::parse(take(out));
  CHECK(c["port"] == 0);
  CHECK(c["k"] == 3);
  CHECK(gt_config_resolve(nullptr, R"({"k": 1})", &out) == GT_E_INVALID_ARGUMENT);
  CHECK(gt_config_resolve(nullptr, R"({"colour": 1})", &out) == GT_E_INVALID_ARGUMENT);
}
