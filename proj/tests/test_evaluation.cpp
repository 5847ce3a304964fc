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


#include "gaztrack/error.hpp"
#include "gaztrack/evaluation.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gaztrack;

namespace {

ConfusionMatrix cm_of(oracle::Matrix const& rows) { return ConfusionMatrix::from_rows(rows); }

oracle::Matrix const kExample = {{4, 1, 0}, {2, 3, 1}, {0, 1, 3}};

std::vector<LabeledId> labels_with(std::vector<std::pair<GroupClass, std::size_t>> counts) {
  std::vector<LabeledId> out;
  for (auto [g, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({std::string(name(g)) + std::to_string(i), g});
    }
  }
  return out;
}

/// counts[fold][class] from an assignment.
std::vector<std::array<std::size_t, 3>> tally(FoldAssignment const& a,
                                              std::vector<LabeledId> const& labels) {
  std::vector<std::array<std::size_t, 3>> t(a.k, {0, 0, 0});
  for (std::size_t i = 0; i < labels.size(); ++i) ++t[a.fold_of[i]][index_of(labels[i].label)];
  return t;
}

std::vector<GatRecord> separable_corpus(std::size_t per_class) {
  std::vector<GatRecord> records;
  char const* signal[] = {"fiscaliza", "nomeia", "revoga"};
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      auto fine = c == 0 ? FineClass::kRegulation : c == 1 ? FineClass::kNeutral : FineClass::kRevocation;
      records.push_back(make_record("r" + std::to_string(c) + "-" + std::to_string(i),
                                    *Date::parse_iso("2020-01-01"), "T",
                                    std::string(signal[c]) + " ato número " + std::to_string(i),
                                    "texto comum do diário oficial", fine));
    }
  }
  return records;
}

}  // namespace

TEST_CASE("accuracy") {
  CHECK(accuracy(cm_of({{5, 0, 0}, {0, 5, 0}, {0, 0, 5}})) == 1.0);
  CHECK(accuracy(cm_of({{10, 0, 0}, {10, 0, 0}, {10, 0, 0}})) == doctest::Approx(1.0 / 3));
  CHECK(accuracy(cm_of(kExample)) == doctest::Approx(10.0 / 15));
  CHECK_THROWS_AS(accuracy(ConfusionMatrix(3)), Error);
}

TEST_CASE("weighted F1") {
  CHECK(weighted_f1(cm_of({{5, 0, 0}, {0, 5, 0}, {0, 0, 5}})) == 1.0);
  // Per class F1 = 2 tp / (row + col): 8/11, 6/11, 6/8; supports 5, 6, 4.
  double const expected = (5 * 8.0 / 11 + 6 * 6.0 / 11 + 4 * 6.0 / 8) / 15;
  CHECK(weighted_f1(cm_of(kExample)) == doctest::Approx(expected).epsilon(1e-12));
  // Class 2 never predicted and never true: F1 0 with zero weight.
  CHECK(weighted_f1(cm_of({{3, 1, 0}, {1, 3, 0}, {0, 0, 0}})) == doctest::Approx(0.75));
  // Class 1 never predicted: contributes 0 times its support.
  CHECK(weighted_f1(cm_of({{2, 0, 0}, {2, 0, 0}, {0, 0, 2}})) ==
        doctest::Approx((2 * (2.0 / 3) + 0 + 2 * 1.0) / 6));
}

TEST_CASE("MCC") {
  CHECK(mcc(cm_of({{5, 0, 0}, {0, 5, 0}, {0, 0, 5}})) == 1.0);
  CHECK(mcc(cm_of({{10, 0, 0}, {10, 0, 0}, {10, 0, 0}})) == 0.0);
  // c s - sum p_k t_k = 150 - 76; s^2 - sum p^2 = s^2 - sum t^2 = 148.
  CHECK(mcc(cm_of(kExample)) == doctest::Approx(74.0 / 148).epsilon(1e-12));
  CHECK(mcc(cm_of({{0, 5}, {5, 0}})) == -1.0);
}

TEST_CASE("metrics agree with brute-force definitions on random matrices") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    auto m = oracle::random_matrix(rng, 3, 50);
    auto cm = cm_of(m);
    CHECK(std::fabs(accuracy(cm) - oracle::accuracy(m)) < 1e-9);
    CHECK(std::fabs(weighted_f1(cm) - oracle::weighted_f1(m)) < 1e-9);
    CHECK(std::fabs(mcc(cm) - oracle::mcc(m)) < 1e-9);
    auto b = oracle::random_matrix(rng, 2, 50);
    CHECK(std::fabs(mcc(cm_of(b)) - oracle::binary_mcc(b)) < 1e-9);
  }
}

TEST_CASE("metric ranges") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    auto cm = cm_of(oracle::random_matrix(rng, 3, 20));
    auto m = compute_metrics(cm);
    CHECK(m.acc >= 0);
    CHECK(m.acc <= 1);
    CHECK(m.weighted_f1 >= 0);
    CHECK(m.weighted_f1 <= 1 + 1e-12);
    CHECK(m.mcc >= -1 - 1e-12);
    CHECK(m.mcc <= 1 + 1e-12);
  }
}

TEST_CASE("stratified folds: hand cases") {
  auto one = labels_with({{GroupClass::kRegulation, 10}});
  auto a = stratified_folds(one, 10, 42);
  for (auto const& members : a.members()) CHECK(members.size() == 1);

  auto divisible = labels_with({{GroupClass::kRegulation, 20}, {GroupClass::kNeutral, 10}});
  for (auto const& row : tally(stratified_folds(divisible, 10, 42), divisible)) {
    CHECK(row[0] == 2);
    CHECK(row[1] == 1);
  }

  auto uneven = labels_with({{GroupClass::kRegulation, 23}, {GroupClass::kNeutral, 11}});
  auto t = tally(stratified_folds(uneven, 10, 42), uneven);
  std::size_t a_total = 0, b_total = 0;
  for (auto const& row : t) {
    CHECK((row[0] == 2 || row[0] == 3));
    CHECK((row[1] == 1 || row[1] == 2));
    a_total += row[0];
    b_total += row[1];
  }
  CHECK(a_total == 23);
  CHECK(b_total == 11);
}

TEST_CASE("stratified folds: errors and determinism") {
  auto labels = labels_with({{GroupClass::kRegulation, 5}});
  auto code = [&](std::size_t k) {
    try {
      stratified_folds(labels, k, 1);
    } catch (Error const& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code(1) == ErrorCode::kBadK);
  CHECK(code(6) == ErrorCode::kBadK);
  auto many = labels_with({{GroupClass::kRegulation, 50}, {GroupClass::kDeregulation, 31}});
  CHECK(stratified_folds(many, 10, 7).fold_of == stratified_folds(many, 10, 7).fold_of);
  CHECK(stratified_folds(many, 10, 7).fold_of != stratified_folds(many, 10, 8).fold_of);
}

TEST_CASE("stratified folds partition and balance random multisets") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 40; ++iter) {
    std::size_t const n = 10 + rng() % 500;
    std::vector<LabeledId> labels;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back({"id" + std::to_string(i), kAllGroups[rng() % 3]});
    }
    std::size_t const k = 2 + rng() % 9;
    auto a = stratified_folds(labels, k, rng());
    std::vector<std::size_t> seen(n, 0);
    for (auto const& members : a.members()) {
      for (auto i : members) ++seen[i];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](auto s) { return s == 1; }));
    std::array<std::size_t, 3> class_n{};
    for (auto const& l : labels) ++class_n[index_of(l.label)];
    for (auto const& row : tally(a, labels)) {
      for (std::size_t c = 0; c < 3; ++c) {
        double const ideal = static_cast<double>(class_n[c]) / static_cast<double>(k);
        CHECK(std::fabs(static_cast<double>(row[c]) - ideal) <= 1.0);
      }
    }
  }
}

TEST_CASE("cross-validation on a separable corpus is perfect") {
  auto records = separable_corpus(10);
  auto report = run_cv(records, nb_factory({1.0, 2}), 10, 42, "MultinomialNB");
  REQUIRE(report.folds.size() == 10);
  for (auto const& f : report.folds) {
    CHECK(f.metrics.acc == 1.0);
    CHECK(f.metrics.mcc == 1.0);
    CHECK(f.metrics.weighted_f1 == 1.0);
  }
  CHECK(report.mean.mcc == 1.0);
  CHECK(report.mean.acc == 1.0);
  CHECK(report.mean.weighted_f1 == 1.0);
  CHECK(report.stddev.acc == 0.0);
  auto table = format_table(report);
  CHECK(table.find("1.000 ± 0.000") != std::string::npos);
}

TEST_CASE("cross-validation report is deterministic and round-trips through JSON") {
  auto records = separable_corpus(7);
  // Blur the signal so folds differ.
  for (std::size_t i = 0; i < records.size(); i += 4) {
    records[i] = make_record(records[i].record_id, records[i].date, "T", "ato número",
                             "texto comum", FineClass::kNeutral);
  }
  auto a = run_cv(records, nb_factory({1.0, 2}), 5, 3, "MultinomialNB");
  auto b = run_cv(records, nb_factory({1.0, 2}), 5, 3, "MultinomialNB");
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(to_json(report_from_json(to_json(a))).dump() == to_json(a).dump());
}

TEST_CASE("external predictions") {
  auto records = separable_corpus(3);
  PredictionFile gold;
  for (auto const& r : records) gold.rows.push_back({r.record_id, r.group_class(), {}});
  auto e = evaluate_predictions(records, gold);
  CHECK(e.metrics.acc == 1.0);
  CHECK(e.metrics.mcc == 1.0);
  CHECK(e.metrics.weighted_f1 == 1.0);

  gold.rows.pop_back();
  try {
    evaluate_predictions(records, gold);
    FAIL("expected MissingPrediction");
  } catch (Error const& err) {
    CHECK(err.code() == ErrorCode::kMissingPrediction);
    CHECK(err.detail()["record_id"] == records.back().record_id);
  }
}

TEST_CASE("predictions from the pipeline on one fold reproduce that fold's metrics") {
  auto records = separable_corpus(8);
  for (std::size_t i = 0; i < records.size(); i += 3) {
    records[i] = make_record(records[i].record_id, records[i].date, "T", "nomeia ato",
                             "revoga texto", records[i].fine_class);
  }
  std::size_t const k = 4;
  std::uint64_t const seed = 99;
  auto report = run_cv(records, nb_factory({1.0, 2}), k, seed, "MultinomialNB");

  std::vector<LabeledId> labels;
  for (auto const& r : records) labels.push_back({r.record_id, r.group_class()});
  auto members = stratified_folds(labels, k, seed).members();
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<GatRecord> train, test;
    std::vector<bool> in_test(records.size(), false);
    for (auto i : members[f]) in_test[i] = true;
    for (std::size_t i = 0; i < records.size(); ++i) (in_test[i] ? test : train).push_back(records[i]);
    auto clf = NbTextClassifier::fit(train, {1.0, 2});
    auto e = evaluate_predictions(test, classify_records(clf, test));
    CHECK(e.confusion == report.folds[f].confusion);
    CHECK(e.metrics.mcc == report.folds[f].metrics.mcc);
    CHECK(e.metrics.acc == report.folds[f].metrics.acc);
    CHECK(e.metrics.weighted_f1 == report.folds[f].metrics.weighted_f1);
  }
}
