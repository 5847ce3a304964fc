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

#ifndef GAZTRACK_EVALUATION_HPP
#define GAZTRACK_EVALUATION_HPP

#include "gaztrack/gat.hpp"
#include "gaztrack/naive_bayes.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gaztrack {

/// Square count matrix; rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = kGroupCount);
  /// Throws InvalidArgument unless `rows` is square and non-empty.
  static ConfusionMatrix from_rows(std::vector<std::vector<std::uint64_t>> const& rows);

  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);
  void add(GroupClass truth, GroupClass predicted) { add(index_of(truth), index_of(predicted)); }

  std::size_t size() const { return n_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return cells_[truth * n_ + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t predicted) const;

  std::vector<std::vector<std::uint64_t>> rows() const;

  friend bool operator==(ConfusionMatrix const&, ConfusionMatrix const&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> cells_;
};

// All three throw EmptyMatrix when total() == 0.

/// trace / total.
double accuracy(ConfusionMatrix const& cm);

/// Support-weighted mean of per-class F1. A class never predicted, or with
/// precision + recall == 0, contributes F1 = 0.
double weighted_f1(ConfusionMatrix const& cm);

/// Multiclass Matthews correlation (Gorodkin's R_K):
///   (c*s - sum p_k t_k) / sqrt((s^2 - sum p_k^2) (s^2 - sum t_k^2))
/// with c = trace, s = total, p = column sums, t = row sums. Returns 0 when
/// either factor under the root is 0.
double mcc(ConfusionMatrix const& cm);

struct Metrics {
  double mcc = 0;
  double acc = 0;
  double weighted_f1 = 0;
};

Metrics compute_metrics(ConfusionMatrix const& cm);

struct LabeledId {
  std::string record_id;
  GroupClass label;
};

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> record_ids;  // input order
  std::vector<std::size_t> fold_of;     // aligned with record_ids

  /// Input positions per fold, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Per class (canonical order), the class's records are shuffled by a
/// seeded Fisher-Yates permutation over one mt19937_64 stream and dealt
/// round-robin to folds starting at fold (class index mod k). Per-class
/// per-fold counts therefore differ by at most one. Throws BadK (k < 2 or
/// k > n) and DuplicateId.
FoldAssignment stratified_folds(std::span<LabeledId const> labels, std::size_t k,
                                std::uint64_t seed);

/// A model trainable on one fold's training split.
class FoldClassifier {
 public:
  virtual ~FoldClassifier() = default;
  virtual void fit(std::span<GatRecord const> train) = 0;
  virtual GroupClass predict(GatRecord const& record) const = 0;
};

using ClassifierFactory = std::function<std::unique_ptr<FoldClassifier>()>;

/// Multinomial NB with a vocabulary rebuilt from each training split.
ClassifierFactory nb_factory(NbTextClassifier::Options options);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_test = 0;
  Metrics metrics;
  ConfusionMatrix confusion;
};

struct CvReport {
  std::string model;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;  // sorted by fold index
  Metrics mean;
  Metrics stddev;  // sample standard deviation over folds
};

/// Stratified k-fold cross-validation. Each fold trains a fresh classifier
/// from `factory` on the other k-1 folds and scores the held-out fold.
/// Folds run concurrently; the report does not depend on scheduling.
/// Throws EmptyFold if the assignment leaves a fold without records.
CvReport run_cv(std::span<GatRecord const> records, ClassifierFactory const& factory,
                std::size_t k, std::uint64_t seed, std::string model_name);

nlohmann::json to_json(CvReport const& report);
CvReport report_from_json(nlohmann::json const& j);

/// Plain-text table: one row per fold and a "mean ± std" summary row.
std::string format_table(CvReport const& report);

struct PredictionEvaluation {
  ConfusionMatrix confusion;
  Metrics metrics;
};

/// Scores externally produced predictions against gold group labels.
/// Predictions for ids not in `records` are ignored. Throws
/// MissingPrediction {record_id} for the first record without one.
PredictionEvaluation evaluate_predictions(std::span<GatRecord const> records,
                                          PredictionFile const& preds);

nlohmann::json to_json(PredictionEvaluation const& e);

}  // namespace gaztrack

#endif  // GAZTRACK_EVALUATION_HPP
