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

#ifndef GAZTRACK_NAIVE_BAYES_HPP
#define GAZTRACK_NAIVE_BAYES_HPP

#include "gaztrack/gat.hpp"
#include "gaztrack/text.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaztrack {

/// Multinomial Naive Bayes over bag-of-words counts, in log space.
///
/// log_prior[c]            = ln(n_c / n)
/// log_likelihood[c][t]    = ln((count(t, c) + alpha) / (total(c) + alpha * V))
///
/// Only classes observed in training appear in `classes`, always in
/// canonical GroupClass order.
struct NbModel {
  std::vector<GroupClass> classes;
  std::vector<double> log_prior;
  std::vector<std::vector<double>> log_likelihood;
  double alpha = 1.0;
  std::size_t vocab_size = 0;

  /// Position of `g` in `classes`, or -1.
  int slot(GroupClass g) const;

  friend bool operator==(NbModel const&, NbModel const&) = default;
};

struct LabeledVector {
  CountVector x;
  GroupClass y;
};

/// Throws NoExamples (no examples, or a class in `required` absent) and
/// ZeroAlpha (alpha not strictly positive and finite).
NbModel train_nb(std::span<LabeledVector const> examples, std::size_t vocab_size,
                 double alpha = 1.0, std::span<GroupClass const> required = {});

struct NbPrediction {
  GroupClass label;
  /// Aligned with NbModel::classes.
  std::vector<double> log_scores;
};

/// Log scores within this distance count as tied.
inline constexpr double kScoreTieTolerance = 1e-10;

/// argmax of log_prior[c] + sum_t x[t] * log_likelihood[c][t]; ties go to
/// the higher prior, then to the earlier class.
NbPrediction predict_nb(NbModel const& model, CountVector const& x);

/// Vocabulary plus model: the persisted artifact that classifies Context
/// text end to end.
class NbTextClassifier {
 public:
  struct Options {
    double alpha = 1.0;
    std::size_t min_df = 2;
  };

  /// Builds the vocabulary from `records` only, then trains.
  static NbTextClassifier fit(std::span<GatRecord const> records, Options const& options);

  NbPrediction predict_text(std::string_view text) const;
  NbPrediction predict(GatRecord const& record) const { return predict_text(record.context()); }

  Vocabulary const& vocabulary() const { return vocab_; }
  NbModel const& model() const { return model_; }
  Options const& options() const { return options_; }
  std::size_t n_train() const { return n_train_; }

  nlohmann::json to_json() const;
  static NbTextClassifier from_json(nlohmann::json const& j);
  void save(std::filesystem::path const& path) const;
  static NbTextClassifier load(std::filesystem::path const& path);

  /// Short summary without the likelihood table.
  nlohmann::json descriptor() const;

 private:
  Vocabulary vocab_;
  NbModel model_;
  Options options_;
  std::size_t n_train_ = 0;
};

struct PredictionRow {
  std::string record_id;
  GroupClass predicted;
  /// Indexed by GroupClass; empty cells stay nullopt.
  std::array<std::optional<double>, kGroupCount> scores{};
};

struct PredictionFile {
  std::vector<PredictionRow> rows;

  PredictionRow const* find(std::string_view record_id) const;
};

/// CSV header: record_id,predicted[,score_Regulation,score_Neutral,score_Deregulation].
/// Throws UnknownClass {value, row} (including fine classes such as
/// "Retreat"), DuplicateId, MissingField and MalformedRecord.
PredictionFile parse_predictions(std::string_view csv_text);
PredictionFile read_predictions(std::filesystem::path const& path);
std::string format_predictions(PredictionFile const& preds);

/// One prediction row per record, with log scores.
PredictionFile classify_records(NbTextClassifier const& clf, std::span<GatRecord const> records);

}  // namespace gaztrack

#endif  // GAZTRACK_NAIVE_BAYES_HPP
