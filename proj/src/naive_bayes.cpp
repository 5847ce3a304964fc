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

#include "gaztrack/naive_bayes.hpp"

#include "gaztrack/csv.hpp"
#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_set>

namespace gaztrack {
namespace {

constexpr int kModelFormatVersion = 1;
constexpr char const* kModelFormat = "gaztrack.nb";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GroupClass group_from_json(nlohmann::json const& j) {
  auto text = j.get<std::string>();
  auto g = parse_group_class(text);
  if (!g) throw Error(ErrorCode::kUnknownClass, "unknown class '" + text + "'", {{"value", text}});
  return *g;
}

}  // namespace

int NbModel::slot(GroupClass g) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == g) return static_cast<int>(i);
  }
  return -1;
}

NbModel train_nb(std::span<LabeledVector const> examples, std::size_t vocab_size, double alpha,
                 std::span<GroupClass const> required) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kZeroAlpha, "smoothing alpha must be > 0", {{"alpha", alpha}});
  }
  if (examples.empty()) throw Error(ErrorCode::kNoExamples, "no training examples");

  std::array<std::size_t, kGroupCount> doc_counts{};
  std::array<std::vector<double>, kGroupCount> token_counts;
  std::array<double, kGroupCount> totals{};
  for (auto& tc : token_counts) tc.assign(vocab_size, 0.0);

  for (auto const& ex : examples) {
    auto g = index_of(ex.y);
    ++doc_counts[g];
    for (auto const& [idx, cnt] : ex.x.entries) {
      if (idx >= vocab_size) {
        throw Error(ErrorCode::kInvalidArgument,
                    "feature index " + std::to_string(idx) + " outside vocabulary of size " +
                        std::to_string(vocab_size));
      }
      token_counts[g][idx] += cnt;
      totals[g] += cnt;
    }
  }
  for (auto g : required) {
    if (doc_counts[index_of(g)] == 0) {
      throw Error(ErrorCode::kNoExamples,
                  "no training examples for class " + std::string(name(g)),
                  {{"class", name(g)}});
    }
  }

  NbModel m;
  m.alpha = alpha;
  m.vocab_size = vocab_size;
  double const n = static_cast<double>(examples.size());
  double const smoothing_mass = alpha * static_cast<double>(vocab_size);
  for (auto g : kAllGroups) {
    auto gi = index_of(g);
    if (doc_counts[gi] == 0) continue;
    m.classes.push_back(g);
    m.log_prior.push_back(std::log(static_cast<double>(doc_counts[gi]) / n));
    double const log_denominator = std::log(totals[gi] + smoothing_mass);
    std::vector<double> ll(vocab_size);
    for (std::size_t t = 0; t < vocab_size; ++t) {
      ll[t] = std::log(token_counts[gi][t] + alpha) - log_denominator;
    }
    m.log_likelihood.push_back(std::move(ll));
  }
  return m;
}

NbPrediction predict_nb(NbModel const& model, CountVector const& x) {
  if (model.classes.empty()) throw Error(ErrorCode::kNoExamples, "model has no classes");
  NbPrediction p;
  p.log_scores.reserve(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double s = model.log_prior[c];
    auto const& ll = model.log_likelihood[c];
    for (auto const& [idx, cnt] : x.entries) {
      if (idx >= model.vocab_size) {
        throw Error(ErrorCode::kInvalidArgument,
                    "feature index " + std::to_string(idx) + " outside vocabulary");
      }
      s += static_cast<double>(cnt) * ll[idx];
    }
    p.log_scores.push_back(s);
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < model.classes.size(); ++c) {
    double diff = p.log_scores[c] - p.log_scores[best];
    if (diff > kScoreTieTolerance) {
      best = c;
    } else if (diff >= -kScoreTieTolerance && model.log_prior[c] > model.log_prior[best]) {
      best = c;
    }
  }
  p.label = model.classes[best];
  return p;
}

NbTextClassifier NbTextClassifier::fit(std::span<GatRecord const> records,
                                       Options const& options) {
  if (records.empty()) throw Error(ErrorCode::kNoExamples, "no training records");
  std::vector<TokenList> docs;
  docs.reserve(records.size());
  for (auto const& r : records) docs.push_back(tokenize(normalize(r.context())));

  NbTextClassifier clf;
  clf.options_ = options;
  clf.n_train_ = records.size();
  clf.vocab_ = build_vocab(docs, options.min_df);

  std::vector<LabeledVector> examples;
  examples.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    examples.push_back({vectorize(docs[i], clf.vocab_), records[i].group_class()});
  }
  clf.model_ = train_nb(examples, clf.vocab_.size(), options.alpha);
  return clf;
}

NbPrediction NbTextClassifier::predict_text(std::string_view text) const {
  return predict_nb(model_, vectorize(tokenize(normalize(text)), vocab_));
}

nlohmann::json NbTextClassifier::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (auto g : model_.classes) classes.push_back(name(g));
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"alpha", model_.alpha},
          {"min_df", options_.min_df},
          {"n_train", n_train_},
          {"classes", classes},
          {"log_prior", model_.log_prior},
          {"vocabulary", vocab_.tokens()},
          {"log_likelihood", model_.log_likelihood}};
}

NbTextClassifier NbTextClassifier::from_json(nlohmann::json const& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat ||
        j.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::kMalformedRecord, "unsupported model format");
    }
    NbTextClassifier clf;
    clf.options_.alpha = j.at("alpha").get<double>();
    clf.options_.min_df = j.at("min_df").get<std::size_t>();
    clf.n_train_ = j.value("n_train", std::size_t{0});
    clf.vocab_ = Vocabulary::from_tokens(j.at("vocabulary").get<std::vector<std::string>>(),
                                         clf.options_.min_df);
    auto& m = clf.model_;
    m.alpha = clf.options_.alpha;
    m.vocab_size = clf.vocab_.size();
    for (auto const& c : j.at("classes")) m.classes.push_back(group_from_json(c));
    m.log_prior = j.at("log_prior").get<std::vector<double>>();
    m.log_likelihood = j.at("log_likelihood").get<std::vector<std::vector<double>>>();
    if (m.log_prior.size() != m.classes.size() || m.log_likelihood.size() != m.classes.size()) {
      throw Error(ErrorCode::kMalformedRecord, "model class tables have inconsistent sizes");
    }
    for (auto const& row : m.log_likelihood) {
      if (row.size() != m.vocab_size) {
        throw Error(ErrorCode::kMalformedRecord, "likelihood row does not match vocabulary size");
      }
    }
    return clf;
  } catch (nlohmann::json::exception const& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("invalid model artifact: ") + e.what());
  }
}

void NbTextClassifier::save(std::filesystem::path const& path) const {
  write_file_atomic(path, to_json().dump() + "\n");
}

NbTextClassifier NbTextClassifier::load(std::filesystem::path const& path) {
  auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (nlohmann::json::parse_error const& e) {
    throw Error(ErrorCode::kMalformedRecord, "model file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json NbTextClassifier::descriptor() const {
  nlohmann::json priors = nlohmann::json::object();
  for (std::size_t c = 0; c < model_.classes.size(); ++c) {
    priors[std::string(name(model_.classes[c]))] = std::exp(model_.log_prior[c]);
  }
  return {{"model", "MultinomialNB"},
          {"alpha", model_.alpha},
          {"min_df", options_.min_df},
          {"vocab_size", model_.vocab_size},
          {"n_train", n_train_},
          {"class_priors", priors}};
}

PredictionRow const* PredictionFile::find(std::string_view record_id) const {
  for (auto const& r : rows) {
    if (r.record_id == record_id) return &r;
  }
  return nullptr;
}

PredictionFile parse_predictions(std::string_view csv_text) {
  auto rows = csv::parse(csv_text);
  if (rows.empty()) {
    throw Error(ErrorCode::kMissingField, "prediction file has no header",
                {{"column", "record_id"}, {"row", 0}});
  }
  auto const& header = rows.front();
  auto find_col = [&](std::string_view wanted) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (normalize(header[i]).text == wanted) return i;
    }
    return std::nullopt;
  };
  auto id_col = find_col("record_id");
  auto pred_col = find_col("predicted");
  for (auto [col, label] : {std::pair{id_col, "record_id"}, std::pair{pred_col, "predicted"}}) {
    if (!col) {
      throw Error(ErrorCode::kMissingField, std::string("missing column '") + label + "'",
                  {{"column", label}, {"row", 0}});
    }
  }
  std::array<std::optional<std::size_t>, kGroupCount> score_cols;
  for (auto g : kAllGroups) score_cols[index_of(g)] = find_col("score_" + std::string(name(g)));

  PredictionFile out;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto const& row = rows[i];
    auto cell = [&](std::size_t col) {
      return col < row.size() ? normalize(row[col]).text : std::string();
    };
    PredictionRow p;
    p.record_id = cell(*id_col);
    if (p.record_id.empty()) {
      throw Error(ErrorCode::kMissingField, "missing record_id in row " + std::to_string(i),
                  {{"column", "record_id"}, {"row", i}});
    }
    auto label = cell(*pred_col);
    auto g = parse_group_class(label);
    if (!g) {
      throw Error(ErrorCode::kUnknownClass,
                  "unknown predicted class '" + label + "' in row " + std::to_string(i),
                  {{"value", label}, {"row", i}});
    }
    p.predicted = *g;
    for (auto gc : kAllGroups) {
      auto const& col = score_cols[index_of(gc)];
      if (!col) continue;
      auto text = cell(*col);
      if (text.empty()) continue;
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) {
        throw Error(ErrorCode::kMalformedRecord,
                    "score '" + text + "' in row " + std::to_string(i) + " is not a number",
                    {{"row", i}, {"value", text}});
      }
      p.scores[index_of(gc)] = v;
    }
    if (!ids.insert(p.record_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate record_id '" + p.record_id + "'",
                  {{"record_id", p.record_id}, {"row", i}});
    }
    out.rows.push_back(std::move(p));
  }
  return out;
}

PredictionFile read_predictions(std::filesystem::path const& path) {
  return parse_predictions(read_file(path));
}

std::string format_predictions(PredictionFile const& preds) {
  std::string out = csv::format_row(
      {"record_id", "predicted", "score_Regulation", "score_Neutral", "score_Deregulation"});
  for (auto const& p : preds.rows) {
    csv::Row row{p.record_id, std::string(name(p.predicted))};
    for (auto const& s : p.scores) row.push_back(s ? format_double(*s) : std::string());
    out += csv::format_row(row);
  }
  return out;
}

PredictionFile classify_records(NbTextClassifier const& clf, std::span<GatRecord const> records) {
  PredictionFile out;
  out.rows.reserve(records.size());
  auto const& classes = clf.model().classes;
  for (auto const& r : records) {
    auto pred = clf.predict(r);
    PredictionRow row;
    row.record_id = r.record_id;
    row.predicted = pred.label;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      row.scores[index_of(classes[c])] = pred.log_scores[c];
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace gaztrack
