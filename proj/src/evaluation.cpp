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

#include "gaztrack/evaluation.hpp"

#include "gaztrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace gaztrack {
namespace {

void require_nonempty(ConfusionMatrix const& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix is empty");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t const threshold = (0 - bound) % bound;
  while (true) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

Metrics mean_of(std::vector<FoldResult> const& folds) {
  Metrics m;
  for (auto const& f : folds) {
    m.mcc += f.metrics.mcc;
    m.acc += f.metrics.acc;
    m.weighted_f1 += f.metrics.weighted_f1;
  }
  double n = static_cast<double>(folds.size());
  m.mcc /= n;
  m.acc /= n;
  m.weighted_f1 /= n;
  return m;
}

Metrics sample_std_of(std::vector<FoldResult> const& folds, Metrics const& mean) {
  Metrics s;
  if (folds.size() < 2) return s;
  for (auto const& f : folds) {
    s.mcc += (f.metrics.mcc - mean.mcc) * (f.metrics.mcc - mean.mcc);
    s.acc += (f.metrics.acc - mean.acc) * (f.metrics.acc - mean.acc);
    s.weighted_f1 +=
        (f.metrics.weighted_f1 - mean.weighted_f1) * (f.metrics.weighted_f1 - mean.weighted_f1);
  }
  double d = static_cast<double>(folds.size() - 1);
  s.mcc = std::sqrt(s.mcc / d);
  s.acc = std::sqrt(s.acc / d);
  s.weighted_f1 = std::sqrt(s.weighted_f1 / d);
  return s;
}

nlohmann::json metrics_json(Metrics const& m) {
  return {{"mcc", m.mcc}, {"acc", m.acc}, {"weighted_f1", m.weighted_f1}};
}

Metrics metrics_from_json(nlohmann::json const& j) {
  return {j.at("mcc").get<double>(), j.at("acc").get<double>(),
          j.at("weighted_f1").get<double>()};
}

class NbFoldClassifier : public FoldClassifier {
 public:
  explicit NbFoldClassifier(NbTextClassifier::Options options) : options_(options) {}

  void fit(std::span<GatRecord const> train) override {
    clf_ = NbTextClassifier::fit(train, options_);
  }
  GroupClass predict(GatRecord const& record) const override {
    return clf_.predict(record).label;
  }

 private:
  NbTextClassifier::Options options_;
  NbTextClassifier clf_;
};

std::string pm(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", mean, sd);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  // Column widths count code points, not bytes.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes) : n_(n_classes), cells_(n_classes * n_classes) {
  if (n_classes == 0) throw Error(ErrorCode::kInvalidArgument, "confusion matrix needs >= 1 class");
}

ConfusionMatrix ConfusionMatrix::from_rows(std::vector<std::vector<std::uint64_t>> const& rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "confusion matrix needs >= 1 class");
  ConfusionMatrix cm(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) {
      throw Error(ErrorCode::kInvalidArgument, "confusion matrix must be square");
    }
    for (std::size_t c = 0; c < rows.size(); ++c) cm.add(r, c, rows[r][c]);
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= n_ || predicted >= n_) {
    throw Error(ErrorCode::kInvalidArgument, "class index outside confusion matrix");
  }
  cells_[truth * n_ + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto v : cells_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t t = 0;
  for (std::size_t c = 0; c < n_; ++c) t += at(truth, c);
  return t;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < n_; ++r) t += at(r, predicted);
  return t;
}

std::vector<std::vector<std::uint64_t>> ConfusionMatrix::rows() const {
  std::vector<std::vector<std::uint64_t>> out(n_, std::vector<std::uint64_t>(n_));
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) out[r][c] = at(r, c);
  return out;
}

double accuracy(ConfusionMatrix const& cm) {
  require_nonempty(cm);
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

double weighted_f1(ConfusionMatrix const& cm) {
  require_nonempty(cm);
  double const total = static_cast<double>(cm.total());
  double sum = 0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    auto const support = cm.row_sum(c);
    auto const predicted = cm.col_sum(c);
    auto const tp = cm.at(c, c);
    if (support == 0 || predicted == 0 || tp == 0) continue;
    double p = static_cast<double>(tp) / static_cast<double>(predicted);
    double r = static_cast<double>(tp) / static_cast<double>(support);
    sum += static_cast<double>(support) / total * (2 * p * r / (p + r));
  }
  return sum;
}

double mcc(ConfusionMatrix const& cm) {
  require_nonempty(cm);
  // Exact integer arithmetic up to the square root.
  __int128 const s = cm.total();
  __int128 const c = cm.trace();
  __int128 pt = 0, pp = 0, tt = 0;
  for (std::size_t k = 0; k < cm.size(); ++k) {
    __int128 p = cm.col_sum(k);
    __int128 t = cm.row_sum(k);
    pt += p * t;
    pp += p * p;
    tt += t * t;
  }
  __int128 const cov_xy = c * s - pt;
  __int128 const cov_xx = s * s - pp;
  __int128 const cov_yy = s * s - tt;
  if (cov_xx == 0 || cov_yy == 0) return 0.0;
  return static_cast<double>(cov_xy) /
         std::sqrt(static_cast<double>(cov_xx) * static_cast<double>(cov_yy));
}

Metrics compute_metrics(ConfusionMatrix const& cm) {
  return {mcc(cm), accuracy(cm), weighted_f1(cm)};
}

std::vector<std::vector<std::size_t>> FoldAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < fold_of.size(); ++i) out[fold_of[i]].push_back(i);
  return out;
}

FoldAssignment stratified_folds(std::span<LabeledId const> labels, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2 || k > labels.size()) {
    throw Error(ErrorCode::kBadK,
                "k must satisfy 2 <= k <= n (k=" + std::to_string(k) +
                    ", n=" + std::to_string(labels.size()) + ")",
                {{"k", k}, {"n", labels.size()}});
  }
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.record_ids.reserve(labels.size());
  fa.fold_of.assign(labels.size(), 0);

  std::unordered_set<std::string> seen;
  std::array<std::vector<std::size_t>, kGroupCount> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.insert(labels[i].record_id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate record_id '" + labels[i].record_id + "'",
                  {{"record_id", labels[i].record_id}});
    }
    fa.record_ids.push_back(labels[i].record_id);
    by_class[index_of(labels[i].label)].push_back(i);
  }

  std::mt19937_64 rng(seed);
  for (std::size_t ci = 0; ci < kGroupCount; ++ci) {
    auto& members = by_class[ci];
    for (std::size_t i = members.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_below(rng, i));
      std::swap(members[i - 1], members[j]);
    }
    std::size_t const start = ci % k;
    for (std::size_t j = 0; j < members.size(); ++j) {
      fa.fold_of[members[j]] = (start + j) % k;
    }
  }
  return fa;
}

ClassifierFactory nb_factory(NbTextClassifier::Options options) {
  return [options] { return std::make_unique<NbFoldClassifier>(options); };
}

CvReport run_cv(std::span<GatRecord const> records, ClassifierFactory const& factory,
                std::size_t k, std::uint64_t seed, std::string model_name) {
  std::vector<LabeledId> labels;
  labels.reserve(records.size());
  for (auto const& r : records) labels.push_back({r.record_id, r.group_class()});
  auto assignment = stratified_folds(labels, k, seed);
  auto members = assignment.members();
  for (std::size_t f = 0; f < k; ++f) {
    if (members[f].empty()) {
      throw Error(ErrorCode::kEmptyFold, "fold " + std::to_string(f) + " has no records",
                  {{"fold", f}});
    }
  }

  auto run_fold = [&](std::size_t f) {
    std::vector<GatRecord> train;
    train.reserve(records.size() - members[f].size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (assignment.fold_of[i] != f) train.push_back(records[i]);
    }
    auto clf = factory();
    clf->fit(train);
    FoldResult res;
    res.fold = f;
    res.n_test = members[f].size();
    for (auto i : members[f]) res.confusion.add(records[i].group_class(), clf->predict(records[i]));
    res.metrics = compute_metrics(res.confusion);
    return res;
  };

  std::vector<std::future<FoldResult>> pending;
  pending.reserve(k);
  for (std::size_t f = 0; f < k; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));

  CvReport report;
  report.model = std::move(model_name);
  report.k = k;
  report.seed = seed;
  std::exception_ptr first_error;
  for (auto& p : pending) {
    try {
      report.folds.push_back(p.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  report.mean = mean_of(report.folds);
  report.stddev = sample_std_of(report.folds, report.mean);
  return report;
}

nlohmann::json to_json(CvReport const& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (auto const& f : report.folds) {
    auto j = metrics_json(f.metrics);
    j["fold"] = f.fold;
    j["n"] = f.n_test;
    j["confusion"] = f.confusion.rows();
    folds.push_back(std::move(j));
  }
  return {{"model", report.model},
          {"k", report.k},
          {"seed", report.seed},
          {"folds", folds},
          {"mean", metrics_json(report.mean)},
          {"std", metrics_json(report.stddev)}};
}

CvReport report_from_json(nlohmann::json const& j) {
  try {
    CvReport r;
    r.model = j.at("model").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (auto const& f : j.at("folds")) {
      FoldResult fr;
      fr.fold = f.at("fold").get<std::size_t>();
      fr.n_test = f.value("n", std::size_t{0});
      fr.metrics = metrics_from_json(f);
      if (f.contains("confusion")) {
        fr.confusion = ConfusionMatrix::from_rows(
            f["confusion"].get<std::vector<std::vector<std::uint64_t>>>());
      }
      r.folds.push_back(std::move(fr));
    }
    r.mean = metrics_from_json(j.at("mean"));
    r.stddev = metrics_from_json(j.at("std"));
    return r;
  } catch (nlohmann::json::exception const& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("invalid CV report: ") + e.what());
  }
}

std::string format_table(CvReport const& report) {
  std::string out;
  out += "Stratified " + std::to_string(report.k) + "-fold cross-validation (seed " +
         std::to_string(report.seed) + ")\n\n";
  out += pad("Fold", 8) + pad("n", 8) + pad("MCC", 10) + pad("Acc", 10) + "F1-score\n";
  for (auto const& f : report.folds) {
    out += pad(std::to_string(f.fold), 8) + pad(std::to_string(f.n_test), 8) +
           pad(fixed3(f.metrics.mcc), 10) + pad(fixed3(f.metrics.acc), 10) +
           fixed3(f.metrics.weighted_f1) + "\n";
  }
  out += "\n";
  std::size_t w = std::max<std::size_t>(report.model.size() + 2, 8);
  out += pad("Model", w) + pad("MCC", 17) + pad("Acc", 17) + "F1-score\n";
  out += pad(report.model, w) + pad(pm(report.mean.mcc, report.stddev.mcc), 17) +
         pad(pm(report.mean.acc, report.stddev.acc), 17) +
         pm(report.mean.weighted_f1, report.stddev.weighted_f1) + "\n";
  return out;
}

PredictionEvaluation evaluate_predictions(std::span<GatRecord const> records,
                                          PredictionFile const& preds) {
  std::unordered_map<std::string, GroupClass> by_id;
  by_id.reserve(preds.rows.size());
  for (auto const& p : preds.rows) by_id.emplace(p.record_id, p.predicted);

  PredictionEvaluation out;
  for (auto const& r : records) {
    auto it = by_id.find(r.record_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kMissingPrediction, "no prediction for record '" + r.record_id + "'",
                  {{"record_id", r.record_id}});
    }
    out.confusion.add(r.group_class(), it->second);
  }
  out.metrics = compute_metrics(out.confusion);
  return out;
}

nlohmann::json to_json(PredictionEvaluation const& e) {
  auto j = metrics_json(e.metrics);
  j["n"] = e.confusion.total();
  j["confusion"] = e.confusion.rows();
  j["labels"] = {"Regulation", "Neutral", "Deregulation"};
  return j;
}

}  // namespace gaztrack
