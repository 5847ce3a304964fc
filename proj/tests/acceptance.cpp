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


// Acceptance checks. Prints one PASS, FAIL or SKIP line per criterion and
// exits non-zero if any check fails. Tolerances are fixed below.

#include "gaztrack/document.hpp"
#include "gaztrack/evaluation.hpp"
#include "gaztrack/gat.hpp"
#include "gaztrack/io.hpp"
#include "gaztrack/naive_bayes.hpp"
#include "gaztrack/rules.hpp"
#include "gaztrack/service.hpp"

#include "oracles.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <unistd.h>

using namespace gaztrack;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricTolerance = 1e-9;
constexpr double kPosteriorTolerance = 1e-12;
constexpr double kMetricsSeconds = 5.0;
constexpr double kStratSeconds = 5.0;
constexpr double kNullMccBound = 0.15;
constexpr double kGatF1Target = 0.601;
constexpr double kGatAccTarget = 0.658;
constexpr double kGatTolerance = 0.08;
constexpr std::size_t kGatRecords = 1181;
constexpr double kGatProportions[3] = {0.520, 0.185, 0.295};  // Regulation, Neutral, Deregulation
constexpr double kGatProportionTolerance = 0.005;
constexpr double kGatSeconds = 60.0;

fs::path fixture(std::string const& name) { return fs::path(GAZTRACK_FIXTURES) / name; }

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind;
  std::string note;
};

Outcome pass(std::string note) { return {Outcome::kPass, std::move(note)}; }
Outcome fail(std::string note) { return {Outcome::kFail, std::move(note)}; }
Outcome skip(std::string note) { return {Outcome::kSkip, std::move(note)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------- metrics

Outcome metric_oracles() {
  auto const t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240101);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto m = oracle::random_matrix(rng, 3, 50);
    if (oracle::expand(m).empty()) m[0][0] = 1;
    auto cm = ConfusionMatrix::from_rows(m);
    worst = std::max({worst, std::fabs(accuracy(cm) - oracle::accuracy(m)),
                      std::fabs(weighted_f1(cm) - oracle::weighted_f1(m)),
                      std::fabs(mcc(cm) - oracle::mcc(m))});
  }
  for (int i = 0; i < 1000; ++i) {
    auto m = oracle::random_matrix(rng, 2, 50);
    if (oracle::expand(m).empty()) m[0][0] = 1;
    worst = std::max(worst, std::fabs(mcc(ConfusionMatrix::from_rows(m)) - oracle::binary_mcc(m)));
  }
  double const secs = seconds_since(t0);
  std::string note = "max |diff| " + sci(worst) + ", " + fmt(secs, 2) + " s";
  if (worst > kMetricTolerance) return fail(note);
  if (secs > kMetricsSeconds) return fail(note + " (too slow)");
  return pass(note);
}

// ---------------------------------------------------------- stratification

Outcome stratification() {
  auto const t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::size_t constexpr k = 10;
  double worst = 0;
  for (int iter = 0; iter < 100; ++iter) {
    std::size_t const n = k + rng() % (2000 - k + 1);
    std::vector<LabeledId> labels;
    std::array<std::size_t, 3> class_n{};
    for (std::size_t i = 0; i < n; ++i) {
      auto g = kAllGroups[rng() % 3];
      ++class_n[index_of(g)];
      labels.push_back({"r" + std::to_string(i), g});
    }
    auto a = stratified_folds(labels, k, rng());
    std::vector<int> seen(n, 0);
    std::vector<std::array<std::size_t, 3>> counts(k, {0, 0, 0});
    auto const members = a.members();
    for (std::size_t f = 0; f < k; ++f) {
      for (auto i : members[f]) {
        ++seen[i];
        ++counts[f][index_of(labels[i].label)];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i] != 1 || a.fold_of[i] >= k) return fail("record " + std::to_string(i) + " not in exactly one fold");
    }
    for (auto const& row : counts) {
      for (std::size_t c = 0; c < 3; ++c) {
        worst = std::max(worst, std::fabs(static_cast<double>(row[c]) -
                                          static_cast<double>(class_n[c]) / static_cast<double>(k)));
      }
    }
  }
  double const secs = seconds_since(t0);
  std::string note = "max deviation " + fmt(worst, 3) + ", " + fmt(secs, 2) + " s";
  if (worst > 1.0) return fail(note);
  if (secs > kStratSeconds) return fail(note + " (too slow)");
  return pass(note);
}

// ---------------------------------------------------------- naive Bayes

CountVector sparse(std::vector<unsigned> const& dense) {
  CountVector v;
  for (std::size_t t = 0; t < dense.size(); ++t) {
    if (dense[t]) {
      v.entries.emplace_back(t, dense[t]);
      v.total += dense[t];
    }
  }
  return v;
}

Outcome nb_correctness() {
  // Hand corpus: doc A = {w0} in Regulation, doc B = {w1} in Neutral, alpha 1.
  std::vector<LabeledVector> hand = {{sparse({1, 0}), GroupClass::kRegulation},
                                     {sparse({0, 1}), GroupClass::kNeutral}};
  auto m = train_nb(hand, 2, 1.0);
  int const reg = m.slot(GroupClass::kRegulation);
  int const neu = m.slot(GroupClass::kNeutral);
  double worst = 0;
  auto track = [&](double got, double want) { worst = std::max(worst, std::fabs(got - want)); };
  track(m.log_prior[reg], std::log(0.5));
  track(m.log_prior[neu], std::log(0.5));
  track(m.log_likelihood[reg][0], std::log(2.0 / 3.0));
  track(m.log_likelihood[reg][1], std::log(1.0 / 3.0));
  track(m.log_likelihood[neu][0], std::log(1.0 / 3.0));
  track(m.log_likelihood[neu][1], std::log(2.0 / 3.0));
  auto p = predict_nb(m, sparse({1, 0}));
  track(p.log_scores[reg], std::log(0.5 * 2.0 / 3.0));
  track(p.log_scores[neu], std::log(0.5 * 1.0 / 3.0));
  // Normalized posterior of Regulation given w0 is 2/3.
  double const post = std::exp(p.log_scores[reg]) / (std::exp(p.log_scores[reg]) + std::exp(p.log_scores[neu]));
  track(post, 2.0 / 3.0);
  if (worst > kPosteriorTolerance || p.label != GroupClass::kRegulation) {
    return fail("hand corpus max |diff| " + sci(worst));
  }

  std::mt19937_64 rng(99);
  int mismatches = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t const v = 1 + rng() % 6;
    std::size_t const n_docs = 1 + rng() % 8;
    std::vector<std::pair<int, std::vector<unsigned>>> dense;
    std::vector<LabeledVector> ex;
    for (std::size_t d = 0; d < n_docs; ++d) {
      int const c = static_cast<int>(rng() % 3);
      std::vector<unsigned> row(v);
      for (auto& x : row) x = static_cast<unsigned>(rng() % 4);
      dense.emplace_back(c, row);
      ex.push_back({sparse(row), static_cast<GroupClass>(c)});
    }
    std::vector<unsigned> q(v);
    for (auto& x : q) x = static_cast<unsigned>(rng() % 3);
    auto model = train_nb(ex, v, 1.0);
    if (static_cast<int>(predict_nb(model, sparse(q)).label) != oracle::nb_argmax(dense, q, 1, 1)) ++mismatches;
  }
  std::string note = "hand max |diff| " + sci(worst) + ", " + std::to_string(mismatches) +
                     "/200 argmax mismatches";
  return mismatches == 0 ? pass(note) : fail(note);
}

// ------------------------------------------------------ cross-validation

std::vector<GatRecord> separable_corpus(std::size_t per_class) {
  std::vector<GatRecord> records;
  char const* signal[] = {"fiscaliza", "nomeia", "revoga"};
  FineClass const fine[] = {FineClass::kRegulation, FineClass::kNeutral, FineClass::kRevocation};
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      records.push_back(make_record("s" + std::to_string(c) + "-" + std::to_string(i),
                                    *Date::parse_iso("2020-01-01"), "T",
                                    std::string(signal[c]) + " ato " + std::to_string(i),
                                    "texto comum do diario oficial", fine[c]));
    }
  }
  return records;
}

Outcome separable_cv() {
  auto report = run_cv(separable_corpus(20), nb_factory({1.0, 2}), 10, 42, "MultinomialNB");
  for (auto const& f : report.folds) {
    if (f.metrics.mcc != 1.0 || f.metrics.acc != 1.0 || f.metrics.weighted_f1 != 1.0) {
      return fail("fold " + std::to_string(f.fold) + " is not perfect");
    }
  }
  if (report.folds.size() != 10 || report.mean.mcc != 1.0 || report.mean.acc != 1.0 ||
      report.mean.weighted_f1 != 1.0) {
    return fail("mean metrics are not exactly 1.0");
  }
  return pass("10/10 folds at MCC = Acc = F1 = 1.0");
}

Outcome permutation_null() {
  // Words carry no information about the permuted labels.
  std::mt19937_64 text_rng(5);
  std::vector<std::string> contexts;
  for (int i = 0; i < 300; ++i) {
    std::string s;
    for (int w = 0; w < 12; ++w) s += "w" + std::to_string(text_rng() % 60) + " ";
    contexts.push_back(s);
  }
  FineClass const fine[] = {FineClass::kRegulation, FineClass::kNeutral, FineClass::kDeregulation};
  double sum = 0, worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<int> labels(300);
    for (int i = 0; i < 300; ++i) labels[i] = i % 3;
    std::mt19937_64 rng(seed);
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<GatRecord> records;
    for (int i = 0; i < 300; ++i) {
      records.push_back(make_record("p" + std::to_string(i), *Date::parse_iso("2020-01-01"), "T",
                                    contexts[i], "x", fine[labels[i]]));
    }
    double const m = run_cv(records, nb_factory({1.0, 2}), 10, seed, "MultinomialNB").mean.mcc;
    sum += m;
    worst = std::max(worst, std::fabs(m));
  }
  double const mean = sum / 20;
  std::string note = "mean MCC over 20 seeds " + fmt(mean) + " (max |seed mean| " + fmt(worst) + ")";
  return std::fabs(mean) <= kNullMccBound ? pass(note) : fail(note);
}

Outcome gat_reference() {
  char const* path = std::getenv("GAZTRACK_GAT_CSV");
  if (!path || !*path) return skip("GAZTRACK_GAT_CSV not set; GAT file not available offline");
  auto const t0 = std::chrono::steady_clock::now();
  auto records = load_gat(path);
  auto stats = compute_stats(records);
  auto report = run_cv(records, nb_factory({1.0, 2}), 10, 42, "MultinomialNB");
  double const secs = seconds_since(t0);
  std::vector<std::string> problems;
  if (stats.n_records != kGatRecords) problems.push_back("n=" + std::to_string(stats.n_records));
  for (std::size_t c = 0; c < 3; ++c) {
    if (std::fabs(stats.group_proportions[c] - kGatProportions[c]) > kGatProportionTolerance) {
      problems.push_back(std::string(name(kAllGroups[c])) + " share " + fmt(stats.group_proportions[c], 3));
    }
  }
  if (std::fabs(report.mean.weighted_f1 - kGatF1Target) > kGatTolerance) problems.push_back("weighted F1");
  if (std::fabs(report.mean.acc - kGatAccTarget) > kGatTolerance) problems.push_back("accuracy");
  if (secs > kGatSeconds) problems.push_back("runtime");
  std::string note = "F1 " + fmt(report.mean.weighted_f1, 3) + ", acc " + fmt(report.mean.acc, 3) + ", " +
                     fmt(secs, 1) + " s";
  if (problems.empty()) return pass(note);
  for (auto const& p : problems) note += "; " + p;
  return fail(note);
}

// ------------------------------------------------------------ rule DSL

Outcome rule_dsl() {
  auto ten = load_rules(fixture("themes10.rules"));
  auto reparsed = parse_rules(to_source(ten));
  if (ten.rules.size() != 10 || !same_rules(ten, reparsed) || to_source(reparsed) != to_source(ten)) {
    return fail("ten-theme file is not a print/parse fixed point");
  }
  auto five = load_rules(fixture("themes5.rules"));
  auto docs = load_corpus(fixture("corpus.jsonl"), CorpusFormat::kJsonl);
  if (docs.size() != 20) return fail("fixture corpus has " + std::to_string(docs.size()) + " documents");
  std::size_t pairs = 0;
  for (auto const* rs : {&five, &ten}) {
    for (auto const& d : docs) {
      for (auto const& r : rs->rules) {
        ++pairs;
        if (match_theme(r, normalize(d.match_text())) != oracle::theme_matches(r, d.match_text())) {
          return fail("matcher disagrees with brute force on " + d.doc_id + " / " + r.theme_name);
        }
      }
    }
  }
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 500; ++i) {
    auto const& d = docs[rng() % docs.size()];
    auto const original = normalize(d.match_text());
    auto const mutated = normalize(oracle::mutate_accents_and_case(rng, d.match_text()));
    for (auto const* rs : {&five, &ten}) {
      for (auto const& r : rs->rules) {
        if (match_theme(r, mutated) != match_theme(r, original)) {
          return fail("mutation changed " + d.doc_id + " / " + r.theme_name);
        }
      }
    }
  }
  return pass("fixed point; " + std::to_string(pairs) + " (doc, theme) pairs agree; 500 mutations invariant");
}

// ------------------------------------------------------------ end to end

Outcome end_to_end() {
  auto dir = fs::temp_directory_path() / ("gaztrack-accept-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  ServiceConfig config;
  config.port = 0;
  config.data_dir = dir;
  config.rules_path = fixture("themes5.rules");
  config.access_log = false;
  Outcome result = fail("not run");
  {
    ReviewService service(config);
    int const port = service.bind();
    std::thread server([&] { service.run(); });
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    for (int i = 0; i < 200 && !c.Get("/api/health"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    result = [&]() -> Outcome {
      auto posted = c.Post("/api/documents", read_file(fixture("corpus.jsonl")), "application/x-ndjson");
      if (!posted || posted->status != 201) return fail("ingest failed");
      auto queue = c.Get("/api/queue?status=pending");
      if (!queue || queue->status != 200) return fail("queue failed");
      auto items = json::parse(queue->body);
      if (items.empty()) return fail("queue is empty after ingest");
      std::map<std::string, FineClass> submitted;
      std::size_t n = 0;
      for (auto const& item : items) {
        auto const cls = kAllFineClasses[n++ % kAllFineClasses.size()];
        json body = {{"action", "Ato " + std::to_string(n)},
                     {"circumstance", "Revisado em lote"},
                     {"classification", std::string(name(cls))}};
        auto r = c.Post("/api/reviews/" + item["item_id"].get<std::string>(), body.dump(), "application/json");
        if (!r || r->status != 200) return fail("review of " + item["item_id"].get<std::string>() + " failed");
        submitted[item["doc"]["doc_id"].get<std::string>()] = cls;
      }
      auto csv = c.Get("/api/export/gat.csv");
      if (!csv || csv->status != 200) return fail("export failed");
      auto const path = dir / "export.csv";
      write_file_atomic(path, csv->body);
      auto records = load_gat(path);
      if (records.size() != submitted.size()) return fail("export has " + std::to_string(records.size()) + " rows");
      for (auto const& r : records) {
        auto it = submitted.find(r.record_id);
        if (it == submitted.end()) return fail("unexpected record " + r.record_id);
        if (r.fine_class != it->second || r.group_class() != group_of(it->second)) {
          return fail("label mismatch for " + r.record_id);
        }
      }
      return pass(std::to_string(records.size()) + " reviewed records round-trip with derived groups");
    }();
    service.stop();
    server.join();
  }
  fs::remove_all(dir);
  return result;
}

}  // namespace

int main() {
  struct Criterion {
    char const* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> const criteria = {
      {"metric-oracle-equivalence", metric_oracles},
      {"stratification", stratification},
      {"nb-correctness", nb_correctness},
      {"separable-corpus-cv", separable_cv},
      {"permutation-null", permutation_null},
      {"gat-reference", gat_reference},
      {"rule-dsl", rule_dsl},
      {"end-to-end-batch", end_to_end},
  };
  int failures = 0;
  for (auto const& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (std::exception const& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    char const* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    if (o.kind == Outcome::kFail) ++failures;
    std::cout << tag << " " << c.name << ": " << o.note << "\n";
  }
  return failures == 0 ? 0 : 1;
}
