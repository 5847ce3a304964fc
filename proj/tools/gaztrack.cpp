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


// gaztrack command-line tool. Talks to the library only through the C API.

#include "gaztrack/gaztrack.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

/// A failed C API call, carrying what gt_last_error_* reported.
struct ApiError {
  gt_status status;
  std::string message;
  std::string detail;
};

void check(gt_status status) {
  if (status != GT_OK) throw ApiError{status, gt_last_error_message(), gt_last_error_detail()};
}

int exit_code_for(gt_status status) {
  switch (gt_status_category(status)) {
    case GT_CATEGORY_OK: return kExitOk;
    case GT_CATEGORY_USAGE: return kExitUsage;
    case GT_CATEGORY_DATA: return kExitData;
    case GT_CATEGORY_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

/// Takes ownership of a gt_* allocated string.
std::string take(char* s) {
  std::string out = s ? s : "";
  gt_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Rules = std::unique_ptr<gt_ruleset, Deleter<gt_ruleset, gt_ruleset_free>>;
using Corpus = std::unique_ptr<gt_corpus, Deleter<gt_corpus, gt_corpus_free>>;
using StoreHandle = std::unique_ptr<gt_store, Deleter<gt_store, gt_store_free>>;
using Dataset = std::unique_ptr<gt_dataset, Deleter<gt_dataset, gt_dataset_free>>;
using Model = std::unique_ptr<gt_model, Deleter<gt_model, gt_model_free>>;
using Service = std::unique_ptr<gt_service, Deleter<gt_service, gt_service_free>>;

struct Globals {
  bool json_output = false;
  std::string config_path;

  char const* config() const { return config_path.empty() ? nullptr : config_path.c_str(); }
};

json resolve_config(Globals const& g, json const& overrides = json::object()) {
  char* out = nullptr;
  auto const text = overrides.dump();
  check(gt_config_resolve(g.config(), text.c_str(), &out));
  return json::parse(take(out));
}

Dataset load_dataset(std::string const& path) {
  gt_dataset* ds = nullptr;
  check(gt_dataset_load(path.c_str(), nullptr, &ds));
  return Dataset(ds);
}

Rules load_rules(std::optional<std::string> const& path) {
  gt_ruleset* rs = nullptr;
  check(path ? gt_ruleset_load(path->c_str(), &rs) : gt_ruleset_demo(&rs));
  return Rules(rs);
}

std::string read_text(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError{GT_E_IO, "cannot open " + path, json{{"path", path}}.dump()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw ApiError{GT_E_IO, "cannot write " + path, json{{"path", path}}.dump()};
  }
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
  std::string path;
  std::string format;
  std::string rules;
  std::string data_dir;
  std::string xml_config;
};

int cmd_ingest(Globals const& g, IngestArgs const& a) {
  json overrides = json::object();
  if (!a.data_dir.empty()) overrides["data_dir"] = a.data_dir;
  if (!a.rules.empty()) overrides["rules"] = a.rules;
  auto config = resolve_config(g, overrides);

  std::string format = a.format;
  if (format.empty()) format = std::filesystem::is_directory(a.path) ? "xml-dir" : "jsonl";
  std::string mapping;
  if (!a.xml_config.empty()) mapping = read_text(a.xml_config);

  std::optional<std::string> rules_path;
  if (!config["rules"].is_null()) rules_path = config["rules"].get<std::string>();
  auto rules = load_rules(rules_path);

  gt_corpus* corpus = nullptr;
  check(gt_corpus_load(a.path.c_str(), format.c_str(), mapping.empty() ? nullptr : mapping.c_str(),
                       &corpus));
  Corpus corpus_owner(corpus);

  gt_store* store = nullptr;
  auto const data_dir = config["data_dir"].get<std::string>();
  check(gt_store_open(data_dir.c_str(), &store));
  StoreHandle store_owner(store);

  char* out = nullptr;
  check(gt_store_enqueue(store, corpus, rules.get(), &out));
  auto result = json::parse(take(out));
  result["data_dir"] = data_dir;

  if (g.json_output) {
    std::cout << result.dump() << "\n";
    return kExitOk;
  }
  std::cout << "documents: " << result["received"].get<std::size_t>() << "\n"
            << "enqueued:  " << result["enqueued"].get<std::size_t>() << "\n"
            << "rules:     " << result["rules_version"].get<std::string>() << "\n";
  for (auto const& [theme, count] : result["per_theme"].items()) {
    std::cout << "  " << theme << ": " << count.get<std::size_t>() << "\n";
  }
  return kExitOk;
}

int cmd_classify(Globals const& g, std::string const& gat, std::string const& model_path,
                 std::string const& out_path) {
  auto ds = load_dataset(gat);
  gt_model* model = nullptr;
  check(gt_model_load(model_path.c_str(), &model));
  Model model_owner(model);
  char* out = nullptr;
  check(gt_model_predict_csv(model, ds.get(), &out));
  auto csv = take(out);
  if (!out_path.empty()) {
    write_text(out_path, csv);
    if (g.json_output) {
      std::cout << json{{"predictions", out_path}, {"rows", gt_dataset_size(ds.get())}}.dump() << "\n";
    }
    return kExitOk;
  }
  std::cout << csv;
  return kExitOk;
}

struct ModelArgs {
  std::optional<double> alpha;
  std::optional<std::size_t> min_df;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;

  json overrides() const {
    json j = json::object();
    if (alpha) j["alpha"] = *alpha;
    if (min_df) j["min_df"] = *min_df;
    if (k) j["k"] = *k;
    if (seed) j["seed"] = *seed;
    return j;
  }
};

int cmd_train(Globals const& g, std::string const& gat, std::string const& out_path,
              ModelArgs const& m) {
  auto config = resolve_config(g, m.overrides());
  auto ds = load_dataset(gat);
  gt_model* model = nullptr;
  check(gt_model_train(ds.get(), config["alpha"].get<double>(), config["min_df"].get<std::size_t>(),
                       &model));
  Model model_owner(model);
  check(gt_model_save(model, out_path.c_str()));
  char* out = nullptr;
  check(gt_model_describe(model, &out));
  auto descriptor = json::parse(take(out));
  descriptor["path"] = out_path;
  if (g.json_output) {
    std::cout << descriptor.dump() << "\n";
    return kExitOk;
  }
  std::cout << "model saved to " << out_path << "\n"
            << "vocabulary: " << descriptor["vocab_size"].get<std::size_t>() << " tokens, "
            << descriptor["n_train"].get<std::size_t>() << " training records\n"
            << "class priors:\n";
  for (auto const& [cls, p] : descriptor["class_priors"].items()) {
    std::cout << "  " << cls << ": " << fixed(p.get<double>(), 4) << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(Globals const& g, std::string const& gat, ModelArgs const& m) {
  auto config = resolve_config(g, m.overrides());
  auto ds = load_dataset(gat);
  char* out = nullptr;
  check(gt_evaluate_cv(ds.get(), config["k"].get<std::size_t>(), config["seed"].get<std::uint64_t>(),
                       config["alpha"].get<double>(), config["min_df"].get<std::size_t>(), &out));
  auto report = take(out);
  std::cout << report << "\n";
  if (g.json_output) return kExitOk;
  check(gt_format_report_table(report.c_str(), &out));
  std::cout << "\n" << take(out);
  return kExitOk;
}

int cmd_evaluate_preds(Globals const& g, std::string const& gat, std::string const& preds) {
  auto ds = load_dataset(gat);
  char* out = nullptr;
  check(gt_evaluate_predictions(ds.get(), preds.c_str(), &out));
  auto result = json::parse(take(out));
  if (g.json_output) {
    std::cout << result.dump() << "\n";
    return kExitOk;
  }
  std::cout << "records: " << result["n"].get<std::size_t>() << "\n"
            << "MCC:     " << fixed(result["mcc"].get<double>(), 3) << "\n"
            << "Acc:     " << fixed(result["acc"].get<double>(), 3) << "\n"
            << "F1:      " << fixed(result["weighted_f1"].get<double>(), 3) << "\n"
            << "confusion (rows gold, columns predicted; Regulation, Neutral, Deregulation):\n";
  for (auto const& row : result["confusion"]) {
    std::cout << " ";
    for (auto const& cell : row) std::cout << " " << cell.get<std::size_t>();
    std::cout << "\n";
  }
  return kExitOk;
}

/// Published figures for the reference GAT release, with the tolerance
/// within which an observed value is considered a match.
struct Reference {
  char const* figure;
  double expected;
  double tolerance;
};

constexpr Reference kReferenceFigures[] = {
    {"n_records", 1181, 0},
    {"proportion_regulation_pct", 52.0, 0.5},
    {"proportion_neutral_pct", 18.5, 0.5},
    {"proportion_deregulation_pct", 29.5, 0.5},
    {"action_words_mean", 29.1, 1.0},
    {"action_words_std", 19.6, 1.0},
    {"circumstance_words_mean", 70.0, 1.0},
    {"circumstance_words_std", 54.0, 1.0},
};

int cmd_stats(Globals const& g, std::string const& gat) {
  auto ds = load_dataset(gat);
  char* out = nullptr;
  check(gt_dataset_stats(ds.get(), &out));
  auto stats = json::parse(take(out));

  auto const& props = stats["group_proportions"];
  std::map<std::string, double> observed = {
      {"n_records", stats["n_records"].get<double>()},
      {"proportion_regulation_pct", 100 * props["Regulation"].get<double>()},
      {"proportion_neutral_pct", 100 * props["Neutral"].get<double>()},
      {"proportion_deregulation_pct", 100 * props["Deregulation"].get<double>()},
      {"action_words_mean", stats["action_words_mean"].get<double>()},
      {"action_words_std", stats["action_words_std"].get<double>()},
      {"circumstance_words_mean", stats["circumstance_words_mean"].get<double>()},
      {"circumstance_words_std", stats["circumstance_words_std"].get<double>()},
  };
  json checks = json::array();
  for (auto const& ref : kReferenceFigures) {
    double const value = observed.at(ref.figure);
    checks.push_back({{"figure", ref.figure},
                      {"expected", ref.expected},
                      {"observed", value},
                      {"tolerance", ref.tolerance},
                      {"matches", std::fabs(value - ref.expected) <= ref.tolerance + 1e-9}});
  }
  for (auto const& [figure, expected] :
       {std::pair{"date_min", "2019-01-01"}, std::pair{"date_max", "2021-07-12"}}) {
    auto const value = stats[figure].get<std::string>();
    checks.push_back({{"figure", figure},
                      {"expected", expected},
                      {"observed", value},
                      {"matches", value == expected}});
  }

  if (g.json_output) {
    std::cout << json{{"stats", stats}, {"reference_check", checks}}.dump() << "\n";
    return kExitOk;
  }
  std::cout << "n=" << stats["n_records"].get<std::size_t>() << "\n"
            << "group proportions: Regulation " << fixed(100 * props["Regulation"].get<double>(), 1)
            << "%, Neutral " << fixed(100 * props["Neutral"].get<double>(), 1)
            << "%, Deregulation " << fixed(100 * props["Deregulation"].get<double>(), 1) << "%\n"
            << "action words: " << fixed(stats["action_words_mean"].get<double>(), 1) << " ± "
            << fixed(stats["action_words_std"].get<double>(), 1) << "\n"
            << "circumstance words: " << fixed(stats["circumstance_words_mean"].get<double>(), 1)
            << " ± " << fixed(stats["circumstance_words_std"].get<double>(), 1) << "\n"
            << "dates: " << stats["date_min"].get<std::string>() << " to "
            << stats["date_max"].get<std::string>() << "\n";
  std::size_t deviations = 0;
  for (auto const& c : checks) {
    if (c["matches"].get<bool>()) continue;
    if (deviations++ == 0) std::cout << "deviations from the published GAT figures:\n";
    std::cout << "  " << c["figure"].get<std::string>() << ": expected " << c["expected"].dump()
              << ", observed " << c["observed"].dump() << "\n";
  }
  if (deviations == 0) std::cout << "matches the published GAT figures\n";
  return kExitOk;
}

int cmd_rules_check(Globals const& g, std::string const& path) {
  gt_ruleset* rs = nullptr;
  auto status = gt_ruleset_load(path.c_str(), &rs);
  if (status == GT_E_SYNTAX || status == GT_E_DUPLICATE_THEME) {
    auto detail = json::parse(gt_last_error_detail());
    if (g.json_output) {
      std::cerr << json{{"code", gt_status_name(status)},
                        {"message", gt_last_error_message()},
                        {"detail", detail}}
                       .dump()
                << "\n";
    } else {
      std::cerr << "gaztrack: " << gt_status_name(status) << " at " << path << ":"
                << detail.value("line", 0) << ":" << detail.value("column", 0) << ": "
                << gt_last_error_message() << "\n";
    }
    return kExitCheckFailed;
  }
  check(status);
  Rules owner(rs);
  char* out = nullptr;
  check(gt_ruleset_describe(rs, &out));
  auto desc = json::parse(take(out));
  bool const stable = desc["round_trip_stable"].get<bool>();
  if (g.json_output) {
    std::cout << desc.dump() << "\n";
  } else {
    std::cout << desc["themes"].size() << " themes, version " << desc["version"].get<std::string>()
              << "\n";
    for (auto const& t : desc["themes"]) std::cout << "  " << t.get<std::string>() << "\n";
    std::cout << "round trip: " << (stable ? "stable" : "UNSTABLE") << "\n";
  }
  return stable ? kExitOk : kExitCheckFailed;
}

struct ServeArgs {
  std::optional<int> port;
  std::string host;
  std::string data_dir;
  std::string rules;
};

int cmd_serve(Globals const& g, ServeArgs const& a) {
  json overrides = json::object();
  if (a.port) overrides["port"] = *a.port;
  if (!a.host.empty()) overrides["host"] = a.host;
  if (!a.data_dir.empty()) overrides["data_dir"] = a.data_dir;
  if (!a.rules.empty()) overrides["rules"] = a.rules;
  auto const text = overrides.dump();

  // Signals are taken synchronously by a watcher thread so that stopping
  // the server happens outside signal-handler context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  gt_service* service = nullptr;
  check(gt_service_create(g.config(), text.c_str(), &service));
  Service owner(service);
  int port = 0;
  check(gt_service_bind(service, &port));
  auto config = resolve_config(g, overrides);
  if (g.json_output) {
    std::cout << json{{"listening", config["host"]}, {"port", port}}.dump() << std::endl;
  } else {
    std::cout << "listening on http://" << config["host"].get<std::string>() << ":" << port
              << std::endl;
  }

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    gt_service_stop(service);
  });
  auto status = gt_service_run(service);
  // Wake the watcher if the server stopped on its own.
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  check(status);
  return kExitOk;
}

void report_error(Globals const& g, ApiError const& e) {
  json detail = json::object();
  try {
    detail = json::parse(e.detail);
  } catch (json::exception const&) {
  }
  if (g.json_output) {
    std::cerr << json{{"code", gt_status_name(e.status)}, {"message", e.message}, {"detail", detail}}
                     .dump()
              << "\n";
  } else {
    std::cerr << "gaztrack: " << gt_status_name(e.status) << ": " << e.message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Track environmental legal acts: rule pre-classification, expert review and "
               "naive Bayes classification of regulatory direction."};
  app.require_subcommand(1);
  app.set_version_flag("--version", gt_version());

  Globals g;
  app.add_flag("--json", g.json_output, "Machine-readable JSON output");
  app.add_option("--config", g.config_path, "Service/CLI configuration file (JSON)")
      ->check(CLI::ExistingFile);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load acts, pre-classify and queue for review");
  ingest_cmd->add_option("path", ingest.path, "JSONL file or directory of XML acts")->required();
  ingest_cmd->add_option("--format", ingest.format, "jsonl or xml-dir (default: by path type)")
      ->check(CLI::IsMember({"jsonl", "xml-dir", "xml"}));
  ingest_cmd->add_option("--rules", ingest.rules, "Theme rule file (default: built-in demo rules)");
  ingest_cmd->add_option("--data-dir", ingest.data_dir, "Store directory");
  ingest_cmd->add_option("--xml-config", ingest.xml_config, "XML element mapping (JSON)");

  std::string gat, model_path, out_path, preds;
  auto* classify_cmd = app.add_subcommand("classify", "Predict group classes for a GAT CSV");
  classify_cmd->add_option("gat", gat, "GAT CSV")->required();
  classify_cmd->add_option("--model", model_path, "Trained model file")->required();
  classify_cmd->add_option("--out", out_path, "Write predictions CSV here instead of stdout");

  ModelArgs model_args;
  auto add_model_opts = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", model_args.alpha, "Additive smoothing (> 0)");
    cmd->add_option("--min-df", model_args.min_df, "Minimum document frequency (>= 1)");
  };
  std::string train_out = "model.json";
  auto* train_cmd = app.add_subcommand("train", "Train naive Bayes on a GAT CSV");
  train_cmd->add_option("gat", gat, "GAT CSV")->required();
  train_cmd->add_option("--out", train_out, "Model output path")->capture_default_str();
  add_model_opts(train_cmd);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Stratified k-fold cross-validation");
  evaluate_cmd->add_option("gat", gat, "GAT CSV")->required();
  evaluate_cmd->add_option("--k", model_args.k, "Number of folds (default 10)");
  evaluate_cmd->add_option("--seed", model_args.seed, "Fold assignment seed (default 42)");
  add_model_opts(evaluate_cmd);

  auto* preds_cmd = app.add_subcommand("evaluate-preds", "Score an external predictions CSV");
  preds_cmd->add_option("gat", gat, "GAT CSV with gold labels")->required();
  preds_cmd->add_option("predictions", preds, "Predictions CSV")->required();

  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
  stats_cmd->add_option("gat", gat, "GAT CSV")->required();

  std::string rules_file;
  auto* rules_cmd = app.add_subcommand("rules", "Theme rule tools");
  rules_cmd->require_subcommand(1);
  auto* check_cmd = rules_cmd->add_subcommand("check", "Parse, list themes, check round trip");
  check_cmd->add_option("file", rules_file, "Rule file")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the review service");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--data-dir", serve.data_dir, "Store directory");
  serve_cmd->add_option("--rules", serve.rules, "Theme rule file");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(g, ingest);
    if (*classify_cmd) return cmd_classify(g, gat, model_path, out_path);
    if (*train_cmd) return cmd_train(g, gat, train_out, model_args);
    if (*evaluate_cmd) return cmd_evaluate(g, gat, model_args);
    if (*preds_cmd) return cmd_evaluate_preds(g, gat, preds);
    if (*stats_cmd) return cmd_stats(g, gat);
    if (*check_cmd) return cmd_rules_check(g, rules_file);
    if (*serve_cmd) return cmd_serve(g, serve);
  } catch (ApiError const& e) {
    report_error(g, e);
    return exit_code_for(e.status);
  } catch (json::exception const& e) {
    report_error(g, {GT_E_INTERNAL, e.what(), "{}"});
    return kExitInternal;
  } catch (std::exception const& e) {
    report_error(g, {GT_E_INTERNAL, e.what(), "{}"});
    return kExitInternal;
  }
  return kExitUsage;
}
