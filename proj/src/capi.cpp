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


#include "gaztrack/gaztrack.h"

#include "gaztrack/config.hpp"
#include "gaztrack/document.hpp"
#include "gaztrack/error.hpp"
#include "gaztrack/evaluation.hpp"
#include "gaztrack/gat.hpp"
#include "gaztrack/io.hpp"
#include "gaztrack/naive_bayes.hpp"
#include "gaztrack/rules.hpp"
#include "gaztrack/service.hpp"
#include "gaztrack/store.hpp"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <new>

using gaztrack::Error;
using gaztrack::ErrorCode;
using nlohmann::json;

struct gt_ruleset {
  gaztrack::RuleSet rules;
};
struct gt_corpus {
  std::vector<gaztrack::RawDocument> docs;
};
struct gt_store {
  std::unique_ptr<gaztrack::Store> store;
};
struct gt_dataset {
  std::vector<gaztrack::GatRecord> records;
};
struct gt_model {
  gaztrack::NbTextClassifier clf;
};
struct gt_service {
  std::unique_ptr<gaztrack::ReviewService> service;
};

namespace {

struct LastError {
  std::string message;
  std::string detail = "{}";
};

thread_local LastError last_error;

gt_status fail(ErrorCode code, std::string message, json detail = json::object()) {
  last_error.message = std::move(message);
  last_error.detail = detail.dump();
  return static_cast<gt_status>(code);
}

template <typename F>
gt_status guard(F&& body) {
  last_error = {};
  try {
    body();
    return GT_OK;
  } catch (Error const& e) {
    return fail(e.code(), e.what(), e.detail());
  } catch (json::exception const& e) {
    return fail(ErrorCode::kInvalidArgument, e.what());
  } catch (std::bad_alloc const&) {
    return fail(ErrorCode::kInternal, "out of memory");
  } catch (std::exception const& e) {
    return fail(ErrorCode::kInternal, e.what());
  } catch (...) {
    return fail(ErrorCode::kInternal, "unknown exception");
  }
}

void require(void const* p, char const* what) {
  if (p == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL",
                {{"argument", what}});
  }
}

char* dup_string(std::string const& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, std::string const& s) {
  require(out, "out");
  *out = dup_string(s);
}

json parse_json_arg(char const* text, char const* what) {
  try {
    return json::parse(text);
  } catch (json::parse_error const& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is not valid JSON: " + e.what(),
                {{"argument", what}});
  }
}

json describe(gaztrack::RuleSet const& rules) {
  json themes = json::array();
  for (auto const& r : rules.rules) themes.push_back(r.theme_name);
  bool stable = false;
  try {
    auto reparsed = gaztrack::parse_rules(gaztrack::to_source(rules));
    stable = gaztrack::same_rules(rules, reparsed) &&
             gaztrack::to_source(reparsed) == gaztrack::to_source(rules);
  } catch (Error const&) {
    stable = false;
  }
  return {{"themes", themes}, {"version", rules.version}, {"round_trip_stable", stable}};
}

gaztrack::ServiceConfig resolve_config(char const* config_path, char const* overrides_json) {
  std::optional<std::filesystem::path> path;
  if (config_path != nullptr) path = config_path;
  auto config = gaztrack::load_config(path);
  if (overrides_json != nullptr) {
    gaztrack::apply_config_json(config, parse_json_arg(overrides_json, "overrides_json"), {});
    config.validate();
  }
  return config;
}

}  // namespace

extern "C" {

const char* gt_version(void) { return "1.0.0"; }

const char* gt_status_name(gt_status status) {
  if (status == GT_OK) return "Ok";
  return gaztrack::error_name(static_cast<ErrorCode>(status)).data();
}

gt_category gt_status_category(gt_status status) {
  switch (status) {
    case GT_OK: return GT_CATEGORY_OK;
    case GT_E_INVALID_ARGUMENT:
    case GT_E_BAD_K:
    case GT_E_ZERO_ALPHA: return GT_CATEGORY_USAGE;
    case GT_E_INTERNAL: return GT_CATEGORY_INTERNAL;
    default: return GT_CATEGORY_DATA;
  }
}

const char* gt_last_error_message(void) { return last_error.message.c_str(); }
const char* gt_last_error_detail(void) { return last_error.detail.c_str(); }

void gt_string_free(char* s) { std::free(s); }

gt_status gt_normalize(const char* text, char** out_json) {
  return guard([&] {
    require(text, "text");
    auto n = gaztrack::normalize(text);
    put(out_json, json{{"text", n.text}, {"token_count", n.token_count}}.dump());
  });
}

gt_status gt_ruleset_parse(const char* source, gt_ruleset** out) {
  return guard([&] {
    require(source, "source");
    require(out, "out");
    *out = new gt_ruleset{gaztrack::parse_rules(source)};
  });
}

gt_status gt_ruleset_load(const char* path, gt_ruleset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new gt_ruleset{gaztrack::load_rules(path)};
  });
}

gt_status gt_ruleset_demo(gt_ruleset** out) {
  return guard([&] {
    require(out, "out");
    *out = new gt_ruleset{gaztrack::parse_rules(gaztrack::demo_rules_source())};
  });
}

gt_status gt_ruleset_describe(const gt_ruleset* rules, char** out_json) {
  return guard([&] {
    require(rules, "rules");
    put(out_json, describe(rules->rules).dump());
  });
}

gt_status gt_ruleset_print(const gt_ruleset* rules, char** out_source) {
  return guard([&] {
    require(rules, "rules");
    put(out_source, gaztrack::to_source(rules->rules));
  });
}

void gt_ruleset_free(gt_ruleset* rules) { delete rules; }

gt_status gt_corpus_load(const char* path, const char* format, const char* xml_mapping_json,
                         gt_corpus** out) {
  return guard([&] {
    require(path, "path");
    require(format, "format");
    require(out, "out");
    gaztrack::XmlMapping mapping;
    if (xml_mapping_json != nullptr) {
      mapping = gaztrack::XmlMapping::from_json(parse_json_arg(xml_mapping_json, "xml_mapping_json"));
    }
    *out = new gt_corpus{
        gaztrack::load_corpus(path, gaztrack::parse_corpus_format(format), mapping)};
  });
}

size_t gt_corpus_size(const gt_corpus* corpus) { return corpus ? corpus->docs.size() : 0; }

gt_status gt_corpus_classify(const gt_corpus* corpus, const gt_ruleset* rules, char** out_json) {
  return guard([&] {
    require(corpus, "corpus");
    require(rules, "rules");
    json per_theme = json::object();
    for (auto const& r : rules->rules.rules) per_theme[r.theme_name] = 0;
    json assignments = json::array();
    std::size_t matched = 0;
    for (auto const& doc : corpus->docs) {
      auto themes = gaztrack::pre_classify(rules->rules, doc);
      if (!themes.empty()) ++matched;
      for (auto const& t : themes) per_theme[t] = per_theme[t].get<std::size_t>() + 1;
      assignments.push_back({{"doc_id", doc.doc_id}, {"themes", themes}});
    }
    put(out_json, json{{"documents", corpus->docs.size()},
                       {"matched", matched},
                       {"per_theme", per_theme},
                       {"assignments", assignments}}
                      .dump());
  });
}

void gt_corpus_free(gt_corpus* corpus) { delete corpus; }

gt_status gt_store_open(const char* dir, gt_store** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new gt_store{std::make_unique<gaztrack::Store>(dir)};
  });
}

gt_status gt_store_enqueue(gt_store* store, const gt_corpus* corpus, const gt_ruleset* rules,
                           char** out_json) {
  return guard([&] {
    require(store, "store");
    require(corpus, "corpus");
    require(rules, "rules");
    auto model = store->store->model();
    auto items = store->store->enqueue(corpus->docs, rules->rules, model.get());
    json per_theme = json::object();
    for (auto const& r : rules->rules.rules) per_theme[r.theme_name] = 0;
    for (auto const& item : items) {
      for (auto const& t : item.matched_themes) per_theme[t] = per_theme[t].get<std::size_t>() + 1;
    }
    put(out_json, json{{"received", corpus->docs.size()},
                       {"enqueued", items.size()},
                       {"per_theme", per_theme},
                       {"rules_version", rules->rules.version}}
                      .dump());
  });
}

void gt_store_free(gt_store* store) { delete store; }

gt_status gt_dataset_load(const char* path, const char* columns_json, gt_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    gaztrack::GatColumns columns;
    if (columns_json != nullptr) {
      columns = gaztrack::GatColumns::from_json(parse_json_arg(columns_json, "columns_json"));
    }
    *out = new gt_dataset{gaztrack::load_gat(path, columns)};
  });
}

size_t gt_dataset_size(const gt_dataset* dataset) { return dataset ? dataset->records.size() : 0; }

gt_status gt_dataset_stats(const gt_dataset* dataset, char** out_json) {
  return guard([&] {
    require(dataset, "dataset");
    put(out_json, gaztrack::to_json(gaztrack::compute_stats(dataset->records)).dump());
  });
}

gt_status gt_dataset_export(const gt_dataset* dataset, const char* path) {
  return guard([&] {
    require(dataset, "dataset");
    require(path, "path");
    gaztrack::export_gat(dataset->records, path);
  });
}

void gt_dataset_free(gt_dataset* dataset) { delete dataset; }

gt_status gt_model_train(const gt_dataset* dataset, double alpha, size_t min_df, gt_model** out) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = new gt_model{gaztrack::NbTextClassifier::fit(dataset->records, {alpha, min_df})};
  });
}

gt_status gt_model_save(const gt_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    model->clf.save(path);
  });
}

gt_status gt_model_load(const char* path, gt_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new gt_model{gaztrack::NbTextClassifier::load(path)};
  });
}

gt_status gt_model_describe(const gt_model* model, char** out_json) {
  return guard([&] {
    require(model, "model");
    put(out_json, model->clf.descriptor().dump());
  });
}

gt_status gt_model_predict_csv(const gt_model* model, const gt_dataset* dataset, char** out_csv) {
  return guard([&] {
    require(model, "model");
    require(dataset, "dataset");
    put(out_csv, gaztrack::format_predictions(gaztrack::classify_records(model->clf, dataset->records)));
  });
}

void gt_model_free(gt_model* model) { delete model; }

gt_status gt_evaluate_cv(const gt_dataset* dataset, size_t k, uint64_t seed, double alpha,
                         size_t min_df, char** out_json) {
  return guard([&] {
    require(dataset, "dataset");
    auto report = gaztrack::run_cv(dataset->records, gaztrack::nb_factory({alpha, min_df}), k,
                                   seed, "MultinomialNB");
    put(out_json, gaztrack::to_json(report).dump());
  });
}

gt_status gt_format_report_table(const char* report_json, char** out_table) {
  return guard([&] {
    require(report_json, "report_json");
    auto report = gaztrack::report_from_json(parse_json_arg(report_json, "report_json"));
    put(out_table, gaztrack::format_table(report));
  });
}

gt_status gt_evaluate_predictions(const gt_dataset* dataset, const char* predictions_path,
                                  char** out_json) {
  return guard([&] {
    require(dataset, "dataset");
    require(predictions_path, "predictions_path");
    auto preds = gaztrack::read_predictions(predictions_path);
    put(out_json, gaztrack::to_json(gaztrack::evaluate_predictions(dataset->records, preds)).dump());
  });
}

gt_status gt_config_resolve(const char* config_path, const char* overrides_json, char** out_json) {
  return guard([&] { put(out_json, resolve_config(config_path, overrides_json).to_json().dump()); });
}

gt_status gt_service_create(const char* config_path, const char* overrides_json,
                            gt_service** out) {
  return guard([&] {
    require(out, "out");
    *out = new gt_service{
        std::make_unique<gaztrack::ReviewService>(resolve_config(config_path, overrides_json))};
  });
}

gt_status gt_service_bind(gt_service* service, int* out_port) {
  return guard([&] {
    require(service, "service");
    require(out_port, "out_port");
    *out_port = service->service->bind();
  });
}

gt_status gt_service_run(gt_service* service) {
  return guard([&] {
    require(service, "service");
    service->service->run();
  });
}

void gt_service_stop(gt_service* service) {
  if (service) service->service->stop();
}

void gt_service_free(gt_service* service) { delete service; }

}  // extern "C"
