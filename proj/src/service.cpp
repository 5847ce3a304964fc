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


#include "gaztrack/service.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/evaluation.hpp"
#include "gaztrack/io.hpp"
#include "gaztrack/suggest.hpp"
#include "gaztrack/unicode.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <mutex>

namespace gaztrack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char const* kJson = "application/json";
constexpr char const* kModelName = "MultinomialNB";
constexpr char const* kReportFile = "last_report.json";

void send_json(httplib::Response& res, int status, json const& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code,
                std::string const& message, json detail = json::object()) {
  send_json(res, status, {{"code", code}, {"message", message}, {"detail", std::move(detail)}});
}

json parse_body(httplib::Request const& req) {
  try {
    return json::parse(req.body);
  } catch (json::parse_error const& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::size_t size_param(httplib::Request const& req, char const* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  auto const text = req.get_param_value(key);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("query parameter '") + key + "' must be a non-negative integer",
                {{"parameter", key}, {"value", text}});
  }
  return value;
}

std::string string_field(json const& body, char const* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' must be a string",
                {{"field", key}});
  }
  return it->get<std::string>();
}

/// Byte ranges of `text` highlighted for each matched theme.
json highlights(ReviewItem const& item, RuleSet const& rules) {
  auto const text = item.doc.match_text();
  auto spans = unicode::fold_words_with_offsets(text);
  std::vector<std::string> words;
  words.reserve(spans.size());
  for (auto const& s : spans) words.push_back(s.word);
  DocWords const doc(std::move(words));

  json out = json::object();
  for (auto const& theme : item.matched_themes) {
    json ranges = json::array();
    if (auto const* rule = rules.find(theme)) {
      for (auto [first, last] : include_spans(*rule, doc)) {
        auto const begin = spans[first].begin;
        auto const end = spans[last - 1].end;
        ranges.push_back({{"begin", begin}, {"end", end}, {"text", text.substr(begin, end - begin)}});
      }
    }
    out[theme] = std::move(ranges);
  }
  return out;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kNotPending:
    case ErrorCode::kDuplicateDocument:
    case ErrorCode::kDuplicateId: return 409;
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kIo:
    case ErrorCode::kInternal: return 500;
    default: return 422;
  }
}

struct ReviewService::Impl {
  ServiceConfig config;
  Store store;
  httplib::Server server;

  std::mutex rules_mutex;
  std::shared_ptr<RuleSet const> rules;
  fs::file_time_type rules_mtime{};

  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.data_dir) {
    config.validate();
    load_rules_now();
    import_baseline();
    routes();
  }

  void load_rules_now() {
    if (!config.rules_path) {
      rules = std::make_shared<RuleSet const>(parse_rules(demo_rules_source()));
      return;
    }
    rules_mtime = fs::last_write_time(*config.rules_path);
    rules = std::make_shared<RuleSet const>(load_rules(*config.rules_path));
  }

  /// Current rules, re-read when the file changed. A broken edit keeps the
  /// previous rules in force.
  std::shared_ptr<RuleSet const> current_rules() {
    std::lock_guard lock(rules_mutex);
    if (config.rules_path) {
      std::error_code ec;
      auto mtime = fs::last_write_time(*config.rules_path, ec);
      if (!ec && mtime != rules_mtime) {
        try {
          rules = std::make_shared<RuleSet const>(load_rules(*config.rules_path));
          rules_mtime = mtime;
        } catch (Error const& e) {
          std::cerr << "gaztrack: keeping previous rules: " << e.what() << "\n";
        }
      }
    }
    return rules;
  }

  void import_baseline() {
    if (!config.gat_baseline) return;
    if (!store.records().empty() || !store.items().empty()) return;
    auto records = load_gat(*config.gat_baseline, config.gat_columns);
    store.import_records(records);
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](httplib::Request const& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (Error const& e) {
        send_error(res, http_status(e.code()), e.name(), e.what(), e.detail());
      } catch (json::exception const& e) {
        send_error(res, 400, error_name(ErrorCode::kInvalidArgument), e.what());
      } catch (std::exception const& e) {
        send_error(res, 500, error_name(ErrorCode::kInternal), e.what());
      }
    };
  }

  NbTextClassifier::Options nb_options() const { return {config.alpha, config.min_df}; }

  void routes() {
    server.set_default_headers({
        {"Access-Control-Allow-Origin", config.cors_origin},
        {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });
    server.Options(".*", [](httplib::Request const&, httplib::Response& res) { res.status = 204; });
    if (config.access_log) {
      server.set_logger([](httplib::Request const& req, httplib::Response const& res) {
        std::cerr << req.method << " " << req.path << " " << res.status << "\n";
      });
    }

    server.Post("/api/documents", guarded([this](auto const& req, auto& res) {
      auto docs = parse_jsonl(req.body, "request");
      auto rules_now = current_rules();
      auto model = store.model();
      auto items = store.enqueue(docs, *rules_now, model.get());
      json list = json::array();
      for (auto const& item : items) list.push_back(to_json(item));
      send_json(res, 201, {{"received", docs.size()},
                           {"enqueued", items.size()},
                           {"items", std::move(list)},
                           {"rules_version", rules_now->version}});
    }));

    server.Get("/api/queue", guarded([this](auto const& req, auto& res) {
      std::optional<ReviewStatus> status = ReviewStatus::kPending;
      if (req.has_param("status")) {
        auto const text = req.get_param_value("status");
        if (text == "all") {
          status.reset();
        } else {
          status = parse_review_status(text);
          if (!status) {
            throw Error(ErrorCode::kInvalidArgument,
                        "status must be pending, reviewed, discarded or all",
                        {{"parameter", "status"}, {"value", text}});
          }
        }
      }
      json list = json::array();
      for (auto const& item : store.queue(status, size_param(req, "limit", 0))) {
        list.push_back(to_json(item));
      }
      send_json(res, 200, list);
    }));

    server.Get("/api/items/:id", guarded([this](auto const& req, auto& res) {
      auto const id = req.path_params.at("id");
      auto item = store.item(id);
      if (!item) throw Error(ErrorCode::kNotFound, "no review item '" + id + "'", {{"item_id", id}});
      auto j = to_json(*item);
      j["match_text"] = item->doc.match_text();
      j["highlights"] = highlights(*item, *current_rules());
      send_json(res, 200, j);
    }));

    server.Post("/api/reviews/:id", guarded([this](auto const& req, auto& res) {
      auto const id = req.path_params.at("id");
      auto body = parse_body(req);
      if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "review must be a JSON object");
      AnnotationInput input;
      input.action = string_field(body, "action");
      input.circumstance = string_field(body, "circumstance");
      input.classification = string_field(body, "classification");
      if (auto it = body.find("themes"); it != body.end() && !it->is_null()) {
        input.themes = it->template get<std::vector<std::string>>();
      }
      send_json(res, 200, to_json(store.submit_review(id, input)));
    }));

    server.Post("/api/reviews/:id/discard", guarded([this](auto const& req, auto& res) {
      auto item = store.discard(req.path_params.at("id"));
      send_json(res, 200, to_json(item));
    }));

    server.Get("/api/export/gat.csv", guarded([this](auto const&, auto& res) {
      auto records = store.records();
      res.status = 200;
      res.set_header("Content-Disposition", "attachment; filename=\"gat.csv\"");
      res.set_content(format_gat(records), "text/csv; charset=utf-8");
    }));

    server.Post("/api/train", guarded([this](auto const&, auto& res) {
      auto records = store.records();
      if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "no records to train on");
      auto clf = NbTextClassifier::fit(records, nb_options());
      auto descriptor = clf.descriptor();
      store.set_model(std::move(clf));
      send_json(res, 200, descriptor);
    }));

    server.Post("/api/evaluate", guarded([this](auto const& req, auto& res) {
      std::size_t k = config.k;
      std::uint64_t seed = config.seed;
      if (!req.body.empty()) {
        auto body = parse_body(req);
        k = body.value("k", k);
        seed = body.value("seed", seed);
      }
      if (k < 2) throw Error(ErrorCode::kBadK, "k must be at least 2", {{"k", k}});
      auto records = store.records();
      if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "no records to evaluate");
      auto report = run_cv(records, nb_factory(nb_options()), k, seed, kModelName);
      auto j = to_json(report);
      write_file_atomic(config.data_dir / kReportFile, j.dump(2));
      send_json(res, 200, j);
    }));

    server.Get("/api/evaluation", guarded([this](auto const&, auto& res) {
      auto const path = config.data_dir / kReportFile;
      if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no evaluation has been run yet");
      send_json(res, 200, json::parse(read_file(path)));
    }));

    server.Get("/api/suggestions", guarded([this](auto const& req, auto& res) {
      json list = json::array();
      for (auto const& s : suggest_refinements(store, size_param(req, "top_n", 5))) {
        list.push_back(to_json(s));
      }
      send_json(res, 200, list);
    }));

    server.Get("/api/stats", guarded([this](auto const&, auto& res) {
      auto records = store.records();
      if (records.empty()) {
        send_json(res, 200, {{"n_records", 0}});
        return;
      }
      send_json(res, 200, to_json(compute_stats(records)));
    }));

    server.Get("/api/health", guarded([this](auto const&, auto& res) {
      std::size_t pending = 0, reviewed = 0, discarded = 0;
      for (auto const& item : store.items()) {
        switch (item.status) {
          case ReviewStatus::kPending: ++pending; break;
          case ReviewStatus::kReviewed: ++reviewed; break;
          case ReviewStatus::kDiscarded: ++discarded; break;
        }
      }
      auto model = store.model();
      send_json(res, 200, {{"status", "ok"},
                           {"sequence", store.sequence()},
                           {"rules_version", current_rules()->version},
                           {"records", store.records().size()},
                           {"queue", {{"pending", pending}, {"reviewed", reviewed}, {"discarded", discarded}}},
                           {"model", model ? model->descriptor() : json(nullptr)}});
    }));

    server.set_error_handler([](httplib::Request const& req, httplib::Response& res) {
      if (res.status == 404 && res.body.empty()) {
        send_error(res, 404, error_name(ErrorCode::kNotFound), "no route for " + req.method + " " + req.path);
      }
    });
  }
};

ReviewService::ReviewService(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

ReviewService::~ReviewService() { stop(); }

int ReviewService::bind() {
  auto const& c = impl_->config;
  int port = c.port == 0 ? impl_->server.bind_to_any_port(c.host)
                         : (impl_->server.bind_to_port(c.host, c.port) ? c.port : -1);
  if (port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + c.host + ":" + std::to_string(c.port),
                {{"host", c.host}, {"port", c.port}});
  }
  return port;
}

void ReviewService::run() {
  if (!impl_->server.listen_after_bind()) {
    throw Error(ErrorCode::kIo, "server stopped unexpectedly");
  }
}

void ReviewService::stop() {
  if (impl_) impl_->server.stop();
}

bool ReviewService::is_running() const { return impl_->server.is_running(); }

Store& ReviewService::store() { return impl_->store; }

ServiceConfig const& ReviewService::config() const { return impl_->config; }

}  // namespace gaztrack
