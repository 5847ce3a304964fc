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


#ifndef GAZTRACK_SERVICE_HPP
#define GAZTRACK_SERVICE_HPP

#include "gaztrack/config.hpp"
#include "gaztrack/error.hpp"
#include "gaztrack/store.hpp"

#include <memory>

// HTTP/JSON front end over the review store. All responses are JSON except
// the CSV export; errors use the envelope {code, message, detail}.
//
//   POST /api/documents              JSONL batch, 201 {received, enqueued, items}
//   GET  /api/queue?status=&limit=   items, oldest publication first
//   GET  /api/items/{id}             item plus theme highlights
//   POST /api/reviews/{id}           {action, circumstance, classification[, themes]}
//   POST /api/reviews/{id}/discard
//   GET  /api/export/gat.csv
//   POST /api/train                  model descriptor
//   POST /api/evaluate               cross-validation report
//   GET  /api/evaluation             last report, 404 before the first run
//   GET  /api/suggestions?top_n=
//   GET  /api/stats
//   GET  /api/health
namespace gaztrack {

/// HTTP status for an error code.
int http_status(ErrorCode code);

class ReviewService {
 public:
  /// Opens the store, loads the rules and imports the baseline into an
  /// empty store.
  explicit ReviewService(ServiceConfig config);
  ~ReviewService();
  ReviewService(ReviewService const&) = delete;
  ReviewService& operator=(ReviewService const&) = delete;

  /// Binds the configured host and port (0 picks a free port) and returns
  /// the bound port. Throws Io.
  int bind();
  /// Serves until stop(); call after bind().
  void run();
  void stop();
  bool is_running() const;

  Store& store();
  ServiceConfig const& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gaztrack

#endif  // GAZTRACK_SERVICE_HPP
