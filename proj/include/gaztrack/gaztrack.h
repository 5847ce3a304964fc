/*
 * Copyright 2026 The gaztrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GAZTRACK_H
#define GAZTRACK_H

/*
 * C interface to the gaztrack library.
 *
 * Conventions:
 *  - Every fallible call returns gt_status. On failure the calling thread's
 *    last error holds a message and a JSON detail object; both stay valid
 *    until the next gt_* call on that thread.
 *  - Output strings (char **out) are NUL-terminated UTF-8, owned by the
 *    caller and released with gt_string_free. Structured results are JSON.
 *  - Handles are opaque and released with their *_free function, which
 *    accepts NULL. Handles may be shared across threads for reading.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(GAZTRACK_BUILDING_LIBRARY)
#define GT_API __attribute__((visibility("default")))
#else
#define GT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gt_status {
  GT_OK = 0,
  GT_E_INVALID_ARGUMENT = 1,
  GT_E_IO = 2,
  GT_E_MALFORMED_RECORD = 3,
  GT_E_DUPLICATE_ID = 4,
  GT_E_SYNTAX = 5,
  GT_E_DUPLICATE_THEME = 6,
  GT_E_UNKNOWN_CLASS = 7,
  GT_E_MISSING_FIELD = 8,
  GT_E_BAD_DATE = 9,
  GT_E_EMPTY_DATASET = 10,
  GT_E_EMPTY_VOCABULARY = 11,
  GT_E_NO_EXAMPLES = 12,
  GT_E_ZERO_ALPHA = 13,
  GT_E_BAD_K = 14,
  GT_E_EMPTY_MATRIX = 15,
  GT_E_MISSING_PREDICTION = 16,
  GT_E_DUPLICATE_DOCUMENT = 17,
  GT_E_NOT_PENDING = 18,
  GT_E_EMPTY_FIELD = 19,
  GT_E_INSUFFICIENT_FEEDBACK = 20,
  GT_E_NOT_FOUND = 21,
  GT_E_EMPTY_FOLD = 22,
  GT_E_INTERNAL = 99
} gt_status;

typedef enum gt_category {
  GT_CATEGORY_OK = 0,
  GT_CATEGORY_USAGE = 1,    /* bad arguments or options */
  GT_CATEGORY_DATA = 2,     /* unreadable or invalid input data */
  GT_CATEGORY_INTERNAL = 3
} gt_category;

typedef struct gt_ruleset gt_ruleset;
typedef struct gt_corpus gt_corpus;
typedef struct gt_store gt_store;
typedef struct gt_dataset gt_dataset;
typedef struct gt_model gt_model;
typedef struct gt_service gt_service;

GT_API const char *gt_version(void);
GT_API const char *gt_status_name(gt_status status);
GT_API gt_category gt_status_category(gt_status status);
GT_API const char *gt_last_error_message(void);
/* JSON object; "{}" when the error carries no detail. */
GT_API const char *gt_last_error_detail(void);
GT_API void gt_string_free(char *s);

/* {"text": ..., "token_count": ...} */
GT_API gt_status gt_normalize(const char *text, char **out_json);

/* Theme rules. */
GT_API gt_status gt_ruleset_parse(const char *source, gt_ruleset **out);
GT_API gt_status gt_ruleset_load(const char *path, gt_ruleset **out);
GT_API gt_status gt_ruleset_demo(gt_ruleset **out);
/* {"themes": [...], "version": ..., "round_trip_stable": bool} */
GT_API gt_status gt_ruleset_describe(const gt_ruleset *rules, char **out_json);
GT_API gt_status gt_ruleset_print(const gt_ruleset *rules, char **out_source);
GT_API void gt_ruleset_free(gt_ruleset *rules);

/* Legal-act corpora. format is "jsonl" or "xml-dir"; xml_mapping_json may
 * be NULL for the default element mapping. */
GT_API gt_status gt_corpus_load(const char *path, const char *format,
                                const char *xml_mapping_json, gt_corpus **out);
GT_API size_t gt_corpus_size(const gt_corpus *corpus);
/* {"documents": n, "matched": m, "per_theme": {...}, "assignments": [...]} */
GT_API gt_status gt_corpus_classify(const gt_corpus *corpus, const gt_ruleset *rules,
                                    char **out_json);
GT_API void gt_corpus_free(gt_corpus *corpus);

/* Review store directory. */
GT_API gt_status gt_store_open(const char *dir, gt_store **out);
/* Queues matching documents; {"received", "enqueued", "per_theme"}. */
GT_API gt_status gt_store_enqueue(gt_store *store, const gt_corpus *corpus,
                                  const gt_ruleset *rules, char **out_json);
GT_API void gt_store_free(gt_store *store);

/* GAT datasets. columns_json may be NULL for the default header names. */
GT_API gt_status gt_dataset_load(const char *path, const char *columns_json, gt_dataset **out);
GT_API size_t gt_dataset_size(const gt_dataset *dataset);
GT_API gt_status gt_dataset_stats(const gt_dataset *dataset, char **out_json);
GT_API gt_status gt_dataset_export(const gt_dataset *dataset, const char *path);
GT_API void gt_dataset_free(gt_dataset *dataset);

/* Multinomial naive Bayes over Context text. */
GT_API gt_status gt_model_train(const gt_dataset *dataset, double alpha, size_t min_df,
                                gt_model **out);
GT_API gt_status gt_model_save(const gt_model *model, const char *path);
GT_API gt_status gt_model_load(const char *path, gt_model **out);
GT_API gt_status gt_model_describe(const gt_model *model, char **out_json);
/* Prediction CSV with per-class log scores. */
GT_API gt_status gt_model_predict_csv(const gt_model *model, const gt_dataset *dataset,
                                      char **out_csv);
GT_API void gt_model_free(gt_model *model);

/* Stratified k-fold cross-validation report as JSON. */
GT_API gt_status gt_evaluate_cv(const gt_dataset *dataset, size_t k, uint64_t seed,
                                double alpha, size_t min_df, char **out_json);
GT_API gt_status gt_format_report_table(const char *report_json, char **out_table);
/* Metrics for an external prediction CSV. */
GT_API gt_status gt_evaluate_predictions(const gt_dataset *dataset, const char *predictions_path,
                                         char **out_json);

/* Service configuration: defaults, then the JSON file at config_path (may
 * be NULL), then GAZTRACK_* environment variables, then overrides_json
 * (may be NULL). */
GT_API gt_status gt_config_resolve(const char *config_path, const char *overrides_json,
                                   char **out_json);
GT_API gt_status gt_service_create(const char *config_path, const char *overrides_json,
                                   gt_service **out);
/* Binds the configured address; *out_port receives the bound port. */
GT_API gt_status gt_service_bind(gt_service *service, int *out_port);
/* Blocks until gt_service_stop is called from another thread. */
GT_API gt_status gt_service_run(gt_service *service);
GT_API void gt_service_stop(gt_service *service);
GT_API void gt_service_free(gt_service *service);

#ifdef __cplusplus
}
#endif

#endif /* GAZTRACK_H */
