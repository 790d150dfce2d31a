// Copyright 2026 The prlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRLAB_PRLAB_H_
#define PRLAB_PRLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PRLAB_API __declspec(dllexport)
#else
#define PRLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum prlab_status {
  PRLAB_OK = 0,
  PRLAB_INVALID_ARGUMENT = 1,
  PRLAB_CONFORMANCE = 2,
  PRLAB_UNSUPPORTED_DOMAIN = 3,
  PRLAB_CAPACITY = 4,
  PRLAB_PARSE = 5,
  PRLAB_IO = 6,
  PRLAB_NETWORK = 7,
  PRLAB_PROTOCOL = 8,
  PRLAB_RATE_LIMITED = 9,
  PRLAB_DEGENERATE = 10,
  PRLAB_INTERNAL = 11
} prlab_status;

typedef struct prlab_space prlab_space;
typedef struct prlab_model prlab_model;
typedef struct prlab_oracle prlab_oracle;
typedef struct prlab_profiles prlab_profiles;
typedef struct prlab_server prlab_server;

/* Message of the last failed call on this thread; never NULL. */
PRLAB_API const char* prlab_last_error(void);
PRLAB_API const char* prlab_status_name(prlab_status s);
/* Frees strings returned through char** out-parameters. */
PRLAB_API void prlab_string_free(char* s);

/* Feature spaces: JSON {"features": [{"name", "domain", "tag"}]}. */
PRLAB_API prlab_status prlab_space_load(const char* path, prlab_space** out);
PRLAB_API void prlab_space_free(prlab_space* space);
PRLAB_API size_t prlab_space_feature_count(const prlab_space* space);

/* Models: JSON files holding a tree or a network plus its feature space. */
PRLAB_API prlab_status prlab_model_load(const char* path, prlab_model** out);
PRLAB_API prlab_status prlab_model_save(const prlab_model* model, const char* path);
PRLAB_API void prlab_model_free(prlab_model* model);
/* "tree" or "mlp" */
PRLAB_API const char* prlab_model_kind(const prlab_model* model);
/* The model's feature space; caller frees. */
PRLAB_API prlab_status prlab_model_space(const prlab_model* model, prlab_space** out);

/* CART on a CSV with a header row of feature names and a "label" column. */
PRLAB_API prlab_status prlab_tree_train(const prlab_space* space, const char* csv_path,
                                        int max_depth, size_t min_samples_split,
                                        prlab_model** out);

typedef struct prlab_mlp_options {
  uint64_t seed;
  int epochs;              /* <= 0 keeps the default of 100 */
  size_t batch_size;       /* 0 trains full-batch */
  double learning_rate;    /* <= 0 keeps the default of 0.1 */
  double validation_split; /* <= 0 keeps the default of 0.25 */
} prlab_mlp_options;

PRLAB_API void prlab_mlp_options_init(prlab_mlp_options* opts);

/* Trains on the 24-column numeric German Credit file; config names the
   columns, their domains and the discriminative attributes. Writes the
   per-epoch validation accuracies as CSV "epoch,val_accuracy" to
   *epoch_csv when epoch_csv is not NULL. */
PRLAB_API prlab_status prlab_mlp_train(const char* data_path, const char* config_path,
                                       const prlab_mlp_options* opts, prlab_model** out,
                                       double* validation_accuracy, char** epoch_csv);

/* Side-by-side honest and surrogate explanations for one instance given as
   "name=value,name=value". literal != 0 prunes along the query path only. */
PRLAB_API prlab_status prlab_attack_demo(const prlab_model* model, const char* instance,
                                         int literal, char** report);

/* Serves one classify request body in-process. mode: "honest"|"pr_attack". */
PRLAB_API prlab_status prlab_model_classify(const prlab_model* model, const char* mode,
                                            const char* request_json, uint64_t query_id,
                                            char** reply_json);

/* Oracles for audits. */
PRLAB_API prlab_status prlab_oracle_from_model(const prlab_model* model, const char* mode,
                                               prlab_oracle** out);
PRLAB_API prlab_status prlab_oracle_remote(const char* url, const prlab_space* space,
                                           const char* client_id, prlab_oracle** out);
PRLAB_API void prlab_oracle_free(prlab_oracle* oracle);
/* Answered queries as JSON lines (remote oracles only; empty otherwise). */
PRLAB_API prlab_status prlab_oracle_transcript(const prlab_oracle* oracle, char** jsonl);

/* Profiles: CSV with a header of feature names, or whitespace-separated
   numeric rows (a trailing class column is ignored). from_row skips that
   many data rows; sample > 0 keeps a seeded sample of that size. */
PRLAB_API prlab_status prlab_profiles_load(const char* path, const prlab_space* space,
                                           size_t from_row, size_t sample, uint64_t seed,
                                           prlab_profiles** out);
PRLAB_API void prlab_profiles_free(prlab_profiles* profiles);
PRLAB_API size_t prlab_profiles_count(const prlab_profiles* profiles);

typedef struct prlab_audit_options {
  const char* scenario;   /* "a", "b" or "exhaustive" */
  uint64_t trials;        /* scenario a */
  uint64_t seed;          /* scenario a */
  const char* const* swap_sets; /* scenario b: names joined by '+' */
  size_t swap_set_count;  /* 0 means each discriminative feature, then all */
  unsigned workers;
  uint64_t confidence_max_n; /* rows of the confidence CSV per swap set */
} prlab_audit_options;

PRLAB_API void prlab_audit_options_init(prlab_audit_options* opts);

/* Report CSV "features,pairs_tested,ips_found,rate,stddev" and confidence CSV
   "features,rate,n,confidence". Either out-pointer may be NULL. */
PRLAB_API prlab_status prlab_audit_run(prlab_oracle* oracle, const prlab_space* space,
                                       const prlab_profiles* profiles,
                                       const prlab_audit_options* opts, char** report_csv,
                                       char** confidence_csv);

/* scenario: "independence", "dependence" or "both". */
PRLAB_API prlab_status prlab_dimpact_csv(const double* alphas, size_t alpha_count,
                                         size_t pb_steps, const char* scenario, char** csv);

PRLAB_API prlab_status prlab_confidence(double p, uint64_t n, double* out);
PRLAB_API prlab_status prlab_queries_needed(double p, double target, uint64_t* out);

/* HTTP server from a config file; listen overrides the configured address
   when not NULL. */
PRLAB_API prlab_status prlab_server_start(const char* config_path, const char* listen,
                                          prlab_server** out);
PRLAB_API int prlab_server_port(const prlab_server* server);
PRLAB_API void prlab_server_wait(prlab_server* server);
PRLAB_API void prlab_server_stop(prlab_server* server);
PRLAB_API void prlab_server_free(prlab_server* server);

typedef struct prlab_replicate_options {
  size_t models;
  uint64_t base_seed;
  unsigned workers;
  prlab_mlp_options train;
  uint64_t trials;
  size_t profiles;
  double target_confidence;
} prlab_replicate_options;

PRLAB_API void prlab_replicate_options_init(prlab_replicate_options* opts);

/* Full German Credit experiment: human-readable report, aggregated audit CSV,
   and metrics CSV "seed,epoch,val_accuracy". Out-pointers may be NULL. */
PRLAB_API prlab_status prlab_replicate(const char* data_path, const char* config_path,
                                       const prlab_replicate_options* opts, char** report,
                                       char** audit_csv, char** metrics_csv);

#ifdef __cplusplus
}
#endif

#endif  // PRLAB_PRLAB_H_
