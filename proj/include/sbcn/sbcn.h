/* C interface to the sbcn library.
 *
 * Every fallible call returns an sbcn_status; on failure a description is
 * available from sbcn_last_error() (thread-local, valid until the next call
 * on the same thread). Objects are opaque handles released with the matching
 * *_free function. Strings returned through char** are heap-allocated and
 * released with sbcn_string_free. Borrowed const char* results live as long
 * as the owning handle.
 */
#ifndef SBCN_H
#define SBCN_H

#include <stddef.h>
#include <stdint.h>

#if defined(SBCN_BUILDING_LIBRARY)
#define SBCN_API __attribute__((visibility("default")))
#else
#define SBCN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sbcn_status {
  SBCN_OK = 0,
  SBCN_ERR_PARSE = 1,
  SBCN_ERR_SCHEMA = 2,
  SBCN_ERR_IO = 3,
  SBCN_ERR_INVALID_ARGUMENT = 4,
  SBCN_ERR_OUT_OF_RANGE = 5,
  SBCN_ERR_UNDEFINED = 6,
  SBCN_ERR_LIMIT = 7,
  SBCN_ERR_INTERNAL = 8
} sbcn_status;

typedef enum sbcn_regularizer {
  SBCN_REG_NONE = 0,
  SBCN_REG_BIC = 1,
  SBCN_REG_AIC = 2
} sbcn_regularizer;

typedef enum sbcn_condition_mode {
  SBCN_CONDITIONS_POINT = 0,
  SBCN_CONDITIONS_BOOTSTRAP = 1
} sbcn_condition_mode;

typedef enum sbcn_search_mode {
  SBCN_SEARCH_HILL_CLIMB = 0,
  SBCN_SEARCH_EXHAUSTIVE = 1
} sbcn_search_mode;

typedef enum sbcn_noise_mode {
  SBCN_NOISE_RANDOM_ENTRY = 0,
  SBCN_NOISE_FLIP = 1
} sbcn_noise_mode;

typedef struct sbcn_dataset sbcn_dataset;
typedef struct sbcn_network sbcn_network;
typedef struct sbcn_model sbcn_model;

SBCN_API const char* sbcn_version(void);
SBCN_API const char* sbcn_last_error(void);
SBCN_API const char* sbcn_status_name(sbcn_status status);
SBCN_API void sbcn_string_free(char* s);

/* Datasets: header "<id>,<event>,..." then "<sample>,0|1,..." rows. */
SBCN_API sbcn_status sbcn_dataset_load(const char* path, sbcn_dataset** out);
SBCN_API sbcn_status sbcn_dataset_parse(const char* text, size_t length, sbcn_dataset** out);
SBCN_API sbcn_status sbcn_dataset_save(const sbcn_dataset* data, const char* path);
SBCN_API sbcn_status sbcn_dataset_to_text(const sbcn_dataset* data, char** out);
SBCN_API void sbcn_dataset_free(sbcn_dataset* data);
SBCN_API size_t sbcn_dataset_event_count(const sbcn_dataset* data);
SBCN_API size_t sbcn_dataset_sample_count(const sbcn_dataset* data);
/* NULL when v is out of range. */
SBCN_API const char* sbcn_dataset_event_name(const sbcn_dataset* data, size_t v);
SBCN_API sbcn_status sbcn_dataset_cell(const sbcn_dataset* data, size_t row, size_t v, int* out);
SBCN_API sbcn_status sbcn_dataset_marginal(const sbcn_dataset* data, size_t v, double* out);
SBCN_API sbcn_status sbcn_dataset_joint(const sbcn_dataset* data, size_t i, size_t j, double* out);
SBCN_API sbcn_status sbcn_dataset_conditional(const sbcn_dataset* data, size_t effect,
                                              size_t cause, int cause_value, double* out);
/* Number of degenerate events (marginal 0 or 1); indices written to `out`
 * when it is non-NULL and has room for `capacity` entries. */
SBCN_API size_t sbcn_dataset_degenerate(const sbcn_dataset* data, size_t* out, size_t capacity);
/* Appends one column per formula; formula text uses the formula-file syntax
 * ("<name> = (A | B) & (!A | !B)" per line). */
SBCN_API sbcn_status sbcn_dataset_lift(const sbcn_dataset* data, const char* formulas,
                                       size_t length, sbcn_dataset** out);
SBCN_API sbcn_status sbcn_dataset_apply_noise(const sbcn_dataset* data, double level,
                                              sbcn_noise_mode mode, uint64_t seed,
                                              sbcn_dataset** out);

/* Inference */
typedef struct sbcn_infer_options {
  sbcn_regularizer regularizer;
  double pseudocount;
  int prima_facie_only;
  int unconstrained; /* plain BN baseline: no Suppes filter */
  sbcn_search_mode search_mode;
  size_t max_parents; /* 0 = unlimited */
  sbcn_condition_mode condition_mode;
  size_t condition_replicates;
  double confidence_level;
  uint64_t seed;
  size_t parallelism;
} sbcn_infer_options;

SBCN_API void sbcn_infer_options_init(sbcn_infer_options* options);
SBCN_API sbcn_status sbcn_infer(const sbcn_dataset* data, const sbcn_infer_options* options,
                                sbcn_network** out);
/* Infers on the full data, then annotates each edge with the fraction of
 * `replicates` row-resampled replicates that re-infer it. */
SBCN_API sbcn_status sbcn_bootstrap(const sbcn_dataset* data, const sbcn_infer_options* options,
                                    size_t replicates, sbcn_network** out);
/* Bootstrap confidence of an arbitrary ordered pair (by event index); -1 in
 * *out when the network carries no bootstrap tallies. */
SBCN_API sbcn_status sbcn_network_pair_confidence(const sbcn_network* net, size_t from,
                                                  size_t to, double* out);

SBCN_API void sbcn_network_free(sbcn_network* net);
SBCN_API size_t sbcn_network_event_count(const sbcn_network* net);
SBCN_API size_t sbcn_network_edge_count(const sbcn_network* net);
/* confidence receives NaN when the edge carries none. Any out pointer may be
 * NULL. */
SBCN_API sbcn_status sbcn_network_edge(const sbcn_network* net, size_t index, const char** from,
                                       const char** to, double* confidence);
SBCN_API sbcn_status sbcn_network_score(const sbcn_network* net, double* out);
SBCN_API sbcn_status sbcn_network_to_json(const sbcn_network* net, char** out);
SBCN_API sbcn_status sbcn_network_to_dot(const sbcn_network* net, char** out);
SBCN_API sbcn_status sbcn_network_from_json(const char* text, size_t length, sbcn_network** out);
/* Re-checks the Suppes conditions of every edge on `data`. `report` (may be
 * NULL) receives one line per violation. */
SBCN_API sbcn_status sbcn_network_validate(const sbcn_network* net, const sbcn_dataset* data,
                                           size_t* violations, char** report);

/* Simulation */
typedef struct sbcn_model_options {
  const char* topology; /* e.g. "tree", "dag_single_source_disj" */
  size_t node_count;
  double theta;
  double epsilon;
  double source_marginal; /* negative = theta */
  size_t max_parents;     /* 0 = class default */
  int allow_weak_gap;
} sbcn_model_options;

SBCN_API void sbcn_model_options_init(sbcn_model_options* options);
SBCN_API sbcn_status sbcn_model_random(const sbcn_model_options* options, uint64_t seed,
                                       sbcn_model** out);
SBCN_API void sbcn_model_free(sbcn_model* model);
SBCN_API size_t sbcn_model_node_count(const sbcn_model* model);
SBCN_API sbcn_status sbcn_model_sample(const sbcn_model* model, size_t samples, uint64_t seed,
                                       sbcn_dataset** out);
SBCN_API sbcn_status sbcn_model_edge_list(const sbcn_model* model, char** out);
SBCN_API sbcn_status sbcn_model_to_json(const sbcn_model* model, char** out);
/* Formula-file text with one XOR formula per XOR node. */
SBCN_API sbcn_status sbcn_model_xor_formulas(const sbcn_model* model, char** out);
/* Structure, clean sample and noise from one master seed (sub-seeds are
 * derived internally). */
SBCN_API sbcn_status sbcn_simulate(const sbcn_model_options* options, size_t samples,
                                   double noise, sbcn_noise_mode noise_mode, uint64_t seed,
                                   sbcn_model** model, sbcn_dataset** data);

/* Experiments */
typedef struct sbcn_experiment_report {
  size_t cells;
  size_t computed;
  size_t reused;
  size_t rows;
  size_t failures;
} sbcn_experiment_report;

/* config_json may be NULL for the desk-scale defaults. */
SBCN_API sbcn_status sbcn_experiment_run(const char* config_json, const char* out_dir,
                                         size_t parallelism, int record_runtime,
                                         sbcn_experiment_report* report);
SBCN_API sbcn_status sbcn_experiment_default_config(int full_scale, char** out);

#ifdef __cplusplus
}
#endif

#endif
