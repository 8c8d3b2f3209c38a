/* C interface to the forks online kernel learning library. */
#ifndef FORKS_FORKS_H
#define FORKS_FORKS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FORKS_BUILDING_LIBRARY)
#    define FORKS_API __declspec(dllexport)
#  else
#    define FORKS_API __declspec(dllimport)
#  endif
#else
#  define FORKS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum forks_status {
  FORKS_OK = 0,
  FORKS_ERR_INPUT = 1,    /* malformed data or arguments */
  FORKS_ERR_CONFIG = 2,   /* inconsistent hyperparameters */
  FORKS_ERR_IO = 3,
  FORKS_ERR_NUMERIC = 4,
  FORKS_ERR_INTERNAL = 5
} forks_status;

/* Message for the last failing call on this thread; "" if none. */
FORKS_API const char* forks_last_error(void);
FORKS_API const char* forks_version(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct forks_dataset forks_dataset;

FORKS_API forks_status forks_dataset_load(const char* path, forks_dataset** out);
FORKS_API forks_status forks_dataset_parse(const char* text, size_t length, forks_dataset** out);
FORKS_API forks_status forks_dataset_save(const forks_dataset* ds, const char* path);
FORKS_API forks_status forks_dataset_permute(const forks_dataset* ds, uint64_t seed,
                                             forks_dataset** out);
FORKS_API forks_status forks_dataset_adversarial(const forks_dataset* ds, size_t blocks,
                                                 size_t repeats, uint64_t seed,
                                                 forks_dataset** out);
FORKS_API forks_status forks_dataset_minmax(const forks_dataset* ds, double lo, double hi,
                                            forks_dataset** out);
FORKS_API size_t forks_dataset_size(const forks_dataset* ds);
FORKS_API size_t forks_dataset_dim(const forks_dataset* ds);
/* Label of example i, or 0 if i is out of range. */
FORKS_API int forks_dataset_label(const forks_dataset* ds, size_t i);
FORKS_API void forks_dataset_free(forks_dataset* ds);

/* ---- configuration ----------------------------------------------------- */

typedef enum forks_algorithm { FORKS_ALGO_FORKS = 0, FORKS_ALGO_KOGD = 1, FORKS_ALGO_FOGD = 2 } forks_algorithm;
typedef enum forks_loss { FORKS_LOSS_HINGE = 0, FORKS_LOSS_SQUARED_HINGE = 1 } forks_loss;
typedef enum forks_stream { FORKS_STREAM_PERMUTE = 0, FORKS_STREAM_ADVERSARIAL = 1, FORKS_STREAM_AS_IS = 2 } forks_stream;
typedef enum forks_cycle_basis { FORKS_CYCLE_STREAM = 0, FORKS_CYCLE_AFTER_BUDGET = 1 } forks_cycle_basis;
typedef enum forks_ordering { FORKS_ONS_CURRENT_INVERSE = 0, FORKS_ONS_UPDATED_INVERSE = 1 } forks_ordering;
typedef enum forks_projection { FORKS_PROJECT_CURRENT = 0, FORKS_PROJECT_NEXT = 1 } forks_projection;

/* Size fields set to 0 and pinv_tol set below 0 mean "derive the default". */
typedef struct forks_run_config {
  forks_algorithm algorithm;
  forks_loss loss;
  double bandwidth;
  size_t budget;
  size_t sketch_size;
  size_t sample_size;
  double gamma;
  size_t rank;
  size_t blocks;
  size_t update_cycle;
  double theta;
  forks_cycle_basis cycle_basis;
  double alpha;
  double sigma_w;
  double eta_w;
  double kogd_eta;
  double clip;
  forks_ordering ordering;
  forks_projection projection;
  double pinv_tol;
  size_t fogd_features;
  double fogd_eta;
  forks_stream stream;
  size_t adv_blocks;
  size_t adv_repeats;
  uint64_t seed;
} forks_run_config;

FORKS_API void forks_run_config_init(forks_run_config* cfg);

typedef struct forks_resolved {
  size_t budget;
  size_t sketch_size;
  size_t sample_size;
  size_t rank;
  size_t blocks;
  size_t update_cycle;
  size_t fogd_features;
} forks_resolved;

/* Concrete sizes a run over a stream of the given length would use. */
FORKS_API forks_status forks_resolve(const forks_run_config* cfg, size_t stream_length,
                                     forks_resolved* out);

/* ---- batch runs -------------------------------------------------------- */

typedef enum forks_round_kind { FORKS_ROUND_FILLING = 0, FORKS_ROUND_UPDATE = 1, FORKS_ROUND_REGULAR = 2 } forks_round_kind;

typedef struct forks_round {
  int label;
  int prediction;
  double score;
  forks_round_kind kind;
  size_t cumulative_mistakes;
} forks_round;

typedef struct forks_run_summary {
  size_t rounds;
  size_t mistakes;
  double mistake_rate; /* percent */
  double seconds_filling;
  double seconds_update;
  double seconds_regular;
  size_t anchors;
  forks_resolved resolved;
} forks_run_summary;

typedef struct forks_run_result forks_run_result;

FORKS_API forks_status forks_run(const forks_run_config* cfg, const forks_dataset* ds,
                                 forks_run_result** out);
FORKS_API size_t forks_result_rounds(const forks_run_result* res);
FORKS_API forks_status forks_result_round(const forks_run_result* res, size_t t, forks_round* out);
FORKS_API void forks_result_summary(const forks_run_result* res, forks_run_summary* out);
FORKS_API void forks_result_free(forks_run_result* res);

/* Writes the default bandwidth grid; returns its full length. */
FORKS_API size_t forks_default_bandwidth_grid(double* out, size_t capacity);
/* rates (length n, may be NULL) receives the mistake rate per grid entry. */
FORKS_API forks_status forks_select_bandwidth(const forks_run_config* cfg, const forks_dataset* ds,
                                              const double* grid, size_t n, double* best,
                                              double* rates);

/* ---- incremental use --------------------------------------------------- */

typedef struct forks_learner forks_learner;

/* stream_length feeds the theta-derived update cycle; dim is required by FOGD. */
FORKS_API forks_status forks_learner_create(const forks_run_config* cfg, size_t stream_length,
                                            size_t dim, forks_learner** out);
/* indices are 0-based and strictly increasing; label is -1 or +1. */
FORKS_API forks_status forks_learner_step(forks_learner* learner, const uint32_t* indices,
                                          const double* values, size_t nnz, int label,
                                          int* prediction, double* score);
FORKS_API size_t forks_learner_anchors(const forks_learner* learner);
FORKS_API void forks_learner_free(forks_learner* learner);

/* ---- benchmarks -------------------------------------------------------- */

typedef struct forks_tisvd_bench {
  size_t sketch_size;
  size_t rank;
  size_t steps;
  double tisvd_us;
  double dense_us;
  double tisvd_error;
  double dense_error;
} forks_tisvd_bench;

FORKS_API forks_status forks_bench_tisvd(size_t sketch_size, size_t rank, size_t steps,
                                         uint64_t seed, forks_tisvd_bench* out);

#ifdef __cplusplus
}
#endif

#endif
