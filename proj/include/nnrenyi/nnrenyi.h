/* C interface to the nnrenyi library. Every function that can fail returns an
 * nnr_status; on failure nnr_last_error() describes the problem (per thread).
 * Strings returned through char** are owned by the caller and released with
 * nnr_string_free. */
#ifndef NNRENYI_H
#define NNRENYI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(NNR_BUILDING_LIBRARY)
#define NNR_API __attribute__((visibility("default")))
#else
#define NNR_API
#endif

typedef enum nnr_status {
  NNR_OK = 0,
  NNR_USAGE_ERROR = 2,
  NNR_DATA_ERROR = 3,
  NNR_NUMERICAL_ERROR = 4,
  NNR_IO_ERROR = 5,
  NNR_INTERNAL_ERROR = 6
} nnr_status;

typedef struct nnr_pointset nnr_pointset;

NNR_API const char* nnr_version(void);
NNR_API const char* nnr_last_error(void);
NNR_API void nnr_string_free(char* s);

/* Worker cap for internal parallelism; 0 restores the default. */
NNR_API void nnr_set_threads(unsigned n);

/* Row-major n x d coordinates, copied. */
NNR_API nnr_status nnr_pointset_create(const double* coords, size_t n, size_t d, nnr_pointset** out);
NNR_API nnr_status nnr_pointset_from_csv(const char* path, nnr_pointset** out);
NNR_API nnr_status nnr_pointset_parse_csv(const char* text, nnr_pointset** out);
NNR_API void nnr_pointset_free(nnr_pointset* ps);
NNR_API size_t nnr_pointset_size(const nnr_pointset* ps);
NNR_API size_t nnr_pointset_dim(const nnr_pointset* ps);
NNR_API nnr_status nnr_pointset_coords(const nnr_pointset* ps, const double** out);

/* k nearest neighbors of point `index` (itself excluded), nearest first. */
NNR_API nnr_status nnr_knn_query(const nnr_pointset* ps, size_t index, size_t k, size_t* out_indices,
                                 double* out_distances);

/* Sum of p-th powers of the edge lengths of the generalized NN graph. */
NNR_API nnr_status nnr_l_p(const nnr_pointset* ps, const unsigned* ranks, size_t nranks, double p, double* out);

/* p = d (1 - alpha); usage error unless 0 < alpha < 1. */
NNR_API nnr_status nnr_power_from_alpha(size_t d, double alpha, double* out);

NNR_API nnr_status nnr_gamma_analytic(unsigned d, double p, unsigned k, double* out);

/* Monte-Carlo gamma; with a cache path the estimate is looked up or appended.
 * The JSON record carries mean, std_error, key, seed and tool_version. */
NNR_API nnr_status nnr_calibrate(unsigned d, double p, const unsigned* ranks, size_t nranks, size_t n_cal,
                                 unsigned reps, uint64_t seed, const char* cache_path, char** out_json);

typedef struct nnr_estimator_options {
  double alpha;
  const unsigned* ranks; /* NULL selects {1,2,3} */
  size_t nranks;
  int has_gamma;
  double gamma;
  int analytic_gamma;
  const char* cache_path; /* may be NULL */
  size_t n_cal;
  unsigned reps;
  uint64_t seed;
} nnr_estimator_options;

NNR_API void nnr_estimator_options_init(nnr_estimator_options* opts);

/* out_value and out_json may each be NULL. */
NNR_API nnr_status nnr_entropy(const nnr_pointset* ps, const nnr_estimator_options* opts, double* out_value,
                               char** out_json);
NNR_API nnr_status nnr_mi(const nnr_pointset* ps, const nnr_estimator_options* opts, double* out_value,
                          char** out_json);
NNR_API nnr_status nnr_histogram_entropy(const nnr_pointset* ps, double alpha, double* out_value, char** out_json);
NNR_API nnr_status nnr_histogram_mi(const nnr_pointset* ps, double alpha, double* out_value, char** out_json);

/* Config JSON may be NULL for the built-in configuration. */
NNR_API nnr_status nnr_rate_experiment(const char* config_json, uint64_t seed, char** out_rows_csv,
                                       char** out_summary_csv, char** out_summary_json);
NNR_API nnr_status nnr_isa_experiment(const char* config_json, int paper_scale, uint64_t seed,
                                      char** out_solution_json, char** out_block_norms_csv);
NNR_API nnr_status nnr_diagnostics(const char* grid_json, uint64_t seed, int quick, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
