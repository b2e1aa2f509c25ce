#ifndef CICA_CICA_H
#define CICA_CICA_H

/* C interface to the conditional-ICA library.
 *
 * Every fallible call returns a cica_status. On failure, cica_last_error()
 * returns a message for the calling thread that stays valid until that
 * thread's next API call. Objects returned through out-parameters are owned
 * by the caller and released with the matching *_free function; the free
 * functions accept NULL.
 *
 * Matrices are features x samples, row-major, 64-bit floats.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CICA_BUILDING_LIBRARY)
#    define CICA_API __declspec(dllexport)
#  else
#    define CICA_API __declspec(dllimport)
#  endif
#else
#  define CICA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cica_status {
  CICA_OK = 0,
  CICA_ERR_INTERNAL = 1,
  CICA_ERR_CONFIG = 2,    /* invalid configuration or argument */
  CICA_ERR_DATA = 3,      /* unreadable or inconsistent input data */
  CICA_ERR_NUMERICAL = 4  /* numerical failure during fitting or sampling */
} cica_status;

typedef enum cica_model_kind { CICA_MODEL_UNCONDITIONAL = 0, CICA_MODEL_CONDITIONAL = 1 } cica_model_kind;

typedef struct cica_matrix cica_matrix;
typedef struct cica_labels cica_labels;
typedef struct cica_model cica_model;
typedef struct cica_config cica_config;

CICA_API const char* cica_last_error(void);
CICA_API const char* cica_version(void);

/* ---- matrices ---------------------------------------------------------- */

/* Copies rows * cols values. */
CICA_API cica_status cica_matrix_create(size_t rows, size_t cols, const double* values, cica_matrix** out);
/* format: "csv" or "bin". */
CICA_API cica_status cica_matrix_load(const char* path, const char* format, cica_matrix** out);
CICA_API cica_status cica_matrix_save(const cica_matrix* m, const char* path, const char* format);
CICA_API size_t cica_matrix_rows(const cica_matrix* m);
CICA_API size_t cica_matrix_cols(const cica_matrix* m);
CICA_API const double* cica_matrix_data(const cica_matrix* m);
CICA_API void cica_matrix_free(cica_matrix* m);

/* ---- labels ------------------------------------------------------------ */

CICA_API cica_status cica_labels_create(size_t n, const int64_t* values, cica_labels** out);
CICA_API cica_status cica_labels_load(const char* path, cica_labels** out);
CICA_API cica_status cica_labels_save(const cica_labels* labels, const char* path);
CICA_API size_t cica_labels_size(const cica_labels* labels);
CICA_API const int64_t* cica_labels_data(const cica_labels* labels);
CICA_API void cica_labels_free(cica_labels* labels);

/* ---- generative models ------------------------------------------------- */

/* Unconditional model on unlabeled data with k components. */
CICA_API cica_status cica_fit_rest(const cica_matrix* x, size_t k, uint64_t seed, cica_model** out);
/* Class-conditional model reusing the unmixing of `rest`. */
CICA_API cica_status cica_fit_task(const cica_model* rest, const cica_matrix* x, const cica_labels* labels,
                                   cica_model** out);
/* Unconditional: n samples, labels optional (all 0). Conditional: n samples
 * per class, labels set when `labels_out` is non-NULL. */
CICA_API cica_status cica_generate(const cica_model* model, size_t n, uint64_t seed, cica_matrix** x_out,
                                   cica_labels** labels_out);
/* Baselines "ica", "cov" and "icacov" fitted on labeled data; n per class. */
CICA_API cica_status cica_augment_baseline(const char* method, const cica_matrix* x, const cica_labels* labels,
                                           size_t k, size_t n, uint64_t seed, cica_matrix** x_out,
                                           cica_labels** labels_out);

CICA_API cica_status cica_model_save(const cica_model* model, const char* path);
CICA_API cica_status cica_model_load(const char* path, cica_model** out);
CICA_API cica_model_kind cica_model_get_kind(const cica_model* model);
CICA_API size_t cica_model_components(const cica_model* model);
CICA_API size_t cica_model_features(const cica_model* model);
CICA_API int cica_model_converged(const cica_model* model);
CICA_API void cica_model_free(cica_model* model);

/* ---- experiments ------------------------------------------------------- */

CICA_API cica_status cica_config_create(cica_config** out);
CICA_API cica_status cica_config_set(cica_config* config, const char* key, const char* value);
CICA_API cica_status cica_config_load_file(cica_config* config, const char* path);
CICA_API void cica_config_free(cica_config* config);

/* Each writes <name>.json, <name>.csv and timings.txt under out_dir. */
CICA_API cica_status cica_run_fake_vs_real(const cica_config* config, const char* out_dir);
CICA_API cica_status cica_run_augment(const cica_config* config, const char* out_dir);
CICA_API cica_status cica_run_sweep_k(const cica_config* config, const char* out_dir);
/* Writes rest, task_x (format "csv" or "bin") and task_labels.txt. */
CICA_API cica_status cica_synth(const cica_config* config, const char* out_dir, const char* format);

#ifdef __cplusplus
}
#endif

#endif /* CICA_CICA_H */
