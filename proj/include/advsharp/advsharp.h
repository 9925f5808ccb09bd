/* C interface to the advsharp library.
 *
 * Every function that can fail returns an advsharp_status; on failure
 * advsharp_last_error() describes the problem (per thread, valid until the
 * next call on that thread). Matrices are row-major, doubles are 64-bit.
 * Specs and configs are passed as JSON text.
 */
#ifndef ADVSHARP_H
#define ADVSHARP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADVSHARP_API __declspec(dllexport)
#else
#define ADVSHARP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum advsharp_status {
  ADVSHARP_OK = 0,
  ADVSHARP_ERR_INVALID_ARGUMENT = 1,
  ADVSHARP_ERR_DIMENSION = 2,
  ADVSHARP_ERR_FORMAT = 3,
  ADVSHARP_ERR_CONSISTENCY = 4,
  ADVSHARP_ERR_IO = 5,
  ADVSHARP_ERR_DATA = 6,
  ADVSHARP_ERR_INVALID_SPEC = 7,
  ADVSHARP_ERR_DIVERGED = 8,
  ADVSHARP_ERR_NOT_SYMMETRIC = 9,
  ADVSHARP_ERR_CONFIG = 10,
  ADVSHARP_ERR_VERIFICATION = 11, /* checks ran and at least one failed */
  ADVSHARP_ERR_INTERNAL = 12
} advsharp_status;

typedef struct advsharp_dataset advsharp_dataset;
typedef struct advsharp_checkpoint advsharp_checkpoint;

ADVSHARP_API const char* advsharp_version(void);
ADVSHARP_API const char* advsharp_last_error(void);
ADVSHARP_API const char* advsharp_status_name(advsharp_status status);
/* Process exit code for a status: 0 ok, 1 verification or runtime failure,
 * 2 configuration error, 3 data error. */
ADVSHARP_API int advsharp_exit_code(advsharp_status status);

/* Strings returned through char** are owned by the caller. */
ADVSHARP_API void advsharp_string_free(char* s);

/* ---- datasets ---- */

/* features: n*d row-major in [0,1]; labels: n values in {-1,+1}. */
ADVSHARP_API advsharp_status advsharp_dataset_create(const double* features, const double* labels,
                                                     size_t n, size_t d, const char* name,
                                                     advsharp_dataset** out);
/* Canonical MNIST IDX names in dir; keeps digits 0 (-> -1) and 1 (-> +1). */
ADVSHARP_API advsharp_status advsharp_dataset_load_mnist2(const char* dir, advsharp_dataset** train,
                                                          advsharp_dataset** test);
ADVSHARP_API advsharp_status advsharp_dataset_load_idx(const char* images_path,
                                                       const char* labels_path,
                                                       advsharp_dataset** out);
ADVSHARP_API advsharp_status advsharp_dataset_synth(size_t n_per_class, size_t d, double margin,
                                                    uint64_t seed, advsharp_dataset** out);
ADVSHARP_API void advsharp_dataset_free(advsharp_dataset* data);
ADVSHARP_API size_t advsharp_dataset_size(const advsharp_dataset* data);
ADVSHARP_API size_t advsharp_dataset_dim(const advsharp_dataset* data);
ADVSHARP_API advsharp_status advsharp_dataset_features(const advsharp_dataset* data, double* out);
ADVSHARP_API advsharp_status advsharp_dataset_labels(const advsharp_dataset* data, double* out);

/* ---- model ---- */

ADVSHARP_API advsharp_status advsharp_loss(const advsharp_dataset* data, const double* w, size_t d,
                                           double* out);
ADVSHARP_API advsharp_status advsharp_grad(const advsharp_dataset* data, const double* w, size_t d,
                                           double* out);
/* d*d exact Hessian. With spec_json non-NULL the samples are first perturbed
 * at w by that spec and held fixed. */
ADVSHARP_API advsharp_status advsharp_hessian(const advsharp_dataset* data, const double* w,
                                              size_t d, const char* spec_json, double* out);
ADVSHARP_API advsharp_status advsharp_decomposed_adv_loss(double clean_logit, double w_norm,
                                                          double eta_norm, double cos_theta,
                                                          int label, double* out);
/* n*d perturbed features. */
ADVSHARP_API advsharp_status advsharp_perturb(const advsharp_dataset* data, const double* w,
                                              size_t d, const char* spec_json, double* out);

/* ---- training ---- */

ADVSHARP_API advsharp_status advsharp_train(const advsharp_dataset* data, const char* config_json,
                                            advsharp_checkpoint** out);
ADVSHARP_API advsharp_status advsharp_checkpoint_load(const char* path, advsharp_checkpoint** out);
ADVSHARP_API advsharp_status advsharp_checkpoint_save(const advsharp_checkpoint* ckpt,
                                                      const char* path);
ADVSHARP_API advsharp_status advsharp_checkpoint_to_json(const advsharp_checkpoint* ckpt, char** out);
ADVSHARP_API void advsharp_checkpoint_free(advsharp_checkpoint* ckpt);
ADVSHARP_API size_t advsharp_checkpoint_dim(const advsharp_checkpoint* ckpt);
ADVSHARP_API advsharp_status advsharp_checkpoint_weights(const advsharp_checkpoint* ckpt, double* out);
ADVSHARP_API advsharp_status advsharp_checkpoint_train_loss(const advsharp_checkpoint* ckpt,
                                                            double* out);
/* Robust accuracy (percent) and mean loss under spec_json. */
ADVSHARP_API advsharp_status advsharp_evaluate(const advsharp_dataset* data, const double* w,
                                               size_t d, const char* spec_json,
                                               double* robust_accuracy, double* robust_loss);

/* ---- spectrum ---- */

/* All n eigenvalues of the symmetric n*n matrix h, descending. */
ADVSHARP_API advsharp_status advsharp_eig_dense(const double* h, size_t n, double* out);
/* Top-k by Lanczos with full reorthogonalization. */
ADVSHARP_API advsharp_status advsharp_eig_topk(const double* h, size_t n, size_t k, uint64_t seed,
                                               double* out);
ADVSHARP_API advsharp_status advsharp_verify_optimum_match(const double* x, size_t d, int y,
                                                           double epsilon, double scale,
                                                           int flip_projector_sign,
                                                           double* max_abs_diff, double* tolerance);

/* ---- landscape ---- */

/* Loss along a normalized random direction around the checkpoint, with the
 * checkpoint's own perturbation regenerated at every displaced weight. */
ADVSHARP_API advsharp_status advsharp_landscape_sweep(const advsharp_dataset* data,
                                                      const advsharp_checkpoint* ckpt,
                                                      const double* alphas, size_t n_alpha,
                                                      uint64_t seed, double* out_losses);
ADVSHARP_API advsharp_status advsharp_curvature_at_zero(const double* alphas, const double* losses,
                                                        size_t n, double* out);

/* ---- experiments ---- */

/* command: "train", "landscape", "spectrum" or "verify". config_json is an
 * experiment config. On return *report_json (when non-NULL) holds a JSON
 * summary of the run, also for ADVSHARP_ERR_VERIFICATION. */
ADVSHARP_API advsharp_status advsharp_run_command(const char* command, const char* config_json,
                                                  char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* ADVSHARP_H */
