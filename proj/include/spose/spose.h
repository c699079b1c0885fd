/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the spose pose-lifting library.
 *
 * All functions return an sp_status. On failure the message is available
 * from sp_last_error() on the same thread until the next call. Handles are
 * opaque; every *_create / *_load / *_generate result must be released with
 * the matching *_free. Strings returned through char** are owned by the
 * caller and released with sp_string_free.
 *
 * Units: 2D inputs are normalized image coordinates, 3D outputs are
 * root-relative millimeters.
 */
#ifndef SPOSE_SPOSE_H
#define SPOSE_SPOSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SPOSE_BUILDING_LIBRARY)
#define SP_API __declspec(dllexport)
#else
#define SP_API __declspec(dllimport)
#endif
#else
#define SP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sp_status {
    SP_OK = 0,
    SP_ERR_ARGUMENT = 1,  /* null pointer or out-of-range argument */
    SP_ERR_DIMENSION = 2, /* shape mismatch */
    SP_ERR_CONFIG = 3,    /* invalid configuration */
    SP_ERR_NUMERIC = 4,   /* non-finite values */
    SP_ERR_IO = 5,        /* file could not be read or written */
    SP_ERR_CHECKSUM = 6,  /* corrupt or truncated file */
    SP_ERR_INTERNAL = 7
} sp_status;

typedef enum sp_log_level { SP_LOG_QUIET = 0, SP_LOG_WARN = 1, SP_LOG_INFO = 2 } sp_log_level;

typedef struct sp_model sp_model;
typedef struct sp_dataset sp_dataset;

SP_API const char *sp_last_error(void);
SP_API const char *sp_status_name(sp_status status);
SP_API const char *sp_version(void);
SP_API void sp_set_log_level(sp_log_level level);
SP_API void sp_string_free(char *s);

/* ---- complexity ---------------------------------------------------------- */

typedef struct sp_complexity_input {
    uint64_t layers; /* per encoder */
    uint64_t frames;
    uint64_t dim;    /* hidden width is twice this */
    uint64_t stride;
    uint64_t kernel;
} sp_complexity_input;

SP_API void sp_complexity_input_default(sp_complexity_input *in);

/* Formats the analytic report. `config_json` (may be NULL) adds the
 * parameter count and per-layer measured MACs of that model; a training
 * config is accepted too and its training keys are ignored. */
SP_API sp_status sp_complexity_report(const sp_complexity_input *in, const char *config_json, int as_csv,
                                      char **out_text);

/* ---- model ---------------------------------------------------------------- */

/* `config_json` holds model keys only (T, J, d_m, ...); absent keys keep the
 * defaults of the 27-frame configuration. */
SP_API sp_status sp_model_create(const char *config_json, uint64_t seed, sp_model **out);
SP_API sp_status sp_model_load(const char *path, sp_model **out);
SP_API sp_status sp_model_save(const sp_model *model, const char *path);
SP_API void sp_model_free(sp_model *model);

SP_API sp_status sp_model_param_count(const sp_model *model, uint64_t *out);
SP_API sp_status sp_model_dims(const sp_model *model, size_t *frames, size_t *joints);
/* Canonical JSON of the model configuration. */
SP_API sp_status sp_model_config_json(const sp_model *model, char **out_json);

/* input: batch x T x J x 2 floats; out: batch x J x 3 doubles (mm). */
SP_API sp_status sp_model_predict(const sp_model *model, const float *input, size_t batch, double *out);

/* ---- datasets ------------------------------------------------------------- */

typedef struct sp_gen_options {
    uint64_t seed;
    uint32_t sequences;
    uint32_t frames;  /* per sequence */
    uint32_t window;  /* odd T */
    double sigma_px;  /* 2D noise in pixels */
    uint32_t threads; /* 0 = SL_THREADS or hardware concurrency */
} sp_gen_options;

SP_API void sp_gen_options_default(sp_gen_options *opt);
SP_API sp_status sp_dataset_generate(const sp_gen_options *opt, sp_dataset **out);
SP_API sp_status sp_dataset_load(const char *path, sp_dataset **out);
SP_API sp_status sp_dataset_save(const sp_dataset *ds, const char *path);
SP_API void sp_dataset_free(sp_dataset *ds);
SP_API sp_status sp_dataset_size(const sp_dataset *ds, size_t *samples, size_t *frames, size_t *joints);

/* ---- training and evaluation ---------------------------------------------- */

typedef struct sp_epoch_info {
    size_t epoch;
    double lr;
    double loss_total;
    double loss_first_mm;  /* mean joint error of the intermediate head */
    double loss_second_mm; /* mean joint error of the final head */
    double mpjpe;
    double p_mpjpe;
    double mpjve;
    double seconds;
} sp_epoch_info;

typedef void (*sp_epoch_callback)(const sp_epoch_info *info, void *user);

/* Trains from a JSON config (model keys plus lr0, lr_decay, epochs,
 * batch_size, seed, flip_augment, eval_flip). Writes the best checkpoint to
 * `checkpoint_path` and, when `log_csv_path` is set, the per-epoch log.
 * `heldout` may be NULL (the training set is scored instead). On a
 * non-finite loss the last good checkpoint is still written and
 * SP_ERR_NUMERIC is returned. `out_best` (may be NULL) receives the best
 * model. */
SP_API sp_status sp_train(const char *train_config_json, const sp_dataset *train, const sp_dataset *heldout,
                          const char *checkpoint_path, const char *log_csv_path, sp_epoch_callback callback,
                          void *user, sp_model **out_best);

typedef struct sp_metrics {
    double mpjpe;
    double p_mpjpe;
    double mpjve;
} sp_metrics;

/* Average metrics over actions; `out_csv` (may be NULL) receives the
 * per-action table. */
SP_API sp_status sp_evaluate(const sp_model *model, const sp_dataset *ds, int flip_averaging, sp_metrics *out,
                             char **out_csv);

/* Writes the attention maps of sample `index` into `out_dir`. */
SP_API sp_status sp_export_attention(const sp_model *model, const sp_dataset *ds, size_t index, const char *out_dir,
                                     size_t *files_written);

#ifdef __cplusplus
}
#endif

#endif /* SPOSE_SPOSE_H */
