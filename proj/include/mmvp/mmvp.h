// Copyright (c) 2026 The MMVP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the mmvp library.
 *
 * Every fallible call returns an mmvp_status. On failure the message of the
 * most recent error on the calling thread is available from mmvp_last_error()
 * until the next failing call on that thread. Objects are opaque handles
 * released with their matching *_free function; strings returned through
 * char** are released with mmvp_string_free. Handles may be shared across
 * threads for read-only calls (predict, evaluate); trainers are not
 * thread-safe.
 */

#ifndef MMVP_MMVP_H_
#define MMVP_MMVP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMVP_API __declspec(dllexport)
#else
#define MMVP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmvp_status {
    MMVP_OK = 0,
    MMVP_ERR_INVALID_ARGUMENT = 1,
    MMVP_ERR_SHAPE_MISMATCH = 2,
    MMVP_ERR_IO = 3,
    MMVP_ERR_BAD_MAGIC = 4,
    MMVP_ERR_UNSUPPORTED_VERSION = 5,
    MMVP_ERR_UNSUPPORTED_DTYPE = 6,
    MMVP_ERR_TRUNCATED = 7,
    MMVP_ERR_UNKNOWN_KEY = 8,
    MMVP_ERR_TYPE_MISMATCH = 9,
    MMVP_ERR_CONFIG_INVALID = 10,
    MMVP_ERR_OUT_OF_RANGE = 11,
    MMVP_ERR_INTERNAL = 12
} mmvp_status;

typedef struct mmvp_dataset mmvp_dataset;
typedef struct mmvp_config mmvp_config;
typedef struct mmvp_trainer mmvp_trainer;
typedef struct mmvp_model mmvp_model;

typedef struct mmvp_dataset_info {
    uint32_t num_sequences;
    uint32_t seq_len;
    uint32_t height;
    uint32_t width;
    uint32_t channels;
} mmvp_dataset_info;

typedef struct mmvp_model_info {
    uint32_t height;
    uint32_t width;
    uint32_t channels;
    uint32_t t_observed;
    uint32_t t_future;
    uint32_t downsample;
    uint64_t param_count;
} mmvp_model_info;

/* Receives one structured log line, without trailing newline. */
typedef void (*mmvp_log_fn)(const char* line, void* user);
/* Polled before every training step; nonzero ends the run early. */
typedef int (*mmvp_stop_fn)(void* user);

MMVP_API const char* mmvp_version(void);
MMVP_API const char* mmvp_status_name(mmvp_status status);
MMVP_API const char* mmvp_last_error(void);
MMVP_API void mmvp_string_free(char* s);

/* Datasets. threads = 0 picks the hardware concurrency. */
MMVP_API mmvp_status mmvp_dataset_generate(uint64_t seed, uint32_t count, uint32_t seq_len, uint32_t height,
                                           uint32_t width, uint32_t sprites, uint32_t threads, mmvp_dataset** out);
MMVP_API mmvp_status mmvp_dataset_read(const char* path, mmvp_dataset** out);
MMVP_API mmvp_status mmvp_dataset_write(const mmvp_dataset* ds, const char* path);
MMVP_API mmvp_status mmvp_dataset_get_info(const mmvp_dataset* ds, mmvp_dataset_info* out);
/* Borrowed pointer to frame t of sequence seq, channels * height * width bytes. */
MMVP_API mmvp_status mmvp_dataset_frame(const mmvp_dataset* ds, uint32_t seq, uint32_t t, const uint8_t** pixels);
MMVP_API void mmvp_dataset_free(mmvp_dataset* ds);

/* Training configuration documents. */
MMVP_API mmvp_status mmvp_config_load(const char* path, mmvp_config** out);
MMVP_API mmvp_status mmvp_config_parse(const char* json, mmvp_config** out);
MMVP_API mmvp_status mmvp_config_to_json(const mmvp_config* config, char** out);
/* The train_data / val_data paths; borrowed, valid while config lives. */
MMVP_API const char* mmvp_config_train_data(const mmvp_config* config);
MMVP_API const char* mmvp_config_val_data(const mmvp_config* config);
MMVP_API uint32_t mmvp_config_eval_threads(const mmvp_config* config);
MMVP_API void mmvp_config_free(mmvp_config* config);

/* Training. The trainer keeps its own copy of the dataset. */
MMVP_API mmvp_status mmvp_trainer_create(const mmvp_config* config, const mmvp_dataset* train, mmvp_trainer** out);
MMVP_API mmvp_status mmvp_trainer_resume(mmvp_trainer* trainer, const char* checkpoint_path);
/* out_dir may be NULL to skip checkpoint files; log and stop may be NULL. */
MMVP_API mmvp_status mmvp_trainer_run(mmvp_trainer* trainer, const char* out_dir, mmvp_log_fn log, mmvp_stop_fn stop,
                                      void* user);
MMVP_API mmvp_status mmvp_trainer_save(const mmvp_trainer* trainer, const char* path);
MMVP_API uint64_t mmvp_trainer_steps(const mmvp_trainer* trainer);
/* Independent snapshot of the current parameters. */
MMVP_API mmvp_status mmvp_trainer_model(const mmvp_trainer* trainer, mmvp_model** out);
MMVP_API void mmvp_trainer_free(mmvp_trainer* trainer);

/* Inference and evaluation. */
MMVP_API mmvp_status mmvp_model_load(const char* checkpoint_path, mmvp_model** out);
MMVP_API mmvp_status mmvp_model_get_info(const mmvp_model* model, mmvp_model_info* out);
/* Output sequences hold T observed frames followed by T' predictions. */
MMVP_API mmvp_status mmvp_model_predict(const mmvp_model* model, const mmvp_dataset* ds, uint32_t threads,
                                        mmvp_dataset** out);
/* JSON report of the model and the repeat-last-frame baseline. */
MMVP_API mmvp_status mmvp_model_evaluate(const mmvp_model* model, const mmvp_dataset* ds, uint32_t threads,
                                         char** report_json);
MMVP_API void mmvp_model_free(mmvp_model* model);

/* Scores frames [t_observed, pred seq_len) of stored predictions. */
MMVP_API mmvp_status mmvp_eval_datasets(const mmvp_dataset* pred, const mmvp_dataset* gt, uint32_t t_observed,
                                        char** report_json);

/* Writes T' heatmaps of patch (h, w) for sequence seq into out_dir. */
MMVP_API mmvp_status mmvp_dump_matrices(const char* checkpoint_path, const mmvp_dataset* ds, uint32_t seq,
                                        uint32_t h, uint32_t w, const char* out_dir, uint32_t* files_written);

#ifdef __cplusplus
}
#endif

#endif /* MMVP_MMVP_H_ */
