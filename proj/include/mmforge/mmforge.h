/*
 * Copyright 2026 The mmforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to mmforge. All functions are thread-safe; error details are
 * kept per thread and read back with mmf_last_error(). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * mmf_string_free(). Matrices are dense row-major doubles. */
#ifndef MMFORGE_MMFORGE_H_
#define MMFORGE_MMFORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MMFORGE_BUILDING)
#define MMF_API __declspec(dllexport)
#else
#define MMF_API __declspec(dllimport)
#endif
#else
#define MMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmf_status {
  MMF_OK = 0,
  MMF_ERR_INVALID_ARGUMENT = 1,
  MMF_ERR_IO = 2,
  MMF_ERR_FORMAT = 3,
  MMF_ERR_TOPOLOGY_MISMATCH = 4,
  MMF_ERR_OUT_OF_RANGE = 5,
  MMF_ERR_NETWORK = 6,
  MMF_ERR_MALFORMED_RESPONSE = 7,
  MMF_ERR_NUMERIC = 8,
  MMF_ERR_INTERNAL = 99
} mmf_status;

typedef enum mmf_infonce_variant {
  MMF_INFONCE_DOUBLE_DENOMINATOR = 0,
  MMF_INFONCE_SYMMETRIC_CE = 1
} mmf_infonce_variant;

typedef struct mmf_spectrogram mmf_spectrogram;

MMF_API const char* mmf_version(void);

/* Message of the last failure on this thread ("" if none). */
MMF_API const char* mmf_last_error(void);
/* Stable name of a status code, e.g. "format". */
MMF_API const char* mmf_status_name(mmf_status status);
MMF_API void mmf_string_free(char* s);

/* Spectrograms: H rows (time) by W columns (Doppler). */
MMF_API mmf_status mmf_spectrogram_create(size_t rows, size_t cols, const double* values,
                                          double frame_rate_hz, double doppler_resolution_hz,
                                          int is_db, mmf_spectrogram** out);
MMF_API mmf_status mmf_spectrogram_read(const char* path, mmf_spectrogram** out);
MMF_API mmf_status mmf_spectrogram_write(const mmf_spectrogram* s, const char* path);
MMF_API mmf_status mmf_spectrogram_shape(const mmf_spectrogram* s, size_t* rows, size_t* cols);
/* capacity is in elements and must be at least rows * cols. */
MMF_API mmf_status mmf_spectrogram_copy_values(const mmf_spectrogram* s, double* out,
                                               size_t capacity);
/* colormap: "gray", "hot", "jet" or "viridis"; NULL selects viridis. */
MMF_API mmf_status mmf_spectrogram_render_png(const mmf_spectrogram* s, const char* path,
                                              const char* colormap);
MMF_API void mmf_spectrogram_free(mmf_spectrogram* s);

/* Runs the full pipeline on one motion manifest. radar_path and rand_path may
 * be NULL for defaults. Writes spectrogram.f32 (+ .json sidecar), plan.json and,
 * when write_if_cube is nonzero, if_cube.f32. summary_json may be NULL. */
MMF_API mmf_status mmf_synth_to_dir(const char* motion_path, const char* radar_path,
                                    const char* rand_path, uint64_t seed, const char* out_dir,
                                    unsigned threads, int write_if_cube, char** summary_json);

/* Builds a dataset; manifest_jsonl (may be NULL) receives the manifest text. */
MMF_API mmf_status mmf_dataset_build(const char* spec_path, const char* out_dir, uint64_t seed,
                                     int fail_fast, unsigned threads, char** manifest_jsonl);

/* request_json: {"scenario", "style", "count", "seed", "actions"?, "lexicon"?,
 * "llm_endpoint"?, "llm_model"?}. Output is one JSON prompt per line. */
MMF_API mmf_status mmf_prompts_generate(const char* request_json, char** prompts_jsonl);

/* Sidecar (or JSON file / first manifest line) describing a file. */
MMF_API mmf_status mmf_inspect(const char* path, char** json);

MMF_API mmf_status mmf_cosine_similarity(const double* u, const double* v, size_t n,
                                         double* out);
/* signal, text: n x d with unit-norm rows. */
MMF_API mmf_status mmf_infonce_loss(const double* signal, const double* text, size_t n, size_t d,
                                    double temperature, mmf_infonce_variant variant,
                                    double* loss);
MMF_API mmf_status mmf_infonce_grad(const double* signal, const double* text, size_t n, size_t d,
                                    double temperature, mmf_infonce_variant variant,
                                    double* grad_signal, double* grad_text);
/* w0: d x k, a: r x k, b: d x r, x: k, h: d. r may be 0. */
MMF_API mmf_status mmf_lora_forward(const double* w0, const double* a, const double* b, size_t d,
                                    size_t k, size_t r, const double* x, double* h);
/* labels: n_labels x d. Ties resolve to the lowest index. */
MMF_API mmf_status mmf_zero_shot(const double* signal, const double* labels, size_t n_labels,
                                 size_t d, size_t* index, double* similarity);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* MMFORGE_MMFORGE_H_ */
