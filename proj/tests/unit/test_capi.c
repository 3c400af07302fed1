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

/* Exercises the public C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mmforge/mmforge.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s (last error: %s)\n", \
              __FILE__, __LINE__, #cond, mmf_last_error());           \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_spectrogram(const char* dir) {
  char payload[512], png[512];
  snprintf(payload, sizeof payload, "%s/capi_s.f32", dir);
  snprintf(png, sizeof png, "%s/capi_s.png", dir);
  double values[6] = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  mmf_spectrogram* s = NULL;
  EXPECT(mmf_spectrogram_create(2, 3, values, 50.0, 50.0, 0, &s) == MMF_OK);
  EXPECT(mmf_spectrogram_write(s, payload) == MMF_OK);
  EXPECT(mmf_spectrogram_render_png(s, png, "jet") == MMF_OK);
  EXPECT(mmf_spectrogram_render_png(s, png, "nope") == MMF_ERR_INVALID_ARGUMENT);
  EXPECT(strstr(mmf_last_error(), "nope") != NULL);
  mmf_spectrogram_free(s);

  mmf_spectrogram* r = NULL;
  size_t rows = 0, cols = 0;
  EXPECT(mmf_spectrogram_read(payload, &r) == MMF_OK);
  EXPECT(mmf_spectrogram_shape(r, &rows, &cols) == MMF_OK);
  EXPECT(rows == 2 && cols == 3);
  double back[6] = {0};
  EXPECT(mmf_spectrogram_copy_values(r, back, 5) == MMF_ERR_OUT_OF_RANGE);
  EXPECT(mmf_spectrogram_copy_values(r, back, 6) == MMF_OK);
  EXPECT(memcmp(back, values, sizeof values) == 0);
  mmf_spectrogram_free(r);

  char* json = NULL;
  EXPECT(mmf_inspect(payload, &json) == MMF_OK);
  EXPECT(json != NULL && strstr(json, "mmforge.spectrogram") != NULL);
  mmf_string_free(json);

  EXPECT(mmf_spectrogram_read("/nonexistent/x.f32", &r) != MMF_OK);
  EXPECT(strlen(mmf_last_error()) > 0);
  EXPECT(strcmp(mmf_status_name(MMF_ERR_FORMAT), "format") == 0);
  EXPECT(mmf_spectrogram_read(NULL, &r) == MMF_ERR_INVALID_ARGUMENT);
}

static void test_math(void) {
  double u[2] = {1.0, 0.0}, v[2] = {1.0, 1.0}, zero[2] = {0.0, 0.0}, c = 0.0;
  EXPECT(mmf_cosine_similarity(u, v, 2, &c) == MMF_OK);
  EXPECT(fabs(c - 0.70710678118654752) < 1e-12);
  EXPECT(mmf_cosine_similarity(u, zero, 2, &c) == MMF_ERR_INVALID_ARGUMENT);

  double loss = 0.0;
  EXPECT(mmf_infonce_loss(u, u, 1, 2, 0.1, MMF_INFONCE_DOUBLE_DENOMINATOR, &loss) == MMF_OK);
  EXPECT(fabs(loss - log(2.0)) < 1e-12);
  EXPECT(mmf_infonce_loss(v, v, 1, 2, 0.1, MMF_INFONCE_DOUBLE_DENOMINATOR, &loss) ==
         MMF_ERR_INVALID_ARGUMENT);
  double gs[2], gt[2];
  EXPECT(mmf_infonce_grad(u, u, 1, 2, 0.1, MMF_INFONCE_DOUBLE_DENOMINATOR, gs, gt) == MMF_OK);
  EXPECT(fabs(gs[0]) < 1e-12 && fabs(gt[0]) < 1e-12);

  double w0[4] = {1, 0, 0, 1}, a[2] = {1, 0}, b[2] = {1, 0}, x[2] = {1, 2}, h[2] = {0, 0};
  EXPECT(mmf_lora_forward(w0, a, b, 2, 2, 1, x, h) == MMF_OK);
  EXPECT(h[0] == 2.0 && h[1] == 2.0);
  EXPECT(mmf_lora_forward(w0, NULL, NULL, 2, 2, 0, x, h) == MMF_OK);
  EXPECT(h[0] == 1.0 && h[1] == 2.0);
  EXPECT(mmf_lora_forward(w0, a, b, 2, 2, 3, x, h) == MMF_ERR_INVALID_ARGUMENT);

  double labels[6] = {1, 0, 0, 0, 1, 0}, sig[3] = {0.1, 0.9, 0}, sim = 0;
  size_t idx = 99;
  EXPECT(mmf_zero_shot(sig, labels, 2, 3, &idx, &sim) == MMF_OK);
  EXPECT(idx == 1);
}

static void test_prompts(void) {
  char* out = NULL;
  EXPECT(mmf_prompts_generate("{\"scenario\": \"a person walks then waves\", \"style\": "
                              "\"complex\", \"count\": 3, \"seed\": 4}",
                              &out) == MMF_OK);
  int lines = 0;
  for (const char* p = out; p && *p; ++p) lines += *p == '\n';
  EXPECT(lines == 3);
  mmf_string_free(out);
  EXPECT(mmf_prompts_generate("{\"scenario\": 5}", &out) == MMF_ERR_FORMAT);
  EXPECT(mmf_prompts_generate("not json", &out) == MMF_ERR_FORMAT);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  EXPECT(strlen(mmf_version()) > 0);
  test_spectrogram(dir);
  test_math();
  test_prompts();
  if (failures == 0) printf("C API: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
