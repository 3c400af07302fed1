// Copyright 2026 The mmforge Authors
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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmforge/signal_processing.hpp"

namespace mmforge {

// Dense row-major matrix.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }
};

struct PatchGrid {
  std::vector<std::vector<double>> patches;  // [N][P*P], row-major inside a patch
  std::vector<std::pair<size_t, size_t>> positions;  // (temporal, doppler) patch index
  size_t rows = 0;
  size_t cols = 0;
  size_t patch_size = 0;
  // Token 0 is reserved for the class token; patch n is token n + 1.
  bool has_class_slot = true;

  size_t size() const { return patches.size(); }
  size_t token_index(size_t patch) const { return has_class_slot ? patch + 1 : patch; }
};

// Non-overlapping P x P patches in row-major patch order.
PatchGrid Patchify(const Spectrogram& s, size_t patch_size);

// Inverse of Patchify; returns the H x W values.
std::vector<double> Unpatchify(const PatchGrid& grid);

double CosineSimilarity(std::span<const double> u, std::span<const double> v);

enum class InfoNceVariant {
  // The positive pair appears in both denominator sums:
  //   L = -1/N sum_i log( e^{s_ii} / (sum_j e^{s_ij} + sum_j e^{s_ji}) ),
  //   s_ij = v_i . t_j / tau.
  kDoubleDenominator,
  // Mean of the row-wise and column-wise cross-entropies (CLIP).
  kSymmetricCrossEntropy,
};

struct EmbeddingBatch {
  Matrix signal;  // [N][D]
  Matrix text;    // [N][D]
  double temperature = 0.07;

  // Matching shapes, unit-norm rows within 1e-6, positive temperature.
  void Validate() const;
};

struct InfoNceGradient {
  Matrix signal;
  Matrix text;
};

// Raw-matrix forms: rows need not be normalized.
double InfoNceLoss(const Matrix& signal, const Matrix& text, double temperature,
                   InfoNceVariant variant = InfoNceVariant::kDoubleDenominator);
InfoNceGradient InfoNceGrad(const Matrix& signal, const Matrix& text, double temperature,
                            InfoNceVariant variant = InfoNceVariant::kDoubleDenominator);

double InfoNceLoss(const EmbeddingBatch& batch,
                   InfoNceVariant variant = InfoNceVariant::kDoubleDenominator);
InfoNceGradient InfoNceGrad(const EmbeddingBatch& batch,
                            InfoNceVariant variant = InfoNceVariant::kDoubleDenominator);

// Scales each row to unit length.
Matrix NormalizeRows(const Matrix& m);

// h = W0 x + B (A x) with frozen W0 (d x k), A (r x k), B (d x r).
struct LoraLinear {
  Matrix w0;
  Matrix a;
  Matrix b;

  size_t rank() const { return a.rows; }
  void Validate() const;
};

std::vector<double> LoraForward(const LoraLinear& layer, std::span<const double> x);

struct LabelEmbedding {
  std::string label;
  std::vector<double> embedding;
};

struct ZeroShotResult {
  size_t index = 0;
  std::string label;
  double similarity = 0.0;
};

// Highest cosine similarity wins; ties go to the lowest index.
ZeroShotResult ZeroShotClassify(std::span<const double> signal_embedding,
                                const std::vector<LabelEmbedding>& labels);

// Float32 matrix payload plus "<stem>.json" sidecar {N, D, normalized}.
struct EmbeddingFile {
  Matrix values;
  bool normalized = false;
};

void WriteEmbeddings(const EmbeddingFile& e, const std::filesystem::path& path);
EmbeddingFile ReadEmbeddings(const std::filesystem::path& path);

}  // namespace mmforge
