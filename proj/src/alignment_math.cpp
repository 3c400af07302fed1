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

#include "mmforge/alignment_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "binary_io.hpp"

namespace mmforge {

namespace {

using Json = nlohmann::json;

void CheckPair(const Matrix& signal, const Matrix& text, double temperature) {
  if (signal.rows != text.rows || signal.cols != text.cols) {
    throw Error(ErrorCode::kInvalidArgument, "signal and text embeddings differ in shape");
  }
  if (signal.rows == 0 || signal.cols == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty embedding batch");
  }
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
}

// logits(i, j) = v_i . t_j / tau
Matrix Logits(const Matrix& signal, const Matrix& text, double temperature) {
  const size_t n = signal.rows;
  Matrix s(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (size_t k = 0; k < signal.cols; ++k) dot += signal(i, k) * text(j, k);
      s(i, j) = dot / temperature;
      if (!std::isfinite(s(i, j))) throw Error(ErrorCode::kNumeric, "non-finite logit");
    }
  }
  return s;
}

// Log-sum-exp over row i and column i of s together (2N terms).
double LogCrossDenominator(const Matrix& s, size_t i) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < s.cols; ++j) m = std::max({m, s(i, j), s(j, i)});
  double sum = 0.0;
  for (size_t j = 0; j < s.cols; ++j) sum += std::exp(s(i, j) - m) + std::exp(s(j, i) - m);
  return m + std::log(sum);
}

double LogSumExpRow(const Matrix& s, size_t i) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < s.cols; ++j) m = std::max(m, s(i, j));
  double sum = 0.0;
  for (size_t j = 0; j < s.cols; ++j) sum += std::exp(s(i, j) - m);
  return m + std::log(sum);
}

double LogSumExpCol(const Matrix& s, size_t j) {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.rows; ++i) m = std::max(m, s(i, j));
  double sum = 0.0;
  for (size_t i = 0; i < s.rows; ++i) sum += std::exp(s(i, j) - m);
  return m + std::log(sum);
}

}  // namespace

PatchGrid Patchify(const Spectrogram& s, size_t patch_size) {
  if (patch_size == 0 || s.rows % patch_size != 0 || s.cols % patch_size != 0) {
    std::ostringstream os;
    os << "patch size " << patch_size << " does not divide spectrogram H=" << s.rows
       << ", W=" << s.cols;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  PatchGrid g;
  g.patch_size = patch_size;
  g.rows = s.rows / patch_size;
  g.cols = s.cols / patch_size;
  g.patches.reserve(g.rows * g.cols);
  for (size_t pr = 0; pr < g.rows; ++pr) {
    for (size_t pc = 0; pc < g.cols; ++pc) {
      std::vector<double> patch;
      patch.reserve(patch_size * patch_size);
      for (size_t r = 0; r < patch_size; ++r) {
        for (size_t c = 0; c < patch_size; ++c) {
          patch.push_back(s.at(pr * patch_size + r, pc * patch_size + c));
        }
      }
      g.patches.push_back(std::move(patch));
      g.positions.emplace_back(pr, pc);
    }
  }
  return g;
}

std::vector<double> Unpatchify(const PatchGrid& g) {
  const size_t p = g.patch_size;
  const size_t width = g.cols * p;
  std::vector<double> out(g.rows * p * width);
  for (size_t n = 0; n < g.patches.size(); ++n) {
    const auto [pr, pc] = g.positions[n];
    for (size_t r = 0; r < p; ++r) {
      for (size_t c = 0; c < p; ++c) out[(pr * p + r) * width + pc * p + c] = g.patches[n][r * p + c];
    }
  }
  return out;
}

double CosineSimilarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::kInvalidArgument, "vector length mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cosine similarity of a zero vector");
  }
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

void EmbeddingBatch::Validate() const {
  CheckPair(signal, text, temperature);
  for (const Matrix* m : {&signal, &text}) {
    for (size_t i = 0; i < m->rows; ++i) {
      double nn = 0.0;
      for (double x : m->row(i)) nn += x * x;
      if (std::abs(std::sqrt(nn) - 1.0) > 1e-6) {
        throw Error(ErrorCode::kInvalidArgument,
                    "embedding row " + std::to_string(i) + " is not unit-norm");
      }
    }
  }
}

double InfoNceLoss(const Matrix& signal, const Matrix& text, double temperature,
                   InfoNceVariant variant) {
  CheckPair(signal, text, temperature);
  const Matrix s = Logits(signal, text, temperature);
  const size_t n = s.rows;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (variant == InfoNceVariant::kDoubleDenominator) {
      total += LogCrossDenominator(s, i) - s(i, i);
    } else {
      total += 0.5 * (LogSumExpRow(s, i) + LogSumExpCol(s, i)) - s(i, i);
    }
  }
  return total / static_cast<double>(n);
}

InfoNceGradient InfoNceGrad(const Matrix& signal, const Matrix& text, double temperature,
                            InfoNceVariant variant) {
  CheckPair(signal, text, temperature);
  const Matrix s = Logits(signal, text, temperature);
  const size_t n = s.rows;
  const size_t d = signal.cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  // dL/ds(a, b)
  Matrix g(n, n);
  if (variant == InfoNceVariant::kDoubleDenominator) {
    std::vector<double> log_den(n);
    for (size_t i = 0; i < n; ++i) log_den[i] = LogCrossDenominator(s, i);
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        g(a, b) = inv_n * (std::exp(s(a, b) - log_den[a]) + std::exp(s(a, b) - log_den[b]) -
                           (a == b ? 1.0 : 0.0));
      }
    }
  } else {
    std::vector<double> row_lse(n), col_lse(n);
    for (size_t i = 0; i < n; ++i) {
      row_lse[i] = LogSumExpRow(s, i);
      col_lse[i] = LogSumExpCol(s, i);
    }
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        g(a, b) = 0.5 * inv_n *
                  (std::exp(s(a, b) - row_lse[a]) + std::exp(s(a, b) - col_lse[b]) -
                   (a == b ? 2.0 : 0.0));
      }
    }
  }

  InfoNceGradient out{Matrix(n, d), Matrix(n, d)};
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      const double w = g(a, b) / temperature;
      for (size_t k = 0; k < d; ++k) {
        out.signal(a, k) += w * text(b, k);
        out.text(b, k) += w * signal(a, k);
      }
    }
  }
  return out;
}

double InfoNceLoss(const EmbeddingBatch& batch, InfoNceVariant variant) {
  batch.Validate();
  return InfoNceLoss(batch.signal, batch.text, batch.temperature, variant);
}

InfoNceGradient InfoNceGrad(const EmbeddingBatch& batch, InfoNceVariant variant) {
  batch.Validate();
  return InfoNceGrad(batch.signal, batch.text, batch.temperature, variant);
}

Matrix NormalizeRows(const Matrix& m) {
  Matrix out = m;
  for (size_t i = 0; i < m.rows; ++i) {
    double nn = 0.0;
    for (double x : m.row(i)) nn += x * x;
    if (!(nn > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero row");
    const double inv = 1.0 / std::sqrt(nn);
    for (double& x : out.row(i)) x *= inv;
  }
  return out;
}

void LoraLinear::Validate() const {
  const size_t d = w0.rows, k = w0.cols, r = a.rows;
  if (a.cols != k || b.rows != d || b.cols != r) {
    std::ostringstream os;
    os << "LoRA shapes inconsistent: W0 " << d << "x" << k << ", A " << a.rows << "x" << a.cols
       << ", B " << b.rows << "x" << b.cols;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (r > std::min(d, k)) throw Error(ErrorCode::kInvalidArgument, "LoRA rank exceeds min(d, k)");
}

std::vector<double> LoraForward(const LoraLinear& layer, std::span<const double> x) {
  layer.Validate();
  if (x.size() != layer.w0.cols) {
    throw Error(ErrorCode::kInvalidArgument, "input length " + std::to_string(x.size()) +
                                                 " != " + std::to_string(layer.w0.cols));
  }
  const size_t d = layer.w0.rows, r = layer.rank();
  std::vector<double> ax(r, 0.0);
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < x.size(); ++j) ax[i] += layer.a(i, j) * x[j];
  }
  std::vector<double> h(d, 0.0);
  for (size_t i = 0; i < d; ++i) {
    double base = 0.0;
    for (size_t j = 0; j < x.size(); ++j) base += layer.w0(i, j) * x[j];
    double delta = 0.0;
    for (size_t q = 0; q < r; ++q) delta += layer.b(i, q) * ax[q];
    h[i] = base + delta;
  }
  return h;
}

ZeroShotResult ZeroShotClassify(std::span<const double> signal_embedding,
                                const std::vector<LabelEmbedding>& labels) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty label set");
  ZeroShotResult best;
  best.similarity = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < labels.size(); ++i) {
    const double sim = CosineSimilarity(signal_embedding, labels[i].embedding);
    if (sim > best.similarity) best = {i, labels[i].label, sim};
  }
  return best;
}

void WriteEmbeddings(const EmbeddingFile& e, const std::filesystem::path& path) {
  std::vector<float> payload(e.values.data.begin(), e.values.data.end());
  internal::WriteFloat32(path, payload);
  Json side = {{"format", "mmforge.embeddings"},
               {"version", 1},
               {"N", e.values.rows},
               {"D", e.values.cols},
               {"normalized", e.normalized}};
  internal::WriteTextFile(internal::SidecarPath(path), side.dump(2) + "\n");
}

EmbeddingFile ReadEmbeddings(const std::filesystem::path& path) {
  const Json side = internal::ReadSidecar(path, "mmforge.embeddings");
  if (side.value("version", 0) != 1) throw Error(ErrorCode::kFormat, "unsupported embedding version");
  const size_t n = side.at("N").get<size_t>(), d = side.at("D").get<size_t>();
  const std::vector<float> payload = internal::ReadFloat32(path);
  if (payload.size() != n * d) {
    throw Error(ErrorCode::kFormat, "embedding payload holds " + std::to_string(payload.size()) +
                                        " values but sidecar N*D = " + std::to_string(n * d));
  }
  EmbeddingFile e;
  e.values = Matrix(n, d);
  std::copy(payload.begin(), payload.end(), e.values.data.begin());
  e.normalized = side.value("normalized", false);
  return e;
}

}  // namespace mmforge
