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

#include "mmforge/mesh_motion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"

namespace mmforge {

namespace {

using Json = nlohmann::json;

[[noreturn]] void Fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

bool SameTopology(const MeshFrame& a, const MeshFrame& b) {
  return a.vertices.size() == b.vertices.size() && a.facets == b.facets &&
         a.segment_of_facet == b.segment_of_facet;
}

// Half-sample symmetric reflection of index i into [0, n).
size_t ReflectIndex(long long i, long long n) {
  const long long period = 2 * n;
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - 1 - m;
  return static_cast<size_t>(m);
}

void CheckTimeInRange(const MeshSequence& seq, double t) {
  if (!(t >= seq.start_time() && t <= seq.end_time())) {
    std::ostringstream os;
    os << "time " << t << " s outside sequence range [" << seq.start_time() << ", "
       << seq.end_time() << "]";
    Fail(ErrorCode::kOutOfRange, os.str());
  }
}

// Moller-Trumbore; returns the ray parameter of the hit or +inf.
double RayTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                   const Vec3& c) {
  constexpr double kEps = 1e-12;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = Cross(dir, e2);
  const double det = Dot(e1, p);
  if (std::abs(det) < kEps * Norm(e1) * Norm(e2) * Norm(dir)) {
    return std::numeric_limits<double>::infinity();
  }
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = Dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  const Vec3 q = Cross(s, e1);
  const double v = Dot(dir, q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::numeric_limits<double>::infinity();
  return Dot(e2, q) * inv;
}

}  // namespace

void MeshFrame::Validate() const {
  if (!std::isfinite(timestamp)) Fail(ErrorCode::kInvalidArgument, "non-finite frame timestamp");
  if (facets.size() != segment_of_facet.size()) {
    Fail(ErrorCode::kInvalidArgument, "facet count " + std::to_string(facets.size()) +
                                          " != segment label count " +
                                          std::to_string(segment_of_facet.size()));
  }
  for (const Facet& f : facets) {
    for (uint32_t idx : f) {
      if (idx >= vertices.size()) {
        Fail(ErrorCode::kInvalidArgument, "facet index " + std::to_string(idx) +
                                              " >= vertex count " +
                                              std::to_string(vertices.size()));
      }
    }
  }
}

void MeshSequence::Validate() const {
  if (frames.size() < 2) Fail(ErrorCode::kInvalidArgument, "a mesh sequence needs at least 2 frames");
  if (!(keyframe_rate > 0.0) || !std::isfinite(keyframe_rate)) {
    Fail(ErrorCode::kInvalidArgument, "keyframe rate must be positive");
  }
  for (size_t i = 0; i < frames.size(); ++i) {
    frames[i].Validate();
    if (i == 0) continue;
    if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
      Fail(ErrorCode::kInvalidArgument,
           "timestamps not strictly increasing at frame " + std::to_string(i));
    }
    if (!SameTopology(frames[0], frames[i])) {
      Fail(ErrorCode::kTopologyMismatch, "frame " + std::to_string(i) +
                                             " topology differs from frame 0 (" +
                                             std::to_string(frames[i].vertices.size()) + " vs " +
                                             std::to_string(frames[0].vertices.size()) +
                                             " vertices)");
    }
  }
}

std::vector<int> MeshSequence::SegmentIds() const {
  std::vector<int> ids = frames.front().segment_of_facet;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool FacetGeometry(const Vec3& a, const Vec3& b, const Vec3& c, Vec3* centroid, Vec3* normal,
                   double* area) {
  const Vec3 n = Cross(b - a, c - a);
  const double len = Norm(n);
  if (!(len > 0.0)) return false;
  *centroid = (a + b + c) * (1.0 / 3.0);
  *normal = n / len;
  *area = 0.5 * len;
  return true;
}

MeshFrame LoadObjFrame(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, int>>& segments) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open OBJ file " + path.string());
  MeshFrame frame;
  int current_segment = 0;
  std::string line;
  size_t line_no = 0;
  auto parse_index = [&](const std::string& tok) -> uint32_t {
    const std::string head = tok.substr(0, tok.find('/'));
    long long idx = 0;
    try {
      idx = std::stoll(head);
    } catch (const std::exception&) {
      Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": bad face index '" + tok + "'");
    }
    const long long n = static_cast<long long>(frame.vertices.size());
    if (idx < 0) idx = n + idx + 1;
    if (idx < 1 || idx > n) {
      Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                   ": face index out of range");
    }
    return static_cast<uint32_t>(idx - 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    if (kind == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) {
        Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) + ": bad vertex");
      }
      frame.vertices.push_back(v);
    } else if (kind == "f") {
      std::vector<std::string> toks;
      for (std::string tok; ls >> tok;) toks.push_back(tok);
      if (toks.size() != 3) {
        Fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) + ": face with " +
                                     std::to_string(toks.size()) +
                                     " vertices; only triangles are supported");
      }
      frame.facets.push_back({parse_index(toks[0]), parse_index(toks[1]), parse_index(toks[2])});
      frame.segment_of_facet.push_back(current_segment);
    } else if (kind == "g" || kind == "o") {
      std::string name;
      ls >> name;
      auto it = std::find_if(segments.begin(), segments.end(),
                             [&](const auto& s) { return s.first == name; });
      if (it == segments.end()) {
        Fail(ErrorCode::kFormat, path.string() + ": group '" + name +
                                     "' has no entry in the manifest segment map");
      }
      current_segment = it->second;
    }
  }
  return frame;
}

MeshSequence LoadMeshSequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open motion manifest " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kFormat, "motion manifest " + path.string() + ": " + e.what());
  }
  MeshSequence seq;
  std::vector<std::pair<std::string, int>> segments;
  std::vector<std::string> files;
  std::vector<double> timestamps;
  try {
    seq.keyframe_rate = doc.at("keyframe_rate_hz").get<double>();
    files = doc.at("frames").get<std::vector<std::string>>();
    if (doc.contains("segments")) {
      for (const auto& [name, id] : doc["segments"].items()) segments.emplace_back(name, id.get<int>());
    }
    if (doc.contains("timestamps")) timestamps = doc["timestamps"].get<std::vector<double>>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kFormat, "motion manifest " + path.string() + ": " + e.what());
  }
  if (!(seq.keyframe_rate > 0.0)) Fail(ErrorCode::kInvalidArgument, "keyframe_rate_hz must be positive");
  if (!timestamps.empty() && timestamps.size() != files.size()) {
    Fail(ErrorCode::kFormat, "timestamps length does not match frames length");
  }
  const auto base = path.parent_path();
  for (size_t i = 0; i < files.size(); ++i) {
    MeshFrame f = LoadObjFrame(base / files[i], segments);
    f.timestamp = timestamps.empty() ? static_cast<double>(i) / seq.keyframe_rate : timestamps[i];
    seq.frames.push_back(std::move(f));
  }
  seq.Validate();
  return seq;
}

std::vector<double> GaussianKernel(double sigma) {
  if (!(sigma >= 0.0)) Fail(ErrorCode::kInvalidArgument, "sigma must be non-negative");
  if (sigma == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    sum += w[k + radius];
  }
  for (double& x : w) x /= sum;
  return w;
}

MeshSequence GaussianSmooth(const MeshSequence& seq, double sigma) {
  const std::vector<double> kernel = GaussianKernel(sigma);
  if (kernel.size() == 1) return seq;
  const long long radius = static_cast<long long>(kernel.size() / 2);
  const long long n = static_cast<long long>(seq.frames.size());
  MeshSequence out = seq;
  const size_t nv = seq.frames.front().vertices.size();
  for (long long i = 0; i < n; ++i) {
    std::vector<Vec3>& dst = out.frames[i].vertices;
    std::fill(dst.begin(), dst.end(), Vec3{});
    for (long long k = -radius; k <= radius; ++k) {
      const double w = kernel[k + radius];
      const std::vector<Vec3>& src = seq.frames[ReflectIndex(i + k, n)].vertices;
      for (size_t v = 0; v < nv; ++v) dst[v] += src[v] * w;
    }
  }
  return out;
}

size_t KeyframeInterval(const MeshSequence& seq, double t) {
  const auto& frames = seq.frames;
  auto it = std::upper_bound(frames.begin(), frames.end(), t,
                             [](double v, const MeshFrame& f) { return v < f.timestamp; });
  size_t k = it == frames.begin() ? 0 : static_cast<size_t>(it - frames.begin()) - 1;
  return std::min(k, frames.size() - 2);
}

void InterpolateVertices(const MeshSequence& seq, double t, std::span<Vec3> out) {
  CheckTimeInRange(seq, t);
  const size_t k = KeyframeInterval(seq, t);
  const MeshFrame& f0 = seq.frames[k];
  const MeshFrame& f1 = seq.frames[k + 1];
  if (t == f0.timestamp) {
    std::copy(f0.vertices.begin(), f0.vertices.end(), out.begin());
    return;
  }
  if (t == f1.timestamp) {
    std::copy(f1.vertices.begin(), f1.vertices.end(), out.begin());
    return;
  }
  const double alpha = (t - f0.timestamp) / (f1.timestamp - f0.timestamp);
  for (size_t v = 0; v < out.size(); ++v) {
    out[v] = f0.vertices[v] + (f1.vertices[v] - f0.vertices[v]) * alpha;
  }
}

MeshFrame InterpolateFrame(const MeshSequence& seq, double t) {
  CheckTimeInRange(seq, t);
  const MeshFrame& ref = seq.frames[KeyframeInterval(seq, t)];
  MeshFrame out;
  out.timestamp = t;
  out.facets = ref.facets;
  out.segment_of_facet = ref.segment_of_facet;
  out.vertices.resize(ref.vertices.size());
  InterpolateVertices(seq, t, out.vertices);
  return out;
}

std::vector<FacetSample> FacetKinematics(const MeshSequence& seq, double t, double dt) {
  if (!(dt > 0.0)) Fail(ErrorCode::kInvalidArgument, "dt must be positive");
  CheckTimeInRange(seq, t);
  CheckTimeInRange(seq, t + dt);
  const MeshFrame& ref = seq.frames.front();
  std::vector<Vec3> p0(ref.vertices.size()), p1(ref.vertices.size());
  InterpolateVertices(seq, t, p0);
  InterpolateVertices(seq, t + dt, p1);
  std::vector<FacetSample> out;
  out.reserve(ref.facets.size());
  for (uint32_t i = 0; i < ref.facets.size(); ++i) {
    const Facet& f = ref.facets[i];
    FacetSample s;
    s.facet_id = i;
    s.segment_id = ref.segment_of_facet[i];
    if (!FacetGeometry(p0[f[0]], p0[f[1]], p0[f[2]], &s.centroid, &s.unit_normal, &s.area)) {
      s.centroid = (p0[f[0]] + p0[f[1]] + p0[f[2]]) * (1.0 / 3.0);
      s.area = 0.0;
    }
    const Vec3 c1 = (p1[f[0]] + p1[f[1]] + p1[f[2]]) * (1.0 / 3.0);
    s.velocity = (c1 - s.centroid) / dt;
    out.push_back(s);
  }
  return out;
}

std::vector<uint32_t> VisibleFacets(const MeshFrame& frame, const Vec3& radar_position,
                                    const VisibilityOptions& options) {
  const size_t nf = frame.facets.size();
  std::vector<Vec3> centroids(nf);
  std::vector<char> front(nf, 0);
  std::vector<char> valid(nf, 0);
  for (size_t i = 0; i < nf; ++i) {
    const Facet& f = frame.facets[i];
    Vec3 n;
    double area = 0.0;
    if (!FacetGeometry(frame.vertices[f[0]], frame.vertices[f[1]], frame.vertices[f[2]],
                       &centroids[i], &n, &area)) {
      continue;
    }
    valid[i] = 1;
    front[i] = Dot(n, radar_position - centroids[i]) > 0.0;
  }

  std::vector<uint32_t> result;
  if (options.mode == OcclusionMode::kBackfaceOnly || frame.vertices.empty()) {
    for (uint32_t i = 0; i < nf; ++i) {
      if (front[i]) result.push_back(i);
    }
    return result;
  }

  // Camera looking from the radar at the bounding-box centre.
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  for (const Vec3& v : frame.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  const Vec3 center = (lo + hi) * 0.5;
  if (Norm(center - radar_position) == 0.0) {
    Fail(ErrorCode::kInvalidArgument, "radar position coincides with the mesh centre");
  }
  const Vec3 fwd = Normalized(center - radar_position);
  const Vec3 helper = std::abs(fwd.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
  const Vec3 right = Normalized(Cross(fwd, helper));
  const Vec3 up = Cross(right, fwd);

  const size_t nv = frame.vertices.size();
  std::vector<double> su(nv), sv(nv), sz(nv);
  double extent = 0.0;
  const double near = 1e-9 * std::max(1.0, Norm(center - radar_position));
  for (size_t i = 0; i < nv; ++i) {
    const Vec3 d = frame.vertices[i] - radar_position;
    sz[i] = Dot(d, fwd);
    if (sz[i] <= near) continue;
    su[i] = Dot(d, right) / sz[i];
    sv[i] = Dot(d, up) / sz[i];
    extent = std::max({extent, std::abs(su[i]), std::abs(sv[i])});
  }
  if (!(extent > 0.0)) extent = 1.0;
  extent *= 1.0001;
  const int res = std::max(options.resolution, 1);
  const double scale = 0.5 * res / extent;
  auto to_px = [&](double u) { return (u + extent) * scale; };

  std::vector<double> depth(static_cast<size_t>(res) * res, std::numeric_limits<double>::infinity());
  std::vector<int32_t> ids(static_cast<size_t>(res) * res, -1);
  for (size_t i = 0; i < nf; ++i) {
    if (!valid[i]) continue;
    const Facet& f = frame.facets[i];
    if (sz[f[0]] <= near || sz[f[1]] <= near || sz[f[2]] <= near) continue;
    const double x0 = to_px(su[f[0]]), y0 = to_px(sv[f[0]]);
    const double x1 = to_px(su[f[1]]), y1 = to_px(sv[f[1]]);
    const double x2 = to_px(su[f[2]]), y2 = to_px(sv[f[2]]);
    const double area2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    if (area2 == 0.0) continue;
    const int px_lo = std::max(0, static_cast<int>(std::floor(std::min({x0, x1, x2}) - 0.5)));
    const int px_hi = std::min(res - 1, static_cast<int>(std::ceil(std::max({x0, x1, x2}) - 0.5)));
    const int py_lo = std::max(0, static_cast<int>(std::floor(std::min({y0, y1, y2}) - 0.5)));
    const int py_hi = std::min(res - 1, static_cast<int>(std::ceil(std::max({y0, y1, y2}) - 0.5)));
    for (int py = py_lo; py <= py_hi; ++py) {
      const double cy = py + 0.5;
      for (int px = px_lo; px <= px_hi; ++px) {
        const double cx = px + 0.5;
        const double w0 = ((x1 - cx) * (y2 - cy) - (x2 - cx) * (y1 - cy)) / area2;
        const double w1 = ((x2 - cx) * (y0 - cy) - (x0 - cx) * (y2 - cy)) / area2;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double inv_z = w0 / sz[f[0]] + w1 / sz[f[1]] + w2 / sz[f[2]];
        const double z = 1.0 / inv_z;
        const size_t cell = static_cast<size_t>(py) * res + px;
        if (z < depth[cell]) {
          depth[cell] = z;
          ids[cell] = static_cast<int32_t>(i);
        }
      }
    }
  }

  // A front-facing facet is hidden if one of the nearest surfaces around its
  // centroid pixel intersects the radar-to-centroid segment.
  std::vector<int32_t> candidates;
  for (uint32_t i = 0; i < nf; ++i) {
    if (!front[i]) continue;
    const Vec3 dir = centroids[i] - radar_position;
    const double z = Dot(dir, fwd);
    if (z <= near) {
      result.push_back(i);
      continue;
    }
    const int cx = static_cast<int>(std::floor(to_px(Dot(dir, right) / z)));
    const int cy = static_cast<int>(std::floor(to_px(Dot(dir, up) / z)));
    candidates.clear();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= res || y >= res) continue;
        const int32_t id = ids[static_cast<size_t>(y) * res + x];
        if (id >= 0 && id != static_cast<int32_t>(i)) candidates.push_back(id);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    bool occluded = false;
    for (int32_t c : candidates) {
      const Facet& g = frame.facets[c];
      const double hit = RayTriangle(radar_position, dir, frame.vertices[g[0]],
                                     frame.vertices[g[1]], frame.vertices[g[2]]);
      if (hit > 1e-12 && hit < 1.0 - 1e-9) {
        occluded = true;
        break;
      }
    }
    if (!occluded) result.push_back(i);
  }
  return result;
}

}  // namespace mmforge
