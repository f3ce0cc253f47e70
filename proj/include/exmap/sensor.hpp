/*
 * Copyright 2026 The Exmap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EXMAP_SENSOR_HPP_
#define EXMAP_SENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "exmap/camera.hpp"
#include "exmap/grid.hpp"
#include "exmap/projection.hpp"
#include "exmap/raycast.hpp"
#include "exmap/rng.hpp"
#include "exmap/world.hpp"

namespace exmap {

// Free-space confidence image: what a perfect floor segmenter would
// produce, optionally corrupted. `truth` keeps the uncorrupted labels for
// reward computation.
struct SegImage {
  int width = 0;
  int height = 0;
  std::vector<float> confidence;  // row-major v * width + u, in [0, 1]
  std::vector<uint8_t> truth;

  float conf_at(int u, int v) const {
    return confidence[static_cast<size_t>(v) * width + u];
  }
  bool truth_at(int u, int v) const {
    return truth[static_cast<size_t>(v) * width + u] != 0;
  }
};

struct SensorNoise {
  double flip_prob = 0.0;
  int blur_radius_px = 0;
  double confidence_jitter = 0.0;
  uint64_t seed = 0;

  bool enabled() const {
    return flip_prob > 0.0 || blur_radius_px > 0 || confidence_jitter > 0.0;
  }
};

// Per-pose visibility of the projection's covered cells: a covered cell is
// visible when its world cell is free and the center-to-center sight line
// from the robot is unblocked. This is the single visibility rule behind
// both renders.
inline void covered_cell_visibility(const Floorplan& plan, const Pose& pose,
                                    const LocalProjection& proj,
                                    std::vector<uint8_t>& visible) {
  visible.assign(proj.covered.size(), 0);
  auto blocked = [&](int x, int y) { return plan.occupied(x, y); };
  for (size_t i = 0; i < proj.covered.size(); ++i) {
    const CellIndex off = proj.covered[i];
    const CellIndex w = rotate_to_world(pose.heading, off.x, off.y);
    const int wx = pose.x_cells + w.x;
    const int wy = pose.y_cells + w.y;
    if (!plan.free(wx, wy)) continue;
    visible[i] =
        line_of_sight(pose.x_cells, pose.y_cells, wx, wy, blocked) ? 1 : 0;
  }
}

// Noiseless free-space render: pixel (u, v) is free iff it maps to a
// covered cell (below horizon, within range) whose world cell is free and
// unoccluded. Confidence is exactly 1 on free pixels, 0 elsewhere. The
// _into variant reuses caller buffers on hot paths.
inline void render_free_space_into(const Floorplan& plan, const Pose& pose,
                                   const LocalProjection& proj, SegImage& img,
                                   std::vector<uint8_t>& visible_scratch) {
  img.width = proj.width();
  img.height = proj.height();
  const size_t n = proj.pixel_to_covered.size();
  img.confidence.assign(n, 0.0f);
  img.truth.assign(n, 0);
  covered_cell_visibility(plan, pose, proj, visible_scratch);
  for (size_t p = 0; p < n; ++p) {
    const int32_t idx = proj.pixel_to_covered[p];
    if (idx >= 0 && visible_scratch[idx]) {
      img.confidence[p] = 1.0f;
      img.truth[p] = 1;
    }
  }
}

inline SegImage render_free_space(const Floorplan& plan, const Pose& pose,
                                  const LocalProjection& proj) {
  SegImage img;
  std::vector<uint8_t> visible;
  render_free_space_into(plan, pose, proj, img, visible);
  return img;
}

inline SegImage render_free_space(const Floorplan& plan, const Pose& pose,
                                  const CameraModel& cam) {
  return render_free_space(plan, pose,
                           build_projection(cam, plan.cell_size_m));
}

// Applies the noise model: label flips, box blur, additive jitter, in
// that order. Truth is untouched; output confidences stay in [0, 1].
// Deterministic for a fixed noise seed.
inline void corrupt_in_place(SegImage& out, const SensorNoise& noise) {
  if (!noise.enabled()) return;
  Rng rng = make_rng(noise.seed, seed_stream::kSensorNoise);
  const size_t n = out.confidence.size();
  if (noise.flip_prob > 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (size_t p = 0; p < n; ++p) {
      if (unit(rng) < noise.flip_prob) {
        out.confidence[p] = 1.0f - out.confidence[p];
      }
    }
  }
  if (noise.blur_radius_px > 0) {
    const int r = noise.blur_radius_px;
    const int w = out.width, h = out.height;
    std::vector<float> tmp(n);
    for (int v = 0; v < h; ++v) {  // horizontal pass
      for (int u = 0; u < w; ++u) {
        double sum = 0;
        int count = 0;
        for (int du = -r; du <= r; ++du) {
          const int uu = std::clamp(u + du, 0, w - 1);
          sum += out.conf_at(uu, v);
          ++count;
        }
        tmp[static_cast<size_t>(v) * w + u] = static_cast<float>(sum / count);
      }
    }
    for (int v = 0; v < h; ++v) {  // vertical pass
      for (int u = 0; u < w; ++u) {
        double sum = 0;
        int count = 0;
        for (int dv = -r; dv <= r; ++dv) {
          const int vv = std::clamp(v + dv, 0, h - 1);
          sum += tmp[static_cast<size_t>(vv) * w + u];
          ++count;
        }
        out.confidence[static_cast<size_t>(v) * w + u] =
            static_cast<float>(sum / count);
      }
    }
  }
  if (noise.confidence_jitter > 0.0) {
    std::normal_distribution<double> jitter(0.0, noise.confidence_jitter);
    for (size_t p = 0; p < n; ++p) {
      out.confidence[p] = static_cast<float>(
          std::clamp(out.confidence[p] + jitter(rng), 0.0, 1.0));
    }
  }
}

inline SegImage corrupt(const SegImage& img, const SensorNoise& noise) {
  SegImage out = img;
  corrupt_in_place(out, noise);
  return out;
}

// K-channel semantic render. Channel 0 always equals the free-space
// render; non-free pixels are attributed one-hot to the class of the
// first occupied cell their planar ray hits (merge order: wall, clutter,
// door frame, folded down when the plan or num_classes has fewer).
struct SemImage {
  int width = 0;
  int height = 0;
  int num_classes = 0;
  std::vector<float> channels;  // class-major: c * width*height + v*w + u

  float at(int c, int u, int v) const {
    return channels[(static_cast<size_t>(c) * height + v) * width + u];
  }
};

inline SemImage render_semantic(const Floorplan& plan, const Pose& pose,
                                const LocalProjection& proj, int num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument("semantic render needs at least 2 classes");
  }
  if (num_classes > plan.available_classes()) {
    throw std::invalid_argument(
        "num_classes exceeds the labels available in this world");
  }
  const SegImage free_img = render_free_space(plan, pose, proj);
  SemImage out;
  out.width = free_img.width;
  out.height = free_img.height;
  out.num_classes = num_classes;
  out.channels.assign(
      static_cast<size_t>(num_classes) * out.width * out.height, 0.0f);

  auto channel_of = [&](CellClass cls) {
    switch (cls) {
      case CellClass::kClutter:
        return num_classes >= 3 ? 2 : 1;
      case CellClass::kDoorFrame:
        return num_classes >= 4 ? 3 : 1;
      default:
        return 1;
    }
  };

  const double range_cells = proj.max_range_m / plan.cell_size_m;
  auto plane_at = [&](size_t c) -> float* { return &out.channels[c]; };
  float* ch0 = plane_at(0);
  for (int v = 0; v < out.height; ++v) {
    for (int u = 0; u < out.width; ++u) {
      const size_t p = static_cast<size_t>(v) * out.width + u;
      if (free_img.truth[p]) {
        ch0[p] = 1.0f;
        continue;
      }
      // First occupied cell along the pixel's planar ray, walls if the
      // ray escapes the range (indoors it cannot).
      auto [dx, dy] = pixel_planar_direction(proj.camera, u, v);
      const double norm = std::hypot(dx, dy);
      CellClass hit = CellClass::kWall;
      if (norm > 1e-12) {
        const int tx = pose.x_cells +
                       static_cast<int>(std::lround(dx / norm * range_cells));
        const int ty = pose.y_cells +
                       static_cast<int>(std::lround(dy / norm * range_cells));
        walk_segment_cells(pose.x_cells, pose.y_cells, tx, ty,
                           [&](int x, int y) {
                             if (!plan.occupied(x, y)) return true;
                             hit = plan.cell_class.in_bounds(x, y)
                                       ? static_cast<CellClass>(
                                             plan.cell_class.at(x, y))
                                       : CellClass::kWall;
                             return false;
                           });
      }
      out.channels[(static_cast<size_t>(channel_of(hit)) * out.height + v) *
                       out.width +
                   u] = 1.0f;
    }
  }
  return out;
}

// Converts a SegImage confidence channel to an 8-bit grid for graymap
// dumps (row 0 of the image becomes the top row of the file).
inline Grid<uint8_t> seg_to_grid(const SegImage& img) {
  Grid<uint8_t> g(img.width, img.height, 0);
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const float c = std::clamp(img.conf_at(u, v), 0.0f, 1.0f);
      g.at(u, img.height - 1 - v) = static_cast<uint8_t>(std::lround(c * 255));
    }
  }
  return g;
}

}  // namespace exmap

#endif  // EXMAP_SENSOR_HPP_
