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

#ifndef EXMAP_PROJECTION_HPP_
#define EXMAP_PROJECTION_HPP_

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "exmap/camera.hpp"
#include "exmap/grid.hpp"

namespace exmap {

// Precomputed ground-plane projection: for every pixel, either the
// robot-frame cell its floor intersection falls into, or nothing (horizon
// or beyond range). Depends only on the camera and the cell size, never
// on the pose, so one instance is built per configuration and shared.
//
// Covered cells are deduplicated; pixel_to_covered maps each pixel to an
// index into `covered` (or -1). covered[i].x is the forward offset in
// cells, covered[i].y the leftward offset.
struct LocalProjection {
  CameraModel camera;
  double cell_size_m = 0.05;
  double max_range_m = 10.0;
  std::vector<int32_t> pixel_to_covered;  // row-major v * width + u
  std::vector<CellIndex> covered;
  std::vector<uint32_t> covered_pixel_count;

  int width() const { return camera.image_width_px; }
  int height() const { return camera.image_height_px; }
  size_t num_covered() const { return covered.size(); }
};

inline LocalProjection build_projection(const CameraModel& cam,
                                        double cell_size_m,
                                        double max_range_m) {
  cam.validate();
  if (cell_size_m <= 0) throw std::invalid_argument("cell size must be > 0");
  LocalProjection proj;
  proj.camera = cam;
  proj.cell_size_m = cell_size_m;
  proj.max_range_m = max_range_m;
  proj.pixel_to_covered.assign(
      static_cast<size_t>(cam.image_width_px) * cam.image_height_px, -1);
  std::unordered_map<CellIndex, int32_t, CellIndexHash> index_of;
  for (int v = 0; v < cam.image_height_px; ++v) {
    for (int u = 0; u < cam.image_width_px; ++u) {
      const auto offset = pixel_cell_offset(cam, cell_size_m, max_range_m, u, v);
      if (!offset) continue;
      const CellIndex cell{offset->first, offset->second};
      auto [it, inserted] =
          index_of.try_emplace(cell, static_cast<int32_t>(proj.covered.size()));
      if (inserted) {
        proj.covered.push_back(cell);
        proj.covered_pixel_count.push_back(0);
      }
      proj.pixel_to_covered[static_cast<size_t>(v) * cam.image_width_px + u] =
          it->second;
      ++proj.covered_pixel_count[it->second];
    }
  }
  return proj;
}

inline LocalProjection build_projection(const CameraModel& cam,
                                        double cell_size_m) {
  return build_projection(cam, cell_size_m, cam.max_range_m);
}

// Robot-frame accumulation grid M_t, stored sparsely as one value per
// covered cell of the projection it was produced with.
struct LocalGrid {
  std::vector<float> values;  // aligned with LocalProjection::covered
};

// Accumulates pixel confidences into the covered cells. Works with any
// image type exposing width/height and confidence(u, v).
template <typename Image>
inline void project_into(const Image& img, const LocalProjection& proj,
                         LocalGrid& out) {
  if (img.width != proj.width() || img.height != proj.height()) {
    throw std::invalid_argument("image dimensions do not match projection");
  }
  out.values.assign(proj.covered.size(), 0.0f);
  const size_t n = proj.pixel_to_covered.size();
  for (size_t p = 0; p < n; ++p) {
    const int32_t idx = proj.pixel_to_covered[p];
    if (idx >= 0) out.values[idx] += img.confidence[p];
  }
}

template <typename Image>
inline LocalGrid project(const Image& img, const LocalProjection& proj) {
  LocalGrid grid;
  project_into(img, proj, grid);
  return grid;
}

}  // namespace exmap

#endif  // EXMAP_PROJECTION_HPP_
