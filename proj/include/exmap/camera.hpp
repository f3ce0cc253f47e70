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

#ifndef EXMAP_CAMERA_HPP_
#define EXMAP_CAMERA_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>

namespace exmap {

// Pinhole camera rigidly mounted on the robot: at the robot's planar
// position, height_m above the floor, looking along the robot's forward
// axis and pitched down by pitch_rad. Pixel (u, v) has u growing right
// and v growing down.
struct CameraModel {
  int image_width_px = 257;
  int image_height_px = 257;
  double focal_px = 128.5;
  double principal_x_px = 128.0;
  double principal_y_px = 128.0;
  double height_m = 1.2;
  double pitch_rad = 0.5235987755982988;  // 30 degrees down
  double max_range_m = 10.0;

  void validate() const {
    if (image_width_px <= 0 || image_height_px <= 0)
      throw std::invalid_argument("camera image size must be positive");
    if (focal_px <= 0) throw std::invalid_argument("focal length must be > 0");
    if (height_m <= 0) throw std::invalid_argument("camera height must be > 0");
    if (pitch_rad < 0 || pitch_rad >= M_PI / 2)
      throw std::invalid_argument("pitch must be in [0, pi/2)");
    if (max_range_m <= 0) throw std::invalid_argument("max range must be > 0");
  }

  // Largest row index whose ray does not intersect the floor; every row
  // at or above it (v <= horizon_row) can never be free.
  int horizon_row() const {
    return static_cast<int>(
        std::floor(principal_y_px - focal_px * std::tan(pitch_rad)));
  }
};

// Floor intersection of a pixel ray, in the robot frame (x forward,
// y left, meters). Rays at or above the horizon return nullopt.
inline std::optional<std::pair<double, double>> pixel_floor_point(
    const CameraModel& cam, int u, int v) {
  const double a = (u - cam.principal_x_px) / cam.focal_px;
  const double b = (v - cam.principal_y_px) / cam.focal_px;
  const double cp = std::cos(cam.pitch_rad);
  const double sp = std::sin(cam.pitch_rad);
  const double down = b * cp + sp;  // descent rate of the ray
  if (down <= 0.0) return std::nullopt;
  const double forward = cam.height_m * (cp - b * sp) / down;
  const double left = -a * cam.height_m / down;
  return std::make_pair(forward, left);
}

// Ground-plane direction of a pixel ray (unnormalized, robot frame).
// Well-defined for every pixel of a camera with pitch < pi/2.
inline std::pair<double, double> pixel_planar_direction(const CameraModel& cam,
                                                        int u, int v) {
  const double a = (u - cam.principal_x_px) / cam.focal_px;
  const double b = (v - cam.principal_y_px) / cam.focal_px;
  const double cp = std::cos(cam.pitch_rad);
  const double sp = std::sin(cam.pitch_rad);
  return {cp - b * sp, -a};
}

// The one pixel-to-cell rule shared by the renderer and the projection:
// bin the exact floor intersection to the nearest cell center and reject
// points beyond max_range_m (planar distance from the robot). Returned
// offsets are robot-frame cells (x forward, y left).
inline std::optional<std::pair<int, int>> pixel_cell_offset(
    const CameraModel& cam, double cell_size_m, double max_range_m, int u,
    int v) {
  const auto pt = pixel_floor_point(cam, u, v);
  if (!pt) return std::nullopt;
  const auto [fx, ly] = *pt;
  if (fx * fx + ly * ly > max_range_m * max_range_m) return std::nullopt;
  const int fwd = static_cast<int>(std::lround(fx / cell_size_m));
  const int left = static_cast<int>(std::lround(ly / cell_size_m));
  return std::make_pair(fwd, left);
}

}  // namespace exmap

#endif  // EXMAP_CAMERA_HPP_
