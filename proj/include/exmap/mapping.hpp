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

#ifndef EXMAP_MAPPING_HPP_
#define EXMAP_MAPPING_HPP_

#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "exmap/grid.hpp"
#include "exmap/world.hpp"

namespace exmap {

struct MappingConfig {
  int map_side_cells = 1025;
  double bem_threshold = 0.8;
  double stamp_value = 20.0;
};

// Robot-centered map pair, heading always "up". Grid index (gx, gy) holds
// the cell at robot-frame offset (forward, left) = (gy - c, c - gx) where
// c is the center index; rendering the grid north-up therefore puts the
// robot's forward at the top and its left on the left.
//
// Robot motion transforms the content by the inverse motion. Because
// translations are whole cells and rotations quarter turns, every
// transform is an exact cell permutation on the overlap; cells shifted in
// from outside the map are zero / false.
class EgoMapPair {
 public:
  EgoMapPair(int side_cells, double cell_size_m)
      : cell_size_m_(cell_size_m),
        aem_(side_cells, side_cells, 0.0f),
        bem_(side_cells, side_cells, 0),
        aem_scratch_(side_cells, side_cells, 0.0f),
        bem_scratch_(side_cells, side_cells, 0) {
    if (side_cells < 3 || side_cells % 2 == 0) {
      throw std::invalid_argument("map side must be odd and >= 3");
    }
  }

  int side() const { return aem_.width(); }
  int center() const { return side() / 2; }
  double cell_size_m() const { return cell_size_m_; }

  Grid<float>& aem() { return aem_; }
  const Grid<float>& aem() const { return aem_; }
  Grid<uint8_t>& bem() { return bem_; }
  const Grid<uint8_t>& bem() const { return bem_; }

  void clear() {
    aem_.fill(0.0f);
    bem_.fill(0);
  }

  // Index of a robot-frame offset (forward, left).
  CellIndex index_of(int fwd, int left) const {
    return {center() - left, center() + fwd};
  }

  float aem_at_offset(int fwd, int left) const {
    const CellIndex i = index_of(fwd, left);
    return aem_.at(i.x, i.y);
  }
  bool bem_at_offset(int fwd, int left) const {
    const CellIndex i = index_of(fwd, left);
    return bem_.at(i.x, i.y) != 0;
  }

 private:
  double cell_size_m_;
  Grid<float> aem_;
  Grid<uint8_t> bem_;
  Grid<float> aem_scratch_;
  Grid<uint8_t> bem_scratch_;

  friend void apply_transform(EgoMapPair& maps, int fwd, int left,
                              int quarter_turns_ccw);
};

// The robot's believed motion, expressed in its pre-motion frame:
// translation in cells plus a counter-clockwise quarter-turn count.
struct EgoTransform {
  int forward_cells = 0;
  int left_cells = 0;
  int quarter_turns_ccw = 0;  // 0..3

  bool identity() const {
    return forward_cells == 0 && left_cells == 0 && quarter_turns_ccw == 0;
  }
};

inline EgoTransform action_transform(Action action, int step_cells) {
  switch (action) {
    case Action::kForward:
      return {step_cells, 0, 0};
    case Action::kBackward:
      return {-step_cells, 0, 0};
    case Action::kStrafeLeft:
      return {0, step_cells, 0};
    case Action::kStrafeRight:
      return {0, -step_cells, 0};
    case Action::kTurnLeft:
      return {0, 0, 1};
    case Action::kTurnRight:
    default:
      return {0, 0, 3};
  }
}

// Rotation of a robot-frame offset by quarter turns (ccw positive).
inline std::pair<int, int> rotate_offset(int fwd, int left, int quarters) {
  switch (quarters & 3) {
    case 0:
      return {fwd, left};
    case 1:
      return {-left, fwd};
    case 2:
      return {-fwd, -left};
    default:
      return {left, -fwd};
  }
}

namespace detail {

template <typename T>
inline void ego_permute(Grid<T>& g, Grid<T>& scratch, int fwd, int left,
                        int quarters) {
  const int side = g.width();
  const int c = side / 2;
  scratch.fill(T());
  // Pull: the new cell at offset o reads the old cell at R(q) * o + d.
  for (int gy = 0; gy < side; ++gy) {
    const int fn = gy - c;
    for (int gx = 0; gx < side; ++gx) {
      const int ln = c - gx;
      const auto [fo, lo] = rotate_offset(fn, ln, quarters);
      const int ox = c - (lo + left);
      const int oy = c + (fo + fwd);
      if (ox >= 0 && ox < side && oy >= 0 && oy < side) {
        scratch.at(gx, gy) = g.at(ox, oy);
      }
    }
  }
  std::swap(g, scratch);
}

// Fast path for pure translations: with q = 0 the pull rule reduces to
// new(gx, gy) = old(gx - left, gy + fwd), a row-wise copy.
template <typename T>
inline void ego_shift(Grid<T>& g, Grid<T>& scratch, int fwd, int left) {
  const int side = g.width();
  scratch.fill(T());
  for (int gy = 0; gy < side; ++gy) {
    const int oy = gy + fwd;
    if (oy < 0 || oy >= side) continue;
    const int gx0 = std::max(0, left);
    const int gx1 = std::min(side, side + left);
    if (gx0 >= gx1) continue;
    std::memcpy(scratch.row(gy) + gx0, g.row(oy) + (gx0 - left),
                sizeof(T) * static_cast<size_t>(gx1 - gx0));
  }
  std::swap(g, scratch);
}

}  // namespace detail

inline void apply_transform(EgoMapPair& maps, int fwd, int left,
                            int quarter_turns_ccw) {
  const int q = ((quarter_turns_ccw % 4) + 4) % 4;
  if (q == 0 && fwd == 0 && left == 0) return;
  if (q == 0) {
    detail::ego_shift(maps.aem_, maps.aem_scratch_, fwd, left);
    detail::ego_shift(maps.bem_, maps.bem_scratch_, fwd, left);
  } else {
    detail::ego_permute(maps.aem_, maps.aem_scratch_, fwd, left, q);
    detail::ego_permute(maps.bem_, maps.bem_scratch_, fwd, left, q);
  }
}

inline void apply_transform(EgoMapPair& maps, const EgoTransform& t) {
  apply_transform(maps, t.forward_cells, t.left_cells, t.quarter_turns_ccw);
}

// Egocentric update for one executed action. A collision leaves the robot
// in place, so the maps do not move.
inline void apply_action_transform(EgoMapPair& maps, Action action,
                                   bool collided, int step_cells) {
  if (collided) return;
  apply_transform(maps, action_transform(action, step_cells));
}

// Adds the projected local grid into the AEM and ORs cells above the
// threshold into the BEM (strictly above, compared in float like the
// accumulation itself).
inline void integrate(EgoMapPair& maps, std::span<const CellIndex> offsets,
                      std::span<const float> values, double bem_threshold) {
  if (offsets.size() != values.size()) {
    throw std::invalid_argument("local grid offsets/values size mismatch");
  }
  const float threshold = static_cast<float>(bem_threshold);
  auto& aem = maps.aem();
  auto& bem = maps.bem();
  for (size_t i = 0; i < offsets.size(); ++i) {
    const CellIndex idx = maps.index_of(offsets[i].x, offsets[i].y);
    aem.at(idx.x, idx.y) += values[i];
    if (values[i] > threshold) bem.at(idx.x, idx.y) = 1;
  }
}

// Marks the robot's current footprint as traversed: AEM += stamp,
// BEM = true.
inline void stamp_trajectory(EgoMapPair& maps,
                             std::span<const CellIndex> footprint_offsets,
                             double stamp_value) {
  const float stamp = static_cast<float>(stamp_value);
  for (const CellIndex off : footprint_offsets) {
    const CellIndex idx = maps.index_of(off.x, off.y);
    maps.aem().at(idx.x, idx.y) += stamp;
    maps.bem().at(idx.x, idx.y) = 1;
  }
}

// Marks a failed move: AEM -= stamp on the cells the robot could not
// reach. The BEM is left untouched.
inline void stamp_collision(EgoMapPair& maps,
                            std::span<const CellIndex> attempted_offsets,
                            double stamp_value) {
  const float stamp = static_cast<float>(stamp_value);
  for (const CellIndex off : attempted_offsets) {
    const CellIndex idx = maps.index_of(off.x, off.y);
    maps.aem().at(idx.x, idx.y) -= stamp;
  }
}

// Policy input: two 257x257 views of the AEM around the robot, at stride
// 1 and stride 3. data is channel-major; (i, j) indexes (forward, right).
struct StateTensor {
  static constexpr int kSide = 257;
  static constexpr int kHalf = kSide / 2;
  static constexpr int kChannels = 2;
  std::vector<float> data;

  StateTensor() : data(static_cast<size_t>(kChannels) * kSide * kSide, 0.0f) {}

  float& at(int c, int i, int j) {
    return data[(static_cast<size_t>(c) * kSide + i) * kSide + j];
  }
  float at(int c, int i, int j) const {
    return data[(static_cast<size_t>(c) * kSide + i) * kSide + j];
  }
};

inline void extract_state(const EgoMapPair& maps, StateTensor& out) {
  const int side = maps.side();
  if (side < 3 * StateTensor::kSide) {
    throw std::invalid_argument(
        "map side must be at least 3x the state window (771 cells)");
  }
  const int c = maps.center();
  const auto& aem = maps.aem();
  for (int ch = 0; ch < 2; ++ch) {
    const int stride = ch == 0 ? 1 : 3;
    for (int i = 0; i < StateTensor::kSide; ++i) {
      const int gy = c + stride * (i - StateTensor::kHalf);
      float* dst = &out.at(ch, i, 0);
      const float* src = &aem.at(c - stride * StateTensor::kHalf, gy);
      if (stride == 1) {
        std::memcpy(dst, src, sizeof(float) * StateTensor::kSide);
      } else {
        for (int j = 0; j < StateTensor::kSide; ++j) dst[j] = src[j * stride];
      }
    }
  }
}

inline StateTensor extract_state(const EgoMapPair& maps) {
  StateTensor out;
  extract_state(maps, out);
  return out;
}

// Re-registers the BEM into the world frame given the robot's true pose.
// Used by the evaluator only; the agent never sees world coordinates.
inline Grid<uint8_t> world_anchored_map(const EgoMapPair& maps,
                                        const Pose& true_pose, int width_cells,
                                        int height_cells) {
  Grid<uint8_t> world(width_cells, height_cells, 0);
  const int c = maps.center();
  const auto& bem = maps.bem();
  for (int gy = 0; gy < maps.side(); ++gy) {
    const int fwd = gy - c;
    for (int gx = 0; gx < maps.side(); ++gx) {
      if (!bem.at(gx, gy)) continue;
      const int left = c - gx;
      const CellIndex w = rotate_to_world(true_pose.heading, fwd, left);
      const int wx = true_pose.x_cells + w.x;
      const int wy = true_pose.y_cells + w.y;
      if (world.in_bounds(wx, wy)) world.at(wx, wy) = 1;
    }
  }
  return world;
}

}  // namespace exmap

#endif  // EXMAP_MAPPING_HPP_
