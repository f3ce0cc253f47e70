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

#ifndef EXMAP_REWARD_HPP_
#define EXMAP_REWARD_HPP_

#include <stdexcept>

#include "exmap/grid.hpp"
#include "exmap/sensor.hpp"
#include "exmap/world.hpp"

namespace exmap {

struct RewardConfig {
  double new_cell_reward = 1.0;       // per newly mapped, truly free cell
  double fp_pixel_penalty = -0.01;    // per falsely-free input pixel
  double collision_penalty = -100.0;  // per collision
  // Pixels count as "labeled free" above this confidence; kept equal to
  // the BEM binarization threshold.
  double fp_conf_threshold = 0.8;
  // Scale factor applied to the total when it feeds the learner.
  double reward_scale = 1.0;

  void validate() const {
    if (new_cell_reward < 0 || fp_pixel_penalty > 0 || collision_penalty > 0) {
      throw std::invalid_argument(
          "reward config: penalties must be <= 0 <= new_cell_reward");
    }
  }
};

struct StepReward {
  int new_free_cells = 0;
  int fp_pixels = 0;
  bool collided = false;
  double total = 0.0;
};

inline int count_fp_pixels(const SegImage& img, double conf_threshold) {
  const float threshold = static_cast<float>(conf_threshold);
  int fp = 0;
  const size_t n = img.confidence.size();
  for (size_t p = 0; p < n; ++p) {
    if (img.confidence[p] > threshold && !img.truth[p]) ++fp;
  }
  return fp;
}

inline double reward_total(int new_free_cells, int fp_pixels, bool collided,
                           const RewardConfig& cfg) {
  return cfg.new_cell_reward * new_free_cells +
         cfg.fp_pixel_penalty * fp_pixels +
         (collided ? cfg.collision_penalty : 0.0);
}

// Step reward from explicit world-frame map snapshots: cells that became
// true this step and are truly free earn new_cell_reward each; pixels of
// the current frame labeled free but not free in truth are penalized, as
// is a collision. Maps must be registered to the world frame (the
// evaluator's true-pose bookkeeping).
inline StepReward step_reward(const Grid<uint8_t>& prev_world_map,
                              const Grid<uint8_t>& new_world_map,
                              const SegImage& img, bool collided,
                              const RewardConfig& cfg, const Floorplan& plan) {
  if (prev_world_map.width() != new_world_map.width() ||
      prev_world_map.height() != new_world_map.height()) {
    throw std::invalid_argument("world map dimensions mismatch");
  }
  StepReward r;
  r.collided = collided;
  for (int y = 0; y < new_world_map.height(); ++y) {
    for (int x = 0; x < new_world_map.width(); ++x) {
      if (new_world_map.at(x, y) && !prev_world_map.at(x, y) &&
          plan.free(x, y)) {
        ++r.new_free_cells;
      }
    }
  }
  r.fp_pixels = count_fp_pixels(img, cfg.fp_conf_threshold);
  r.total = reward_total(r.new_free_cells, r.fp_pixels, collided, cfg);
  return r;
}

// Episode metric: correctly mapped free area minus area falsely mapped as
// free, in square meters.
inline double eval_score(const Grid<uint8_t>& final_world_map,
                         const Floorplan& plan) {
  if (final_world_map.width() != plan.width_cells() ||
      final_world_map.height() != plan.height_cells()) {
    throw std::invalid_argument("world map does not match the floorplan");
  }
  int64_t tp = 0, fp = 0;
  for (int y = 0; y < plan.height_cells(); ++y) {
    for (int x = 0; x < plan.width_cells(); ++x) {
      if (!final_world_map.at(x, y)) continue;
      if (plan.free(x, y)) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  return static_cast<double>(tp - fp) * plan.cell_size_m * plan.cell_size_m;
}

}  // namespace exmap

#endif  // EXMAP_REWARD_HPP_
