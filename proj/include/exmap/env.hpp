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

#ifndef EXMAP_ENV_HPP_
#define EXMAP_ENV_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "exmap/agent.hpp"
#include "exmap/mapping.hpp"
#include "exmap/noise.hpp"
#include "exmap/projection.hpp"
#include "exmap/reward.hpp"
#include "exmap/rng.hpp"
#include "exmap/sensor.hpp"
#include "exmap/world.hpp"

namespace exmap {

// One exploration episode's worth of simulator state, owned by a single
// worker. Each step runs two phases:
//
//   observe():        sense -> corrupt -> project -> integrate -> stamp
//                     -> extract_state, at the current pose
//   apply_action(a):  world step -> collision stamp -> egocentric map
//                     transform by the believed motion
//
// The evaluator's world-frame map is maintained alongside with the true
// pose; localization noise only ever bends the agent's egocentric maps.
class ExplorationEnv {
 public:
  ExplorationEnv(std::shared_ptr<const Floorplan> plan,
                 std::shared_ptr<const LocalProjection> proj,
                 MappingConfig mapping_cfg, SensorNoise sensor_noise,
                 NoiseSpec pose_noise, double robot_radius_m)
      : plan_(std::move(plan)),
        proj_(std::move(proj)),
        mapping_cfg_(mapping_cfg),
        sensor_noise_(sensor_noise),
        pose_noise_(pose_noise),
        robot_radius_m_(robot_radius_m),
        maps_(mapping_cfg.map_side_cells, plan_->cell_size_m),
        scorer_map_(plan_->width_cells(), plan_->height_cells(), 0),
        step_cells_(translation_cells(plan_->cell_size_m)) {
    pose_noise_.validate();
    const double range_cells = proj_->max_range_m / plan_->cell_size_m;
    if (range_cells > maps_.center()) {
      throw std::invalid_argument(
          "sensor range exceeds the egocentric map radius");
    }
    for_each_disc_offset(robot_radius_m_ / plan_->cell_size_m,
                         [&](int dx, int dy) {
                           footprint_offsets_.push_back({dx, dy});
                         });
  }

  struct Observation {
    int new_free_cells = 0;
    int fp_pixels = 0;
  };

  void reset(const Pose& start, uint64_t episode_seed) {
    pose_ = start;
    believed_heading_ = start.heading;
    residual_x_m_ = residual_y_m_ = residual_theta_ = 0.0;
    episode_seed_ = episode_seed;
    step_index_ = 0;
    collisions_ = 0;
    total_new_correct_ = 0;
    total_fp_pixels_ = 0;
    maps_.clear();
    scorer_map_.fill(0);
    pose_noise_rng_ = make_rng(episode_seed ^ pose_noise_.seed,
                               seed_stream::kPoseNoise);
    // The start footprint is traversed space: stamp it before the first
    // observation so the map begins with exactly the footprint.
    stamp_trajectory(maps_, footprint_offsets_, mapping_cfg_.stamp_value);
    initial_correct_ = 0;
    for (const CellIndex off : footprint_offsets_) {
      initial_correct_ += mark_scorer(off);
    }
  }

  // Sense at the current pose and fold the frame into the maps. Returns
  // counts the reward needs; the state is available via state().
  Observation observe() {
    render_free_space_into(*plan_, pose_, *proj_, frame_, visible_scratch_);
    if (sensor_noise_.enabled()) {
      SensorNoise step_noise = sensor_noise_;
      step_noise.seed =
          derive_seed(episode_seed_ ^ sensor_noise_.seed,
                      seed_stream::kSensorNoise, step_index_);
      corrupt_in_place(frame_, step_noise);
    }
    project_into(frame_, *proj_, local_grid_);

    Observation obs;
    // Integrate into the egocentric maps and mirror BEM additions into
    // the true-pose scorer map.
    const float threshold = static_cast<float>(mapping_cfg_.bem_threshold);
    integrate(maps_, proj_->covered, local_grid_.values,
              mapping_cfg_.bem_threshold);
    for (size_t i = 0; i < proj_->covered.size(); ++i) {
      if (local_grid_.values[i] > threshold) {
        obs.new_free_cells += mark_scorer(proj_->covered[i]);
      }
    }
    stamp_trajectory(maps_, footprint_offsets_, mapping_cfg_.stamp_value);
    for (const CellIndex off : footprint_offsets_) {
      obs.new_free_cells += mark_scorer(off);
    }
    obs.fp_pixels = count_fp_pixels(frame_, mapping_cfg_.bem_threshold);
    extract_state(maps_, state_);
    total_new_correct_ += obs.new_free_cells;
    total_fp_pixels_ += obs.fp_pixels;
    last_obs_ = obs;
    return obs;
  }

  // Executes the action; returns whether it collided. Advances the step
  // index and transforms the egocentric maps by the believed motion.
  bool apply_action(Action action) {
    const StepResult result = step(*plan_, pose_, action, robot_radius_m_);
    if (result.collided) {
      ++collisions_;
      attempted_scratch_.clear();
      for (const CellIndex c : result.attempted_cells) {
        const auto [fwd, left] = rotate_from_world(
            pose_.heading, c.x - pose_.x_cells, c.y - pose_.y_cells);
        attempted_scratch_.push_back({fwd, left});
      }
      stamp_collision(maps_, attempted_scratch_, mapping_cfg_.stamp_value);
    }

    PoseDelta true_delta;
    true_delta.dx_m = (result.pose.x_cells - pose_.x_cells) * plan_->cell_size_m;
    true_delta.dy_m = (result.pose.y_cells - pose_.y_cells) * plan_->cell_size_m;
    true_delta.dtheta_rad =
        quarter_turns_between(pose_.heading, result.pose.heading) * (M_PI / 2);

    EgoTransform transform = believed_transform(true_delta);
    apply_transform(maps_, transform);

    pose_ = result.pose;
    ++step_index_;
    return result.collided;
  }

  const StateTensor& state() const { return state_; }
  const SegImage& frame() const { return frame_; }
  const Observation& last_observation() const { return last_obs_; }
  const Pose& true_pose() const { return pose_; }
  const Floorplan& plan() const { return *plan_; }
  const LocalProjection& projection() const { return *proj_; }
  const EgoMapPair& maps() const { return maps_; }
  const Grid<uint8_t>& scorer_map() const { return scorer_map_; }
  int collisions() const { return collisions_; }
  long total_fp_pixels() const { return total_fp_pixels_; }
  int total_new_correct() const { return total_new_correct_; }
  int initial_correct() const { return initial_correct_; }
  int step_cells() const { return step_cells_; }
  double robot_radius_m() const { return robot_radius_m_; }

  double explored_area_m2() const { return eval_score(scorer_map_, *plan_); }

  int correct_free_count() const {
    int n = 0;
    for (int y = 0; y < scorer_map_.height(); ++y)
      for (int x = 0; x < scorer_map_.width(); ++x)
        if (scorer_map_.at(x, y) && plan_->free(x, y)) ++n;
    return n;
  }

 private:
  // Marks a robot-frame offset in the world-frame scorer map using the
  // true pose. Returns 1 when the cell turned true and is really free.
  int mark_scorer(CellIndex offset) {
    const CellIndex w = rotate_to_world(pose_.heading, offset.x, offset.y);
    const int wx = pose_.x_cells + w.x;
    const int wy = pose_.y_cells + w.y;
    if (!scorer_map_.in_bounds(wx, wy) || scorer_map_.at(wx, wy)) return 0;
    scorer_map_.at(wx, wy) = 1;
    return plan_->free(wx, wy) ? 1 : 0;
  }

  static int quarter_turns_between(Heading from, Heading to) {
    int d = (static_cast<int>(to) - static_cast<int>(from)) % 4;
    if (d > 2) d -= 4;
    if (d < -2) d += 4;
    return d;  // -1, 0, 1, or 2
  }

  // Believed per-step motion: true delta plus localization noise,
  // quantized to whole cells / quarter turns with the residual carried
  // to the next step, expressed in the believed pre-step frame.
  EgoTransform believed_transform(const PoseDelta& true_delta) {
    PoseDelta believed = true_delta;
    if (!pose_noise_.zero()) {
      believed = apply_pose_noise(true_delta, pose_noise_, pose_noise_rng_);
    }
    const double cell = plan_->cell_size_m;
    const double fx = believed.dx_m + residual_x_m_;
    const double fy = believed.dy_m + residual_y_m_;
    const double ft = believed.dtheta_rad + residual_theta_;
    const int cx = static_cast<int>(std::lround(fx / cell));
    const int cy = static_cast<int>(std::lround(fy / cell));
    const int qt = static_cast<int>(std::lround(ft / (M_PI / 2)));
    residual_x_m_ = fx - cx * cell;
    residual_y_m_ = fy - cy * cell;
    residual_theta_ = ft - qt * (M_PI / 2);

    const auto [fwd, left] = rotate_from_world(believed_heading_, cx, cy);
    believed_heading_ = static_cast<Heading>(
        ((static_cast<int>(believed_heading_) + qt) % 4 + 4) % 4);
    return {fwd, left, ((qt % 4) + 4) % 4};
  }

  std::shared_ptr<const Floorplan> plan_;
  std::shared_ptr<const LocalProjection> proj_;
  MappingConfig mapping_cfg_;
  SensorNoise sensor_noise_;
  NoiseSpec pose_noise_;
  double robot_radius_m_;

  EgoMapPair maps_;
  Grid<uint8_t> scorer_map_;
  StateTensor state_;
  SegImage frame_;
  LocalGrid local_grid_;
  std::vector<uint8_t> visible_scratch_;
  std::vector<CellIndex> footprint_offsets_;
  std::vector<CellIndex> attempted_scratch_;

  Pose pose_;
  Heading believed_heading_ = Heading::kEast;
  double residual_x_m_ = 0.0, residual_y_m_ = 0.0, residual_theta_ = 0.0;
  Rng pose_noise_rng_;
  uint64_t episode_seed_ = 0;
  int step_cells_ = 8;
  int step_index_ = 0;
  int collisions_ = 0;
  int initial_correct_ = 0;
  int total_new_correct_ = 0;
  long total_fp_pixels_ = 0;
  Observation last_obs_;
};

enum class Stratum { kRooms, kCorridors, kBoth };

inline const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::kRooms:
      return "rooms";
    case Stratum::kCorridors:
      return "corridors";
    default:
      return "both";
  }
}

// Uniform start-pose sampling over graph nodes, stratified by the region
// label of the node's cell.
struct StartSampler {
  std::vector<CellIndex> room_cells;
  std::vector<CellIndex> corridor_cells;

  static StartSampler build(const Floorplan& plan,
                            const TraversabilityGraph& graph) {
    StartSampler s;
    for (const CellIndex c : graph.valid_cells()) {
      const auto label = static_cast<RegionLabel>(plan.region.at(c.x, c.y));
      if (label == RegionLabel::kRoom) {
        s.room_cells.push_back(c);
      } else if (label == RegionLabel::kCorridor) {
        s.corridor_cells.push_back(c);
      }
    }
    return s;
  }

  Pose sample(Stratum stratum, Rng& rng) const {
    const std::vector<CellIndex>* cells = nullptr;
    switch (stratum) {
      case Stratum::kRooms:
        cells = &room_cells;
        break;
      case Stratum::kCorridors:
        cells = &corridor_cells;
        break;
      case Stratum::kBoth: {
        const size_t total = room_cells.size() + corridor_cells.size();
        if (total == 0) throw std::runtime_error("no start poses available");
        const size_t k = rng() % total;
        const CellIndex c = k < room_cells.size()
                                ? room_cells[k]
                                : corridor_cells[k - room_cells.size()];
        return Pose{c.x, c.y, static_cast<Heading>(rng() % 4)};
      }
    }
    if (cells->empty()) throw std::runtime_error("no start poses in stratum");
    const CellIndex c = (*cells)[rng() % cells->size()];
    return Pose{c.x, c.y, static_cast<Heading>(rng() % 4)};
  }
};

// A generated world plus everything sharable across episodes and workers.
struct WorldBundle {
  uint64_t world_seed = 0;
  std::shared_ptr<const Floorplan> plan;
  std::shared_ptr<const TraversabilityGraph> graph;
  StartSampler starts;
};

inline WorldBundle make_world_bundle(uint64_t world_seed,
                                     const WorldGenParams& params) {
  WorldBundle b;
  b.world_seed = world_seed;
  auto plan = std::make_shared<Floorplan>(generate_floorplan(world_seed, params));
  auto graph = std::make_shared<TraversabilityGraph>(
      build_graph(*plan, params.robot_radius_m));
  if (graph->node_count() == 0) {
    throw std::runtime_error("generated world has no traversable poses");
  }
  b.plan = std::move(plan);
  b.graph = std::move(graph);
  b.starts = StartSampler::build(*b.plan, *b.graph);
  return b;
}

struct EpisodeResult {
  double return_raw = 0.0;
  int steps = 0;
  int collisions = 0;
  long fp_pixels = 0;
  double explored_area_m2 = 0.0;
  int new_correct_total = 0;
  int initial_correct = 0;
};

// Runs one fixed-length episode under a probability-producing policy.
// The policy sees only the state tensor; action sampling (or greedy
// selection) and all environment randomness derive from episode_seed.
template <typename PolicyFn>
inline EpisodeResult run_policy_episode(ExplorationEnv& env, PolicyFn&& policy,
                                        int episode_len, const Pose& start,
                                        uint64_t episode_seed, bool greedy,
                                        const RewardConfig& reward_cfg) {
  env.reset(start, episode_seed);
  Rng action_rng = make_rng(episode_seed, seed_stream::kEpisode);
  EpisodeResult result;
  for (int t = 0; t < episode_len; ++t) {
    const ExplorationEnv::Observation obs = env.observe();
    const std::array<double, kNumActions> probs = policy(env.state());
    const Action action =
        greedy ? greedy_action(probs) : sample_action(probs, action_rng);
    const bool collided = env.apply_action(action);
    result.return_raw +=
        reward_total(obs.new_free_cells, obs.fp_pixels, collided, reward_cfg);
    ++result.steps;
  }
  result.collisions = env.collisions();
  result.fp_pixels = env.total_fp_pixels();
  result.explored_area_m2 = env.explored_area_m2();
  result.new_correct_total = env.total_new_correct();
  result.initial_correct = env.initial_correct();
  return result;
}

}  // namespace exmap

#endif  // EXMAP_ENV_HPP_
