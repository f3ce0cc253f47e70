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

#ifndef EXMAP_RUN_CONFIG_HPP_
#define EXMAP_RUN_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "exmap/agent.hpp"
#include "exmap/camera.hpp"
#include "exmap/config.hpp"
#include "exmap/mapping.hpp"
#include "exmap/noise.hpp"
#include "exmap/reward.hpp"
#include "exmap/sensor.hpp"
#include "exmap/world.hpp"

namespace exmap {

struct TrainConfig {
  int episode_len = 200;
  int local_steps = 20;
  double discount = 0.99;
  double learning_rate = 2e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int num_workers = 2;
  int num_train_worlds = 4;
  int num_eval_worlds = 2;
  uint64_t total_steps = 200000;
  uint64_t eval_every = 50000;  // env steps; 0 disables mid-train eval
  int eval_episodes = 16;
  uint64_t checkpoint_every = 0;  // env steps; 0 = final only
  double entropy_coeff = 0.01;
  double value_coeff = 0.5;
  double start_room_fraction = 0.5;

  void validate() const {
    if (local_steps < 1 || local_steps > episode_len) {
      throw std::invalid_argument("need 1 <= local_steps <= episode_len");
    }
    if (discount <= 0.0 || discount > 1.0) {
      throw std::invalid_argument("discount must be in (0, 1]");
    }
    if (num_workers < 1) throw std::invalid_argument("need >= 1 worker");
    if (num_train_worlds < 1 || num_eval_worlds < 1) {
      throw std::invalid_argument("need >= 1 train and eval world");
    }
  }
};

struct EvalConfig {
  int starts_per_stratum = 200;
  int episodes_per_start = 1;
  bool greedy = true;
  int threads = 2;
  NoiseSpec noise;
};

struct RunConfig {
  uint64_t seed = 1;
  WorldGenParams world;
  CameraModel camera;
  SensorNoise sensor_noise;
  MappingConfig mapping;
  RewardConfig reward;
  AgentConfig agent;
  TrainConfig train;
  EvalConfig eval;

  void to_map(KeyValueMap& kv) const {
    kv.set_uint("seed", seed);

    kv.set_double("world.width_m", world.width_m);
    kv.set_double("world.height_m", world.height_m);
    kv.set_double("world.cell_size_m", world.cell_size_m);
    kv.set_double("world.corridor_width_m", world.corridor_width_m);
    kv.set_double("world.door_width_m", world.door_width_m);
    kv.set_int("world.rooms_min", world.rooms_min);
    kv.set_int("world.rooms_max", world.rooms_max);
    kv.set_double("world.clutter_density", world.clutter_density);
    kv.set_double("world.clutter_min_m", world.clutter_min_m);
    kv.set_double("world.clutter_max_m", world.clutter_max_m);
    kv.set_double("world.wall_thickness_m", world.wall_thickness_m);
    kv.set_double("world.robot_radius_m", world.robot_radius_m);
    kv.set_double("world.cross_corridor_prob", world.cross_corridor_prob);
    kv.set_double("world.interroom_door_prob", world.interroom_door_prob);

    kv.set_int("camera.image_width_px", camera.image_width_px);
    kv.set_int("camera.image_height_px", camera.image_height_px);
    kv.set_double("camera.focal_px", camera.focal_px);
    kv.set_double("camera.principal_x_px", camera.principal_x_px);
    kv.set_double("camera.principal_y_px", camera.principal_y_px);
    kv.set_double("camera.height_m", camera.height_m);
    kv.set_double("camera.pitch_rad", camera.pitch_rad);
    kv.set_double("camera.max_range_m", camera.max_range_m);

    kv.set_double("sensor_noise.flip_prob", sensor_noise.flip_prob);
    kv.set_int("sensor_noise.blur_radius_px", sensor_noise.blur_radius_px);
    kv.set_double("sensor_noise.confidence_jitter",
                  sensor_noise.confidence_jitter);
    kv.set_uint("sensor_noise.seed", sensor_noise.seed);

    kv.set_int("mapping.map_side_cells", mapping.map_side_cells);
    kv.set_double("mapping.bem_threshold", mapping.bem_threshold);
    kv.set_double("mapping.stamp_value", mapping.stamp_value);

    kv.set_double("reward.new_cell_reward", reward.new_cell_reward);
    kv.set_double("reward.fp_pixel_penalty", reward.fp_pixel_penalty);
    kv.set_double("reward.collision_penalty", reward.collision_penalty);
    kv.set_double("reward.fp_conf_threshold", reward.fp_conf_threshold);
    kv.set_double("reward.reward_scale", reward.reward_scale);

    agent.to_map(kv, "agent.");

    kv.set_int("train.episode_len", train.episode_len);
    kv.set_int("train.local_steps", train.local_steps);
    kv.set_double("train.discount", train.discount);
    kv.set_double("train.learning_rate", train.learning_rate);
    kv.set_double("train.adam_beta1", train.adam_beta1);
    kv.set_double("train.adam_beta2", train.adam_beta2);
    kv.set_double("train.adam_eps", train.adam_eps);
    kv.set_int("train.num_workers", train.num_workers);
    kv.set_int("train.num_train_worlds", train.num_train_worlds);
    kv.set_int("train.num_eval_worlds", train.num_eval_worlds);
    kv.set_uint("train.total_steps", train.total_steps);
    kv.set_uint("train.eval_every", train.eval_every);
    kv.set_int("train.eval_episodes", train.eval_episodes);
    kv.set_uint("train.checkpoint_every", train.checkpoint_every);
    kv.set_double("train.entropy_coeff", train.entropy_coeff);
    kv.set_double("train.value_coeff", train.value_coeff);
    kv.set_double("train.start_room_fraction", train.start_room_fraction);

    kv.set_int("eval.starts_per_stratum", eval.starts_per_stratum);
    kv.set_int("eval.episodes_per_start", eval.episodes_per_start);
    kv.set_bool("eval.greedy", eval.greedy);
    kv.set_int("eval.threads", eval.threads);
    kv.set_double("eval.noise.translation_mu_m", eval.noise.translation_mu_m);
    kv.set_double("eval.noise.translation_sigma_m",
                  eval.noise.translation_sigma_m);
    kv.set_double("eval.noise.orientation_mu_rad",
                  eval.noise.orientation_mu_rad);
    kv.set_double("eval.noise.orientation_sigma_rad",
                  eval.noise.orientation_sigma_rad);
    kv.set_uint("eval.noise.seed", eval.noise.seed);
  }

  static RunConfig from_map(const KeyValueMap& kv) {
    RunConfig c;
    c.seed = kv.get_uint("seed", c.seed);

    auto& w = c.world;
    w.width_m = kv.get_double("world.width_m", w.width_m);
    w.height_m = kv.get_double("world.height_m", w.height_m);
    w.cell_size_m = kv.get_double("world.cell_size_m", w.cell_size_m);
    w.corridor_width_m =
        kv.get_double("world.corridor_width_m", w.corridor_width_m);
    w.door_width_m = kv.get_double("world.door_width_m", w.door_width_m);
    w.rooms_min = static_cast<int>(kv.get_int("world.rooms_min", w.rooms_min));
    w.rooms_max = static_cast<int>(kv.get_int("world.rooms_max", w.rooms_max));
    w.clutter_density = kv.get_double("world.clutter_density", w.clutter_density);
    w.clutter_min_m = kv.get_double("world.clutter_min_m", w.clutter_min_m);
    w.clutter_max_m = kv.get_double("world.clutter_max_m", w.clutter_max_m);
    w.wall_thickness_m =
        kv.get_double("world.wall_thickness_m", w.wall_thickness_m);
    w.robot_radius_m = kv.get_double("world.robot_radius_m", w.robot_radius_m);
    w.cross_corridor_prob =
        kv.get_double("world.cross_corridor_prob", w.cross_corridor_prob);
    w.interroom_door_prob =
        kv.get_double("world.interroom_door_prob", w.interroom_door_prob);

    auto& cam = c.camera;
    cam.image_width_px =
        static_cast<int>(kv.get_int("camera.image_width_px", cam.image_width_px));
    cam.image_height_px = static_cast<int>(
        kv.get_int("camera.image_height_px", cam.image_height_px));
    cam.focal_px = kv.get_double("camera.focal_px", cam.focal_px);
    cam.principal_x_px = kv.get_double("camera.principal_x_px", cam.principal_x_px);
    cam.principal_y_px = kv.get_double("camera.principal_y_px", cam.principal_y_px);
    cam.height_m = kv.get_double("camera.height_m", cam.height_m);
    cam.pitch_rad = kv.get_double("camera.pitch_rad", cam.pitch_rad);
    cam.max_range_m = kv.get_double("camera.max_range_m", cam.max_range_m);

    auto& sn = c.sensor_noise;
    sn.flip_prob = kv.get_double("sensor_noise.flip_prob", sn.flip_prob);
    sn.blur_radius_px = static_cast<int>(
        kv.get_int("sensor_noise.blur_radius_px", sn.blur_radius_px));
    sn.confidence_jitter =
        kv.get_double("sensor_noise.confidence_jitter", sn.confidence_jitter);
    sn.seed = kv.get_uint("sensor_noise.seed", sn.seed);

    auto& m = c.mapping;
    m.map_side_cells =
        static_cast<int>(kv.get_int("mapping.map_side_cells", m.map_side_cells));
    m.bem_threshold = kv.get_double("mapping.bem_threshold", m.bem_threshold);
    m.stamp_value = kv.get_double("mapping.stamp_value", m.stamp_value);

    auto& r = c.reward;
    r.new_cell_reward = kv.get_double("reward.new_cell_reward", r.new_cell_reward);
    r.fp_pixel_penalty =
        kv.get_double("reward.fp_pixel_penalty", r.fp_pixel_penalty);
    r.collision_penalty =
        kv.get_double("reward.collision_penalty", r.collision_penalty);
    r.fp_conf_threshold =
        kv.get_double("reward.fp_conf_threshold", r.fp_conf_threshold);
    r.reward_scale = kv.get_double("reward.reward_scale", r.reward_scale);

    c.agent = AgentConfig::from_map(kv, "agent.");

    auto& t = c.train;
    t.episode_len = static_cast<int>(kv.get_int("train.episode_len", t.episode_len));
    t.local_steps = static_cast<int>(kv.get_int("train.local_steps", t.local_steps));
    t.discount = kv.get_double("train.discount", t.discount);
    t.learning_rate = kv.get_double("train.learning_rate", t.learning_rate);
    t.adam_beta1 = kv.get_double("train.adam_beta1", t.adam_beta1);
    t.adam_beta2 = kv.get_double("train.adam_beta2", t.adam_beta2);
    t.adam_eps = kv.get_double("train.adam_eps", t.adam_eps);
    t.num_workers = static_cast<int>(kv.get_int("train.num_workers", t.num_workers));
    t.num_train_worlds =
        static_cast<int>(kv.get_int("train.num_train_worlds", t.num_train_worlds));
    t.num_eval_worlds =
        static_cast<int>(kv.get_int("train.num_eval_worlds", t.num_eval_worlds));
    t.total_steps = kv.get_uint("train.total_steps", t.total_steps);
    t.eval_every = kv.get_uint("train.eval_every", t.eval_every);
    t.eval_episodes =
        static_cast<int>(kv.get_int("train.eval_episodes", t.eval_episodes));
    t.checkpoint_every = kv.get_uint("train.checkpoint_every", t.checkpoint_every);
    t.entropy_coeff = kv.get_double("train.entropy_coeff", t.entropy_coeff);
    t.value_coeff = kv.get_double("train.value_coeff", t.value_coeff);
    t.start_room_fraction =
        kv.get_double("train.start_room_fraction", t.start_room_fraction);

    auto& e = c.eval;
    e.starts_per_stratum =
        static_cast<int>(kv.get_int("eval.starts_per_stratum", e.starts_per_stratum));
    e.episodes_per_start =
        static_cast<int>(kv.get_int("eval.episodes_per_start", e.episodes_per_start));
    e.greedy = kv.get_bool("eval.greedy", e.greedy);
    e.threads = static_cast<int>(kv.get_int("eval.threads", e.threads));
    e.noise.translation_mu_m =
        kv.get_double("eval.noise.translation_mu_m", e.noise.translation_mu_m);
    e.noise.translation_sigma_m = kv.get_double("eval.noise.translation_sigma_m",
                                                e.noise.translation_sigma_m);
    e.noise.orientation_mu_rad = kv.get_double("eval.noise.orientation_mu_rad",
                                               e.noise.orientation_mu_rad);
    e.noise.orientation_sigma_rad = kv.get_double(
        "eval.noise.orientation_sigma_rad", e.noise.orientation_sigma_rad);
    e.noise.seed = kv.get_uint("eval.noise.seed", e.noise.seed);
    return c;
  }

  std::string serialize() const {
    KeyValueMap kv;
    to_map(kv);
    return kv.serialize();
  }
};

// Seed streams for world generation: training and held-out evaluation
// worlds are disjoint by construction.
inline uint64_t train_world_seed(uint64_t master, int index) {
  return derive_seed(master, seed_stream::kWorldGen, 1000 + index);
}
inline uint64_t eval_world_seed(uint64_t master, int index) {
  return derive_seed(master, seed_stream::kWorldGen, 2000000 + index);
}

}  // namespace exmap

#endif  // EXMAP_RUN_CONFIG_HPP_
