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

#ifndef EXMAP_EVAL_HPP_
#define EXMAP_EVAL_HPP_

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "exmap/env.hpp"
#include "exmap/run_config.hpp"

namespace exmap {

// Policy under evaluation: a loaded network or the uniform-random
// baseline.
struct EvalPolicy {
  const PolicyNet* net = nullptr;            // null = random baseline
  const std::vector<double>* params = nullptr;
  std::string name = "random";

  bool is_random() const { return net == nullptr; }
};

struct EvalEpisodeRecord {
  int index = 0;
  Stratum stratum = Stratum::kRooms;
  int world_index = 0;
  Pose start;
  uint64_t episode_seed = 0;
  double area_m2 = 0.0;
  double return_raw = 0.0;
  int collisions = 0;
  long fp_pixels = 0;
};

struct StratumStats {
  int episodes = 0;
  double mean_area_m2 = 0.0;
  double stddev_area_m2 = 0.0;
  double mean_return = 0.0;
  double mean_collisions = 0.0;
};

struct EvalReport {
  std::string policy_name;
  bool greedy = true;
  NoiseSpec noise;
  std::vector<EvalEpisodeRecord> records;
  StratumStats rooms;
  StratumStats corridors;

  const StratumStats& stats(Stratum s) const {
    return s == Stratum::kRooms ? rooms : corridors;
  }
};

namespace detail {

inline StratumStats summarize(const std::vector<EvalEpisodeRecord>& records,
                              Stratum stratum) {
  StratumStats s;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& r : records) {
    if (r.stratum != stratum) continue;
    ++s.episodes;
    sum += r.area_m2;
    sum2 += r.area_m2 * r.area_m2;
    s.mean_return += r.return_raw;
    s.mean_collisions += r.collisions;
  }
  if (s.episodes > 0) {
    s.mean_area_m2 = sum / s.episodes;
    s.mean_return /= s.episodes;
    s.mean_collisions /= s.episodes;
    const double var =
        std::max(0.0, sum2 / s.episodes - s.mean_area_m2 * s.mean_area_m2);
    s.stddev_area_m2 = std::sqrt(var);
  }
  return s;
}

}  // namespace detail

// Start-point sweep: starts_per_stratum episodes per requested stratum,
// round-robin over the worlds. Every per-episode seed (start pose,
// action sampling, sensor and localization noise) derives from
// (sweep_seed, stratum, index) only, so different policies evaluated
// with the same sweep_seed run from identical, paired conditions. The
// score always comes from true-pose bookkeeping; localization noise only
// corrupts the agent's maps.
inline EvalReport sweep(const EvalPolicy& policy,
                        const std::vector<WorldBundle>& worlds,
                        std::shared_ptr<const LocalProjection> proj,
                        Stratum stratum, const MappingConfig& mapping_cfg,
                        const RewardConfig& reward_cfg,
                        const SensorNoise& sensor_noise,
                        const EvalConfig& options, int episode_len,
                        uint64_t sweep_seed) {
  if (worlds.empty()) throw std::invalid_argument("sweep needs worlds");
  std::vector<Stratum> strata;
  if (stratum == Stratum::kBoth) {
    strata = {Stratum::kRooms, Stratum::kCorridors};
  } else {
    strata = {stratum};
  }

  struct Task {
    Stratum stratum;
    int index;
  };
  std::vector<Task> tasks;
  for (Stratum s : strata) {
    for (int i = 0; i < options.starts_per_stratum; ++i) {
      for (int rep = 0; rep < options.episodes_per_start; ++rep) {
        tasks.push_back({s, i * options.episodes_per_start + rep});
      }
    }
  }

  EvalReport report;
  report.policy_name = policy.name;
  report.greedy = options.greedy;
  report.noise = options.noise;
  report.records.resize(tasks.size());

  std::atomic<size_t> next{0};
  const int thread_count =
      std::max(1, std::min<int>(options.threads,
                                static_cast<int>(tasks.size())));
  auto run_tasks = [&]() {
    NetWorkspace ws;
    while (true) {
      const size_t k = next.fetch_add(1);
      if (k >= tasks.size()) break;
      const Task task = tasks[k];
      const uint64_t tag =
          (task.stratum == Stratum::kRooms ? 0x100000u : 0x200000u) +
          static_cast<uint64_t>(task.index);
      const uint64_t episode_seed =
          derive_seed(sweep_seed, seed_stream::kEval, tag);
      const int world_index =
          task.index % static_cast<int>(worlds.size());
      const WorldBundle& world = worlds[world_index];
      Rng start_rng = make_rng(episode_seed, seed_stream::kStartPose);
      const Pose start = world.starts.sample(task.stratum, start_rng);

      ExplorationEnv env(world.plan, proj, mapping_cfg, sensor_noise,
                         options.noise, world.graph->robot_radius_m);
      auto policy_fn = [&](const StateTensor& state) {
        if (policy.is_random()) return random_policy();
        return policy.net->forward(*policy.params, state, ws).probs;
      };
      const EpisodeResult er =
          run_policy_episode(env, policy_fn, episode_len, start, episode_seed,
                             options.greedy, reward_cfg);
      EvalEpisodeRecord rec;
      rec.index = static_cast<int>(k);
      rec.stratum = task.stratum;
      rec.world_index = world_index;
      rec.start = start;
      rec.episode_seed = episode_seed;
      rec.area_m2 = er.explored_area_m2;
      rec.return_raw = er.return_raw;
      rec.collisions = er.collisions;
      rec.fp_pixels = er.fp_pixels;
      report.records[k] = rec;
    }
  };

  if (thread_count == 1) {
    run_tasks();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(run_tasks);
    for (auto& t : pool) t.join();
  }

  report.rooms = detail::summarize(report.records, Stratum::kRooms);
  report.corridors = detail::summarize(report.records, Stratum::kCorridors);
  return report;
}

inline void write_eval_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write eval csv: " + path);
  out << "index,stratum,world,start_x,start_y,heading,episode_seed,"
         "area_m2,episode_return,collisions,fp_pixels\n";
  out.precision(10);
  for (const auto& r : report.records) {
    out << r.index << "," << stratum_name(r.stratum) << "," << r.world_index
        << "," << r.start.x_cells << "," << r.start.y_cells << ","
        << static_cast<int>(r.start.heading) << "," << r.episode_seed << ","
        << r.area_m2 << "," << r.return_raw << "," << r.collisions << ","
        << r.fp_pixels << "\n";
  }
}

// Plain-text comparison table, one row per report, columns per stratum.
inline std::string summary_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "Average explored free space (m^2)\n";
  os << std::left << std::setw(34) << "policy / noise" << std::right
     << std::setw(18) << "start in rooms" << std::setw(22)
     << "start in corridors" << "\n";
  for (const auto& rep : reports) {
    std::ostringstream label;
    label << rep.policy_name << (rep.greedy ? " (greedy)" : " (stochastic)");
    if (!rep.noise.zero()) {
      label << " TN(" << rep.noise.translation_mu_m << ","
            << rep.noise.translation_sigma_m << ")";
      if (rep.noise.orientation_mu_rad != 0 ||
          rep.noise.orientation_sigma_rad != 0) {
        label << " ON(" << rep.noise.orientation_mu_rad << ","
              << rep.noise.orientation_sigma_rad << ")";
      }
    }
    os << std::left << std::setw(34) << label.str() << std::right
       << std::fixed << std::setprecision(2);
    auto cell = [&](const StratumStats& s) {
      std::ostringstream c;
      if (s.episodes == 0) {
        c << "-";
      } else {
        c << std::fixed << std::setprecision(2) << s.mean_area_m2 << " ("
          << s.stddev_area_m2 << ")";
      }
      return c.str();
    };
    os << std::setw(18) << cell(rep.rooms) << std::setw(22)
       << cell(rep.corridors) << "\n";
  }
  return os.str();
}

}  // namespace exmap

#endif  // EXMAP_EVAL_HPP_
