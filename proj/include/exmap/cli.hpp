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

#ifndef EXMAP_CLI_HPP_
#define EXMAP_CLI_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "exmap/eval.hpp"
#include "exmap/image_io.hpp"
#include "exmap/trainer.hpp"
#include "exmap/world_io.hpp"

namespace exmap {

// --- genworld ---------------------------------------------------------

struct GenworldResult {
  std::string base_path;
  size_t node_count = 0;
  size_t edge_count = 0;
  int width_cells = 0;
  int height_cells = 0;
  int free_cells = 0;
};

inline GenworldResult run_genworld(const RunConfig& cfg,
                                   const std::string& out_dir,
                                   bool write_preview = true) {
  std::filesystem::create_directories(out_dir);
  const Floorplan plan = generate_floorplan(cfg.seed, cfg.world);
  const TraversabilityGraph graph = build_graph(plan, cfg.world.robot_radius_m);
  GenworldResult result;
  result.base_path = out_dir + "/world";
  save_floorplan(plan, result.base_path);
  if (write_preview) {
    write_ppm(result.base_path + ".preview.ppm",
              render_floorplan_preview(plan));
  }
  KeyValueMap kv;
  cfg.to_map(kv);
  kv.save(out_dir + "/config.txt");
  result.node_count = graph.node_count();
  result.edge_count = graph.edge_count();
  result.width_cells = plan.width_cells();
  result.height_cells = plan.height_cells();
  result.free_cells = plan.count_free();
  return result;
}

// --- ego map exports --------------------------------------------------

inline void export_aem(const EgoMapPair& maps, const std::string& base) {
  const auto& aem = maps.aem();
  float lo = aem.at(0, 0), hi = aem.at(0, 0);
  for (int y = 0; y < aem.height(); ++y) {
    for (int x = 0; x < aem.width(); ++x) {
      lo = std::min(lo, aem.at(x, y));
      hi = std::max(hi, aem.at(x, y));
    }
  }
  const float span = hi > lo ? hi - lo : 1.0f;
  Grid<uint8_t> img(aem.width(), aem.height(), 0);
  for (int y = 0; y < aem.height(); ++y) {
    for (int x = 0; x < aem.width(); ++x) {
      img.at(x, y) =
          static_cast<uint8_t>(std::lround((aem.at(x, y) - lo) / span * 255));
    }
  }
  write_pgm(base + ".pgm", img);
  KeyValueMap side;
  side.set_double("aem_min", lo);
  side.set_double("aem_max", hi);
  side.save(base + ".minmax");
}

inline void export_bem(const EgoMapPair& maps, const std::string& path) {
  const auto& bem = maps.bem();
  Grid<uint8_t> img(bem.width(), bem.height(), 0);
  for (int y = 0; y < bem.height(); ++y)
    for (int x = 0; x < bem.width(); ++x)
      img.at(x, y) = bem.at(x, y) ? 255 : 0;
  write_pgm(path, img);
}

// --- trajectory render (map + oriented triangle glyphs) -----------------

struct TrajectoryRender {
  Grid<Rgb> image;
  int glyph_count = 0;
};

// White regions are mapped free space, mid grey the rest of the world,
// near-black unknown. One triangle per visited pose, red along the way
// and green at the start; the long open edge faces the robot's heading.
inline TrajectoryRender render_trajectory(const Floorplan& plan,
                                          const Grid<uint8_t>& world_map,
                                          const std::vector<Pose>& poses,
                                          int scale = 3) {
  TrajectoryRender out;
  out.image = Grid<Rgb>(plan.width_cells() * scale,
                        plan.height_cells() * scale, Rgb{25, 25, 25});
  for (int y = 0; y < plan.height_cells(); ++y) {
    for (int x = 0; x < plan.width_cells(); ++x) {
      Rgb c{25, 25, 25};
      if (world_map.at(x, y)) {
        c = Rgb{245, 245, 245};
      } else if (plan.free(x, y)) {
        c = Rgb{90, 90, 90};
      }
      for (int sy = 0; sy < scale; ++sy)
        for (int sx = 0; sx < scale; ++sx)
          out.image.at(x * scale + sx, y * scale + sy) = c;
    }
  }
  const double r = 2.2 * scale;
  for (size_t i = 0; i < poses.size(); ++i) {
    const Pose& p = poses[i];
    const double cx = (p.x_cells + 0.5) * scale;
    const double cy = (p.y_cells + 0.5) * scale;
    const double fx = heading_dx(p.heading), fy = heading_dy(p.heading);
    const double lx = -fy, ly = fx;
    // Apex at the back, long edge opening toward the heading.
    const double ax = cx - fx * r, ay = cy - fy * r;
    const double b1x = cx + fx * r + lx * r * 0.9;
    const double b1y = cy + fy * r + ly * r * 0.9;
    const double b2x = cx + fx * r - lx * r * 0.9;
    const double b2y = cy + fy * r - ly * r * 0.9;
    const Rgb color = i == 0 ? Rgb{40, 200, 40} : Rgb{220, 40, 40};
    fill_triangle(out.image, ax, ay, b1x, b1y, b2x, b2y, color);
    ++out.glyph_count;
  }
  return out;
}

// --- eval --------------------------------------------------------------

struct EvalCommandOptions {
  std::string checkpoint_path;  // empty = random baseline
  Stratum stratum = Stratum::kBoth;
  int render_episodes = 1;  // trajectory renders per stratum
  int dump_frames = 0;      // seg-image dumps from the first episode
  bool compare_random = false;
};

struct EvalCommandResult {
  std::vector<EvalReport> reports;
  std::string summary_path;
  std::vector<std::string> csv_paths;
  std::vector<std::string> render_paths;
  int render_glyphs_per_episode = 0;
};

inline EvalCommandResult run_eval(const RunConfig& cfg,
                                  const std::string& out_dir,
                                  const EvalCommandOptions& options) {
  std::filesystem::create_directories(out_dir);
  KeyValueMap kv;
  cfg.to_map(kv);
  kv.save(out_dir + "/config.txt");

  std::vector<WorldBundle> worlds;
  for (int i = 0; i < cfg.train.num_eval_worlds; ++i) {
    worlds.push_back(make_world_bundle(eval_world_seed(cfg.seed, i), cfg.world));
  }
  auto proj = std::make_shared<const LocalProjection>(
      build_projection(cfg.camera, cfg.world.cell_size_m));

  LoadedPolicy loaded;
  std::unique_ptr<PolicyNet> net;
  EvalPolicy policy;
  if (!options.checkpoint_path.empty()) {
    loaded = load_policy_checkpoint(options.checkpoint_path);
    net = std::make_unique<PolicyNet>(loaded.config);
    policy.net = net.get();
    policy.params = &loaded.params;
    policy.name = "trained";
  }

  EvalCommandResult result;
  const uint64_t sweep_seed = derive_seed(cfg.seed, seed_stream::kEval, 0);
  auto run_one = [&](const EvalPolicy& p, const std::string& tag) {
    const EvalReport report =
        sweep(p, worlds, proj, options.stratum, cfg.mapping, cfg.reward,
              cfg.sensor_noise, cfg.eval, cfg.train.episode_len, sweep_seed);
    const std::string csv = out_dir + "/eval_" + tag + ".csv";
    write_eval_csv(report, csv);
    result.csv_paths.push_back(csv);
    result.reports.push_back(report);
  };
  run_one(policy, policy.is_random() ? "random" : "trained");
  if (options.compare_random && !policy.is_random()) {
    EvalPolicy baseline;
    run_one(baseline, "random");
  }

  result.summary_path = out_dir + "/summary.txt";
  std::ofstream summary(result.summary_path);
  summary << summary_table(result.reports);

  // Trajectory renders (and optional frame dumps) re-run the first
  // evaluated episodes of each stratum with identical seeds.
  std::vector<Stratum> strata;
  if (options.stratum == Stratum::kBoth) {
    strata = {Stratum::kRooms, Stratum::kCorridors};
  } else {
    strata = {options.stratum};
  }
  NetWorkspace ws;
  for (Stratum s : strata) {
    for (int i = 0; i < options.render_episodes; ++i) {
      const uint64_t tag =
          (s == Stratum::kRooms ? 0x100000u : 0x200000u) +
          static_cast<uint64_t>(i * cfg.eval.episodes_per_start);
      const uint64_t episode_seed = derive_seed(sweep_seed, seed_stream::kEval, tag);
      const int world_index = i % static_cast<int>(worlds.size());
      const WorldBundle& world = worlds[world_index];
      Rng start_rng = make_rng(episode_seed, seed_stream::kStartPose);
      const Pose start = world.starts.sample(s, start_rng);
      ExplorationEnv env(world.plan, proj, cfg.mapping, cfg.sensor_noise,
                         cfg.eval.noise, world.graph->robot_radius_m);
      std::vector<Pose> trace;
      Rng action_rng = make_rng(episode_seed, seed_stream::kEpisode);
      env.reset(start, episode_seed);
      trace.push_back(env.true_pose());
      for (int t = 0; t < cfg.train.episode_len; ++t) {
        env.observe();
        if (s == strata.front() && i == 0 && t < options.dump_frames) {
          std::ostringstream name;
          name << out_dir << "/frame_" << std::setw(4) << std::setfill('0')
               << t << ".pgm";
          write_pgm(name.str(), seg_to_grid(env.frame()));
        }
        std::array<double, kNumActions> probs;
        if (policy.is_random()) {
          probs = random_policy();
        } else {
          probs = policy.net->forward(*policy.params, env.state(), ws).probs;
        }
        const Action action = cfg.eval.greedy
                                  ? greedy_action(probs)
                                  : sample_action(probs, action_rng);
        env.apply_action(action);
        trace.push_back(env.true_pose());
      }
      const TrajectoryRender render =
          render_trajectory(*world.plan, env.scorer_map(), trace);
      std::ostringstream name;
      name << out_dir << "/map_trajectory_" << stratum_name(s) << "_" << i
           << ".ppm";
      write_ppm(name.str(), render.image);
      result.render_paths.push_back(name.str());
      result.render_glyphs_per_episode = render.glyph_count;
      if (s == strata.front() && i == 0 && options.dump_frames > 0) {
        export_aem(env.maps(), out_dir + "/aem");
        export_bem(env.maps(), out_dir + "/bem.pgm");
      }
    }
  }
  return result;
}

// --- plot ---------------------------------------------------------------

struct PlotResult {
  std::string image_path;
  std::vector<double> raw;
  std::vector<double> smoothed;
};

inline std::vector<double> read_csv_column(const std::string& path,
                                           const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty csv: " + path);
  int column_index = -1;
  {
    std::istringstream hs(header);
    std::string name;
    int i = 0;
    while (std::getline(hs, name, ',')) {
      if (name == column) column_index = i;
      ++i;
    }
  }
  if (column_index < 0) {
    throw std::runtime_error("csv has no column named " + column);
  }
  std::vector<double> values;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string fieldvalue;
    int i = 0;
    bool found = false;
    while (std::getline(ls, fieldvalue, ',')) {
      if (i == column_index) {
        try {
          values.push_back(std::stod(fieldvalue));
        } catch (const std::exception&) {
          throw std::runtime_error("csv line " + std::to_string(lineno) +
                                   ": bad number: " + fieldvalue);
        }
        found = true;
        break;
      }
      ++i;
    }
    if (!found) {
      throw std::runtime_error("csv line " + std::to_string(lineno) +
                               ": missing column");
    }
  }
  if (values.empty()) throw std::runtime_error("csv has no data rows: " + path);
  return values;
}

// Renders the raw series (light) and its smoothed version (bold), like a
// training reward curve.
inline PlotResult run_plot(const std::string& csv_path,
                           const std::string& column,
                           const std::string& out_path, double factor) {
  PlotResult result;
  result.raw = read_csv_column(csv_path, column);
  result.smoothed = exponential_smooth(result.raw, factor);
  const int width = 900, height = 500, margin = 40;
  Grid<Rgb> img(width, height, Rgb{255, 255, 255});
  double lo = result.raw[0], hi = result.raw[0];
  for (double v : result.raw) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1.0;
  const auto to_px = [&](size_t i, double v) {
    const double x =
        margin + (width - 2.0 * margin) *
                     (result.raw.size() == 1
                          ? 0.5
                          : double(i) / double(result.raw.size() - 1));
    const double y = margin + (height - 2.0 * margin) * (v - lo) / (hi - lo);
    return std::pair<int, int>(int(std::lround(x)), int(std::lround(y)));
  };
  draw_line(img, margin, margin, margin, height - margin, Rgb{0, 0, 0});
  draw_line(img, margin, margin, width - margin, margin, Rgb{0, 0, 0});
  auto draw_series = [&](const std::vector<double>& series, Rgb color,
                         bool bold) {
    for (size_t i = 1; i < series.size(); ++i) {
      auto [x0, y0] = to_px(i - 1, series[i - 1]);
      auto [x1, y1] = to_px(i, series[i]);
      draw_line(img, x0, y0, x1, y1, color);
      if (bold) {
        draw_line(img, x0, y0 + 1, x1, y1 + 1, color);
        draw_line(img, x0 + 1, y0, x1 + 1, y1, color);
      }
    }
  };
  draw_series(result.raw, Rgb{255, 180, 180}, false);
  draw_series(result.smoothed, Rgb{200, 30, 30}, true);
  write_ppm(out_path, img);
  result.image_path = out_path;
  return result;
}

}  // namespace exmap

#endif  // EXMAP_CLI_HPP_
