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

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "exmap/cli.hpp"

namespace {

exmap::RunConfig resolve_config(const std::string& config_path,
                                const std::vector<std::string>& overrides,
                                bool seed_set, uint64_t seed) {
  exmap::KeyValueMap kv;
  if (!config_path.empty()) {
    kv.merge_from(exmap::KeyValueMap::load(config_path));
  }
  for (const std::string& kvpair : overrides) {
    const auto eq = kvpair.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--set expects key=value, got: " + kvpair);
    }
    kv.set(kvpair.substr(0, eq), kvpair.substr(eq + 1));
  }
  exmap::RunConfig cfg = exmap::RunConfig::from_map(kv);
  if (seed_set) cfg.seed = seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exmap: 2D indoor exploration-and-mapping simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "runs/out";
  uint64_t seed = 1;
  bool seed_set = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "config file (key = value lines)");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--set", overrides, "override a config key, e.g. --set train.total_steps=1000");

  auto* genworld = app.add_subcommand("genworld", "generate a floorplan");
  bool no_preview = false;
  genworld->add_flag("--no-preview", no_preview, "skip the preview image");

  auto* train = app.add_subcommand("train", "train the exploration policy");
  std::string resume_path;
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* eval = app.add_subcommand("eval", "evaluate a policy on held-out worlds");
  std::string checkpoint_path;
  std::string stratum_name = "both";
  std::string mode;
  int render_episodes = 1;
  int dump_frames = 0;
  bool compare_random = false;
  eval->add_option("--checkpoint", checkpoint_path,
                   "policy checkpoint (omit for the random baseline)");
  eval->add_option("--stratum", stratum_name, "rooms|corridors|both");
  eval->add_option("--mode", mode, "greedy|stochastic");
  eval->add_option("--render", render_episodes, "trajectory renders per stratum");
  eval->add_option("--dump-frames", dump_frames,
                   "dump the first N sensor frames as graymaps");
  eval->add_flag("--compare-random", compare_random,
                 "also run the seed-paired random baseline");

  auto* plot = app.add_subcommand("plot", "render a reward curve from a CSV");
  std::string csv_path;
  std::string column = "episode_return";
  std::string plot_out = "curve.ppm";
  double factor = 0.85;
  plot->add_option("--csv", csv_path, "input csv")->required();
  plot->add_option("--column", column, "column to plot");
  plot->add_option("--out", plot_out, "output image (ppm)");
  plot->add_option("--factor", factor, "smoothing factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (genworld->parsed()) {
      const exmap::RunConfig cfg =
          resolve_config(config_path, overrides, seed_set, seed);
      const exmap::GenworldResult r =
          exmap::run_genworld(cfg, out_dir, !no_preview);
      std::printf("world: %s (%dx%d cells, %d free)\n", r.base_path.c_str(),
                  r.width_cells, r.height_cells, r.free_cells);
      std::printf("graph: %zu nodes, %zu edges\n", r.node_count, r.edge_count);
    } else if (train->parsed()) {
      exmap::RunConfig cfg =
          resolve_config(config_path, overrides, seed_set, seed);
      exmap::Trainer trainer(cfg, out_dir);
      const exmap::TrainResult r = trainer.train(resume_path);
      std::printf("trained %llu env steps (%llu episodes)\n",
                  static_cast<unsigned long long>(r.env_steps),
                  static_cast<unsigned long long>(r.episodes));
      std::printf("checkpoint: %s\n", r.checkpoint_path.c_str());
      std::printf("train log:  %s\n", r.train_log_path.c_str());
    } else if (eval->parsed()) {
      exmap::RunConfig cfg =
          resolve_config(config_path, overrides, seed_set, seed);
      if (mode == "greedy") {
        cfg.eval.greedy = true;
      } else if (mode == "stochastic") {
        cfg.eval.greedy = false;
      } else if (!mode.empty()) {
        throw std::runtime_error("--mode must be greedy or stochastic");
      }
      exmap::EvalCommandOptions options;
      options.checkpoint_path = checkpoint_path;
      options.render_episodes = render_episodes;
      options.dump_frames = dump_frames;
      options.compare_random = compare_random;
      if (stratum_name == "rooms") {
        options.stratum = exmap::Stratum::kRooms;
      } else if (stratum_name == "corridors") {
        options.stratum = exmap::Stratum::kCorridors;
      } else if (stratum_name == "both") {
        options.stratum = exmap::Stratum::kBoth;
      } else {
        throw std::runtime_error("--stratum must be rooms, corridors or both");
      }
      const exmap::EvalCommandResult r = exmap::run_eval(cfg, out_dir, options);
      std::ifstream summary(r.summary_path);
      std::printf("%s", std::string(std::istreambuf_iterator<char>(summary),
                                    std::istreambuf_iterator<char>())
                            .c_str());
      std::printf("summary: %s\n", r.summary_path.c_str());
    } else if (plot->parsed()) {
      const exmap::PlotResult r =
          exmap::run_plot(csv_path, column, plot_out, factor);
      std::printf("plotted %zu points -> %s\n", r.raw.size(),
                  r.image_path.c_str());
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
