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

#ifndef EXMAP_TRAINER_HPP_
#define EXMAP_TRAINER_HPP_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "exmap/env.hpp"
#include "exmap/eval.hpp"
#include "exmap/run_config.hpp"

namespace exmap {

struct Rollout {
  struct Step {
    int action = 0;
    double reward = 0.0;  // scaled reward fed to the learner
    double value = 0.0;
  };
  std::vector<Step> steps;
  double bootstrap_value = 0.0;  // 0 when the episode terminated

  void clear() { steps.clear(); }
};

struct ReturnTarget {
  double return_target = 0.0;
  double advantage = 0.0;
};

// n-step bootstrapped returns: R_i = r_i + discount * R_{i+1}, seeded by
// the bootstrap value; advantage_i = R_i - V(s_i).
inline std::vector<ReturnTarget> compute_returns(const Rollout& rollout,
                                                 double discount) {
  std::vector<ReturnTarget> out(rollout.steps.size());
  double running = rollout.bootstrap_value;
  for (size_t i = rollout.steps.size(); i-- > 0;) {
    running = rollout.steps[i].reward + discount * running;
    out[i].return_target = running;
    out[i].advantage = running - rollout.steps[i].value;
  }
  return out;
}

// Shared parameter store: workers read snapshots and apply gradient
// deltas one at a time (adaptive-moment update).
class ParamStore {
 public:
  ParamStore(std::vector<double> initial, double learning_rate, double beta1,
             double beta2, double eps)
      : params_(std::move(initial)),
        m_(params_.size(), 0.0),
        v_(params_.size(), 0.0),
        lr_(learning_rate),
        beta1_(beta1),
        beta2_(beta2),
        eps_(eps) {}

  void snapshot(std::vector<double>& out) const {
    std::lock_guard<std::mutex> lock(mutex_);
    out = params_;
  }

  void apply_gradient(std::span<const double> grad) {
    std::lock_guard<std::mutex> lock(mutex_);
    ++opt_step_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(opt_step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(opt_step_));
    for (size_t i = 0; i < params_.size(); ++i) {
      const double g = grad[i];
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      params_[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }

  uint64_t opt_step() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return opt_step_;
  }

  // Resume support: full optimizer state.
  struct State {
    std::vector<double> params, m, v;
    uint64_t opt_step;
  };
  State state() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return {params_, m_, v_, opt_step_};
  }
  void restore(const State& s) {
    std::lock_guard<std::mutex> lock(mutex_);
    params_ = s.params;
    m_ = s.m;
    v_ = s.v;
    opt_step_ = s.opt_step;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<double> params_;
  std::vector<double> m_, v_;
  uint64_t opt_step_ = 0;
  double lr_, beta1_, beta2_, eps_;
};

struct TrainLogRow {
  uint64_t step = 0;
  int worker_id = 0;
  uint64_t episode_index = 0;
  double episode_return = 0.0;
  double explored_area_m2 = 0.0;
  int collisions = 0;
  long fp_pixels = 0;
};

struct EvalLogRow {
  uint64_t step = 0;
  double mean_return = 0.0;
  double mean_area_m2 = 0.0;
  int episodes = 0;
};

struct TrainResult {
  std::string run_dir;
  std::string checkpoint_path;
  std::string train_log_path;
  std::string eval_log_path;
  uint64_t env_steps = 0;
  uint64_t episodes = 0;
  std::vector<TrainLogRow> train_rows;
  std::vector<EvalLogRow> eval_rows;
};

// Exponential smoothing with s_0 = x_0 and
// s_i = factor * s_{i-1} + (1 - factor) * x_i.
inline std::vector<double> exponential_smooth(const std::vector<double>& xs,
                                              double factor) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    out[i] = i == 0 ? xs[0] : factor * out[i - 1] + (1.0 - factor) * xs[i];
  }
  return out;
}

class Trainer {
 public:
  Trainer(RunConfig cfg, std::string run_dir)
      : cfg_(std::move(cfg)), run_dir_(std::move(run_dir)), net_(cfg_.agent) {
    cfg_.train.validate();
    cfg_.reward.validate();
    cfg_.camera.validate();
    std::filesystem::create_directories(run_dir_);
  }

  // Runs training to total_steps (resuming from a checkpoint when given)
  // and writes the run directory: resolved config, per-episode train log,
  // smoothed reward curve, periodic-eval log, checkpoints.
  TrainResult train(const std::string& resume_from = "") {
    KeyValueMap kv;
    cfg_.to_map(kv);
    kv.save(run_dir_ + "/config.txt");

    build_worlds();
    auto proj = std::make_shared<const LocalProjection>(
        build_projection(cfg_.camera, cfg_.world.cell_size_m));
    proj_ = proj;

    std::vector<double> initial =
        net_.init_params(derive_seed(cfg_.seed, seed_stream::kAgentInit));
    store_ = std::make_unique<ParamStore>(
        std::move(initial), cfg_.train.learning_rate, cfg_.train.adam_beta1,
        cfg_.train.adam_beta2, cfg_.train.adam_eps);
    episodes_done_ = 0;
    steps_claimed_ = 0;
    env_steps_done_ = 0;
    if (!resume_from.empty()) restore_resume_state(resume_from);

    train_rows_.clear();
    eval_rows_.clear();

    if (cfg_.train.total_steps > env_steps_done_) {
      const int worker_count = cfg_.train.num_workers;
      std::vector<std::thread> workers;
      for (int w = 1; w < worker_count; ++w) {
        workers.emplace_back([this, w] { worker_loop(w); });
      }
      worker_loop(0);
      for (auto& t : workers) t.join();
    }

    TrainResult result;
    result.run_dir = run_dir_;
    result.env_steps = env_steps_done_.load();
    result.episodes = episodes_done_.load();
    result.train_log_path = run_dir_ + "/train_log.csv";
    result.eval_log_path = run_dir_ + "/eval_log.csv";
    write_logs();
    result.checkpoint_path = run_dir_ + "/checkpoint_final.ckpt";
    save_checkpoint(result.checkpoint_path);
    result.train_rows = train_rows_;
    result.eval_rows = eval_rows_;
    return result;
  }

  const PolicyNet& net() const { return net_; }
  const std::vector<WorldBundle>& eval_worlds() const { return eval_worlds_; }

 private:
  void build_worlds() {
    train_worlds_.clear();
    eval_worlds_.clear();
    for (int i = 0; i < cfg_.train.num_train_worlds; ++i) {
      train_worlds_.push_back(
          make_world_bundle(train_world_seed(cfg_.seed, i), cfg_.world));
    }
    for (int i = 0; i < cfg_.train.num_eval_worlds; ++i) {
      eval_worlds_.push_back(
          make_world_bundle(eval_world_seed(cfg_.seed, i), cfg_.world));
    }
  }

  void worker_loop(int worker_id) {
    NetWorkspace ws;
    std::vector<double> snapshot;
    store_->snapshot(snapshot);
    std::vector<double> grad(net_.param_count(), 0.0);
    std::vector<StateTensor> rollout_states(cfg_.train.local_steps);
    Rollout rollout;
    rollout.steps.reserve(cfg_.train.local_steps);

    const auto episode_len = static_cast<uint64_t>(cfg_.train.episode_len);
    while (true) {
      const uint64_t claimed = steps_claimed_.fetch_add(episode_len);
      if (claimed >= cfg_.train.total_steps) break;
      const uint64_t episode_index = episodes_done_.fetch_add(1);
      run_training_episode(worker_id, episode_index, ws, snapshot, grad,
                           rollout_states, rollout);
      const uint64_t steps_after = env_steps_done_.fetch_add(episode_len) +
                                   episode_len;
      maybe_eval_and_checkpoint(steps_after - episode_len, steps_after);
    }
  }

  void run_training_episode(int worker_id, uint64_t episode_index,
                            NetWorkspace& ws, std::vector<double>& snapshot,
                            std::vector<double>& grad,
                            std::vector<StateTensor>& rollout_states,
                            Rollout& rollout) {
    const WorldBundle& world =
        train_worlds_[episode_index % train_worlds_.size()];
    const uint64_t episode_seed =
        derive_seed(cfg_.seed, seed_stream::kEpisode, episode_index);
    Rng start_rng = make_rng(episode_seed, seed_stream::kStartPose);
    const Stratum stratum =
        std::uniform_real_distribution<double>(0.0, 1.0)(start_rng) <
                cfg_.train.start_room_fraction
            ? Stratum::kRooms
            : Stratum::kCorridors;
    const Pose start = world.starts.sample(stratum, start_rng);

    ExplorationEnv env(world.plan, proj_, cfg_.mapping, cfg_.sensor_noise,
                       NoiseSpec{}, world.graph->robot_radius_m);
    env.reset(start, episode_seed);
    Rng action_rng = make_rng(episode_seed, seed_stream::kEpisode);

    store_->snapshot(snapshot);
    rollout.clear();
    rollout.bootstrap_value = 0.0;
    double episode_return_raw = 0.0;

    for (int t = 0; t < cfg_.train.episode_len; ++t) {
      const ExplorationEnv::Observation obs = env.observe();
      PolicyOutput out = net_.forward(snapshot, env.state(), ws);
      // A full rollout is closed by the next state's value estimate under
      // the same parameter snapshot; after the update the current step is
      // re-evaluated under the refreshed snapshot.
      if (static_cast<int>(rollout.steps.size()) == cfg_.train.local_steps) {
        rollout.bootstrap_value = out.value;
        apply_update(ws, snapshot, grad, rollout_states, rollout);
        out = net_.forward(snapshot, env.state(), ws);
      }
      rollout_states[rollout.steps.size()] = env.state();
      const Action action = sample_action(out.probs, action_rng);
      const bool collided = env.apply_action(action);
      const double reward_raw = reward_total(obs.new_free_cells,
                                             obs.fp_pixels, collided,
                                             cfg_.reward);
      episode_return_raw += reward_raw;
      rollout.steps.push_back({static_cast<int>(action),
                               reward_raw * cfg_.reward.reward_scale,
                               out.value});
    }
    if (!rollout.steps.empty()) {
      rollout.bootstrap_value = 0.0;  // fixed-length episodes terminate here
      apply_update(ws, snapshot, grad, rollout_states, rollout);
    }

    TrainLogRow row;
    row.worker_id = worker_id;
    row.episode_index = episode_index;
    row.step = env_steps_done_.load() + cfg_.train.episode_len;
    row.episode_return = episode_return_raw;
    row.explored_area_m2 = env.explored_area_m2();
    row.collisions = env.collisions();
    row.fp_pixels = env.total_fp_pixels();
    {
      std::lock_guard<std::mutex> lock(log_mutex_);
      train_rows_.push_back(row);
    }
  }

  void apply_update(NetWorkspace& ws, std::vector<double>& snapshot,
                    std::vector<double>& grad,
                    const std::vector<StateTensor>& states, Rollout& rollout) {
    const auto targets = compute_returns(rollout, cfg_.train.discount);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (size_t i = 0; i < rollout.steps.size(); ++i) {
      net_.backward(snapshot, states[i], rollout.steps[i].action,
                    targets[i].advantage, targets[i].return_target,
                    cfg_.train.entropy_coeff, cfg_.train.value_coeff, ws,
                    grad);
    }
    const double inv = 1.0 / static_cast<double>(rollout.steps.size());
    for (double& g : grad) g *= inv;
    store_->apply_gradient(grad);
    store_->snapshot(snapshot);
    rollout.clear();
  }

  void maybe_eval_and_checkpoint(uint64_t steps_before, uint64_t steps_after) {
    if (cfg_.train.eval_every > 0 &&
        steps_before / cfg_.train.eval_every !=
            steps_after / cfg_.train.eval_every) {
      run_midtrain_eval(steps_after);
    }
    if (cfg_.train.checkpoint_every > 0 &&
        steps_before / cfg_.train.checkpoint_every !=
            steps_after / cfg_.train.checkpoint_every) {
      std::lock_guard<std::mutex> lock(checkpoint_mutex_);
      save_checkpoint(run_dir_ + "/checkpoint_step" +
                      std::to_string(steps_after) + ".ckpt");
    }
  }

  void run_midtrain_eval(uint64_t at_step) {
    std::vector<double> params;
    store_->snapshot(params);
    EvalPolicy policy;
    policy.net = &net_;
    policy.params = &params;
    policy.name = "train-eval";
    EvalConfig options;
    options.starts_per_stratum = std::max(1, cfg_.train.eval_episodes / 2);
    options.greedy = true;
    options.threads = 1;  // already inside a worker thread
    const uint64_t sweep_seed =
        derive_seed(cfg_.seed, seed_stream::kEval, at_step);
    const EvalReport report =
        sweep(policy, eval_worlds_, proj_, Stratum::kBoth, cfg_.mapping,
              cfg_.reward, cfg_.sensor_noise, options, cfg_.train.episode_len,
              sweep_seed);
    EvalLogRow row;
    row.step = at_step;
    row.episodes = static_cast<int>(report.records.size());
    double ret = 0.0, area = 0.0;
    for (const auto& r : report.records) {
      ret += r.return_raw;
      area += r.area_m2;
    }
    if (!report.records.empty()) {
      ret /= report.records.size();
      area /= report.records.size();
    }
    row.mean_return = ret;
    row.mean_area_m2 = area;
    {
      std::lock_guard<std::mutex> lock(log_mutex_);
      eval_rows_.push_back(row);
    }
  }

  void save_checkpoint(const std::string& path) {
    const ParamStore::State s = store_->state();
    Checkpoint ck;
    add_policy_segments(ck, net_, s.params);
    ck.add(CheckpointSegment::from_f64("resume/params_f64", s.params,
                                       {s.params.size()}));
    ck.add(CheckpointSegment::from_f64("resume/adam_m", s.m, {s.m.size()}));
    ck.add(CheckpointSegment::from_f64("resume/adam_v", s.v, {s.v.size()}));
    ck.add(CheckpointSegment::from_u64("resume/opt_step", s.opt_step));
    ck.add(CheckpointSegment::from_u64("resume/episodes_done",
                                       episodes_done_.load()));
    ck.add(CheckpointSegment::from_u64("resume/env_steps",
                                       env_steps_done_.load()));
    KeyValueMap kv;
    cfg_.to_map(kv);
    ck.add(CheckpointSegment::from_bytes("meta/run_config", kv.serialize()));
    ck.save(path);
  }

  void restore_resume_state(const std::string& path) {
    const Checkpoint ck = Checkpoint::load(path);
    ParamStore::State s;
    s.params = ck.get("resume/params_f64").as_f64();
    s.m = ck.get("resume/adam_m").as_f64();
    s.v = ck.get("resume/adam_v").as_f64();
    s.opt_step = ck.get("resume/opt_step").as_u64();
    if (s.params.size() != net_.param_count()) {
      throw std::runtime_error("resume checkpoint has mismatched sizes");
    }
    store_->restore(s);
    episodes_done_ = ck.get("resume/episodes_done").as_u64();
    env_steps_done_ = ck.get("resume/env_steps").as_u64();
    steps_claimed_ = env_steps_done_.load();
  }

  void write_logs() {
    std::sort(train_rows_.begin(), train_rows_.end(),
              [](const TrainLogRow& a, const TrainLogRow& b) {
                return a.episode_index < b.episode_index;
              });
    {
      std::ofstream out(run_dir_ + "/train_log.csv");
      out << "step,worker_id,episode_return,explored_area_m2,collisions,"
             "fp_pixels\n";
      out.precision(10);
      for (const auto& r : train_rows_) {
        out << r.step << "," << r.worker_id << "," << r.episode_return << ","
            << r.explored_area_m2 << "," << r.collisions << "," << r.fp_pixels
            << "\n";
      }
    }
    {
      std::vector<double> returns;
      returns.reserve(train_rows_.size());
      for (const auto& r : train_rows_) returns.push_back(r.episode_return);
      const std::vector<double> smooth = exponential_smooth(returns, 0.85);
      std::ofstream out(run_dir_ + "/train_curve_smoothed.csv");
      out << "episode,step,episode_return,episode_return_smoothed\n";
      out.precision(10);
      for (size_t i = 0; i < train_rows_.size(); ++i) {
        out << train_rows_[i].episode_index << "," << train_rows_[i].step
            << "," << returns[i] << "," << smooth[i] << "\n";
      }
    }
    {
      std::sort(eval_rows_.begin(), eval_rows_.end(),
                [](const EvalLogRow& a, const EvalLogRow& b) {
                  return a.step < b.step;
                });
      std::ofstream out(run_dir_ + "/eval_log.csv");
      out << "step,mean_return,mean_area_m2,episodes\n";
      out.precision(10);
      for (const auto& r : eval_rows_) {
        out << r.step << "," << r.mean_return << "," << r.mean_area_m2 << ","
            << r.episodes << "\n";
      }
    }
  }

  RunConfig cfg_;
  std::string run_dir_;
  PolicyNet net_;
  std::vector<WorldBundle> train_worlds_;
  std::vector<WorldBundle> eval_worlds_;
  std::shared_ptr<const LocalProjection> proj_;
  std::unique_ptr<ParamStore> store_;

  std::atomic<uint64_t> episodes_done_{0};
  std::atomic<uint64_t> steps_claimed_{0};
  std::atomic<uint64_t> env_steps_done_{0};
  std::mutex log_mutex_;
  std::mutex checkpoint_mutex_;
  std::vector<TrainLogRow> train_rows_;
  std::vector<EvalLogRow> eval_rows_;
};

}  // namespace exmap

#endif  // EXMAP_TRAINER_HPP_
