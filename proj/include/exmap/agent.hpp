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

#ifndef EXMAP_AGENT_HPP_
#define EXMAP_AGENT_HPP_

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "exmap/checkpoint.hpp"
#include "exmap/config.hpp"
#include "exmap/mapping.hpp"
#include "exmap/rng.hpp"
#include "exmap/world.hpp"

namespace exmap {

struct ConvSpec {
  int out_channels = 8;
  int kernel = 3;
  int stride = 2;
};

// Compact convolutional actor-critic. The trunk and input transform are
// declared in config so runs are reproducible from their config file
// alone; the defaults stay well under the parameter budget.
struct AgentConfig {
  std::vector<ConvSpec> conv = {{8, 4, 4}, {12, 3, 2}, {16, 3, 2}, {16, 3, 2}};
  int fc_units = 128;
  // Input transform: clamp(value * input_scale, -input_clip, +input_clip).
  // Parameter-free, so it does not affect gradient exactness.
  double input_scale = 1.0 / 64.0;
  double input_clip = 4.0;

  std::string conv_string() const {
    std::ostringstream os;
    for (size_t i = 0; i < conv.size(); ++i) {
      if (i) os << ",";
      os << conv[i].out_channels << "x" << conv[i].kernel << "s"
         << conv[i].stride;
    }
    return os.str();
  }

  static std::vector<ConvSpec> parse_conv(const std::string& text) {
    std::vector<ConvSpec> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      ConvSpec spec;
      char x = 0, s = 0;
      std::istringstream f(item);
      if (!(f >> spec.out_channels >> x >> spec.kernel >> s >> spec.stride) ||
          x != 'x' || s != 's' || spec.out_channels <= 0 || spec.kernel <= 0 ||
          spec.stride <= 0) {
        throw std::runtime_error("bad conv spec: " + item);
      }
      out.push_back(spec);
    }
    if (out.empty()) throw std::runtime_error("empty conv spec");
    return out;
  }

  void to_map(KeyValueMap& kv, const std::string& prefix) const {
    kv.set(prefix + "conv", conv_string());
    kv.set_int(prefix + "fc_units", fc_units);
    kv.set_double(prefix + "input_scale", input_scale);
    kv.set_double(prefix + "input_clip", input_clip);
  }

  static AgentConfig from_map(const KeyValueMap& kv,
                              const std::string& prefix) {
    AgentConfig cfg;
    cfg.conv = parse_conv(kv.get_string(prefix + "conv", cfg.conv_string()));
    cfg.fc_units = static_cast<int>(kv.get_int(prefix + "fc_units", cfg.fc_units));
    cfg.input_scale = kv.get_double(prefix + "input_scale", cfg.input_scale);
    cfg.input_clip = kv.get_double(prefix + "input_clip", cfg.input_clip);
    return cfg;
  }
};

struct PolicyOutput {
  std::array<double, kNumActions> logits{};
  std::array<double, kNumActions> probs{};
  double value = 0.0;
  double log_denom = 0.0;  // max(logits) + log(sum exp(logits - max))

  double log_prob(int action) const { return logits[action] - log_denom; }

  double entropy() const {
    double h = 0.0;
    for (int i = 0; i < kNumActions; ++i) {
      h -= probs[i] * (logits[i] - log_denom);
    }
    return h;
  }
};

struct ParamSegment {
  std::string name;
  size_t offset = 0;
  size_t rows = 0;
  size_t cols = 0;  // 1 for biases
  size_t size() const { return rows * cols; }
};

// Scratch buffers reused across forward/backward calls.
struct NetWorkspace {
  std::vector<Eigen::MatrixXd> acts;  // acts[l]: input of conv layer l
  std::vector<Eigen::MatrixXd> cols;  // im2col of acts[l]
  std::vector<Eigen::MatrixXd> pre;   // pre-activation of layer l output
  Eigen::VectorXd fc_pre, fc_act, dfc;
  std::vector<Eigen::MatrixXd> dacts, dcols;
  Eigen::MatrixXd dpre;
};

class PolicyNet {
 public:
  explicit PolicyNet(const AgentConfig& cfg) : cfg_(cfg) {
    int side = StateTensor::kSide;
    int channels = StateTensor::kChannels;
    for (const ConvSpec& spec : cfg.conv) {
      if (side < spec.kernel) {
        throw std::invalid_argument("conv kernel larger than feature map");
      }
      LayerDims d;
      d.in_c = channels;
      d.in_s = side;
      d.k = spec.kernel;
      d.stride = spec.stride;
      d.out_c = spec.out_channels;
      d.out_s = (side - spec.kernel) / spec.stride + 1;
      conv_dims_.push_back(d);
      side = d.out_s;
      channels = d.out_c;
    }
    flat_size_ = channels * side * side;
    if (cfg.fc_units <= 0) throw std::invalid_argument("fc_units must be > 0");

    size_t offset = 0;
    auto add = [&](const std::string& name, size_t rows, size_t cols) {
      segments_.push_back({name, offset, rows, cols});
      offset += rows * cols;
    };
    for (size_t l = 0; l < conv_dims_.size(); ++l) {
      const LayerDims& d = conv_dims_[l];
      add("conv" + std::to_string(l) + "/w", static_cast<size_t>(d.out_c),
          static_cast<size_t>(d.in_c) * d.k * d.k);
      add("conv" + std::to_string(l) + "/b", static_cast<size_t>(d.out_c), 1);
    }
    add("fc/w", static_cast<size_t>(cfg.fc_units), static_cast<size_t>(flat_size_));
    add("fc/b", static_cast<size_t>(cfg.fc_units), 1);
    add("policy/w", kNumActions, static_cast<size_t>(cfg.fc_units));
    add("policy/b", kNumActions, 1);
    add("value/w", 1, static_cast<size_t>(cfg.fc_units));
    add("value/b", 1, 1);
    param_count_ = offset;
  }

  const AgentConfig& config() const { return cfg_; }
  size_t param_count() const { return param_count_; }
  const std::vector<ParamSegment>& segments() const { return segments_; }

  const ParamSegment& segment(const std::string& name) const {
    for (const auto& s : segments_)
      if (s.name == name) return s;
    throw std::runtime_error("no parameter segment named " + name);
  }

  // Orthogonal trunk weights, zero biases, zero-initialized heads: the
  // initial policy is exactly uniform with value 0.
  std::vector<double> init_params(uint64_t seed) const {
    std::vector<double> params(param_count_, 0.0);
    size_t layer_index = 0;
    for (const auto& seg : segments_) {
      const bool head = seg.name.rfind("policy/", 0) == 0 ||
                        seg.name.rfind("value/", 0) == 0;
      const bool bias = seg.cols == 1 && seg.name.back() == 'b';
      if (head || bias) continue;
      Rng rng = make_rng(seed, seed_stream::kAgentInit, layer_index++);
      std::normal_distribution<double> normal(0.0, 1.0);
      const Eigen::Index m = static_cast<Eigen::Index>(seg.rows);
      const Eigen::Index n = static_cast<Eigen::Index>(seg.cols);
      Eigen::MatrixXd a(std::max(m, n), std::min(m, n));
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      Eigen::MatrixXd q = qr.householderQ() *
                          Eigen::MatrixXd::Identity(a.rows(), a.cols());
      const double gain = std::sqrt(2.0);
      Eigen::MatrixXd w = m <= n ? Eigen::MatrixXd(gain * q.transpose())
                                 : Eigen::MatrixXd(gain * q);
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>(
          params.data() + seg.offset, m, n) = w;
    }
    return params;
  }

  PolicyOutput forward(std::span<const double> params,
                       const StateTensor& state, NetWorkspace& ws) const {
    run_forward(params, state, ws);
    return head_output(params, ws);
  }

  PolicyOutput forward(std::span<const double> params,
                       const StateTensor& state) const {
    NetWorkspace ws;
    return forward(params, state, ws);
  }

  // Gradient of
  //   L = -log pi(a|s) * advantage + value_coeff * (V - return_target)^2
  //       - entropy_coeff * H(pi(.|s))
  // with respect to params, accumulated into grad. Returns the forward
  // output computed along the way.
  PolicyOutput backward(std::span<const double> params,
                        const StateTensor& state, int action, double advantage,
                        double return_target, double entropy_coeff,
                        double value_coeff, NetWorkspace& ws,
                        std::span<double> grad) const {
    if (!std::isfinite(advantage) || !std::isfinite(return_target)) {
      throw std::invalid_argument("non-finite advantage or return target");
    }
    if (action < 0 || action >= kNumActions) {
      throw std::invalid_argument("action index out of range");
    }
    if (grad.size() != param_count_) {
      throw std::invalid_argument("gradient buffer has wrong size");
    }
    run_forward(params, state, ws);
    const PolicyOutput out = head_output(params, ws);

    // d(loss)/d(logits) and d(loss)/d(value).
    Eigen::Matrix<double, kNumActions, 1> dlogits;
    const double entropy = out.entropy();
    for (int i = 0; i < kNumActions; ++i) {
      const double logp = out.logits[i] - out.log_denom;
      dlogits(i) = advantage * (out.probs[i] - (i == action ? 1.0 : 0.0)) +
                   entropy_coeff * out.probs[i] * (logp + entropy);
    }
    const double dvalue = 2.0 * value_coeff * (out.value - return_target);

    const size_t L = conv_dims_.size();
    auto wmap = [&](const ParamSegment& s) {
      return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                            Eigen::Dynamic, Eigen::RowMajor>>(
          params.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols));
    };
    auto gmap = [&](const ParamSegment& s) {
      return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                      Eigen::RowMajor>>(
          grad.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols));
    };

    const auto& seg_pw = segment("policy/w");
    const auto& seg_pb = segment("policy/b");
    const auto& seg_vw = segment("value/w");
    const auto& seg_vb = segment("value/b");
    const auto& seg_fw = segment("fc/w");
    const auto& seg_fb = segment("fc/b");

    // Heads.
    gmap(seg_pw).noalias() += dlogits * ws.fc_act.transpose();
    gmap(seg_pb).col(0) += dlogits;
    gmap(seg_vw).noalias() += dvalue * ws.fc_act.transpose();
    grad[seg_vb.offset] += dvalue;

    // Fully connected layer.
    ws.dfc.noalias() = wmap(seg_pw).transpose() * dlogits;
    ws.dfc.noalias() += wmap(seg_vw).transpose() *
                        Eigen::Matrix<double, 1, 1>(dvalue);
    for (int i = 0; i < cfg_.fc_units; ++i) {
      if (ws.fc_pre(i) <= 0.0) ws.dfc(i) = 0.0;
    }
    const Eigen::Map<const Eigen::VectorXd> flat(ws.acts[L].data(),
                                                 flat_size_);
    gmap(seg_fw).noalias() += ws.dfc * flat.transpose();
    gmap(seg_fb).col(0) += ws.dfc;

    if (ws.dacts.size() != L + 1) ws.dacts.resize(L + 1);
    if (ws.dcols.size() != L) ws.dcols.resize(L);
    ws.dacts[L].resize(ws.acts[L].rows(), ws.acts[L].cols());
    Eigen::Map<Eigen::VectorXd>(ws.dacts[L].data(), flat_size_).noalias() =
        wmap(seg_fw).transpose() * ws.dfc;

    // Conv layers, back to front.
    for (size_t li = L; li-- > 0;) {
      const LayerDims& d = conv_dims_[li];
      const auto& seg_w = segments_[2 * li];
      const auto& seg_b = segments_[2 * li + 1];
      ws.dpre = ws.dacts[li + 1];
      const auto& pre = ws.pre[li];
      for (Eigen::Index j = 0; j < ws.dpre.cols(); ++j)
        for (Eigen::Index i = 0; i < ws.dpre.rows(); ++i)
          if (pre(i, j) <= 0.0) ws.dpre(i, j) = 0.0;
      gmap(seg_w).noalias() += ws.dpre * ws.cols[li].transpose();
      gmap(seg_b).col(0) += ws.dpre.rowwise().sum();
      if (li == 0) break;  // input gradients are not needed
      ws.dcols[li].resize(ws.cols[li].rows(), ws.cols[li].cols());
      ws.dcols[li].noalias() = wmap(seg_w).transpose() * ws.dpre;
      col2im(d, ws.dcols[li], ws.dacts[li]);
    }
    return out;
  }

  std::vector<double> backward(std::span<const double> params,
                               const StateTensor& state, int action,
                               double advantage, double return_target,
                               double entropy_coeff,
                               double value_coeff) const {
    NetWorkspace ws;
    std::vector<double> grad(param_count_, 0.0);
    backward(params, state, action, advantage, return_target, entropy_coeff,
             value_coeff, ws, grad);
    return grad;
  }

 private:
  struct LayerDims {
    int in_c, in_s, out_c, out_s, k, stride;
  };

  void run_forward(std::span<const double> params, const StateTensor& state,
                   NetWorkspace& ws) const {
    if (params.size() != param_count_) {
      throw std::invalid_argument("parameter vector has wrong size");
    }
    const size_t L = conv_dims_.size();
    if (ws.acts.size() != L + 1) ws.acts.resize(L + 1);
    if (ws.cols.size() != L) ws.cols.resize(L);
    if (ws.pre.size() != L) ws.pre.resize(L);

    // Input transform; rejects non-finite values.
    const int side = StateTensor::kSide;
    ws.acts[0].resize(StateTensor::kChannels, side * side);
    const double scale = cfg_.input_scale, clip = cfg_.input_clip;
    for (int c = 0; c < StateTensor::kChannels; ++c) {
      const float* src = &state.data[static_cast<size_t>(c) * side * side];
      for (int p = 0; p < side * side; ++p) {
        const double v = static_cast<double>(src[p]);
        if (!std::isfinite(v)) {
          throw std::invalid_argument("non-finite state value");
        }
        ws.acts[0](c, p) = std::clamp(v * scale, -clip, clip);
      }
    }

    for (size_t l = 0; l < L; ++l) {
      const LayerDims& d = conv_dims_[l];
      im2col(d, ws.acts[l], ws.cols[l]);
      const auto& seg_w = segments_[2 * l];
      const auto& seg_b = segments_[2 * l + 1];
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                           Eigen::Dynamic, Eigen::RowMajor>>
          w(params.data() + seg_w.offset, d.out_c,
            static_cast<Eigen::Index>(seg_w.cols));
      const Eigen::Map<const Eigen::VectorXd> b(params.data() + seg_b.offset,
                                                d.out_c);
      ws.pre[l].resize(d.out_c, d.out_s * d.out_s);
      ws.pre[l].noalias() = w * ws.cols[l];
      ws.pre[l].colwise() += b;
      ws.acts[l + 1] = ws.pre[l].cwiseMax(0.0);
    }

    const auto& seg_fw = segment("fc/w");
    const auto& seg_fb = segment("fc/b");
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>
        wfc(params.data() + seg_fw.offset, cfg_.fc_units, flat_size_);
    const Eigen::Map<const Eigen::VectorXd> bfc(params.data() + seg_fb.offset,
                                                cfg_.fc_units);
    const Eigen::Map<const Eigen::VectorXd> flat(ws.acts[L].data(),
                                                 flat_size_);
    ws.fc_pre.noalias() = wfc * flat;
    ws.fc_pre += bfc;
    ws.fc_act = ws.fc_pre.cwiseMax(0.0);
  }

  PolicyOutput head_output(std::span<const double> params,
                           NetWorkspace& ws) const {
    const auto& seg_pw = segment("policy/w");
    const auto& seg_pb = segment("policy/b");
    const auto& seg_vw = segment("value/w");
    const auto& seg_vb = segment("value/b");
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                         Eigen::Dynamic, Eigen::RowMajor>>
        wp(params.data() + seg_pw.offset, kNumActions, cfg_.fc_units);
    const Eigen::Map<const Eigen::VectorXd> bp(params.data() + seg_pb.offset,
                                               kNumActions);
    const Eigen::Map<const Eigen::Matrix<double, 1, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        wv(params.data() + seg_vw.offset, 1, cfg_.fc_units);

    PolicyOutput out;
    Eigen::Matrix<double, kNumActions, 1> logits = wp * ws.fc_act + bp;
    out.value = (wv * ws.fc_act)(0) + params[seg_vb.offset];
    double max_logit = logits(0);
    for (int i = 1; i < kNumActions; ++i) max_logit = std::max(max_logit, logits(i));
    double denom = 0.0;
    for (int i = 0; i < kNumActions; ++i) denom += std::exp(logits(i) - max_logit);
    out.log_denom = max_logit + std::log(denom);
    for (int i = 0; i < kNumActions; ++i) {
      out.logits[i] = logits(i);
      out.probs[i] = std::exp(logits(i) - max_logit) / denom;
    }
    return out;
  }

  void im2col(const LayerDims& d, const Eigen::MatrixXd& x,
              Eigen::MatrixXd& col) const {
    col.resize(static_cast<Eigen::Index>(d.in_c) * d.k * d.k,
               static_cast<Eigen::Index>(d.out_s) * d.out_s);
    for (int oy = 0; oy < d.out_s; ++oy) {
      for (int ox = 0; ox < d.out_s; ++ox) {
        const Eigen::Index p = static_cast<Eigen::Index>(oy) * d.out_s + ox;
        Eigen::Index r = 0;
        for (int c = 0; c < d.in_c; ++c) {
          for (int ky = 0; ky < d.k; ++ky) {
            const int iy = oy * d.stride + ky;
            const Eigen::Index base = static_cast<Eigen::Index>(iy) * d.in_s +
                                      ox * d.stride;
            for (int kx = 0; kx < d.k; ++kx) {
              col(r++, p) = x(c, base + kx);
            }
          }
        }
      }
    }
  }

  void col2im(const LayerDims& d, const Eigen::MatrixXd& dcol,
              Eigen::MatrixXd& dx) const {
    dx.resize(d.in_c, static_cast<Eigen::Index>(d.in_s) * d.in_s);
    dx.setZero();
    for (int oy = 0; oy < d.out_s; ++oy) {
      for (int ox = 0; ox < d.out_s; ++ox) {
        const Eigen::Index p = static_cast<Eigen::Index>(oy) * d.out_s + ox;
        Eigen::Index r = 0;
        for (int c = 0; c < d.in_c; ++c) {
          for (int ky = 0; ky < d.k; ++ky) {
            const int iy = oy * d.stride + ky;
            const Eigen::Index base = static_cast<Eigen::Index>(iy) * d.in_s +
                                      ox * d.stride;
            for (int kx = 0; kx < d.k; ++kx) {
              dx(c, base + kx) += dcol(r++, p);
            }
          }
        }
      }
    }
  }

  AgentConfig cfg_;
  std::vector<LayerDims> conv_dims_;
  int flat_size_ = 0;
  std::vector<ParamSegment> segments_;
  size_t param_count_ = 0;
};

// Samples from the action distribution; deterministic for a fixed rng
// stream.
inline Action sample_action(const std::array<double, kNumActions>& probs,
                            Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0.0;
  for (int i = 0; i < kNumActions; ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<Action>(i);
  }
  return static_cast<Action>(kNumActions - 1);
}

// Argmax with ties resolved to the lowest index.
inline Action greedy_action(const std::array<double, kNumActions>& probs) {
  int best = 0;
  for (int i = 1; i < kNumActions; ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<Action>(best);
}

inline std::array<double, kNumActions> random_policy() {
  std::array<double, kNumActions> p;
  p.fill(1.0 / kNumActions);
  return p;
}

// --- checkpoint glue ---

inline void add_policy_segments(Checkpoint& ck, const PolicyNet& net,
                                std::span<const double> params) {
  KeyValueMap meta;
  net.config().to_map(meta, "agent.");
  ck.add(CheckpointSegment::from_bytes("meta/agent_config", meta.serialize()));
  for (const auto& seg : net.segments()) {
    std::vector<float> data(seg.size());
    for (size_t i = 0; i < data.size(); ++i) {
      data[i] = static_cast<float>(params[seg.offset + i]);
    }
    ck.add(CheckpointSegment::from_f32(
        "params/" + seg.name, data,
        {static_cast<uint64_t>(seg.rows), static_cast<uint64_t>(seg.cols)}));
  }
}

inline void save_policy_checkpoint(const std::string& path,
                                   const PolicyNet& net,
                                   std::span<const double> params) {
  Checkpoint ck;
  add_policy_segments(ck, net, params);
  ck.save(path);
}

struct LoadedPolicy {
  AgentConfig config;
  std::vector<double> params;
  Checkpoint checkpoint;
};

// Rebuilds the network layout from the embedded config and checks every
// stored segment against it; shape mismatches are rejected.
inline LoadedPolicy load_policy_checkpoint(const std::string& path) {
  LoadedPolicy out;
  out.checkpoint = Checkpoint::load(path);
  const KeyValueMap meta =
      KeyValueMap::parse(out.checkpoint.get("meta/agent_config").as_string());
  out.config = AgentConfig::from_map(meta, "agent.");
  PolicyNet net(out.config);
  out.params.assign(net.param_count(), 0.0);
  for (const auto& seg : net.segments()) {
    const CheckpointSegment& stored = out.checkpoint.get("params/" + seg.name);
    if (stored.shape.size() != 2 || stored.shape[0] != seg.rows ||
        stored.shape[1] != seg.cols ||
        stored.element_count() != seg.size()) {
      throw std::runtime_error("checkpoint segment " + seg.name +
                               " has mismatched shape");
    }
    const std::vector<float> data = stored.as_f32();
    for (size_t i = 0; i < data.size(); ++i) {
      out.params[seg.offset + i] = static_cast<double>(data[i]);
    }
  }
  return out;
}

}  // namespace exmap

#endif  // EXMAP_AGENT_HPP_
