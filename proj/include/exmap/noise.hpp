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

#ifndef EXMAP_NOISE_HPP_
#define EXMAP_NOISE_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "exmap/rng.hpp"

namespace exmap {

// Gaussian localization noise applied to the believed per-step motion.
// Added every step, so the believed pose drifts as a random walk.
struct NoiseSpec {
  double translation_mu_m = 0.0;
  double translation_sigma_m = 0.0;
  double orientation_mu_rad = 0.0;
  double orientation_sigma_rad = 0.0;
  uint64_t seed = 0;

  bool zero() const {
    return translation_mu_m == 0.0 && translation_sigma_m == 0.0 &&
           orientation_mu_rad == 0.0 && orientation_sigma_rad == 0.0;
  }

  void validate() const {
    if (translation_sigma_m < 0 || orientation_sigma_rad < 0) {
      throw std::invalid_argument("noise sigma must be >= 0");
    }
  }
};

struct PoseDelta {
  double dx_m = 0.0;
  double dy_m = 0.0;
  double dtheta_rad = 0.0;
};

// believed = true + sample(mu, sigma) per component (x, y, theta, in that
// order). Disabled components draw nothing, so a zero spec consumes no
// randomness and reproduces the noise-free stream bit for bit.
inline PoseDelta apply_pose_noise(const PoseDelta& true_delta,
                                  const NoiseSpec& spec, Rng& rng) {
  PoseDelta believed = true_delta;
  auto draw = [&](double mu, double sigma) {
    if (mu == 0.0 && sigma == 0.0) return 0.0;
    double n = 0.0;
    if (sigma > 0.0) {
      n = std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    return mu + sigma * n;
  };
  believed.dx_m += draw(spec.translation_mu_m, spec.translation_sigma_m);
  believed.dy_m += draw(spec.translation_mu_m, spec.translation_sigma_m);
  believed.dtheta_rad +=
      draw(spec.orientation_mu_rad, spec.orientation_sigma_rad);
  return believed;
}

}  // namespace exmap

#endif  // EXMAP_NOISE_HPP_
