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

#ifndef EXMAP_RNG_HPP_
#define EXMAP_RNG_HPP_

#include <cstdint>
#include <random>

namespace exmap {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stateless derivation of independent seed streams. Every piece of
// randomness in a run is keyed as derive_seed(master, stream, index),
// so replaying any (stream, index) pair is reproducible in isolation.
inline uint64_t derive_seed(uint64_t master, uint64_t stream,
                            uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, uint64_t stream, uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

// Stream tags used across the project (values are arbitrary but frozen;
// changing them changes every seeded run).
namespace seed_stream {
constexpr uint64_t kWorldGen = 1;
constexpr uint64_t kSensorNoise = 2;
constexpr uint64_t kEpisode = 3;
constexpr uint64_t kAgentInit = 4;
constexpr uint64_t kStartPose = 5;
constexpr uint64_t kPoseNoise = 6;
constexpr uint64_t kEval = 7;
}  // namespace seed_stream

}  // namespace exmap

#endif  // EXMAP_RNG_HPP_
