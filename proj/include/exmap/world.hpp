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

#ifndef EXMAP_WORLD_HPP_
#define EXMAP_WORLD_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "exmap/grid.hpp"
#include "exmap/rng.hpp"

namespace exmap {

// The world is a grid of square cells; cell (x, y) is centered at
// (x * cell_size, y * cell_size) in meters, +x east, +y north. Robot
// poses sit on cell centers with one of four cardinal headings.

enum class RegionLabel : uint8_t { kNone = 0, kCorridor = 1, kRoom = 2 };

enum class CellClass : uint8_t {
  kWall = 0,
  kFloor = 1,
  kClutter = 2,
  kDoorFrame = 3,
};

struct Floorplan {
  double cell_size_m = 0.05;
  Grid<uint8_t> occupancy;   // 1 = occupied
  Grid<uint8_t> region;      // RegionLabel
  Grid<uint8_t> cell_class;  // CellClass

  int width_cells() const { return occupancy.width(); }
  int height_cells() const { return occupancy.height(); }

  // Out-of-bounds counts as occupied.
  bool occupied(int x, int y) const {
    return !occupancy.in_bounds(x, y) || occupancy.at(x, y) != 0;
  }
  bool free(int x, int y) const { return !occupied(x, y); }

  int count_free() const {
    int n = 0;
    for (int y = 0; y < height_cells(); ++y)
      for (int x = 0; x < width_cells(); ++x)
        if (occupancy.at(x, y) == 0) ++n;
    return n;
  }

  // Number of semantic classes the plan can distinguish, in merge order
  // floor, wall, clutter, door frame.
  int available_classes() const {
    bool has_clutter = false, has_door = false;
    for (int y = 0; y < height_cells(); ++y) {
      for (int x = 0; x < width_cells(); ++x) {
        const auto c = static_cast<CellClass>(cell_class.at(x, y));
        has_clutter |= (c == CellClass::kClutter);
        has_door |= (c == CellClass::kDoorFrame);
      }
    }
    return 2 + (has_clutter ? 1 : 0) + (has_door ? 1 : 0);
  }
};

enum class Heading : uint8_t { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3 };

inline constexpr int heading_dx(Heading h) {
  constexpr int dx[4] = {1, 0, -1, 0};
  return dx[static_cast<int>(h)];
}
inline constexpr int heading_dy(Heading h) {
  constexpr int dy[4] = {0, 1, 0, -1};
  return dy[static_cast<int>(h)];
}
inline constexpr Heading turn_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}
inline constexpr Heading turn_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}
inline constexpr Heading opposite(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 2) % 4);
}

// Rotate a robot-frame cell offset (forward, left) into a world-frame
// offset (east, north). Quarter-turn rotations, exact on integers.
inline CellIndex rotate_to_world(Heading h, int fwd, int left) {
  switch (h) {
    case Heading::kEast:
      return {fwd, left};
    case Heading::kNorth:
      return {-left, fwd};
    case Heading::kWest:
      return {-fwd, -left};
    case Heading::kSouth:
    default:
      return {left, -fwd};
  }
}

// Inverse of rotate_to_world: world-frame offset to (forward, left).
inline std::pair<int, int> rotate_from_world(Heading h, int dx, int dy) {
  switch (h) {
    case Heading::kEast:
      return {dx, dy};
    case Heading::kNorth:
      return {dy, -dx};
    case Heading::kWest:
      return {-dx, -dy};
    case Heading::kSouth:
    default:
      return {-dy, dx};
  }
}

struct Pose {
  int x_cells = 0;
  int y_cells = 0;
  Heading heading = Heading::kEast;

  double x_m(const Floorplan& plan) const { return x_cells * plan.cell_size_m; }
  double y_m(const Floorplan& plan) const { return y_cells * plan.cell_size_m; }

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.x_cells == b.x_cells && a.y_cells == b.y_cells &&
           a.heading == b.heading;
  }
};

enum class Action : uint8_t {
  kForward = 0,
  kBackward = 1,
  kStrafeLeft = 2,
  kStrafeRight = 3,
  kTurnLeft = 4,
  kTurnRight = 5,
};
constexpr int kNumActions = 6;

constexpr double kTranslationStepM = 0.40;

inline const char* action_name(Action a) {
  constexpr const char* names[kNumActions] = {"forward",     "backward",
                                              "strafe_left", "strafe_right",
                                              "turn_left",   "turn_right"};
  return names[static_cast<int>(a)];
}

// Translation step in cells; the step length must be an exact multiple of
// the cell size so poses stay on the lattice.
inline int translation_cells(double cell_size_m) {
  const int k = static_cast<int>(std::lround(kTranslationStepM / cell_size_m));
  if (k <= 0 || std::abs(k * cell_size_m - kTranslationStepM) > 1e-9) {
    throw std::invalid_argument(
        "cell_size_m must divide the 0.40 m translation step exactly");
  }
  return k;
}

// World-frame direction of a translation action, or nullopt for turns.
inline std::optional<Heading> translation_direction(Heading heading,
                                                    Action action) {
  switch (action) {
    case Action::kForward:
      return heading;
    case Action::kBackward:
      return opposite(heading);
    case Action::kStrafeLeft:
      return turn_left(heading);
    case Action::kStrafeRight:
      return turn_right(heading);
    default:
      return std::nullopt;
  }
}

// Target pose of an action, ignoring collisions.
inline Pose action_target(const Pose& pose, Action action, int step_cells) {
  Pose out = pose;
  switch (action) {
    case Action::kTurnLeft:
      out.heading = turn_left(pose.heading);
      return out;
    case Action::kTurnRight:
      out.heading = turn_right(pose.heading);
      return out;
    default: {
      const Heading d = *translation_direction(pose.heading, action);
      out.x_cells += step_cells * heading_dx(d);
      out.y_cells += step_cells * heading_dy(d);
      return out;
    }
  }
}

// Cells covered by a disc of the given radius centered on a cell center.
// A cell counts when its closed square intersects the closed disc.
template <typename Visitor>
inline void for_each_disc_offset(double radius_cells, Visitor&& v) {
  const int reach = static_cast<int>(std::ceil(radius_cells + 0.5));
  const double r2 = radius_cells * radius_cells;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double gx = std::max(0.0, std::abs(dx) - 0.5);
      const double gy = std::max(0.0, std::abs(dy) - 0.5);
      if (gx * gx + gy * gy <= r2) v(dx, dy);
    }
  }
}

inline std::vector<CellIndex> footprint_cells(int cx, int cy, double radius_m,
                                              double cell_size_m) {
  std::vector<CellIndex> cells;
  for_each_disc_offset(radius_m / cell_size_m, [&](int dx, int dy) {
    cells.push_back({cx + dx, cy + dy});
  });
  return cells;
}

// Cells swept by the robot disc translating between two cell centers on
// one axis; the swept region is the stadium around the segment.
inline std::vector<CellIndex> swept_cells(int x0, int y0, int x1, int y1,
                                          double radius_m,
                                          double cell_size_m) {
  const double r = radius_m / cell_size_m;
  const double r2 = r * r;
  const int reach = static_cast<int>(std::ceil(r + 0.5));
  const int xmin = std::min(x0, x1), xmax = std::max(x0, x1);
  const int ymin = std::min(y0, y1), ymax = std::max(y0, y1);
  std::vector<CellIndex> cells;
  for (int cy = ymin - reach; cy <= ymax + reach; ++cy) {
    for (int cx = xmin - reach; cx <= xmax + reach; ++cx) {
      const double gx =
          std::max(0.0, std::max(double(xmin - cx), double(cx - xmax)) - 0.5);
      const double gy =
          std::max(0.0, std::max(double(ymin - cy), double(cy - ymax)) - 0.5);
      if (gx * gx + gy * gy <= r2) cells.push_back({cx, cy});
    }
  }
  return cells;
}

inline bool footprint_free(const Floorplan& plan, int cx, int cy,
                           double radius_m) {
  bool ok = true;
  for_each_disc_offset(radius_m / plan.cell_size_m, [&](int dx, int dy) {
    ok = ok && plan.free(cx + dx, cy + dy);
  });
  return ok;
}

// Directed graph over lattice poses. Nodes are poses whose disc footprint
// lies on free cells (footprint validity does not depend on heading, so
// each valid cell carries all four headings). Turn edges always exist; a
// translation edge exists iff the swept footprint is collision-free.
struct TraversabilityGraph {
  int translation_cells = 8;
  double robot_radius_m = 0.15;
  Grid<uint8_t> node_valid;
  std::array<Grid<uint8_t>, 4> translation_ok;  // indexed by world Heading

  bool has_node(const Pose& p) const {
    return node_valid.in_bounds(p.x_cells, p.y_cells) &&
           node_valid.at(p.x_cells, p.y_cells) != 0;
  }

  std::optional<Pose> edge(const Pose& pose, Action action) const {
    if (!has_node(pose)) return std::nullopt;
    const Pose target = action_target(pose, action, translation_cells);
    if (action == Action::kTurnLeft || action == Action::kTurnRight) {
      return target;
    }
    const Heading d = *translation_direction(pose.heading, action);
    if (translation_ok[static_cast<int>(d)].get_or(pose.x_cells, pose.y_cells,
                                                   0) == 0) {
      return std::nullopt;
    }
    return target;
  }

  size_t node_count() const {
    size_t cells = 0;
    for (int y = 0; y < node_valid.height(); ++y)
      for (int x = 0; x < node_valid.width(); ++x)
        if (node_valid.at(x, y)) ++cells;
    return cells * 4;
  }

  size_t edge_count() const {
    // Per valid cell: 2 turn edges per heading. Per open translation
    // direction: 4 (heading, action) pairs use it.
    size_t turns = node_count() * 2;
    size_t trans = 0;
    for (const auto& dir : translation_ok)
      for (int y = 0; y < dir.height(); ++y)
        for (int x = 0; x < dir.width(); ++x)
          if (dir.at(x, y)) ++trans;
    return turns + trans * 4;
  }

  std::vector<CellIndex> valid_cells() const {
    std::vector<CellIndex> out;
    for (int y = 0; y < node_valid.height(); ++y)
      for (int x = 0; x < node_valid.width(); ++x)
        if (node_valid.at(x, y)) out.push_back({x, y});
    return out;
  }
};

inline TraversabilityGraph build_graph(const Floorplan& plan,
                                       double robot_radius_m) {
  if (robot_radius_m < plan.cell_size_m) {
    throw std::invalid_argument("robot radius must be at least one cell");
  }
  TraversabilityGraph g;
  g.translation_cells = translation_cells(plan.cell_size_m);
  g.robot_radius_m = robot_radius_m;
  const int w = plan.width_cells(), h = plan.height_cells();
  g.node_valid = Grid<uint8_t>(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      g.node_valid.at(x, y) = footprint_free(plan, x, y, robot_radius_m);

  for (int d = 0; d < 4; ++d) {
    const Heading dir = static_cast<Heading>(d);
    auto& ok = g.translation_ok[d];
    ok = Grid<uint8_t>(w, h, 0);
    const int tx = g.translation_cells * heading_dx(dir);
    const int ty = g.translation_cells * heading_dy(dir);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!g.node_valid.at(x, y)) continue;
        bool clear = true;
        for (const CellIndex c :
             swept_cells(x, y, x + tx, y + ty, robot_radius_m,
                         plan.cell_size_m)) {
          if (plan.occupied(c.x, c.y)) {
            clear = false;
            break;
          }
        }
        ok.at(x, y) = clear;
      }
    }
  }
  return g;
}

struct StepResult {
  Pose pose;
  bool collided = false;
  // On collision: cells of the target footprint the robot failed to
  // occupy (target footprint minus the current one). Feeds the negative
  // map stamp.
  std::vector<CellIndex> attempted_cells;
};

inline StepResult step(const Floorplan& plan, const Pose& pose, Action action,
                       double robot_radius_m) {
  const int k = translation_cells(plan.cell_size_m);
  const Pose target = action_target(pose, action, k);
  StepResult result;
  if (action == Action::kTurnLeft || action == Action::kTurnRight) {
    result.pose = target;  // turning in place never collides
    return result;
  }
  bool clear = true;
  for (const CellIndex c :
       swept_cells(pose.x_cells, pose.y_cells, target.x_cells, target.y_cells,
                   robot_radius_m, plan.cell_size_m)) {
    if (plan.occupied(c.x, c.y)) {
      clear = false;
      break;
    }
  }
  if (clear) {
    result.pose = target;
    return result;
  }
  result.pose = pose;
  result.collided = true;
  const auto current = footprint_cells(pose.x_cells, pose.y_cells,
                                       robot_radius_m, plan.cell_size_m);
  for (const CellIndex c :
       footprint_cells(target.x_cells, target.y_cells, robot_radius_m,
                       plan.cell_size_m)) {
    if (std::find(current.begin(), current.end(), c) == current.end()) {
      result.attempted_cells.push_back(c);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Procedural floorplan generation: a corridor spine with rooms on both
// sides, door openings onto the corridor, and optional furniture-like
// clutter inside rooms.

struct WorldGenParams {
  double width_m = 16.0;
  double height_m = 12.0;
  double cell_size_m = 0.05;
  double corridor_width_m = 1.6;
  double door_width_m = 1.0;
  int rooms_min = 4;
  int rooms_max = 7;
  double clutter_density = 0.05;
  double clutter_min_m = 0.2;
  double clutter_max_m = 0.9;
  double wall_thickness_m = 0.10;
  double robot_radius_m = 0.15;
  double cross_corridor_prob = 0.5;
  double interroom_door_prob = 0.3;
};

namespace detail {

struct RoomRect {
  int x0, y0, x1, y1;  // half-open interior [x0,x1) x [y0,y1)
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

inline void carve(Floorplan& plan, int x0, int y0, int x1, int y1,
                  RegionLabel region, CellClass cls = CellClass::kFloor) {
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      plan.occupancy.at(x, y) = 0;
      plan.region.at(x, y) = static_cast<uint8_t>(region);
      plan.cell_class.at(x, y) = static_cast<uint8_t>(cls);
    }
  }
}

inline void mark_door_frame(Floorplan& plan, int x, int y) {
  if (plan.occupancy.in_bounds(x, y) && plan.occupancy.at(x, y) != 0) {
    plan.cell_class.at(x, y) = static_cast<uint8_t>(CellClass::kDoorFrame);
  }
}

// Splits [lo, hi) into n segments of width >= min_w separated by walls of
// width wall_t. Returns interior ranges.
inline std::vector<std::pair<int, int>> split_segments(Rng& rng, int lo,
                                                       int hi, int n,
                                                       int wall_t, int min_w) {
  std::vector<std::pair<int, int>> out;
  const int span = hi - lo;
  const int usable = span - (n - 1) * wall_t;
  if (n < 1 || usable < n * min_w) {
    if (span >= min_w) out.push_back({lo, hi});
    return out;
  }
  // Random interior widths: start from the minimum and distribute slack.
  std::vector<int> widths(n, min_w);
  int slack = usable - n * min_w;
  while (slack > 0) {
    const int i = static_cast<int>(rng() % n);
    const int take = 1 + static_cast<int>(rng() % static_cast<uint64_t>(
                                              std::max(1, slack / 2 + 1)));
    const int add = std::min(slack, take);
    widths[i] += add;
    slack -= add;
  }
  int x = lo;
  for (int i = 0; i < n; ++i) {
    out.push_back({x, x + widths[i]});
    x += widths[i] + wall_t;
  }
  return out;
}

inline bool try_generate(Rng& rng, const WorldGenParams& p, Floorplan& plan,
                         std::vector<RoomRect>& rooms_out) {
  const double s = p.cell_size_m;
  const int W = static_cast<int>(std::lround(p.width_m / s));
  const int H = static_cast<int>(std::lround(p.height_m / s));
  const int wall_t = std::max(1, static_cast<int>(std::lround(
                                     p.wall_thickness_m / s)));
  const int corridor_w = static_cast<int>(std::lround(p.corridor_width_m / s));
  const int door_w = static_cast<int>(std::lround(p.door_width_m / s));
  const int min_room_w = static_cast<int>(std::lround(2.0 / s));
  const int min_room_d = static_cast<int>(std::lround(1.6 / s));

  plan.cell_size_m = s;
  plan.occupancy = Grid<uint8_t>(W, H, 1);
  plan.region = Grid<uint8_t>(W, H, static_cast<uint8_t>(RegionLabel::kNone));
  plan.cell_class =
      Grid<uint8_t>(W, H, static_cast<uint8_t>(CellClass::kWall));
  rooms_out.clear();

  // Horizontal corridor spine.
  const int band_lo = static_cast<int>(H * 0.35);
  const int band_hi = std::max(band_lo + 1, static_cast<int>(H * 0.55));
  const int cy0 = band_lo + static_cast<int>(rng() % static_cast<uint64_t>(
                                                 band_hi - band_lo));
  const int cy1 = cy0 + corridor_w;
  if (cy1 + wall_t + min_room_d + wall_t > H) return false;
  carve(plan, wall_t, cy0, W - wall_t, cy1, RegionLabel::kCorridor);

  // Optional vertical corridor branch.
  int vx0 = -1, vx1 = -1;
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
      p.cross_corridor_prob) {
    const int xlo = wall_t + min_room_w + wall_t;
    const int xhi = W - wall_t - min_room_w - wall_t - corridor_w;
    if (xhi > xlo) {
      vx0 = xlo + static_cast<int>(rng() % static_cast<uint64_t>(xhi - xlo));
      vx1 = vx0 + corridor_w;
      const bool up = (rng() % 2) == 0;
      if (up) {
        carve(plan, vx0, cy1, vx1, H - wall_t, RegionLabel::kCorridor);
      } else {
        carve(plan, vx0, wall_t, vx1, cy0, RegionLabel::kCorridor);
      }
    }
  }

  // Rooms above and below the spine.
  const int total_rooms =
      p.rooms_min +
      static_cast<int>(rng() % static_cast<uint64_t>(
                           std::max(1, p.rooms_max - p.rooms_min + 1)));
  struct Band {
    int y0, y1;
    bool above;
  };
  std::vector<Band> bands;
  if (cy1 + wall_t + min_room_d <= H - wall_t)
    bands.push_back({cy1 + wall_t, H - wall_t, true});
  if (wall_t + min_room_d + wall_t <= cy0)
    bands.push_back({wall_t, cy0 - wall_t, false});
  if (bands.empty()) return false;

  for (size_t bi = 0; bi < bands.size(); ++bi) {
    const Band& band = bands[bi];
    int n_band = total_rooms / static_cast<int>(bands.size());
    if (bi == 0) n_band += total_rooms % static_cast<int>(bands.size());
    // X-intervals not covered by the vertical corridor.
    std::vector<std::pair<int, int>> strips;
    if (vx0 >= 0) {
      if (vx0 - wall_t - wall_t >= min_room_w)
        strips.push_back({wall_t, vx0 - wall_t});
      if (W - wall_t - (vx1 + wall_t) >= min_room_w)
        strips.push_back({vx1 + wall_t, W - wall_t});
    } else {
      strips.push_back({wall_t, W - wall_t});
    }
    // Distribute rooms over strips proportionally to width. Room depth
    // varies per room (anchored at the corridor-side wall), leaving dead
    // space toward the outer boundary.
    int total_w = 0;
    for (auto& st : strips) total_w += st.second - st.first;
    const int band_depth = band.y1 - band.y0;
    for (auto& st : strips) {
      const int sw = st.second - st.first;
      int n = std::max(1, n_band * sw / std::max(1, total_w));
      for (auto [rx0, rx1] :
           split_segments(rng, st.first, st.second, n, wall_t, min_room_w)) {
        const int dmin = std::max(min_room_d, band_depth * 11 / 20);
        const int depth =
            dmin + static_cast<int>(
                       rng() % static_cast<uint64_t>(
                                   std::max(1, band_depth - dmin + 1)));
        if (band.above) {
          rooms_out.push_back({rx0, band.y0, rx1, band.y0 + depth});
        } else {
          rooms_out.push_back({rx0, band.y1 - depth, rx1, band.y1});
        }
      }
    }
  }
  if (rooms_out.size() < 2) return false;

  for (const RoomRect& r : rooms_out) {
    carve(plan, r.x0, r.y0, r.x1, r.y1, RegionLabel::kRoom);
  }

  // One door per room through the wall facing the corridor spine.
  std::vector<CellIndex> door_zones;  // door center cells, clutter keep-out
  for (const RoomRect& r : rooms_out) {
    const bool above = r.y0 > cy0;
    const int wy0 = above ? cy1 : r.y1;
    const int wy1 = above ? r.y0 : cy0;
    if (r.width() <= door_w + 2) return false;
    const int dx0 =
        r.x0 + 1 +
        static_cast<int>(rng() % static_cast<uint64_t>(r.width() - door_w - 1));
    carve(plan, dx0, wy0, dx0 + door_w, wy1, RegionLabel::kCorridor);
    for (int y = wy0; y < wy1; ++y) {
      mark_door_frame(plan, dx0 - 1, y);
      mark_door_frame(plan, dx0 + door_w, y);
    }
    door_zones.push_back({dx0 + door_w / 2, above ? r.y0 : r.y1 - 1});
  }

  // Occasional doors between x-adjacent rooms of the same band.
  for (size_t i = 0; i + 1 < rooms_out.size(); ++i) {
    const RoomRect& a = rooms_out[i];
    const RoomRect& b = rooms_out[i + 1];
    const bool same_band = (a.y0 > cy0) == (b.y0 > cy0);
    if (!same_band || b.x0 - a.x1 != wall_t) continue;
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >=
        p.interroom_door_prob)
      continue;
    const int overlap = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (overlap <= door_w + 2) continue;
    const int dy0 = std::max(a.y0, b.y0) + 1 +
                    static_cast<int>(rng() % static_cast<uint64_t>(
                                         overlap - door_w - 1));
    carve(plan, a.x1, dy0, b.x0, dy0 + door_w, RegionLabel::kRoom);
    for (int x = a.x1; x < b.x0; ++x) {
      mark_door_frame(plan, x, dy0 - 1);
      mark_door_frame(plan, x, dy0 + door_w);
    }
  }

  // Clutter: axis-aligned blobs inside rooms, kept away from doorways.
  if (p.clutter_density > 0.0) {
    const int cmin = std::max(1, static_cast<int>(p.clutter_min_m / s));
    const int cmax = std::max(cmin, static_cast<int>(p.clutter_max_m / s));
    for (const RoomRect& r : rooms_out) {
      const int area = r.width() * r.height();
      const int target = static_cast<int>(area * p.clutter_density);
      int placed = 0;
      for (int tries = 0; tries < 64 && placed < target; ++tries) {
        const int bw =
            cmin + static_cast<int>(rng() % static_cast<uint64_t>(
                                        cmax - cmin + 1));
        const int bh =
            cmin + static_cast<int>(rng() % static_cast<uint64_t>(
                                        cmax - cmin + 1));
        if (r.width() <= bw + 4 || r.height() <= bh + 4) continue;
        const int bx = r.x0 + 2 +
                       static_cast<int>(rng() % static_cast<uint64_t>(
                                            r.width() - bw - 4));
        const int by = r.y0 + 2 +
                       static_cast<int>(rng() % static_cast<uint64_t>(
                                            r.height() - bh - 4));
        bool near_door = false;
        for (const CellIndex d : door_zones) {
          if (bx - 8 <= d.x && d.x <= bx + bw + 8 && by - 8 <= d.y &&
              d.y <= by + bh + 8) {
            near_door = true;
            break;
          }
        }
        if (near_door) continue;
        for (int y = by; y < by + bh; ++y) {
          for (int x = bx; x < bx + bw; ++x) {
            plan.occupancy.at(x, y) = 1;
            plan.region.at(x, y) = static_cast<uint8_t>(RegionLabel::kNone);
            plan.cell_class.at(x, y) =
                static_cast<uint8_t>(CellClass::kClutter);
          }
        }
        placed += bw * bh;
      }
    }
  }

  // Keep only free space connected to the corridor; anything cut off by
  // clutter becomes occupied.
  {
    Grid<uint8_t> reached(W, H, 0);
    std::deque<CellIndex> queue;
    const CellIndex start{wall_t, cy0 + corridor_w / 2};
    if (!plan.free(start.x, start.y)) return false;
    reached.at(start.x, start.y) = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const CellIndex c = queue.front();
      queue.pop_front();
      const int nx[4] = {c.x + 1, c.x - 1, c.x, c.x};
      const int ny[4] = {c.y, c.y, c.y + 1, c.y - 1};
      for (int i = 0; i < 4; ++i) {
        if (plan.free(nx[i], ny[i]) && !reached.at(nx[i], ny[i])) {
          reached.at(nx[i], ny[i]) = 1;
          queue.push_back({nx[i], ny[i]});
        }
      }
    }
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        if (plan.occupancy.at(x, y) == 0 && !reached.at(x, y)) {
          plan.occupancy.at(x, y) = 1;
          plan.region.at(x, y) = static_cast<uint8_t>(RegionLabel::kNone);
          plan.cell_class.at(x, y) = static_cast<uint8_t>(CellClass::kClutter);
        }
      }
    }
  }

  const double frac = double(plan.count_free()) / (double(W) * H);
  return frac > 0.2 && frac < 0.8;
}

}  // namespace detail

inline void validate_world_params(const WorldGenParams& p) {
  if (p.cell_size_m <= 0) throw std::invalid_argument("cell size must be > 0");
  if (p.corridor_width_m < 2.0 * p.robot_radius_m) {
    throw std::invalid_argument(
        "corridor width below robot diameter: world would be unreachable");
  }
  if (p.door_width_m < 3.0 * 2.0 * p.robot_radius_m) {
    throw std::invalid_argument(
        "door width must be at least three robot diameters");
  }
  if (p.width_m < 4.0 || p.height_m < 4.0) {
    throw std::invalid_argument("world smaller than 4 m x 4 m");
  }
  if (p.rooms_min < 2 || p.rooms_max < p.rooms_min) {
    throw std::invalid_argument("need rooms_max >= rooms_min >= 2");
  }
  translation_cells(p.cell_size_m);  // must divide the step
}

inline Floorplan generate_floorplan(uint64_t seed, const WorldGenParams& params) {
  validate_world_params(params);
  Floorplan plan;
  std::vector<detail::RoomRect> rooms;
  for (uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng = make_rng(seed, seed_stream::kWorldGen, attempt);
    if (detail::try_generate(rng, params, plan, rooms)) return plan;
  }
  throw std::runtime_error(
      "floorplan generation failed; params leave no room for a valid layout");
}

}  // namespace exmap

#endif  // EXMAP_WORLD_HPP_
