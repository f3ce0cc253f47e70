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

#ifndef EXMAP_WORLD_IO_HPP_
#define EXMAP_WORLD_IO_HPP_

#include <stdexcept>
#include <string>

#include "exmap/config.hpp"
#include "exmap/image_io.hpp"
#include "exmap/world.hpp"

namespace exmap {

// A floorplan on disk is an ASCII graymap (255 = free, 0 = occupied) plus
// a `.world` key/value sidecar holding the cell size and the names of the
// region/class label graymaps.
//
//   <base>.pgm         occupancy, P2, 255 free / 0 occupied
//   <base>.region.pgm  region labels, P2, 0 none / 1 corridor / 2 room
//   <base>.class.pgm   cell classes, P2, 0 wall / 1 floor / 2 clutter /
//                      3 door frame
//   <base>.world       sidecar: cell_size_m, grid size, file references

inline void save_floorplan(const Floorplan& plan, const std::string& base) {
  Grid<uint8_t> occ(plan.width_cells(), plan.height_cells(), 0);
  for (int y = 0; y < plan.height_cells(); ++y)
    for (int x = 0; x < plan.width_cells(); ++x)
      occ.at(x, y) = plan.occupancy.at(x, y) ? 0 : 255;
  write_pgm_ascii(base + ".pgm", occ);
  write_pgm_ascii(base + ".region.pgm", plan.region, 2);
  write_pgm_ascii(base + ".class.pgm", plan.cell_class, 3);

  KeyValueMap side;
  side.set_double("cell_size_m", plan.cell_size_m);
  side.set_int("width_cells", plan.width_cells());
  side.set_int("height_cells", plan.height_cells());
  side.set("occupancy_file", base + ".pgm");
  side.set("region_file", base + ".region.pgm");
  side.set("class_file", base + ".class.pgm");
  side.save(base + ".world");
}

inline void validate_floorplan(const Floorplan& plan) {
  const int w = plan.width_cells(), h = plan.height_cells();
  if (w < 3 || h < 3) throw std::runtime_error("floorplan too small");
  for (int x = 0; x < w; ++x) {
    if (!plan.occupied(x, 0) || !plan.occupied(x, h - 1))
      throw std::runtime_error("floorplan boundary must be occupied");
  }
  for (int y = 0; y < h; ++y) {
    if (!plan.occupied(0, y) || !plan.occupied(w - 1, y))
      throw std::runtime_error("floorplan boundary must be occupied");
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool occ = plan.occupancy.at(x, y) != 0;
      const bool none =
          plan.region.at(x, y) == static_cast<uint8_t>(RegionLabel::kNone);
      if (occ != none) {
        throw std::runtime_error(
            "region label must be none exactly on occupied cells");
      }
      if (!occ) {
        const bool connected = plan.free(x + 1, y) || plan.free(x - 1, y) ||
                               plan.free(x, y + 1) || plan.free(x, y - 1);
        if (!connected)
          throw std::runtime_error("isolated free cell at (" +
                                   std::to_string(x) + "," +
                                   std::to_string(y) + ")");
      }
    }
  }
}

inline Floorplan load_floorplan(const std::string& base) {
  const KeyValueMap side = KeyValueMap::load(base + ".world");
  Floorplan plan;
  plan.cell_size_m = side.get_double("cell_size_m", 0.05);
  const Grid<uint8_t> occ = read_pgm(side.get_string("occupancy_file", base + ".pgm"));
  plan.occupancy = Grid<uint8_t>(occ.width(), occ.height(), 1);
  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x)
      plan.occupancy.at(x, y) = occ.at(x, y) == 0 ? 1 : 0;
  plan.region = read_pgm(side.get_string("region_file", base + ".region.pgm"));
  plan.cell_class = read_pgm(side.get_string("class_file", base + ".class.pgm"));
  if (plan.region.width() != occ.width() || plan.region.height() != occ.height() ||
      plan.cell_class.width() != occ.width() ||
      plan.cell_class.height() != occ.height()) {
    throw std::runtime_error("floorplan label grids disagree with occupancy");
  }
  validate_floorplan(plan);
  return plan;
}

inline Grid<Rgb> render_floorplan_preview(const Floorplan& plan) {
  Grid<Rgb> img(plan.width_cells(), plan.height_cells());
  for (int y = 0; y < plan.height_cells(); ++y) {
    for (int x = 0; x < plan.width_cells(); ++x) {
      const auto cls = static_cast<CellClass>(plan.cell_class.at(x, y));
      const auto reg = static_cast<RegionLabel>(plan.region.at(x, y));
      Rgb c{20, 20, 20};  // walls
      if (plan.occupancy.at(x, y) == 0) {
        c = reg == RegionLabel::kCorridor ? Rgb{210, 225, 245}
                                          : Rgb{245, 245, 245};
      } else if (cls == CellClass::kClutter) {
        c = Rgb{110, 80, 50};
      } else if (cls == CellClass::kDoorFrame) {
        c = Rgb{160, 110, 40};
      }
      img.at(x, y) = c;
    }
  }
  return img;
}

}  // namespace exmap

#endif  // EXMAP_WORLD_IO_HPP_
