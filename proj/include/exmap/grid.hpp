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

#ifndef EXMAP_GRID_HPP_
#define EXMAP_GRID_HPP_

#include <cassert>
#include <cstdint>
#include <vector>

namespace exmap {

struct CellIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(CellIndex a, CellIndex b) {
    return a.x == b.x && a.y == b.y;
  }
};

struct CellIndexHash {
  size_t operator()(CellIndex c) const {
    return (static_cast<uint64_t>(static_cast<uint32_t>(c.x)) << 32) ^
           static_cast<uint32_t>(c.y);
  }
};

// Dense row-major 2D array. Indexed as (x, y); x selects the column,
// y the row, with row y stored contiguously.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T())
      : width_(width),
        height_(height),
        cells_(static_cast<size_t>(width) * height, fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return cells_.empty(); }
  size_t size() const { return cells_.size(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return cells_[static_cast<size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return cells_[static_cast<size_t>(y) * width_ + x];
  }

  // at() with an out-of-bounds fallback value.
  T get_or(int x, int y, T fallback) const {
    return in_bounds(x, y) ? at(x, y) : fallback;
  }

  void fill(T value) { cells_.assign(cells_.size(), value); }

  T* data() { return cells_.data(); }
  const T* data() const { return cells_.data(); }
  T* row(int y) { return cells_.data() + static_cast<size_t>(y) * width_; }
  const T* row(int y) const {
    return cells_.data() + static_cast<size_t>(y) * width_;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.cells_ == b.cells_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

}  // namespace exmap

#endif  // EXMAP_GRID_HPP_
