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

#ifndef EXMAP_RAYCAST_HPP_
#define EXMAP_RAYCAST_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <utility>

namespace exmap {

// Grid cells are unit squares centered on integer lattice points: cell
// (cx, cy) covers [cx-1/2, cx+1/2] x [cy-1/2, cy+1/2]. A sight line
// between two cell centers is blocked by every cell whose *closed*
// square the segment touches; grazing a corner or an edge counts.
//
// All three routines below evaluate that one definition with exact
// integer arithmetic (coordinates are doubled internally so square
// boundaries land on odd integers). They are implemented independently:
// walk_segment_cells is the incremental traversal used on hot paths,
// scan_segment_cells recomputes each column's row interval from scratch,
// and segment_touches_cell is the per-cell predicate used to brute-force
// small cases in tests.

namespace detail {

inline int64_t floor_div(int64_t a, int64_t b) {
  // b > 0
  int64_t q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

inline int64_t ceil_div(int64_t a, int64_t b) {
  // b > 0
  int64_t q = a / b;
  return (a % b != 0 && a > 0) ? q + 1 : q;
}

}  // namespace detail

// Exact test: does the closed segment between cell centers (ax, ay) and
// (bx, by) touch the closed unit square of cell (cx, cy)?
inline bool segment_touches_cell(int ax, int ay, int bx, int by, int cx,
                                 int cy) {
  // Doubled coordinates: segment (2ax,2ay)-(2bx,2by), square corners at
  // (2cx±1, 2cy±1).
  const int64_t x0 = 2 * int64_t(ax), y0 = 2 * int64_t(ay);
  const int64_t x1 = 2 * int64_t(bx), y1 = 2 * int64_t(by);
  const int64_t lo_x = 2 * int64_t(cx) - 1, hi_x = 2 * int64_t(cx) + 1;
  const int64_t lo_y = 2 * int64_t(cy) - 1, hi_y = 2 * int64_t(cy) + 1;

  if (std::max(x0, x1) < lo_x || std::min(x0, x1) > hi_x) return false;
  if (std::max(y0, y1) < lo_y || std::min(y0, y1) > hi_y) return false;

  const int64_t dx = x1 - x0, dy = y1 - y0;
  if (dx == 0 && dy == 0) return true;  // point inside the box (bbox passed)

  // Separating-axis test on the segment normal: all four corners strictly
  // on one side of the carrier line means no contact.
  auto side = [&](int64_t px, int64_t py) {
    return dx * (py - y0) - dy * (px - x0);
  };
  const int64_t s1 = side(lo_x, lo_y);
  const int64_t s2 = side(hi_x, lo_y);
  const int64_t s3 = side(lo_x, hi_y);
  const int64_t s4 = side(hi_x, hi_y);
  const int64_t smin = std::min(std::min(s1, s2), std::min(s3, s4));
  const int64_t smax = std::max(std::max(s1, s2), std::max(s3, s4));
  return !(smin > 0 || smax < 0);
}

// Incremental traversal of every cell touched by the segment from cell
// center (ax, ay) to cell center (bx, by), near to far. When the segment
// passes exactly through a lattice corner, the two cells touched only at
// that corner are emitted before stepping diagonally. The visitor returns
// false to stop early; walk_segment_cells returns false iff stopped.
template <typename Visitor>
inline bool walk_segment_cells(int ax, int ay, int bx, int by, Visitor&& v) {
  const int sx = bx >= ax ? 1 : -1;
  const int sy = by >= ay ? 1 : -1;
  const int64_t dx = std::abs(int64_t(bx) - ax);
  const int64_t dy = std::abs(int64_t(by) - ay);

  if (!v(ax, ay)) return false;
  int64_t cx = 0, cy = 0;  // progress in the normalized (+,+) frame
  // Next boundary crossings: vertical at t=(2cx+1)/(2dx), horizontal at
  // t=(2cy+1)/(2dy); compared via cross-multiplication.
  while (cx != dx || cy != dy) {
    const bool can_x = cx < dx;
    const bool can_y = cy < dy;
    int64_t tx_num = can_x ? (2 * cx + 1) * dy : 0;
    int64_t ty_num = can_y ? (2 * cy + 1) * dx : 0;
    if (can_x && (!can_y || tx_num < ty_num)) {
      ++cx;
    } else if (can_y && (!can_x || ty_num < tx_num)) {
      ++cy;
    } else {
      // Exact corner hit: the squares of (cx+1, cy) and (cx, cy+1) are
      // touched at that corner only.
      if (!v(ax + sx * int(cx + 1), ay + sy * int(cy))) return false;
      if (!v(ax + sx * int(cx), ay + sy * int(cy + 1))) return false;
      ++cx;
      ++cy;
    }
    if (!v(ax + sx * int(cx), ay + sy * int(cy))) return false;
  }
  return true;
}

// Column-scan enumeration of the same cell set. For each column the row
// interval is recomputed from scratch with exact rational bounds, so this
// shares no stepping state with walk_segment_cells. Emission order is by
// column of the normalized frame, not by distance.
template <typename Visitor>
inline bool scan_segment_cells(int ax, int ay, int bx, int by, Visitor&& v) {
  int64_t dx = int64_t(bx) - ax;
  int64_t dy = int64_t(by) - ay;
  bool swapped = std::abs(dy) > std::abs(dx);
  if (swapped) std::swap(dx, dy);
  const int sx = dx >= 0 ? 1 : -1;
  const int sy = dy >= 0 ? 1 : -1;
  dx = std::abs(dx);
  dy = std::abs(dy);

  auto emit = [&](int64_t i, int64_t j) {
    int ex = int(sx * i), ey = int(sy * j);
    if (swapped) std::swap(ex, ey);
    return v(ax + ex, ay + ey);
  };

  if (dx == 0) return emit(0, 0);

  for (int64_t i = 0; i <= dx; ++i) {
    // Clip the column's x-slab to the segment, in doubled coordinates.
    const int64_t xl = std::max<int64_t>(0, 2 * i - 1);
    const int64_t xr = std::min<int64_t>(2 * dx, 2 * i + 1);
    // Rows j whose square [2j-1, 2j+1] meets the y-range of the segment
    // over [xl, xr]; y is monotone, y(x) = x*dy/dx in doubled coords.
    const int64_t jmin = detail::ceil_div(xl * dy - dx, 2 * dx);
    const int64_t jmax = detail::floor_div(xr * dy + dx, 2 * dx);
    for (int64_t j = jmin; j <= jmax; ++j) {
      if (!emit(i, j)) return false;
    }
  }
  return true;
}

// True iff no cell touched by the center-to-center segment satisfies
// `occupied`. Endpoint cells are tested like any other.
template <typename Occupied>
inline bool line_of_sight(int ax, int ay, int bx, int by, Occupied&& occupied) {
  return walk_segment_cells(ax, ay, bx, by, [&](int x, int y) {
    return !occupied(x, y);
  });
}

}  // namespace exmap

#endif  // EXMAP_RAYCAST_HPP_
