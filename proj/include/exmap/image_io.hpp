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

#ifndef EXMAP_IMAGE_IO_HPP_
#define EXMAP_IMAGE_IO_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "exmap/grid.hpp"

namespace exmap {

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(Rgb a, Rgb b_) {
    return a.r == b_.r && a.g == b_.g && a.b == b_.b;
  }
};

// Netpbm writers. Grids are stored with y up, so rows are written from the
// top (y = height-1) down and images come out north-up.

inline void write_pgm(const std::string& path, const Grid<uint8_t>& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  for (int y = img.height() - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(img.row(y)), img.width());
  }
}

inline void write_pgm_ascii(const std::string& path, const Grid<uint8_t>& img,
                            int maxval = 255) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P2\n" << img.width() << " " << img.height() << "\n" << maxval
      << "\n";
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) {
      out << int(img.at(x, y)) << (x + 1 == img.width() ? "\n" : " ");
    }
  }
}

inline void write_ppm(const std::string& path, const Grid<Rgb>& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  for (int y = img.height() - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(img.row(y)),
              static_cast<std::streamsize>(img.width()) * 3);
  }
}

namespace detail {

inline void skip_pnm_whitespace(std::istream& in) {
  int c = in.peek();
  while (c == '#' || std::isspace(c)) {
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else {
      in.get();
    }
    c = in.peek();
  }
}

inline int read_pnm_int(std::istream& in) {
  skip_pnm_whitespace(in);
  int v = 0;
  if (!(in >> v)) throw std::runtime_error("malformed netpbm header");
  return v;
}

}  // namespace detail

// Reads P2 or P5 graymaps (maxval <= 255).
inline Grid<uint8_t> read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("not a P2/P5 graymap: " + path);
  }
  const int w = detail::read_pnm_int(in);
  const int h = detail::read_pnm_int(in);
  const int maxval = detail::read_pnm_int(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw std::runtime_error("unsupported graymap geometry: " + path);
  }
  Grid<uint8_t> img(w, h, 0);
  if (magic == "P2") {
    for (int y = h - 1; y >= 0; --y) {
      for (int x = 0; x < w; ++x) {
        img.at(x, y) = static_cast<uint8_t>(detail::read_pnm_int(in));
      }
    }
  } else {
    in.get();  // single whitespace after maxval
    for (int y = h - 1; y >= 0; --y) {
      in.read(reinterpret_cast<char*>(img.row(y)), w);
      if (!in) throw std::runtime_error("truncated graymap: " + path);
    }
  }
  return img;
}

// --- small raster helpers for previews, curves and trajectory renders ---

inline void draw_line(Grid<Rgb>& img, int x0, int y0, int x1, int y1,
                      Rgb color) {
  const int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx - dy;
  while (true) {
    if (img.in_bounds(x0, y0)) img.at(x0, y0) = color;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 > -dy) {
      err -= dy;
      x0 += sx;
    }
    if (e2 < dx) {
      err += dx;
      y0 += sy;
    }
  }
}

inline void fill_triangle(Grid<Rgb>& img, double ax, double ay, double bx,
                          double by, double cx, double cy, Rgb color) {
  const int xmin = std::max(0, int(std::floor(std::min({ax, bx, cx}))));
  const int xmax =
      std::min(img.width() - 1, int(std::ceil(std::max({ax, bx, cx}))));
  const int ymin = std::max(0, int(std::floor(std::min({ay, by, cy}))));
  const int ymax =
      std::min(img.height() - 1, int(std::ceil(std::max({ay, by, cy}))));
  auto edge = [](double px, double py, double qx, double qy, double rx,
                 double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double area = edge(ax, ay, bx, by, cx, cy);
  if (area == 0.0) return;
  for (int y = ymin; y <= ymax; ++y) {
    for (int x = xmin; x <= xmax; ++x) {
      const double w0 = edge(bx, by, cx, cy, x, y);
      const double w1 = edge(cx, cy, ax, ay, x, y);
      const double w2 = edge(ax, ay, bx, by, x, y);
      const bool inside = area > 0 ? (w0 >= 0 && w1 >= 0 && w2 >= 0)
                                   : (w0 <= 0 && w1 <= 0 && w2 <= 0);
      if (inside) img.at(x, y) = color;
    }
  }
}

}  // namespace exmap

#endif  // EXMAP_IMAGE_IO_HPP_
