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

#ifndef EXMAP_CHECKPOINT_HPP_
#define EXMAP_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace exmap {

// Versioned binary container: magic, version, then a sequence of named,
// typed, shaped segments. All integers and floats are little-endian;
// parameter payloads are 32-bit floats, optimizer/resume state may use
// wider types.
enum class SegmentType : uint8_t {
  kFloat32 = 0,
  kFloat64 = 1,
  kUint64 = 2,
  kBytes = 3,
};

struct CheckpointSegment {
  std::string name;
  SegmentType type = SegmentType::kBytes;
  std::vector<uint64_t> shape;
  std::vector<uint8_t> raw;

  uint64_t element_count() const {
    uint64_t n = 1;
    for (uint64_t d : shape) n *= d;
    return n;
  }

  static CheckpointSegment from_f32(const std::string& name,
                                    const std::vector<float>& data,
                                    std::vector<uint64_t> shape) {
    CheckpointSegment s;
    s.name = name;
    s.type = SegmentType::kFloat32;
    s.shape = std::move(shape);
    s.raw.resize(data.size() * sizeof(float));
    std::memcpy(s.raw.data(), data.data(), s.raw.size());
    return s;
  }

  static CheckpointSegment from_f64(const std::string& name,
                                    const std::vector<double>& data,
                                    std::vector<uint64_t> shape) {
    CheckpointSegment s;
    s.name = name;
    s.type = SegmentType::kFloat64;
    s.shape = std::move(shape);
    s.raw.resize(data.size() * sizeof(double));
    std::memcpy(s.raw.data(), data.data(), s.raw.size());
    return s;
  }

  static CheckpointSegment from_u64(const std::string& name, uint64_t value) {
    CheckpointSegment s;
    s.name = name;
    s.type = SegmentType::kUint64;
    s.shape = {1};
    s.raw.resize(sizeof(uint64_t));
    std::memcpy(s.raw.data(), &value, sizeof(uint64_t));
    return s;
  }

  static CheckpointSegment from_bytes(const std::string& name,
                                      const std::string& text) {
    CheckpointSegment s;
    s.name = name;
    s.type = SegmentType::kBytes;
    s.shape = {text.size()};
    s.raw.assign(text.begin(), text.end());
    return s;
  }

  std::vector<float> as_f32() const {
    if (type != SegmentType::kFloat32)
      throw std::runtime_error("segment " + name + " is not float32");
    std::vector<float> out(raw.size() / sizeof(float));
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
  }

  std::vector<double> as_f64() const {
    if (type != SegmentType::kFloat64)
      throw std::runtime_error("segment " + name + " is not float64");
    std::vector<double> out(raw.size() / sizeof(double));
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
  }

  uint64_t as_u64() const {
    if (type != SegmentType::kUint64 || raw.size() != sizeof(uint64_t))
      throw std::runtime_error("segment " + name + " is not uint64");
    uint64_t v = 0;
    std::memcpy(&v, raw.data(), sizeof(uint64_t));
    return v;
  }

  std::string as_string() const {
    return std::string(raw.begin(), raw.end());
  }
};

class Checkpoint {
 public:
  static constexpr char kMagic[8] = {'E', 'X', 'M', 'A', 'P', 'C', 'K', '1'};

  void add(CheckpointSegment segment) {
    segments_.push_back(std::move(segment));
  }

  bool contains(const std::string& name) const {
    for (const auto& s : segments_)
      if (s.name == name) return true;
    return false;
  }

  const CheckpointSegment& get(const std::string& name) const {
    for (const auto& s : segments_)
      if (s.name == name) return s;
    throw std::runtime_error("checkpoint has no segment named " + name);
  }

  const std::vector<CheckpointSegment>& segments() const { return segments_; }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, 1);  // version
    write_u32(out, static_cast<uint32_t>(segments_.size()));
    for (const auto& s : segments_) {
      write_u32(out, static_cast<uint32_t>(s.name.size()));
      out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
      const uint8_t type = static_cast<uint8_t>(s.type);
      out.write(reinterpret_cast<const char*>(&type), 1);
      write_u32(out, static_cast<uint32_t>(s.shape.size()));
      for (uint64_t d : s.shape) write_u64(out, d);
      write_u64(out, s.raw.size());
      out.write(reinterpret_cast<const char*>(s.raw.data()),
                static_cast<std::streamsize>(s.raw.size()));
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
      throw std::runtime_error("not an exmap checkpoint: " + path);
    const uint32_t version = read_u32(in);
    if (version != 1)
      throw std::runtime_error("unsupported checkpoint version " +
                               std::to_string(version));
    const uint32_t count = read_u32(in);
    Checkpoint ck;
    for (uint32_t i = 0; i < count; ++i) {
      CheckpointSegment s;
      const uint32_t name_len = read_u32(in);
      s.name.resize(name_len);
      in.read(s.name.data(), name_len);
      uint8_t type = 0;
      in.read(reinterpret_cast<char*>(&type), 1);
      s.type = static_cast<SegmentType>(type);
      const uint32_t ndim = read_u32(in);
      s.shape.resize(ndim);
      for (uint32_t d = 0; d < ndim; ++d) s.shape[d] = read_u64(in);
      const uint64_t bytes = read_u64(in);
      s.raw.resize(bytes);
      in.read(reinterpret_cast<char*>(s.raw.data()),
              static_cast<std::streamsize>(bytes));
      if (!in) throw std::runtime_error("truncated checkpoint: " + path);
      ck.segments_.push_back(std::move(s));
    }
    return ck;
  }

 private:
  static void write_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static void write_u64(std::ostream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  static uint32_t read_u32(std::istream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }
  static uint64_t read_u64(std::istream& in) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }

  std::vector<CheckpointSegment> segments_;
};

}  // namespace exmap

#endif  // EXMAP_CHECKPOINT_HPP_
