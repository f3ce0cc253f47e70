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

#ifndef EXMAP_CONFIG_HPP_
#define EXMAP_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace exmap {

// Plain-text configuration: one `key = value` pair per line, `#` starts a
// comment, keys use dotted sections (e.g. world.width_m). Serialization is
// sorted by key, so a round trip is byte-stable.
class KeyValueMap {
 public:
  KeyValueMap() = default;

  static KeyValueMap parse(const std::string& text) {
    KeyValueMap kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key = value");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": empty key");
      }
      kv.values_[key] = value;
    }
    return kv;
  }

  static KeyValueMap load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool contains(const std::string& key) const {
    return values_.count(key) != 0;
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  void set_double(const std::string& key, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    values_[key] = os.str();
  }
  void set_int(const std::string& key, int64_t v) {
    values_[key] = std::to_string(v);
  }
  void set_uint(const std::string& key, uint64_t v) {
    values_[key] = std::to_string(v);
  }
  void set_bool(const std::string& key, bool v) {
    values_[key] = v ? "true" : "false";
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key +
                               ": not a number: " + it->second);
    }
  }

  int64_t get_int(const std::string& key, int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      size_t pos = 0;
      const int64_t v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key +
                               ": not an integer: " + it->second);
    }
  }

  uint64_t get_uint(const std::string& key, uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      size_t pos = 0;
      const uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key +
                               ": not an unsigned integer: " + it->second);
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config key " + key +
                             ": not a boolean: " + it->second);
  }

  // Later maps win.
  void merge_from(const KeyValueMap& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << serialize();
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace exmap

#endif  // EXMAP_CONFIG_HPP_
