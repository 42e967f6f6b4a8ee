// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace htsgd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!cfg.values_.emplace(full, value).second)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key " + full);
  }
  return cfg;
}

ConfigFile ConfigFile::from_map(std::map<std::string, std::string> values) {
  ConfigFile cfg;
  cfg.values_ = std::move(values);
  return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string ConfigFile::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  consumed_.insert(key);
  return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    throw ConfigError("config key " + key + " is not a number: " + s);
  return v;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    throw ConfigError("config key " + key + " is not an integer: " + s);
  return static_cast<std::int64_t>(v);
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigFile::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0')
    throw ConfigError("config key " + key + " is not an unsigned integer: " + s);
  return static_cast<std::uint64_t>(v);
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (errno != 0 || end == item.c_str() || *end != '\0')
      throw ConfigError("config key " + key + " has a non-numeric item: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("config key " + key + " has no values");
  return out;
}

std::vector<std::int64_t> ConfigFile::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (double v : get_double_list(key)) {
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError("config key " + key + " must contain integers");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (consumed_.count(key) == 0) out.push_back(key);
  return out;
}

}  // namespace htsgd
