#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace gcagent {

// Flat key-value configuration: one `key = value` per line, `#` starts a
// comment line. Keys are dotted (e.g. `engine.timeout_ms`).
class Config {
 public:
  Config() = default;

  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& content);

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;

  std::optional<std::string> find(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace gcagent
