#include "gcagent/common/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent {

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidConfig, "cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

Config Config::parse(const std::string& content) {
  Config config;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(text::trim(view.substr(0, eq)));
    std::string value(text::trim(view.substr(eq + 1)));
    if (key.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    config.entries_[key] = value;
  }
  return config;
}

void Config::set(const std::string& key, std::string value) {
  entries_[key] = std::move(value);
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return find(key).value_or(fallback);
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
  auto value = find(key);
  if (!value) return fallback;
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), out);
  if (ec != std::errc() || ptr != value->data() + value->size()) {
    throw Error(ErrorCode::InvalidConfig, key + ": not an integer: " + *value);
  }
  return out;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto value = find(key);
  if (!value) return fallback;
  try {
    std::size_t used = 0;
    double out = std::stod(*value, &used);
    if (used != value->size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, key + ": not a number: " + *value);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto value = find(key);
  if (!value) return fallback;
  std::string lowered = text::ascii_lower(*value);
  if (lowered == "true" || lowered == "on" || lowered == "yes" || lowered == "1") return true;
  if (lowered == "false" || lowered == "off" || lowered == "no" || lowered == "0") return false;
  throw Error(ErrorCode::InvalidConfig, key + ": not a boolean: " + *value);
}

}  // namespace gcagent
