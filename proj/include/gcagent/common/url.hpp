#pragma once

#include <optional>
#include <string>

namespace gcagent {

// "http://host:port/v1/chat" -> origin "http://host:port", path "/v1/chat".
struct HttpTarget {
  std::string origin;
  std::string path;
};

inline std::optional<HttpTarget> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  auto path_begin = url.find('/', scheme_end + 3);
  HttpTarget target;
  target.origin = url.substr(0, path_begin);
  target.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (target.origin.size() <= scheme_end + 3) return std::nullopt;
  return target;
}

}  // namespace gcagent
