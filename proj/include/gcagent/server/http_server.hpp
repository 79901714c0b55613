#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "gcagent/common/config.hpp"
#include "gcagent/server/service.hpp"

namespace httplib {
class Server;
}

namespace gcagent::server {

struct HttpOptions {
  std::string host = "127.0.0.1";
  // 0 picks a free port.
  int port = 8080;
  std::size_t threads = 32;
  // Interval between heartbeat lines on an idle event stream.
  int64_t heartbeat_ms = 15000;
  std::optional<std::filesystem::path> static_dir;

  static HttpOptions from_config(const Config& config);
};

// JSON API over a ChatService. Errors are returned as
// {"error": <code name>, "message": <detail>} with 400/404/502/500 statuses.
//
// GET /groups/{gid}/events streams newline-delimited EventRecord JSON over a
// chunked response: the backlog from from_seq, then live events. Blank lines
// are heartbeats. The stream ends with {"frame":"close","reason":...}. With
// follow=0 only the backlog is sent.
class HttpServer {
 public:
  HttpServer(ChatService& service, HttpOptions options);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Throws BindFailure. Returns the bound port.
  int bind();
  // Serves on a background thread; bind() is called first if needed.
  void start();
  // Blocks the caller until stop().
  void run();
  // Closes open event streams with a close frame, then shuts down.
  void stop();
  int port() const { return port_; }

 private:
  void install_routes();

  ChatService& service_;
  HttpOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  // Event streams whose response has not been released yet.
  std::atomic<int> open_streams_{0};
  int port_ = -1;
};

}  // namespace gcagent::server
