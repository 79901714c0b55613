#include "gcagent/server/http_server.hpp"

#include <chrono>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::server {

using nlohmann::json;

HttpOptions HttpOptions::from_config(const Config& config) {
  HttpOptions options;
  options.host = config.get_string("server.host", options.host);
  options.port = static_cast<int>(config.get_int("server.port", options.port));
  options.threads = static_cast<std::size_t>(
      config.get_int("server.http_threads", static_cast<int64_t>(options.threads)));
  options.heartbeat_ms = config.get_int("server.heartbeat_ms", options.heartbeat_ms);
  if (auto dir = config.find("server.static_dir")) options.static_dir = *dir;
  if (options.port < 0 || options.port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "server.port out of range");
  }
  if (options.threads == 0 || options.heartbeat_ms <= 0) {
    throw Error(ErrorCode::InvalidConfig, "server.http_threads and server.heartbeat_ms must be positive");
  }
  return options;
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownAgent:
    case ErrorCode::UnknownGroup:
    case ErrorCode::UnknownMessage:
    case ErrorCode::UnsupportedPlugin:
      return 404;
    case ErrorCode::InvalidName:
    case ErrorCode::InvalidPersona:
    case ErrorCode::UnknownVoiceStyle:
    case ErrorCode::UnknownSender:
    case ErrorCode::InvalidBody:
    case ErrorCode::UnknownReplyTarget:
    case ErrorCode::InvalidParticipant:
    case ErrorCode::MalformedBlob:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::AdapterFailure:
      return 502;
    default:
      return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, json{{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  return body;
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

int64_t int_param(const httplib::Request& req, const char* key, int64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string value = req.get_param_value(key);
  try {
    std::size_t used = 0;
    int64_t parsed = std::stoll(value, &used);
    if (used == value.size()) return parsed;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, std::string("query parameter '") + key + "' must be an integer");
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.detail());
    } catch (const json::exception& e) {
      send_error(res, 400, to_string(ErrorCode::InvalidArgument), e.what());
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

std::string frame_line(const json& frame) { return frame.dump() + "\n"; }

}  // namespace

HttpServer::HttpServer(ChatService& service, HttpOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  std::size_t threads = options_.threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // httplib also sets SO_REUSEPORT by default, which lets a second server
  // share the port silently; a taken port must fail to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (options_.static_dir && !server_->set_mount_point("/", options_.static_dir->string())) {
    throw Error(ErrorCode::InvalidConfig, "static dir not found: " + options_.static_dir->string());
  }
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& svr = *server_;
  ChatService& service = service_;

  svr.Post("/agents", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    registry::AgentDraft draft = parse_body(req).get<registry::AgentDraft>();
    send_json(res, 201, json(service.create_agent(draft)));
  }));

  svr.Get("/agents", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    std::optional<registry::Category> filter;
    if (req.has_param("category")) filter = registry::parse_category(req.get_param_value("category"));
    send_json(res, 200, json(service.registry().list_catalog(filter)));
  }));

  svr.Get("/voices", guarded([&service](const httplib::Request&, httplib::Response& res) {
    json styles = json::array();
    for (const auto& style : service.registry().voice_styles()) {
      styles.push_back({{"style_id", style.style_id},
                        {"label", style.label},
                        {"synthesis_hint", style.synthesis_hint}});
    }
    send_json(res, 200, styles);
  }));

  svr.Post("/groups", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    send_json(res, 201, json(service.create_group(optional_string(body, "group_id"))));
  }));

  svr.Get(R"(/groups/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, json(service.manager().snapshot(req.matches[1])));
  }));

  svr.Post(R"(/groups/([^/]+)/join)",
           guarded([&service](const httplib::Request& req, httplib::Response& res) {
             std::string group_id = req.matches[1];
             std::string user_id = required_string(parse_body(req), "user_id");
             service.join(group_id, user_id);
             send_json(res, 200, json{{"group_id", group_id}, {"user_id", user_id}});
           }));

  svr.Post(R"(/groups/([^/]+)/agents/([^/]+))",
           guarded([&service](const httplib::Request& req, httplib::Response& res) {
             std::string group_id = req.matches[1];
             auto roster = service.attach_agent(group_id, req.matches[2]);
             send_json(res, 200, json{{"group_id", group_id}, {"agent_roster", roster}});
           }));

  svr.Post(R"(/groups/([^/]+)/messages)",
           guarded([&service](const httplib::Request& req, httplib::Response& res) {
             json body = parse_body(req);
             dialogue::ChatMessage message =
                 service.post_message(req.matches[1], required_string(body, "sender"),
                                      required_string(body, "body"), optional_string(body, "reply_to"));
             send_json(res, 201, json(message));
           }));

  svr.Get(R"(/groups/([^/]+)/messages)",
          guarded([&service](const httplib::Request& req, httplib::Response& res) {
            int64_t from_seq = int_param(req, "from_seq", 1);
            if (from_seq < 1) throw Error(ErrorCode::InvalidArgument, "from_seq must be >= 1");
            send_json(res, 200, json(service.manager().messages(req.matches[1], from_seq)));
          }));

  svr.Post(R"(/groups/([^/]+)/views)",
           guarded([&service](const httplib::Request& req, httplib::Response& res) {
             json body = parse_body(req);
             service.record_view(req.matches[1], required_string(body, "user_id"),
                                 required_string(body, "msg_id"));
             send_json(res, 200, json{{"recorded", true}});
           }));

  int64_t heartbeat_ms = options_.heartbeat_ms;
  std::atomic<bool>* stopping = &stopping_;
  std::atomic<int>* open_streams = &open_streams_;
  svr.Get(R"(/groups/([^/]+)/events)",
          guarded([&service, heartbeat_ms, stopping, open_streams](const httplib::Request& req,
                                                       httplib::Response& res) {
            std::string group_id = req.matches[1];
            int64_t from_seq = int_param(req, "from_seq", 1);
            bool follow = int_param(req, "follow", 1) != 0;
            if (!follow) {
              std::string out;
              for (const auto& event : service.log().read_events(group_id, from_seq)) {
                out += frame_line(json(event));
              }
              out += frame_line(json{{"frame", "close"}, {"reason", "end of backlog"}});
              res.set_content(out, "application/x-ndjson");
              return;
            }
            auto subscription = service.log().subscribe(group_id, from_seq);
            ++*open_streams;
            res.set_chunked_content_provider(
                "application/x-ndjson",
                [subscription, heartbeat_ms, stopping](std::size_t, httplib::DataSink& sink) {
                  auto event = subscription->next(std::chrono::milliseconds(heartbeat_ms));
                  if (event) {
                    std::string line = frame_line(json(*event));
                    return sink.write(line.data(), line.size());
                  }
                  if (subscription->closed() || stopping->load()) {
                    std::string line = frame_line(
                        json{{"frame", "close"}, {"reason", "server shutting down"}});
                    sink.write(line.data(), line.size());
                    sink.done();
                    return true;
                  }
                  return sink.write("\n", 1);
                },
                [subscription, open_streams](bool) {
                  subscription->cancel();
                  --*open_streams;
                });
          }));

  svr.Post(R"(/plugins/([^/]+))",
           guarded([&service](const httplib::Request& req, httplib::Response& res) {
             auto kind = plugins::parse_plugin_kind(std::string(req.matches[1]));
             if (!kind) {
               throw Error(ErrorCode::UnsupportedPlugin, "unknown plugin kind '" +
                                                             std::string(req.matches[1]) + "'");
             }
             json body = parse_body(req);
             auto group_id = optional_string(body, "group_id");
             auto user_id = optional_string(body, "user_id");
             body.erase("group_id");
             body.erase("user_id");
             body["kind"] = std::string(plugins::to_string(*kind));
             plugins::PluginRequest request = body.get<plugins::PluginRequest>();
             send_json(res, 200, json(service.invoke_plugin(request, group_id, user_id)));
           }));
}

int HttpServer::bind() {
  if (port_ >= 0) return port_;
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port_;
}

void HttpServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::run() {
  bind();
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (stopping_.exchange(true)) {
    if (thread_.joinable()) thread_.join();
    return;
  }
  service_.log().close_subscriptions();
  // Let open streams flush their close frame before the sockets go away.
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
  while (open_streams_.load() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace gcagent::server
