#include <chrono>
#include <cstdlib>

#include <httplib.h>

#include "gcagent/common/error.hpp"
#include "gcagent/common/url.hpp"
#include "gcagent/engine/engine.hpp"

namespace gcagent::engine {

using nlohmann::json;

namespace {

void set_timeouts(httplib::Client& client, int64_t timeout_ms) {
  auto sec = static_cast<time_t>(timeout_ms / 1000);
  auto usec = static_cast<time_t>((timeout_ms % 1000) * 1000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

std::string remote_message(const std::string& body) {
  try {
    json doc = json::parse(body);
    if (doc.contains("error")) {
      const json& err = doc["error"];
      if (err.is_object() && err.contains("message")) return err["message"].get<std::string>();
      if (err.is_string()) return err.get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return body.substr(0, 200);
}

}  // namespace

EngineResponse complete(const EngineRequest& request, const EngineConfig& config) {
  config.validate();
  auto target = split_url(config.endpoint);
  if (!target) {
    throw Error(ErrorCode::InvalidConfig, "engine.endpoint is not an http(s) URL: '" +
                                              config.endpoint + "'");
  }

  httplib::Headers headers;
  if (!config.credential_ref.empty()) {
    const char* key = std::getenv(config.credential_ref.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::MissingCredential,
                  "environment variable " + config.credential_ref + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(target->origin);
  set_timeouts(client, config.timeout_ms);
  std::string body = to_chat_completion(request, config.model_name).dump();

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(target->path, headers, body, "application/json");
  if (!result) {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || elapsed >= config.timeout_ms) {
      throw Error(ErrorCode::Timeout,
                  "no response within " + std::to_string(config.timeout_ms) + " ms");
    }
    throw Error(ErrorCode::TransportError, httplib::to_string(err));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::RemoteError, remote_message(result->body), result->status);
  }

  EngineResponse response;
  try {
    json doc = json::parse(result->body);
    const json& choice = doc.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    response.text = content.is_null() ? std::string() : content.get<std::string>();
    std::string finish = choice.value("finish_reason", std::string("stop"));
    if (finish == "length") {
      response.finish_reason = FinishReason::Length;
    } else if (response.text.empty()) {
      response.finish_reason = FinishReason::Error;
    } else {
      response.finish_reason = FinishReason::Stop;
    }
    if (doc.contains("usage") && doc["usage"].is_object()) {
      response.token_usage.prompt_tokens = doc["usage"].value("prompt_tokens", int64_t{0});
      response.token_usage.completion_tokens =
          doc["usage"].value("completion_tokens", int64_t{0});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TransportError, std::string("malformed completion: ") + e.what());
  }
  return response;
}

RemoteEngine::RemoteEngine(EngineConfig config) : config_(std::move(config)) {
  config_.validate();
}

EngineResponse RemoteEngine::complete(const EngineRequest& request) {
  return engine::complete(request, config_);
}

std::unique_ptr<Engine> make_engine(const Config& config, const std::string& prefix) {
  std::string backend = config.get_string(prefix + "backend", "mock");
  if (backend == "mock") {
    return std::make_unique<MockEngine>(
        static_cast<uint64_t>(config.get_int(prefix + "mock_seed", 0)));
  }
  if (backend == "remote") {
    return std::make_unique<RemoteEngine>(EngineConfig::from_config(config, prefix));
  }
  throw Error(ErrorCode::InvalidConfig, prefix + "backend must be mock or remote");
}

}  // namespace gcagent::engine
