#include "gcagent/plugins/plugins.hpp"

#include <httplib.h>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"
#include "gcagent/common/url.hpp"

namespace gcagent::plugins {

using nlohmann::json;

namespace {

constexpr std::string_view kBlobPrefix = "stub-audio:v1:";

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

PluginResult synthesize(PluginKind kind, const std::string& text,
                        const std::optional<std::string>& style, int64_t ms_per_char) {
  std::string style_id = style.value_or("");
  PluginResult result;
  result.kind = kind;
  result.audio_ref = std::string(kBlobPrefix) + std::string(to_string(kind)) + ":" +
                     text::hex_encode(style_id) + ":" + text::hex_encode(text);
  result.metadata["adapter"] = "stub";
  result.metadata["text"] = text;
  result.metadata["style"] = style_id;
  result.metadata["duration_ms"] =
      std::to_string(static_cast<int64_t>(text::char_count(text)) * ms_per_char);
  return result;
}

void check_result(const PluginRequest& request, const PluginResult& result) {
  if (result.kind != request.kind) {
    throw Error(ErrorCode::AdapterFailure, "adapter answered with the wrong kind");
  }
  if (request.kind == PluginKind::ASR ? !result.text : !result.audio_ref) {
    throw Error(ErrorCode::AdapterFailure, "adapter result lacks its payload");
  }
}

}  // namespace

std::string_view to_string(PluginKind kind) {
  switch (kind) {
    case PluginKind::ASR: return "ASR";
    case PluginKind::TTS: return "TTS";
    case PluginKind::TTSing: return "TTSing";
  }
  return "TTS";
}

std::optional<PluginKind> parse_plugin_kind(std::string_view name) {
  if (text::iequals(name, "asr")) return PluginKind::ASR;
  if (text::iequals(name, "tts")) return PluginKind::TTS;
  if (text::iequals(name, "ttsing")) return PluginKind::TTSing;
  return std::nullopt;
}

void PluginRequest::validate() const {
  if (kind == PluginKind::ASR) {
    if (!audio_ref || text) {
      throw Error(ErrorCode::InvalidArgument, "ASR requests carry audio_ref and no text");
    }
  } else if (!text || audio_ref) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(kind)) + " requests carry text and no audio_ref");
  }
}

void to_json(json& j, const PluginRequest& r) {
  j = json{{"kind", to_string(r.kind)}};
  if (r.text) j["text"] = *r.text;
  if (r.audio_ref) j["audio_ref"] = *r.audio_ref;
  if (r.voice_style_id) j["voice_style_id"] = *r.voice_style_id;
}

void from_json(const json& j, PluginRequest& r) {
  auto kind = parse_plugin_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::UnsupportedPlugin, j.at("kind").get<std::string>());
  r.kind = *kind;
  r.text = optional_string(j, "text");
  r.audio_ref = optional_string(j, "audio_ref");
  r.voice_style_id = optional_string(j, "voice_style_id");
}

void to_json(json& j, const PluginResult& r) {
  j = json{{"kind", to_string(r.kind)}, {"metadata", r.metadata}};
  j["text"] = r.text ? json(*r.text) : json(nullptr);
  j["audio_ref"] = r.audio_ref ? json(*r.audio_ref) : json(nullptr);
}

void from_json(const json& j, PluginResult& r) {
  auto kind = parse_plugin_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::AdapterFailure, "unknown kind in plugin result");
  r.kind = *kind;
  r.text = optional_string(j, "text");
  r.audio_ref = optional_string(j, "audio_ref");
  r.metadata = j.value("metadata", std::map<std::string, std::string>{});
}

PluginResult stub_tts(const std::string& text, const std::optional<std::string>& style) {
  return synthesize(PluginKind::TTS, text, style, 60);
}

PluginResult stub_ttsing(const std::string& text, const std::optional<std::string>& style) {
  return synthesize(PluginKind::TTSing, text, style, 150);
}

PluginResult stub_asr(const std::string& audio_ref) {
  if (audio_ref.empty()) throw Error(ErrorCode::MalformedBlob, "empty audio blob");

  PluginResult result;
  result.kind = PluginKind::ASR;
  result.metadata["adapter"] = "stub";
  if (audio_ref.rfind(kBlobPrefix, 0) != 0) {
    result.text = std::string(kUnrecognizedAudio);
    return result;
  }

  std::string_view rest(audio_ref);
  rest.remove_prefix(kBlobPrefix.size());
  auto first = rest.find(':');
  auto second = first == std::string_view::npos ? first : rest.find(':', first + 1);
  if (second == std::string_view::npos || rest.find(':', second + 1) != std::string_view::npos ||
      !parse_plugin_kind(rest.substr(0, first))) {
    throw Error(ErrorCode::MalformedBlob, "damaged stub blob");
  }
  std::string style;
  std::string transcript;
  if (!text::hex_decode(rest.substr(first + 1, second - first - 1), style) ||
      !text::hex_decode(rest.substr(second + 1), transcript)) {
    throw Error(ErrorCode::MalformedBlob, "damaged stub blob payload");
  }
  result.text = transcript;
  result.metadata["style"] = style;
  return result;
}

PluginResult StubAdapter::run(const PluginRequest& request) {
  switch (request.kind) {
    case PluginKind::ASR: return stub_asr(*request.audio_ref);
    case PluginKind::TTS: return stub_tts(*request.text, request.voice_style_id);
    case PluginKind::TTSing: return stub_ttsing(*request.text, request.voice_style_id);
  }
  throw Error(ErrorCode::UnsupportedPlugin, "unknown plugin kind");
}

RemoteAdapter::RemoteAdapter(std::string url, int64_t timeout_ms)
    : url_(std::move(url)), timeout_ms_(timeout_ms) {}

PluginResult RemoteAdapter::run(const PluginRequest& request) {
  auto target = split_url(url_);
  if (!target) throw Error(ErrorCode::AdapterFailure, "bad adapter url '" + url_ + "'");
  httplib::Client client(target->origin);
  auto sec = static_cast<time_t>(timeout_ms_ / 1000);
  auto usec = static_cast<time_t>((timeout_ms_ % 1000) * 1000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  auto res = client.Post(target->path, json(request).dump(), "application/json");
  if (!res) throw Error(ErrorCode::AdapterFailure, httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::AdapterFailure, "adapter returned HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body).get<PluginResult>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::AdapterFailure, std::string("malformed adapter result: ") + e.what());
  }
}

void AdapterRegistry::register_adapter(PluginKind kind, std::shared_ptr<Adapter> adapter) {
  adapters_[kind] = std::move(adapter);
}

std::shared_ptr<Adapter> AdapterRegistry::find(PluginKind kind) const {
  auto it = adapters_.find(kind);
  return it == adapters_.end() ? nullptr : it->second;
}

AdapterRegistry AdapterRegistry::stubs() {
  AdapterRegistry registry;
  auto stub = std::make_shared<StubAdapter>();
  for (auto kind : {PluginKind::ASR, PluginKind::TTS, PluginKind::TTSing}) {
    registry.register_adapter(kind, stub);
  }
  return registry;
}

AdapterRegistry AdapterRegistry::from_config(const Config& config) {
  AdapterRegistry registry;
  auto stub = std::make_shared<StubAdapter>();
  int64_t timeout_ms = config.get_int("plugins.timeout_ms", 10000);
  for (auto kind : {PluginKind::ASR, PluginKind::TTS, PluginKind::TTSing}) {
    std::string prefix = "plugins." + text::ascii_lower(to_string(kind)) + ".";
    std::string adapter = config.get_string(prefix + "adapter", "stub");
    if (adapter == "stub") {
      registry.register_adapter(kind, stub);
    } else if (adapter == "remote") {
      auto url = config.find(prefix + "url");
      if (!url) throw Error(ErrorCode::InvalidConfig, prefix + "url is required");
      registry.register_adapter(kind, std::make_shared<RemoteAdapter>(*url, timeout_ms));
    } else if (adapter != "none") {
      throw Error(ErrorCode::InvalidConfig, prefix + "adapter must be stub, remote or none");
    }
  }
  return registry;
}

PluginResult dispatch(const PluginRequest& request, const AdapterRegistry& registry) {
  request.validate();
  auto adapter = registry.find(request.kind);
  if (!adapter) {
    throw Error(ErrorCode::UnsupportedPlugin,
                "no adapter registered for " + std::string(to_string(request.kind)));
  }
  PluginResult result;
  try {
    result = adapter->run(request);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::AdapterFailure, e.what());
  }
  check_result(request, result);
  return result;
}

}  // namespace gcagent::plugins
