#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gcagent/common/config.hpp"

namespace gcagent::plugins {

enum class PluginKind { ASR, TTS, TTSing };

std::string_view to_string(PluginKind kind);
// Accepts "asr", "tts", "ttsing" in any case.
std::optional<PluginKind> parse_plugin_kind(std::string_view name);

struct PluginRequest {
  PluginKind kind = PluginKind::TTS;
  std::optional<std::string> text;       // TTS, TTSing
  std::optional<std::string> audio_ref;  // ASR
  std::optional<std::string> voice_style_id;

  // Throws InvalidArgument unless exactly the payload for `kind` is present.
  void validate() const;
};

struct PluginResult {
  PluginKind kind = PluginKind::TTS;
  std::optional<std::string> text;       // ASR transcript
  std::optional<std::string> audio_ref;  // synthesized blob
  std::map<std::string, std::string> metadata;

  bool operator==(const PluginResult&) const = default;
};

void to_json(nlohmann::json& j, const PluginRequest& r);
void from_json(const nlohmann::json& j, PluginRequest& r);
void to_json(nlohmann::json& j, const PluginResult& r);
void from_json(const nlohmann::json& j, PluginResult& r);

inline constexpr std::string_view kUnrecognizedAudio = "[unrecognized audio]";

// Stub blobs look like "stub-audio:v1:<kind>:<hex style>:<hex text>".
PluginResult stub_tts(const std::string& text, const std::optional<std::string>& style);
PluginResult stub_ttsing(const std::string& text, const std::optional<std::string>& style);
// Reads the text back out of a stub blob; foreign blobs give
// kUnrecognizedAudio. Throws MalformedBlob for an empty or damaged stub blob.
PluginResult stub_asr(const std::string& audio_ref);

class Adapter {
 public:
  virtual ~Adapter() = default;
  virtual PluginResult run(const PluginRequest& request) = 0;
  virtual std::string name() const = 0;
};

class StubAdapter : public Adapter {
 public:
  PluginResult run(const PluginRequest& request) override;
  std::string name() const override { return "stub"; }
};

// POSTs the PluginRequest JSON to `url` and expects PluginResult JSON back.
class RemoteAdapter : public Adapter {
 public:
  RemoteAdapter(std::string url, int64_t timeout_ms);
  PluginResult run(const PluginRequest& request) override;
  std::string name() const override { return "remote"; }

 private:
  std::string url_;
  int64_t timeout_ms_;
};

class AdapterRegistry {
 public:
  void register_adapter(PluginKind kind, std::shared_ptr<Adapter> adapter);
  std::shared_ptr<Adapter> find(PluginKind kind) const;

  // Stubs for every kind.
  static AdapterRegistry stubs();
  // plugins.<kind>.adapter = stub (default) | remote | none, with
  // plugins.<kind>.url for remote adapters and plugins.timeout_ms.
  static AdapterRegistry from_config(const Config& config);

 private:
  std::map<PluginKind, std::shared_ptr<Adapter>> adapters_;
};

// Errors: InvalidArgument (bad payload), UnsupportedPlugin, MalformedBlob,
// AdapterFailure (adapter threw or broke the result contract).
PluginResult dispatch(const PluginRequest& request, const AdapterRegistry& registry);

}  // namespace gcagent::plugins
