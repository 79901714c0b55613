#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/common/config.hpp"
#include "gcagent/dialogue/types.hpp"

namespace gcagent::engine {

struct EngineConfig {
  std::string endpoint;
  std::string model_name;
  double temperature = 0.7;
  int max_tokens = 256;
  int64_t timeout_ms = 30000;
  // Name of the environment variable holding the API key. Empty disables
  // the Authorization header.
  std::string credential_ref = "GCAGENT_API_KEY";

  // Throws InvalidConfig.
  void validate() const;
  // Reads <prefix>endpoint, <prefix>model, <prefix>temperature, ...
  static EngineConfig from_config(const Config& config, const std::string& prefix = "engine.");
};

struct Turn {
  std::string speaker_label;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct Sampling {
  double temperature = 0.7;
  int max_tokens = 256;

  bool operator==(const Sampling&) const = default;
};

struct EngineRequest {
  std::string system_text;
  // Display name of the agent speaking; its own past turns go out as
  // assistant messages.
  std::string agent_name;
  std::vector<Turn> turns;
  Sampling sampling;
  // Content hash, so identical contexts give identical requests.
  std::string request_id;

  bool operator==(const EngineRequest&) const = default;
};

enum class FinishReason { Stop, Length, Error };

struct TokenUsage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
};

struct EngineResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  TokenUsage token_usage;
};

// Canonical bytes of a request; the basis of request_id and the mock.
std::string serialize(const EngineRequest& request);

// Chat-completion wire body: {"model", "messages":[{"role","content"}],
// "temperature", "max_tokens"}.
nlohmann::json to_chat_completion(const EngineRequest& request, const std::string& model);

std::string system_template(const std::string& agent_name, const std::string& persona);

// Deterministic: the persona goes verbatim into the system text, each window
// message becomes one turn labelled with its sender's display name, and the
// triggering message is the final turn.
EngineRequest build_prompt(const dialogue::DialogueContext& context,
                           const Sampling& sampling = {});

class Engine {
 public:
  virtual ~Engine() = default;
  // Must be safe to call from several threads at once.
  virtual EngineResponse complete(const EngineRequest& request) = 0;
};

// Deterministic stand-in for a model: the text embeds the final turn and
// the seed.
EngineResponse mock_complete(const EngineRequest& request, uint64_t seed);

class MockEngine : public Engine {
 public:
  explicit MockEngine(uint64_t seed = 0) : seed_(seed) {}
  EngineResponse complete(const EngineRequest& request) override;

 private:
  uint64_t seed_;
};

// One POST to config.endpoint per call. Errors: Timeout, TransportError,
// RemoteError, MissingCredential.
EngineResponse complete(const EngineRequest& request, const EngineConfig& config);

class RemoteEngine : public Engine {
 public:
  explicit RemoteEngine(EngineConfig config);
  EngineResponse complete(const EngineRequest& request) override;
  const EngineConfig& config() const { return config_; }

 private:
  EngineConfig config_;
};

// `engine.backend` = mock (default, seeded by engine.mock_seed) or remote.
std::unique_ptr<Engine> make_engine(const Config& config, const std::string& prefix = "engine.");

}  // namespace gcagent::engine
