#include <sstream>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"
#include "gcagent/engine/engine.hpp"

namespace gcagent::engine {

using nlohmann::json;

void EngineConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "temperature must lie in [0, 2]");
  }
  if (max_tokens < 1) throw Error(ErrorCode::InvalidConfig, "max_tokens must be >= 1");
  if (timeout_ms < 1) throw Error(ErrorCode::InvalidConfig, "timeout_ms must be >= 1");
}

EngineConfig EngineConfig::from_config(const Config& config, const std::string& prefix) {
  EngineConfig out;
  out.endpoint = config.get_string(prefix + "endpoint", out.endpoint);
  out.model_name = config.get_string(prefix + "model", out.model_name);
  out.temperature = config.get_double(prefix + "temperature", out.temperature);
  out.max_tokens = static_cast<int>(config.get_int(prefix + "max_tokens", out.max_tokens));
  out.timeout_ms = config.get_int(prefix + "timeout_ms", out.timeout_ms);
  out.credential_ref = config.get_string(prefix + "credential_ref", out.credential_ref);
  out.validate();
  return out;
}

std::string system_template(const std::string& agent_name, const std::string& persona) {
  std::ostringstream out;
  out << "You are " << agent_name << ", one participant in a group chat with several people.\n"
      << "Your role:\n"
      << persona << "\n\n"
      << "Guidelines:\n"
      << "- Speak only as " << agent_name << " and stay in your role.\n"
      << "- Answer the final message; earlier messages are the conversation so far.\n"
      << "- Keep replies short and conversational.\n"
      << "- Do not start your reply with a name or speaker label.";
  return out.str();
}

std::string serialize(const EngineRequest& request) {
  json turns = json::array();
  for (const auto& turn : request.turns) {
    turns.push_back(json::array({turn.speaker_label, turn.text}));
  }
  json doc{{"system_text", request.system_text},
           {"agent_name", request.agent_name},
           {"turns", std::move(turns)},
           {"temperature", request.sampling.temperature},
           {"max_tokens", request.sampling.max_tokens}};
  return doc.dump();
}

json to_chat_completion(const EngineRequest& request, const std::string& model) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_text}});
  for (const auto& turn : request.turns) {
    if (turn.speaker_label == request.agent_name) {
      messages.push_back({{"role", "assistant"}, {"content", turn.text}});
    } else {
      messages.push_back({{"role", "user"}, {"content", turn.speaker_label + ": " + turn.text}});
    }
  }
  return json{{"model", model},
              {"messages", std::move(messages)},
              {"temperature", request.sampling.temperature},
              {"max_tokens", request.sampling.max_tokens}};
}

EngineRequest build_prompt(const dialogue::DialogueContext& context, const Sampling& sampling) {
  EngineRequest request;
  request.agent_name = context.agent_name;
  request.system_text = system_template(context.agent_name, context.role_configuration);
  request.sampling = sampling;

  auto label_of = [&](const dialogue::ChatMessage& m) {
    auto it = context.display_names.find(m.sender);
    return it == context.display_names.end() ? m.sender : it->second;
  };
  request.turns.reserve(context.history_window.size() + 1);
  for (const auto& m : context.history_window) request.turns.push_back({label_of(m), m.body});
  request.turns.push_back({label_of(context.latest_message), context.latest_message.body});

  request.request_id = "req_" + text::hex64(text::fnv1a64(serialize(request)));
  return request;
}

}  // namespace gcagent::engine
