#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gcagent/common/time.hpp"

namespace gcagent::events {

enum class EventType {
  GroupCreated,
  ParticipantJoined,
  AgentAttached,
  MessagePosted,
  AgentReplied,
  PluginInvoked,
  MessageViewed,
};

std::string_view to_string(EventType type);
std::optional<EventType> parse_event_type(std::string_view name);

// Payloads by type:
//   GroupCreated       {}
//   ParticipantJoined  {"user_id"}
//   AgentAttached      {"agent_id"}
//   MessagePosted      {"message": ChatMessage}
//   AgentReplied       {"message": ChatMessage, "trigger_msg_id"}
//   PluginInvoked      {"kind", "user_id"}
//   MessageViewed      {"user_id", "msg_id"}
struct EventRecord {
  EventType event_type = EventType::GroupCreated;
  std::string group_id;
  int64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
  TimestampMs ts = 0;

  bool operator==(const EventRecord&) const = default;
};

void to_json(nlohmann::json& j, const EventRecord& record);
// Throws CorruptLog on an unknown event_type or missing field.
void from_json(const nlohmann::json& j, EventRecord& record);

// Throws InvalidArgument when the payload lacks a field its type requires.
void check_payload(const EventRecord& record);

}  // namespace gcagent::events
