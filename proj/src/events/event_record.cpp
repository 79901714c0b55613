#include "gcagent/events/event_record.hpp"

#include <array>
#include <initializer_list>

#include "gcagent/common/error.hpp"

namespace gcagent::events {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventType, std::string_view>, 7> kNames{{
    {EventType::GroupCreated, "GroupCreated"},
    {EventType::ParticipantJoined, "ParticipantJoined"},
    {EventType::AgentAttached, "AgentAttached"},
    {EventType::MessagePosted, "MessagePosted"},
    {EventType::AgentReplied, "AgentReplied"},
    {EventType::PluginInvoked, "PluginInvoked"},
    {EventType::MessageViewed, "MessageViewed"},
}};

void require(const EventRecord& r, std::initializer_list<const char*> keys) {
  if (!r.payload.is_object()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(r.event_type)) + " payload must be an object");
  }
  for (const char* key : keys) {
    if (!r.payload.contains(key)) {
      throw Error(ErrorCode::InvalidArgument, std::string(to_string(r.event_type)) +
                                                  " payload lacks '" + key + "'");
    }
  }
}

}  // namespace

std::string_view to_string(EventType type) {
  for (const auto& [t, name] : kNames) {
    if (t == type) return name;
  }
  return "GroupCreated";
}

std::optional<EventType> parse_event_type(std::string_view name) {
  for (const auto& [t, n] : kNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

void to_json(json& j, const EventRecord& r) {
  j = json{{"event_type", to_string(r.event_type)},
           {"group_id", r.group_id},
           {"seq", r.seq},
           {"payload", r.payload},
           {"ts", r.ts}};
}

void from_json(const json& j, EventRecord& r) {
  try {
    std::string type_name = j.at("event_type").get<std::string>();
    auto type = parse_event_type(type_name);
    if (!type) throw Error(ErrorCode::CorruptLog, "unknown event type '" + type_name + "'");
    r.event_type = *type;
    r.group_id = j.at("group_id").get<std::string>();
    r.seq = j.at("seq").get<int64_t>();
    r.payload = j.at("payload");
    r.ts = j.at("ts").get<TimestampMs>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptLog, std::string("malformed event record: ") + e.what());
  }
}

void check_payload(const EventRecord& r) {
  switch (r.event_type) {
    case EventType::GroupCreated: require(r, {}); break;
    case EventType::ParticipantJoined: require(r, {"user_id"}); break;
    case EventType::AgentAttached: require(r, {"agent_id"}); break;
    case EventType::MessagePosted: require(r, {"message"}); break;
    case EventType::AgentReplied: require(r, {"message", "trigger_msg_id"}); break;
    case EventType::PluginInvoked: require(r, {"kind"}); break;
    case EventType::MessageViewed: require(r, {"user_id", "msg_id"}); break;
  }
}

}  // namespace gcagent::events
