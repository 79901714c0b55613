#include "gcagent/common/error.hpp"
#include "gcagent/dialogue/dialogue_manager.hpp"

namespace gcagent::dialogue {

using events::EventType;

namespace {

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::CorruptLog, what);
}

}  // namespace

GroupSession replay(std::span<const events::EventRecord> log) {
  if (log.empty()) corrupt("empty event log");
  if (log.front().event_type != EventType::GroupCreated) {
    corrupt("log does not start with GroupCreated");
  }

  GroupSession session;
  session.group_id = log.front().group_id;
  int64_t expected_seq = 1;
  for (const auto& record : log) {
    if (record.group_id != session.group_id) {
      corrupt("event for group " + record.group_id + " in log of " + session.group_id);
    }
    if (record.seq != expected_seq) {
      corrupt("event seq " + std::to_string(record.seq) + " where " +
              std::to_string(expected_seq) + " was expected");
    }
    ++expected_seq;

    try {
      switch (record.event_type) {
        case EventType::GroupCreated:
          if (record.seq != 1) corrupt("GroupCreated after the first event");
          break;
        case EventType::ParticipantJoined: {
          auto user = record.payload.at("user_id").get<std::string>();
          if (!session.has_human(user)) session.human_roster.push_back(user);
          break;
        }
        case EventType::AgentAttached: {
          auto agent = record.payload.at("agent_id").get<std::string>();
          if (!session.has_agent(agent)) session.agent_roster.push_back(agent);
          break;
        }
        case EventType::MessagePosted:
        case EventType::AgentReplied: {
          auto message = record.payload.at("message").get<ChatMessage>();
          if (message.seq != session.next_seq || message.group_id != session.group_id) {
            corrupt("message seq " + std::to_string(message.seq) + " where " +
                    std::to_string(session.next_seq) + " was expected");
          }
          session.next_seq = message.seq + 1;
          session.history.push_back(std::move(message));
          break;
        }
        case EventType::PluginInvoked:
        case EventType::MessageViewed:
          break;
      }
    } catch (const nlohmann::json::exception& e) {
      corrupt("malformed " + std::string(events::to_string(record.event_type)) +
              " payload: " + e.what());
    }
  }
  return session;
}

}  // namespace gcagent::dialogue
