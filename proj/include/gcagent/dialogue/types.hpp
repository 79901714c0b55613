#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/common/time.hpp"

namespace gcagent::dialogue {

inline constexpr std::size_t kMaxBodyChars = 4000;
inline constexpr std::size_t kMaxUserIdChars = 32;

enum class SenderKind { Human, Agent };

struct ChatMessage {
  // "<group_id>:<seq>", unique across groups.
  std::string msg_id;
  std::string group_id;
  int64_t seq = 0;
  std::string sender;
  SenderKind sender_kind = SenderKind::Human;
  std::string body;
  std::vector<std::string> mentions;
  std::optional<std::string> reply_to;
  TimestampMs ts = 0;

  bool operator==(const ChatMessage&) const = default;
};

std::string make_msg_id(const std::string& group_id, int64_t seq);

struct GroupSession {
  std::string group_id;
  // Join / attach order.
  std::vector<std::string> human_roster;
  std::vector<std::string> agent_roster;
  int64_t next_seq = 1;
  std::vector<ChatMessage> history;

  bool operator==(const GroupSession&) const = default;

  bool has_human(const std::string& user_id) const;
  bool has_agent(const std::string& agent_id) const;
  const ChatMessage* find_message(const std::string& msg_id) const;
};

// What the engine sees for one invocation.
struct DialogueContext {
  std::string agent_id;
  std::string agent_name;
  std::string role_configuration;
  // Contiguous, in seq order, ending right before latest_message.
  std::vector<ChatMessage> history_window;
  ChatMessage latest_message;
  // Participant ref -> display name for every sender in the context.
  std::map<std::string, std::string> display_names;

  bool operator==(const DialogueContext&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const GroupSession& s);

}  // namespace gcagent::dialogue
