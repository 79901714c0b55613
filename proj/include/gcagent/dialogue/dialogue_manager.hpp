#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gcagent/common/time.hpp"
#include "gcagent/dialogue/mentions.hpp"
#include "gcagent/dialogue/types.hpp"
#include "gcagent/events/event_log.hpp"
#include "gcagent/registry/agent_registry.hpp"

namespace gcagent::dialogue {

struct ManagerOptions {
  // Messages preceding the trigger that go into a DialogueContext.
  std::size_t context_window = 30;
  // Replying to an agent's message invokes that agent without an @-mention.
  bool reply_triggers = true;
};

// Agents to invoke for `message`: mentioned agents in order of appearance,
// then the author of the replied-to message if it is an agent. Agents never
// trigger agents, so an agent-sent message yields nothing.
std::vector<std::string> decide_invocations(const ChatMessage& message,
                                            const GroupSession& session,
                                            bool reply_triggers = true);

// Errors: UnknownAgent (not attached), UnknownMessage.
DialogueContext assemble_context(const GroupSession& session,
                                 const registry::AgentRegistry& registry,
                                 const std::string& agent_id,
                                 const std::string& trigger_msg_id,
                                 std::size_t window);

// Rebuilds a session from its event stream. The first event must be
// GroupCreated; throws CorruptLog on seq gaps, misordered messages or
// records belonging to another group.
GroupSession replay(std::span<const events::EventRecord> log);

// The interaction manager. Every mutation of a group is serialized through
// that group's lock and recorded in the event log before it becomes visible;
// distinct groups proceed independently.
class DialogueManager {
 public:
  DialogueManager(const registry::AgentRegistry& registry, events::EventLog& log,
                  ManagerOptions options = {}, Clock clock = system_clock());

  DialogueManager(const DialogueManager&) = delete;
  DialogueManager& operator=(const DialogueManager&) = delete;

  // Replays every group present in the event log. Returns the group count.
  std::size_t restore_from_log();

  // A fresh id is generated when none is given. Errors: InvalidArgument
  // (malformed or taken id).
  GroupSession create_group(std::optional<std::string> group_id = std::nullopt);

  // Idempotent. Errors: UnknownGroup, InvalidParticipant.
  void join(const std::string& group_id, const std::string& user_id);

  // Idempotent; returns the agent roster. Errors: UnknownGroup, UnknownAgent.
  std::vector<std::string> attach_agent(const std::string& group_id,
                                        const std::string& agent_id);

  // Errors: UnknownGroup, UnknownSender, InvalidBody, UnknownReplyTarget.
  ChatMessage ingest_message(const std::string& group_id, const std::string& sender,
                             const std::string& body,
                             const std::optional<std::string>& reply_to = std::nullopt);

  // Records an agent's generated reply as an AgentReplied event; the reply
  // points back at the triggering message.
  ChatMessage ingest_agent_reply(const std::string& group_id, const std::string& agent_id,
                                 const std::string& body,
                                 const std::string& trigger_msg_id);

  // Errors: UnknownGroup, UnknownSender, UnknownMessage.
  void record_view(const std::string& group_id, const std::string& user_id,
                   const std::string& msg_id);
  // Errors: UnknownGroup, UnknownSender.
  void record_plugin_use(const std::string& group_id, const std::string& user_id,
                         const std::string& kind);

  std::vector<std::string> decide_invocations(const ChatMessage& message) const;
  DialogueContext assemble_context(const std::string& group_id, const std::string& agent_id,
                                   const std::string& trigger_msg_id) const;

  GroupSession snapshot(const std::string& group_id) const;
  // Messages with seq >= from_seq.
  std::vector<ChatMessage> messages(const std::string& group_id, int64_t from_seq) const;
  bool has_group(const std::string& group_id) const;
  std::vector<std::string> group_ids() const;

  const ManagerOptions& options() const { return options_; }
  const registry::AgentRegistry& registry() const { return registry_; }
  events::EventLog& log() { return log_; }

 private:
  struct Group {
    mutable std::mutex mutex;
    GroupSession session;
  };

  std::shared_ptr<Group> group(const std::string& group_id) const;
  void append_locked(Group& group, events::EventType type, nlohmann::json payload,
                     TimestampMs ts);
  ChatMessage ingest_locked(Group& group, const std::string& sender, SenderKind kind,
                            const std::string& body,
                            const std::optional<std::string>& reply_to, TimestampMs ts);
  std::vector<RosterName> roster_names_locked(const GroupSession& session) const;

  const registry::AgentRegistry& registry_;
  events::EventLog& log_;
  ManagerOptions options_;
  Clock clock_;

  mutable std::shared_mutex groups_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Group>> groups_;
};

}  // namespace gcagent::dialogue
