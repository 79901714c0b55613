#include "gcagent/dialogue/dialogue_manager.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::dialogue {

using events::EventRecord;
using events::EventType;
using nlohmann::json;

std::string make_msg_id(const std::string& group_id, int64_t seq) {
  return group_id + ":" + std::to_string(seq);
}

bool GroupSession::has_human(const std::string& user_id) const {
  return std::find(human_roster.begin(), human_roster.end(), user_id) != human_roster.end();
}

bool GroupSession::has_agent(const std::string& agent_id) const {
  return std::find(agent_roster.begin(), agent_roster.end(), agent_id) != agent_roster.end();
}

const ChatMessage* GroupSession::find_message(const std::string& msg_id) const {
  auto colon = msg_id.rfind(':');
  if (colon == std::string::npos) return nullptr;
  int64_t seq = 0;
  const char* first = msg_id.data() + colon + 1;
  const char* last = msg_id.data() + msg_id.size();
  auto [ptr, ec] = std::from_chars(first, last, seq);
  if (ec != std::errc() || ptr != last || seq < 1 ||
      seq > static_cast<int64_t>(history.size())) {
    return nullptr;
  }
  const ChatMessage& candidate = history[static_cast<std::size_t>(seq - 1)];
  return candidate.msg_id == msg_id ? &candidate : nullptr;
}

void to_json(json& j, const ChatMessage& m) {
  j = json{{"msg_id", m.msg_id},
           {"group_id", m.group_id},
           {"seq", m.seq},
           {"sender", m.sender},
           {"sender_kind", m.sender_kind == SenderKind::Agent ? "agent" : "human"},
           {"body", m.body},
           {"mentions", m.mentions},
           {"ts", m.ts}};
  j["reply_to"] = m.reply_to ? json(*m.reply_to) : json(nullptr);
}

void from_json(const json& j, ChatMessage& m) {
  m.msg_id = j.at("msg_id").get<std::string>();
  m.group_id = j.at("group_id").get<std::string>();
  m.seq = j.at("seq").get<int64_t>();
  m.sender = j.at("sender").get<std::string>();
  m.sender_kind = j.at("sender_kind").get<std::string>() == "agent" ? SenderKind::Agent
                                                                   : SenderKind::Human;
  m.body = j.at("body").get<std::string>();
  m.mentions = j.at("mentions").get<std::vector<std::string>>();
  m.ts = j.at("ts").get<TimestampMs>();
  auto it = j.find("reply_to");
  m.reply_to = (it == j.end() || it->is_null()) ? std::nullopt
                                                : std::optional(it->get<std::string>());
}

void to_json(json& j, const GroupSession& s) {
  j = json{{"group_id", s.group_id},
           {"human_roster", s.human_roster},
           {"agent_roster", s.agent_roster},
           {"next_seq", s.next_seq},
           {"history", s.history}};
}

std::vector<std::string> decide_invocations(const ChatMessage& message,
                                            const GroupSession& session,
                                            bool reply_triggers) {
  std::vector<std::string> out;
  if (message.sender_kind == SenderKind::Agent) return out;
  auto add = [&](const std::string& ref) {
    if (session.has_agent(ref) && std::find(out.begin(), out.end(), ref) == out.end()) {
      out.push_back(ref);
    }
  };
  for (const auto& ref : message.mentions) add(ref);
  if (reply_triggers && message.reply_to) {
    const ChatMessage* target = session.find_message(*message.reply_to);
    if (target != nullptr && target->sender_kind == SenderKind::Agent) add(target->sender);
  }
  return out;
}

DialogueContext assemble_context(const GroupSession& session,
                                 const registry::AgentRegistry& registry,
                                 const std::string& agent_id,
                                 const std::string& trigger_msg_id, std::size_t window) {
  if (!session.has_agent(agent_id)) {
    throw Error(ErrorCode::UnknownAgent,
                "agent '" + agent_id + "' is not attached to " + session.group_id);
  }
  const ChatMessage* trigger = session.find_message(trigger_msg_id);
  if (trigger == nullptr) {
    throw Error(ErrorCode::UnknownMessage, "no message '" + trigger_msg_id + "'");
  }
  registry::AgentProfile profile = registry.get(agent_id);

  DialogueContext context;
  context.agent_id = agent_id;
  context.agent_name = profile.name;
  context.role_configuration = profile.persona;
  auto end = static_cast<std::size_t>(trigger->seq - 1);
  std::size_t begin = end > window ? end - window : 0;
  context.history_window.assign(session.history.begin() + static_cast<std::ptrdiff_t>(begin),
                                session.history.begin() + static_cast<std::ptrdiff_t>(end));
  context.latest_message = *trigger;

  auto label = [&](const ChatMessage& m) {
    if (context.display_names.count(m.sender) > 0) return;
    std::string name = m.sender;
    if (m.sender_kind == SenderKind::Agent) {
      if (auto agent = registry.find(m.sender)) name = agent->name;
    }
    context.display_names[m.sender] = name;
  };
  for (const auto& m : context.history_window) label(m);
  label(context.latest_message);
  context.display_names[agent_id] = profile.name;
  return context;
}

DialogueManager::DialogueManager(const registry::AgentRegistry& registry,
                                 events::EventLog& log, ManagerOptions options, Clock clock)
    : registry_(registry), log_(log), options_(options), clock_(std::move(clock)) {}

std::size_t DialogueManager::restore_from_log() {
  std::size_t restored = 0;
  for (const auto& group_id : log_.group_ids()) {
    auto records = log_.read_events(group_id, 1);
    auto group = std::make_shared<Group>();
    group->session = replay(records);
    std::unique_lock lock(groups_mutex_);
    groups_[group_id] = std::move(group);
    ++restored;
  }
  return restored;
}

std::shared_ptr<DialogueManager::Group> DialogueManager::group(
    const std::string& group_id) const {
  std::shared_lock lock(groups_mutex_);
  auto it = groups_.find(group_id);
  if (it == groups_.end()) throw Error(ErrorCode::UnknownGroup, "no group '" + group_id + "'");
  return it->second;
}

void DialogueManager::append_locked(Group& group, EventType type, json payload,
                                    TimestampMs ts) {
  EventRecord record;
  record.event_type = type;
  record.group_id = group.session.group_id;
  record.seq = log_.tail_seq(group.session.group_id) + 1;
  record.payload = std::move(payload);
  record.ts = ts;
  log_.append_event(record);
}

GroupSession DialogueManager::create_group(std::optional<std::string> group_id) {
  std::unique_lock lock(groups_mutex_);
  if (!group_id) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    do {
      group_id = "grp_" + text::hex64(rng()).substr(0, 12);
    } while (groups_.count(*group_id) > 0 || log_.has_group(*group_id));
  }
  if (!events::is_valid_group_id(*group_id)) {
    throw Error(ErrorCode::InvalidArgument, "invalid group id '" + *group_id + "'");
  }
  if (groups_.count(*group_id) > 0 || log_.has_group(*group_id)) {
    throw Error(ErrorCode::InvalidArgument, "group '" + *group_id + "' already exists");
  }
  auto group = std::make_shared<Group>();
  group->session.group_id = *group_id;
  append_locked(*group, EventType::GroupCreated, json::object(), clock_());
  groups_[*group_id] = group;
  return group->session;
}

void DialogueManager::join(const std::string& group_id, const std::string& user_id) {
  std::string_view trimmed = text::trim(user_id);
  if (trimmed.empty() || trimmed.size() != user_id.size() ||
      text::char_count(user_id) > kMaxUserIdChars ||
      user_id.find('@') != std::string::npos) {
    throw Error(ErrorCode::InvalidParticipant, "invalid user id '" + user_id + "'");
  }
  if (registry_.find(user_id)) {
    throw Error(ErrorCode::InvalidParticipant, "'" + user_id + "' is an agent id");
  }
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  if (g->session.has_human(user_id)) return;
  append_locked(*g, EventType::ParticipantJoined, json{{"user_id", user_id}}, clock_());
  g->session.human_roster.push_back(user_id);
}

std::vector<std::string> DialogueManager::attach_agent(const std::string& group_id,
                                                       const std::string& agent_id) {
  auto g = group(group_id);
  if (!registry_.find(agent_id)) {
    throw Error(ErrorCode::UnknownAgent, "no agent '" + agent_id + "'");
  }
  std::lock_guard lock(g->mutex);
  if (!g->session.has_agent(agent_id)) {
    append_locked(*g, EventType::AgentAttached, json{{"agent_id", agent_id}}, clock_());
    g->session.agent_roster.push_back(agent_id);
  }
  return g->session.agent_roster;
}

std::vector<RosterName> DialogueManager::roster_names_locked(
    const GroupSession& session) const {
  std::vector<RosterName> names;
  names.reserve(session.agent_roster.size() + session.human_roster.size());
  for (const auto& agent_id : session.agent_roster) {
    if (auto profile = registry_.find(agent_id)) names.push_back({profile->name, agent_id});
  }
  for (const auto& user_id : session.human_roster) names.push_back({user_id, user_id});
  return names;
}

ChatMessage DialogueManager::ingest_locked(Group& g, const std::string& sender,
                                           SenderKind kind, const std::string& body,
                                           const std::optional<std::string>& reply_to,
                                           TimestampMs ts) {
  if (text::trim(body).empty()) throw Error(ErrorCode::InvalidBody, "body is empty");
  if (text::char_count(body) > kMaxBodyChars) {
    throw Error(ErrorCode::InvalidBody,
                "body exceeds " + std::to_string(kMaxBodyChars) + " characters");
  }
  if (reply_to && g.session.find_message(*reply_to) == nullptr) {
    throw Error(ErrorCode::UnknownReplyTarget, "no message '" + *reply_to + "'");
  }

  ChatMessage message;
  message.group_id = g.session.group_id;
  message.seq = g.session.next_seq;
  message.msg_id = make_msg_id(message.group_id, message.seq);
  message.sender = sender;
  message.sender_kind = kind;
  message.body = body;
  message.mentions = parse_mentions(body, roster_names_locked(g.session));
  message.reply_to = reply_to;
  message.ts = ts;
  return message;
}

ChatMessage DialogueManager::ingest_message(const std::string& group_id,
                                            const std::string& sender,
                                            const std::string& body,
                                            const std::optional<std::string>& reply_to) {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  SenderKind kind;
  if (g->session.has_agent(sender)) {
    kind = SenderKind::Agent;
  } else if (g->session.has_human(sender)) {
    kind = SenderKind::Human;
  } else {
    throw Error(ErrorCode::UnknownSender, "'" + sender + "' is not in group " + group_id);
  }
  TimestampMs ts = clock_();
  ChatMessage message = ingest_locked(*g, sender, kind, body, reply_to, ts);
  append_locked(*g, EventType::MessagePosted, json{{"message", message}}, ts);
  g->session.history.push_back(message);
  g->session.next_seq = message.seq + 1;
  return message;
}

ChatMessage DialogueManager::ingest_agent_reply(const std::string& group_id,
                                                const std::string& agent_id,
                                                const std::string& body,
                                                const std::string& trigger_msg_id) {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  if (!g->session.has_agent(agent_id)) {
    throw Error(ErrorCode::UnknownSender, "agent '" + agent_id + "' is not in " + group_id);
  }
  TimestampMs ts = clock_();
  ChatMessage message =
      ingest_locked(*g, agent_id, SenderKind::Agent, body, trigger_msg_id, ts);
  append_locked(*g, EventType::AgentReplied,
                json{{"message", message}, {"trigger_msg_id", trigger_msg_id}}, ts);
  g->session.history.push_back(message);
  g->session.next_seq = message.seq + 1;
  return message;
}

void DialogueManager::record_view(const std::string& group_id, const std::string& user_id,
                                  const std::string& msg_id) {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  if (!g->session.has_human(user_id)) {
    throw Error(ErrorCode::UnknownSender, "'" + user_id + "' is not in group " + group_id);
  }
  if (g->session.find_message(msg_id) == nullptr) {
    throw Error(ErrorCode::UnknownMessage, "no message '" + msg_id + "'");
  }
  append_locked(*g, EventType::MessageViewed, json{{"user_id", user_id}, {"msg_id", msg_id}},
                clock_());
}

void DialogueManager::record_plugin_use(const std::string& group_id,
                                        const std::string& user_id,
                                        const std::string& kind) {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  if (!g->session.has_human(user_id)) {
    throw Error(ErrorCode::UnknownSender, "'" + user_id + "' is not in group " + group_id);
  }
  append_locked(*g, EventType::PluginInvoked, json{{"user_id", user_id}, {"kind", kind}},
                clock_());
}

std::vector<std::string> DialogueManager::decide_invocations(
    const ChatMessage& message) const {
  auto g = group(message.group_id);
  std::lock_guard lock(g->mutex);
  return dialogue::decide_invocations(message, g->session, options_.reply_triggers);
}

DialogueContext DialogueManager::assemble_context(const std::string& group_id,
                                                  const std::string& agent_id,
                                                  const std::string& trigger_msg_id) const {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  return dialogue::assemble_context(g->session, registry_, agent_id, trigger_msg_id,
                                    options_.context_window);
}

GroupSession DialogueManager::snapshot(const std::string& group_id) const {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  return g->session;
}

std::vector<ChatMessage> DialogueManager::messages(const std::string& group_id,
                                                   int64_t from_seq) const {
  auto g = group(group_id);
  std::lock_guard lock(g->mutex);
  const auto& history = g->session.history;
  std::size_t begin = from_seq <= 1 ? 0 : static_cast<std::size_t>(from_seq - 1);
  if (begin >= history.size()) return {};
  return {history.begin() + static_cast<std::ptrdiff_t>(begin), history.end()};
}

bool DialogueManager::has_group(const std::string& group_id) const {
  std::shared_lock lock(groups_mutex_);
  return groups_.count(group_id) > 0;
}

std::vector<std::string> DialogueManager::group_ids() const {
  std::shared_lock lock(groups_mutex_);
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const auto& [id, g] : groups_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gcagent::dialogue
