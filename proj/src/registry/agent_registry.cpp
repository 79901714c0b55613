#include "gcagent/registry/agent_registry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::registry {

using nlohmann::json;

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Entertainment: return "Entertainment";
    case Category::Utility: return "Utility";
  }
  return "Entertainment";
}

Category parse_category(std::string_view value) {
  if (text::iequals(value, "entertainment")) return Category::Entertainment;
  if (text::iequals(value, "utility")) return Category::Utility;
  throw Error(ErrorCode::InvalidArgument, "unknown category '" + std::string(value) + "'");
}

std::vector<VoiceStyle> default_voice_styles() {
  return {
      {"warm", "Warm", "timbre=warm;pitch=mid"},
      {"bright", "Bright", "timbre=bright;pitch=high"},
      {"deep", "Deep", "timbre=deep;pitch=low"},
      {"playful", "Playful", "timbre=light;pitch=high;tempo=fast"},
      {"calm", "Calm", "timbre=soft;pitch=mid;tempo=slow"},
      {"robot", "Robotic", "timbre=synthetic;pitch=flat"},
  };
}

void to_json(json& j, const AgentProfile& p) {
  j = json{{"agent_id", p.agent_id},
           {"name", p.name},
           {"persona", p.persona},
           {"category", to_string(p.category)},
           {"creator_id", p.creator_id},
           {"created_at", p.created_at}};
  j["greeting"] = p.greeting ? json(*p.greeting) : json(nullptr);
  j["voice_style_id"] = p.voice_style_id ? json(*p.voice_style_id) : json(nullptr);
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

void from_json(const json& j, AgentProfile& p) {
  p.agent_id = j.at("agent_id").get<std::string>();
  p.name = j.at("name").get<std::string>();
  p.persona = j.at("persona").get<std::string>();
  p.category = parse_category(j.at("category").get<std::string>());
  p.creator_id = j.value("creator_id", std::string());
  p.created_at = j.at("created_at").get<TimestampMs>();
  p.greeting = optional_string(j, "greeting");
  p.voice_style_id = optional_string(j, "voice_style_id");
}

void to_json(json& j, const AgentDraft& d) {
  j = json{{"name", d.name},
           {"persona", d.persona},
           {"category", to_string(d.category)},
           {"creator_id", d.creator_id}};
  if (d.greeting) j["greeting"] = *d.greeting;
  if (d.voice_style_id) j["voice_style_id"] = *d.voice_style_id;
}

void from_json(const json& j, AgentDraft& d) {
  d.name = j.value("name", std::string());
  d.persona = j.value("persona", std::string());
  d.category = j.contains("category")
                   ? parse_category(j.at("category").get<std::string>())
                   : Category::Entertainment;
  d.creator_id = j.value("creator_id", std::string("system"));
  d.greeting = optional_string(j, "greeting");
  d.voice_style_id = optional_string(j, "voice_style_id");
}

AgentRegistry::AgentRegistry(std::vector<VoiceStyle> styles, Clock clock)
    : styles_(std::move(styles)), clock_(std::move(clock)) {}

void AgentRegistry::validate_locked(const AgentDraft& draft) const {
  std::string_view name = text::trim(draft.name);
  if (name.empty()) throw Error(ErrorCode::InvalidName, "name is empty");
  if (text::char_count(name) > kMaxNameChars) {
    throw Error(ErrorCode::InvalidName,
                "name exceeds " + std::to_string(kMaxNameChars) + " characters");
  }
  if (id_by_lower_name_.count(text::ascii_lower(name)) > 0) {
    throw Error(ErrorCode::InvalidName, "name '" + std::string(name) + "' is taken");
  }
  if (text::trim(draft.persona).empty()) {
    throw Error(ErrorCode::InvalidPersona, "persona is empty");
  }
  if (text::char_count(draft.persona) > kMaxPersonaChars) {
    throw Error(ErrorCode::InvalidPersona,
                "persona exceeds " + std::to_string(kMaxPersonaChars) + " characters");
  }
  if (draft.voice_style_id) {
    bool known = std::any_of(styles_.begin(), styles_.end(), [&](const VoiceStyle& s) {
      return s.style_id == *draft.voice_style_id;
    });
    if (!known) {
      throw Error(ErrorCode::UnknownVoiceStyle, "no voice style '" + *draft.voice_style_id + "'");
    }
  }
}

std::string AgentRegistry::next_id_locked() {
  for (;;) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "agt_%06llu",
                  static_cast<unsigned long long>(next_serial_++));
    if (by_id_.count(buf) == 0) return buf;
  }
}

void AgentRegistry::insert_locked(AgentProfile profile) {
  // Keep the id counter ahead of restored ids of the form agt_NNNNNN.
  if (profile.agent_id.rfind("agt_", 0) == 0) {
    uint64_t serial = 0;
    const char* first = profile.agent_id.data() + 4;
    const char* last = profile.agent_id.data() + profile.agent_id.size();
    auto [ptr, ec] = std::from_chars(first, last, serial);
    if (ec == std::errc() && ptr == last && serial >= next_serial_) {
      next_serial_ = serial + 1;
    }
  }
  id_by_lower_name_[text::ascii_lower(profile.name)] = profile.agent_id;
  std::string id = profile.agent_id;
  by_id_.emplace(std::move(id), std::move(profile));
}

AgentProfile AgentRegistry::create_agent(const AgentDraft& draft) {
  std::unique_lock lock(mutex_);
  validate_locked(draft);

  AgentProfile profile;
  profile.agent_id = next_id_locked();
  profile.name = std::string(text::trim(draft.name));
  profile.persona = draft.persona;
  profile.greeting = draft.greeting;
  profile.category = draft.category;
  profile.voice_style_id = draft.voice_style_id;
  profile.creator_id = draft.creator_id;
  profile.created_at = clock_();

  if (journal_.is_open()) {
    journal_ << json(profile).dump() << '\n';
    journal_.flush();
    if (!journal_) {
      throw Error(ErrorCode::StorageFailure, "cannot append to agent journal");
    }
  }
  insert_locked(profile);
  return profile;
}

std::vector<AgentProfile> AgentRegistry::list_catalog(
    std::optional<Category> category_filter) const {
  std::shared_lock lock(mutex_);
  std::vector<AgentProfile> out;
  for (const auto& [id, profile] : by_id_) {
    if (!category_filter || profile.category == *category_filter) out.push_back(profile);
  }
  std::sort(out.begin(), out.end(), [](const AgentProfile& a, const AgentProfile& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.agent_id < b.agent_id;
  });
  return out;
}

std::optional<AgentProfile> AgentRegistry::find(const std::string& agent_id) const {
  std::shared_lock lock(mutex_);
  auto it = by_id_.find(agent_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

AgentProfile AgentRegistry::get(const std::string& agent_id) const {
  auto profile = find(agent_id);
  if (!profile) throw Error(ErrorCode::UnknownAgent, "no agent '" + agent_id + "'");
  return *profile;
}

std::optional<AgentProfile> AgentRegistry::find_by_name(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = id_by_lower_name_.find(text::ascii_lower(text::trim(name)));
  if (it == id_by_lower_name_.end()) return std::nullopt;
  return by_id_.at(it->second);
}

std::vector<VoiceStyle> AgentRegistry::voice_styles() const {
  std::shared_lock lock(mutex_);
  return styles_;
}

std::optional<VoiceStyle> AgentRegistry::find_voice_style(const std::string& style_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& style : styles_) {
    if (style.style_id == style_id) return style;
  }
  return std::nullopt;
}

std::size_t AgentRegistry::size() const {
  std::shared_lock lock(mutex_);
  return by_id_.size();
}

std::size_t AgentRegistry::load_seed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open seed catalog " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "seed catalog " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::InvalidConfig, "seed catalog must be a JSON array");
  }
  std::size_t created = 0;
  for (const auto& entry : doc) {
    create_agent(entry.get<AgentDraft>());
    ++created;
  }
  return created;
}

std::size_t AgentRegistry::open_journal(const std::filesystem::path& path) {
  std::unique_lock lock(mutex_);
  std::size_t loaded = 0;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      AgentProfile profile;
      try {
        profile = json::parse(line).get<AgentProfile>();
      } catch (const std::exception& e) {
        throw Error(ErrorCode::CorruptLog, "agent journal " + path.string() + ": " + e.what());
      }
      if (by_id_.count(profile.agent_id) == 0) {
        insert_locked(std::move(profile));
        ++loaded;
      }
    }
  }
  journal_.open(path, std::ios::app);
  if (!journal_) throw Error(ErrorCode::StorageFailure, "cannot open " + path.string());
  return loaded;
}

}  // namespace gcagent::registry
