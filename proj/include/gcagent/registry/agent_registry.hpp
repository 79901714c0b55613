#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/common/time.hpp"

namespace gcagent::registry {

inline constexpr std::size_t kMaxNameChars = 32;
inline constexpr std::size_t kMaxPersonaChars = 2000;

enum class Category { Entertainment, Utility };

std::string_view to_string(Category category);
// Case-insensitive; throws InvalidArgument for anything else.
Category parse_category(std::string_view value);

struct VoiceStyle {
  std::string style_id;
  std::string label;
  std::string synthesis_hint;

  bool operator==(const VoiceStyle&) const = default;
};

std::vector<VoiceStyle> default_voice_styles();

// Everything a creator fills in; the registry assigns id and timestamp.
struct AgentDraft {
  std::string name;
  std::string persona;
  std::optional<std::string> greeting;
  Category category = Category::Entertainment;
  std::optional<std::string> voice_style_id;
  std::string creator_id;
};

struct AgentProfile {
  std::string agent_id;
  std::string name;
  std::string persona;
  std::optional<std::string> greeting;
  Category category = Category::Entertainment;
  std::optional<std::string> voice_style_id;
  std::string creator_id;
  TimestampMs created_at = 0;

  bool operator==(const AgentProfile&) const = default;
};

void to_json(nlohmann::json& j, const AgentProfile& profile);
void from_json(const nlohmann::json& j, AgentProfile& profile);
void to_json(nlohmann::json& j, const AgentDraft& draft);
// Missing `category` defaults to Entertainment; missing name/persona are
// left empty so create_agent reports them with the proper error code.
void from_json(const nlohmann::json& j, AgentDraft& draft);

// Stores agent profiles. Reads may run concurrently; writes are serialized.
// Profiles never change once created.
class AgentRegistry {
 public:
  explicit AgentRegistry(std::vector<VoiceStyle> styles = default_voice_styles(),
                         Clock clock = system_clock());

  AgentRegistry(const AgentRegistry&) = delete;
  AgentRegistry& operator=(const AgentRegistry&) = delete;

  // Errors: InvalidName, InvalidPersona, UnknownVoiceStyle.
  AgentProfile create_agent(const AgentDraft& draft);

  // Ordered by created_at, then agent_id.
  std::vector<AgentProfile> list_catalog(
      std::optional<Category> category_filter = std::nullopt) const;

  std::optional<AgentProfile> find(const std::string& agent_id) const;
  // Throws UnknownAgent.
  AgentProfile get(const std::string& agent_id) const;
  std::optional<AgentProfile> find_by_name(std::string_view name) const;

  std::vector<VoiceStyle> voice_styles() const;
  std::optional<VoiceStyle> find_voice_style(const std::string& style_id) const;

  std::size_t size() const;

  // Creates one agent per draft in a JSON array file. Returns the number
  // created.
  std::size_t load_seed(const std::filesystem::path& path);

  // Reads profiles previously written to `path` (one JSON object per line),
  // then appends every profile created afterwards to the same file.
  std::size_t open_journal(const std::filesystem::path& path);

 private:
  void validate_locked(const AgentDraft& draft) const;
  void insert_locked(AgentProfile profile);
  std::string next_id_locked();

  mutable std::shared_mutex mutex_;
  std::vector<VoiceStyle> styles_;
  Clock clock_;
  std::map<std::string, AgentProfile> by_id_;
  std::map<std::string, std::string> id_by_lower_name_;
  uint64_t next_serial_ = 1;
  std::ofstream journal_;
};

}  // namespace gcagent::registry
