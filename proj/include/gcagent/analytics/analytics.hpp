#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/events/event_log.hpp"
#include "gcagent/registry/agent_registry.hpp"

namespace gcagent::analytics {

enum class Metric { GroupActivity, NewGroupCreation, MessageReadership, MessageVolumes };

inline constexpr Metric kMetrics[] = {Metric::GroupActivity, Metric::NewGroupCreation,
                                      Metric::MessageReadership, Metric::MessageVolumes};

std::string_view to_string(Metric metric);
std::string_view display_name(Metric metric);

// Event streams keyed by group id, each in seq order.
using LogSet = std::map<std::string, std::vector<events::EventRecord>>;

// Reads <dir>/groups/*.jsonl, or <dir>/*.jsonl when there is no groups/
// subdirectory. Throws CorruptLog.
LogSet load_log_dir(const std::filesystem::path& dir);
LogSet snapshot(const events::EventLog& log);
// Throws CorruptLog on seq gaps or records filed under the wrong group.
void check_log(const LogSet& logs);

struct MetricOptions {
  // A group counts as active with at least this many MessagePosted events.
  int64_t activity_min_messages = 1;
  // Whether AgentReplied events count toward message volume.
  bool count_agent_replies = true;
  // Half-open [begin, end) analysis window on event timestamps.
  std::optional<TimestampMs> window_begin;
  std::optional<TimestampMs> window_end;
};

//   MessageVolumes     MessagePosted (+ AgentReplied) events
//   NewGroupCreation   GroupCreated events
//   MessageReadership  distinct (user, msg_id) pairs over MessageViewed
//   GroupActivity      fraction of groups with enough MessagePosted events
double metric_value(const LogSet& logs, Metric metric, const MetricOptions& options = {});

// (treatment - control) / control * 100, two decimals. Errors: ZeroBaseline.
double compute_improvement(double control, double treatment);

struct MetricReport {
  Metric metric = Metric::MessageVolumes;
  double control_value = 0.0;
  double treatment_value = 0.0;
  double improvement_pct = 0.0;
};

std::vector<MetricReport> compare(const LogSet& control, const LogSet& treatment,
                                  const MetricOptions& options = {});

struct RetentionReport {
  int horizon_days = 1;
  std::size_t cohort_size = 0;
  std::size_t retained = 0;
  double rate_pct = 0.0;
};

// Cohort: users whose first ParticipantJoined falls on `cohort_day` (UTC day
// number; default the earliest join day in the logs). A member is retained
// at horizon h when they post a message on cohort_day + h.
// Errors: EmptyCohort, InvalidArgument (horizon < 1).
std::vector<RetentionReport> retention(const LogSet& logs, const std::vector<int>& horizons,
                                       std::optional<int64_t> cohort_day = std::nullopt);

struct RoleEntry {
  std::string agent_id;
  std::string name;
  registry::Category category = registry::Category::Entertainment;
  int64_t interactions = 0;
};

struct RoleDistribution {
  std::vector<RoleEntry> entries;
  std::map<registry::Category, double> category_share;
};

// Ranks agents by AgentReplied count (descending, then by name), keeps the
// top_k; category shares cover every agent. Errors: InvalidArgument
// (top_k < 1).
RoleDistribution role_distribution(const std::vector<registry::AgentProfile>& agents,
                                   const LogSet& logs, std::size_t top_k);

// Profiles from <dir>/agents.jsonl.
std::vector<registry::AgentProfile> load_agents(const std::filesystem::path& dir);

nlohmann::json to_json(const std::vector<MetricReport>& reports);
nlohmann::json to_json(const std::vector<RetentionReport>& reports);
nlohmann::json to_json(const RoleDistribution& distribution);

std::string format_table(const std::vector<MetricReport>& reports);
std::string format_table(const std::vector<RetentionReport>& reports);
std::string format_table(const RoleDistribution& distribution);

}  // namespace gcagent::analytics
