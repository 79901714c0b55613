#include "gcagent/analytics/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gcagent/common/decimal.hpp"
#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::analytics {

namespace fs = std::filesystem;
using events::EventRecord;
using events::EventType;
using nlohmann::json;

namespace {

bool in_window(const EventRecord& r, const MetricOptions& o) {
  if (o.window_begin && r.ts < *o.window_begin) return false;
  if (o.window_end && r.ts >= *o.window_end) return false;
  return true;
}

std::vector<EventRecord> read_stream(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::CorruptLog, "cannot read " + file.string());
  std::vector<EventRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<EventRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptLog, file.string() + ": " + e.what());
    }
  }
  return out;
}

std::string sender_of(const EventRecord& r) {
  return r.payload.at("message").at("sender").get<std::string>();
}

std::string signed_2dp(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.2f", value);
  return buf;
}

std::string fixed_2dp(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::GroupActivity: return "GroupActivity";
    case Metric::NewGroupCreation: return "NewGroupCreation";
    case Metric::MessageReadership: return "MessageReadership";
    case Metric::MessageVolumes: return "MessageVolumes";
  }
  return "MessageVolumes";
}

std::string_view display_name(Metric metric) {
  switch (metric) {
    case Metric::GroupActivity: return "Group Activity";
    case Metric::NewGroupCreation: return "New Group Creation";
    case Metric::MessageReadership: return "Message Readership";
    case Metric::MessageVolumes: return "Message Volumes";
  }
  return "";
}

LogSet load_log_dir(const fs::path& dir) {
  fs::path groups = fs::is_directory(dir / "groups") ? dir / "groups" : dir;
  if (!fs::is_directory(groups)) {
    throw Error(ErrorCode::CorruptLog, "not a log directory: " + dir.string());
  }
  LogSet logs;
  for (const auto& entry : fs::directory_iterator(groups)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      logs[entry.path().stem().string()] = read_stream(entry.path());
    }
  }
  check_log(logs);
  return logs;
}

LogSet snapshot(const events::EventLog& log) {
  LogSet logs;
  for (const auto& id : log.group_ids()) logs[id] = log.read_events(id, 1);
  return logs;
}

void check_log(const LogSet& logs) {
  for (const auto& [group_id, stream] : logs) {
    int64_t expected = 1;
    for (const auto& r : stream) {
      if (r.group_id != group_id || r.seq != expected++) {
        throw Error(ErrorCode::CorruptLog, "group " + group_id + ": bad record at seq " +
                                               std::to_string(r.seq));
      }
    }
  }
}

double metric_value(const LogSet& logs, Metric metric, const MetricOptions& options) {
  switch (metric) {
    case Metric::MessageVolumes: {
      int64_t count = 0;
      for (const auto& [id, stream] : logs) {
        for (const auto& r : stream) {
          if (!in_window(r, options)) continue;
          if (r.event_type == EventType::MessagePosted ||
              (options.count_agent_replies && r.event_type == EventType::AgentReplied)) {
            ++count;
          }
        }
      }
      return static_cast<double>(count);
    }
    case Metric::NewGroupCreation: {
      int64_t count = 0;
      for (const auto& [id, stream] : logs) {
        for (const auto& r : stream) {
          if (r.event_type == EventType::GroupCreated && in_window(r, options)) ++count;
        }
      }
      return static_cast<double>(count);
    }
    case Metric::MessageReadership: {
      std::set<std::pair<std::string, std::string>> views;
      for (const auto& [id, stream] : logs) {
        for (const auto& r : stream) {
          if (r.event_type != EventType::MessageViewed || !in_window(r, options)) continue;
          try {
            views.emplace(r.payload.at("user_id").get<std::string>(),
                          r.payload.at("msg_id").get<std::string>());
          } catch (const json::exception& e) {
            throw Error(ErrorCode::CorruptLog, std::string("MessageViewed: ") + e.what());
          }
        }
      }
      return static_cast<double>(views.size());
    }
    case Metric::GroupActivity: {
      if (logs.empty()) return 0.0;
      std::size_t active = 0;
      for (const auto& [id, stream] : logs) {
        int64_t posted = std::count_if(stream.begin(), stream.end(), [&](const EventRecord& r) {
          return r.event_type == EventType::MessagePosted && in_window(r, options);
        });
        if (posted >= options.activity_min_messages) ++active;
      }
      return static_cast<double>(active) / static_cast<double>(logs.size());
    }
  }
  return 0.0;
}

double compute_improvement(double control, double treatment) {
  if (!(control > 0.0)) {
    throw Error(ErrorCode::ZeroBaseline, "control value must be positive");
  }
  return round_2dp((treatment - control) / control * 100.0);
}

std::vector<MetricReport> compare(const LogSet& control, const LogSet& treatment,
                                  const MetricOptions& options) {
  std::vector<MetricReport> out;
  for (Metric metric : kMetrics) {
    MetricReport report;
    report.metric = metric;
    report.control_value = metric_value(control, metric, options);
    report.treatment_value = metric_value(treatment, metric, options);
    report.improvement_pct = compute_improvement(report.control_value, report.treatment_value);
    out.push_back(report);
  }
  return out;
}

std::vector<RetentionReport> retention(const LogSet& logs, const std::vector<int>& horizons,
                                       std::optional<int64_t> cohort_day) {
  std::map<std::string, int64_t> first_join;
  std::map<std::string, std::set<int64_t>> post_days;
  for (const auto& [id, stream] : logs) {
    for (const auto& r : stream) {
      try {
        if (r.event_type == EventType::ParticipantJoined) {
          auto user = r.payload.at("user_id").get<std::string>();
          int64_t day = utc_day(r.ts);
          auto [it, inserted] = first_join.emplace(user, day);
          if (!inserted) it->second = std::min(it->second, day);
        } else if (r.event_type == EventType::MessagePosted) {
          post_days[sender_of(r)].insert(utc_day(r.ts));
        }
      } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("retention: ") + e.what());
      }
    }
  }
  if (first_join.empty()) throw Error(ErrorCode::EmptyCohort, "no ParticipantJoined events");

  int64_t day0 = cohort_day.value_or(std::min_element(first_join.begin(), first_join.end(),
                                                      [](const auto& a, const auto& b) {
                                                        return a.second < b.second;
                                                      })
                                         ->second);
  std::vector<std::string> cohort;
  for (const auto& [user, day] : first_join) {
    if (day == day0) cohort.push_back(user);
  }
  if (cohort.empty()) {
    throw Error(ErrorCode::EmptyCohort, "nobody joined on " + format_utc_date(day0));
  }

  std::vector<RetentionReport> out;
  for (int h : horizons) {
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "horizons must be >= 1 day");
    RetentionReport report;
    report.horizon_days = h;
    report.cohort_size = cohort.size();
    for (const auto& user : cohort) {
      auto it = post_days.find(user);
      if (it != post_days.end() && it->second.count(day0 + h) > 0) ++report.retained;
    }
    report.rate_pct = from_hundredths(percent_hundredths(static_cast<int64_t>(report.retained),
                                                         static_cast<int64_t>(report.cohort_size)));
    out.push_back(report);
  }
  return out;
}

RoleDistribution role_distribution(const std::vector<registry::AgentProfile>& agents,
                                   const LogSet& logs, std::size_t top_k) {
  if (top_k < 1) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");

  std::map<std::string, int64_t> replies;
  for (const auto& [id, stream] : logs) {
    for (const auto& r : stream) {
      if (r.event_type != EventType::AgentReplied) continue;
      try {
        ++replies[sender_of(r)];
      } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("AgentReplied: ") + e.what());
      }
    }
  }

  RoleDistribution out;
  std::map<registry::Category, int64_t> per_category;
  for (const auto& agent : agents) {
    auto it = replies.find(agent.agent_id);
    out.entries.push_back({agent.agent_id, agent.name, agent.category,
                           it == replies.end() ? 0 : it->second});
    ++per_category[agent.category];
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const RoleEntry& a, const RoleEntry& b) {
    if (a.interactions != b.interactions) return a.interactions > b.interactions;
    if (a.name != b.name) return a.name < b.name;
    return a.agent_id < b.agent_id;
  });
  if (out.entries.size() > top_k) out.entries.resize(top_k);

  auto total = static_cast<int64_t>(agents.size());
  for (auto category : {registry::Category::Entertainment, registry::Category::Utility}) {
    out.category_share[category] =
        total == 0 ? 0.0 : from_hundredths(percent_hundredths(per_category[category], total));
  }
  return out;
}

std::vector<registry::AgentProfile> load_agents(const fs::path& dir) {
  std::vector<registry::AgentProfile> out;
  std::ifstream in(dir / "agents.jsonl");
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<registry::AgentProfile>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CorruptLog, "agents.jsonl: " + std::string(e.what()));
    }
  }
  return out;
}

json to_json(const std::vector<MetricReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    out.push_back({{"metric", to_string(r.metric)},
                   {"control_value", r.control_value},
                   {"treatment_value", r.treatment_value},
                   {"improvement_pct", r.improvement_pct}});
  }
  return out;
}

json to_json(const std::vector<RetentionReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    out.push_back({{"horizon_days", r.horizon_days},
                   {"cohort_size", r.cohort_size},
                   {"retained", r.retained},
                   {"rate_pct", r.rate_pct}});
  }
  return out;
}

json to_json(const RoleDistribution& d) {
  json entries = json::array();
  for (const auto& e : d.entries) {
    entries.push_back({{"agent_id", e.agent_id},
                       {"name", e.name},
                       {"category", registry::to_string(e.category)},
                       {"interactions", e.interactions}});
  }
  json share = json::object();
  for (const auto& [category, pct] : d.category_share) {
    share[std::string(registry::to_string(category))] = pct;
  }
  return json{{"entries", std::move(entries)}, {"category_share", std::move(share)}};
}

std::string format_table(const std::vector<MetricReport>& reports) {
  constexpr std::size_t kLabel = 17;
  constexpr std::size_t kColumn = 20;
  std::ostringstream out;
  out << pad("Metric", kLabel);
  for (const auto& r : reports) out << pad(std::string(display_name(r.metric)), kColumn);
  out << "\n" << pad("Control", kLabel);
  for (const auto& r : reports) out << pad(fixed_2dp(r.control_value), kColumn);
  out << "\n" << pad("Treatment", kLabel);
  for (const auto& r : reports) out << pad(fixed_2dp(r.treatment_value), kColumn);
  out << "\n" << pad("Improvement (%)", kLabel);
  for (const auto& r : reports) out << pad(signed_2dp(r.improvement_pct), kColumn);
  out << "\n";
  return out.str();
}

std::string format_table(const std::vector<RetentionReport>& reports) {
  std::ostringstream out;
  out << pad("Horizon", 10) << pad("Cohort", 10) << pad("Retained", 10) << "Rate (%)\n";
  for (const auto& r : reports) {
    out << pad(std::to_string(r.horizon_days) + "d", 10) << pad(std::to_string(r.cohort_size), 10)
        << pad(std::to_string(r.retained), 10) << fixed_2dp(r.rate_pct) << "\n";
  }
  return out.str();
}

std::string format_table(const RoleDistribution& d) {
  std::ostringstream out;
  out << pad("Rank", 6) << pad("Agent", 34) << pad("Category", 15) << "Replies\n";
  int rank = 1;
  for (const auto& e : d.entries) {
    out << pad(std::to_string(rank++), 6) << pad(e.name, 34)
        << pad(std::string(registry::to_string(e.category)), 15) << e.interactions << "\n";
  }
  out << "\n";
  for (const auto& [category, pct] : d.category_share) {
    out << pad(std::string(registry::to_string(category)), 15) << fixed_2dp(pct) << "%\n";
  }
  return out.str();
}

}  // namespace gcagent::analytics
