#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gcagent/events/event_record.hpp"

namespace gcagent::events {

// Group ids double as file names: 1..64 of [A-Za-z0-9_.-], not starting
// with '.'.
bool is_valid_group_id(const std::string& group_id);

class EventLog;

namespace detail {
struct GroupStream;
}

// Cursor over one group's events. Delivers every event with seq >= the
// starting seq exactly once and in order, including events appended later.
class Subscription {
 public:
  // Blocks until the next event is available, the timeout expires, or the
  // log closes. Returns nullopt in the latter two cases.
  std::optional<EventRecord> next(std::chrono::milliseconds timeout);
  bool closed() const;
  void cancel();
  int64_t next_seq() const { return next_seq_; }

 private:
  friend class EventLog;

  Subscription(std::shared_ptr<detail::GroupStream> group, int64_t from_seq);

  std::shared_ptr<detail::GroupStream> group_;
  int64_t next_seq_;
  std::atomic<bool> cancelled_{false};
};

// Append-only event store, one stream per group. With a data directory each
// group is persisted as line-delimited JSON in <dir>/groups/<group_id>.jsonl.
class EventLog {
 public:
  // In-memory log.
  EventLog();
  // Loads any existing group files. Throws CorruptLog on a malformed file;
  // a final line cut off mid-write is dropped.
  explicit EventLog(std::filesystem::path data_dir, bool fsync = true);
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  // The record's seq must be exactly the group's tail + 1, and the first
  // record of a group must be GroupCreated. Returns the log-wide position
  // (1-based, strictly increasing). Errors: SequenceViolation,
  // StorageFailure, InvalidArgument.
  int64_t append_event(const EventRecord& record);

  // Errors: UnknownGroup, InvalidArgument (from_seq < 1).
  std::vector<EventRecord> read_events(const std::string& group_id, int64_t from_seq) const;

  // 0 when the group has no events.
  int64_t tail_seq(const std::string& group_id) const;
  bool has_group(const std::string& group_id) const;
  std::vector<std::string> group_ids() const;
  int64_t position() const { return position_.load(); }

  // Errors: UnknownGroup, InvalidArgument.
  std::shared_ptr<Subscription> subscribe(const std::string& group_id, int64_t from_seq);

  // Wakes and closes every subscription. Appends are still accepted.
  void close_subscriptions();

  const std::optional<std::filesystem::path>& data_dir() const { return dir_; }

 private:
  using Group = detail::GroupStream;
  std::shared_ptr<Group> find_group(const std::string& group_id) const;
  void load_group_file(const std::filesystem::path& file);

  std::optional<std::filesystem::path> dir_;
  bool fsync_ = false;
  mutable std::shared_mutex groups_mutex_;
  std::map<std::string, std::shared_ptr<Group>> groups_;
  std::atomic<int64_t> position_{0};
};

}  // namespace gcagent::events
