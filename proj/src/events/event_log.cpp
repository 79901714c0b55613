#include "gcagent/events/event_log.hpp"

#include <fstream>
#include <unistd.h>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::events {

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

struct GroupStream {
  std::mutex mutex;
  std::condition_variable appended;
  std::vector<EventRecord> events;
  std::FILE* file = nullptr;
  bool closed = false;

  ~GroupStream() {
    if (file != nullptr) std::fclose(file);
  }
};

}  // namespace detail

bool is_valid_group_id(const std::string& group_id) {
  if (group_id.empty() || group_id.size() > 64 || group_id.front() == '.') return false;
  for (char c : group_id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Subscription::Subscription(std::shared_ptr<detail::GroupStream> group, int64_t from_seq)
    : group_(std::move(group)), next_seq_(from_seq) {}

std::optional<EventRecord> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(group_->mutex);
  auto ready = [&] {
    return cancelled_.load() || group_->closed ||
           static_cast<int64_t>(group_->events.size()) >= next_seq_;
  };
  group_->appended.wait_for(lock, timeout, ready);
  if (static_cast<int64_t>(group_->events.size()) >= next_seq_ && !cancelled_.load()) {
    // seq k lives at index k - 1.
    return group_->events[static_cast<std::size_t>(next_seq_++ - 1)];
  }
  return std::nullopt;
}

bool Subscription::closed() const {
  std::lock_guard lock(group_->mutex);
  return group_->closed || cancelled_.load();
}

void Subscription::cancel() {
  cancelled_ = true;
  std::lock_guard lock(group_->mutex);
  group_->appended.notify_all();
}

EventLog::EventLog() = default;

EventLog::EventLog(fs::path data_dir, bool fsync) : dir_(std::move(data_dir)), fsync_(fsync) {
  std::error_code ec;
  fs::create_directories(*dir_ / "groups", ec);
  if (ec) {
    throw Error(ErrorCode::StorageFailure, "cannot create " + (*dir_ / "groups").string());
  }
  for (const auto& entry : fs::directory_iterator(*dir_ / "groups")) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      load_group_file(entry.path());
    }
  }
}

EventLog::~EventLog() { close_subscriptions(); }

void EventLog::load_group_file(const fs::path& file) {
  std::string group_id = file.stem().string();
  std::ifstream in(file, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto group = std::make_shared<Group>();
  std::size_t start = 0;
  std::size_t kept_bytes = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    bool terminated = end != std::string::npos;
    std::string_view line(content.data() + start, (terminated ? end : content.size()) - start);
    if (!text::trim(line).empty()) {
      EventRecord record;
      try {
        record = json::parse(line).get<EventRecord>();
      } catch (const std::exception& e) {
        if (!terminated) break;  // torn final write
        throw Error(ErrorCode::CorruptLog, file.string() + ": " + e.what());
      }
      if (record.group_id != group_id) {
        throw Error(ErrorCode::CorruptLog, file.string() + ": record for group " + record.group_id);
      }
      int64_t expected = static_cast<int64_t>(group->events.size()) + 1;
      if (record.seq != expected) {
        throw Error(ErrorCode::CorruptLog, file.string() + ": expected seq " +
                                               std::to_string(expected) + ", found " +
                                               std::to_string(record.seq));
      }
      group->events.push_back(std::move(record));
    }
    if (!terminated) break;
    start = end + 1;
    kept_bytes = start;
  }
  if (kept_bytes < content.size()) {
    fs::resize_file(file, kept_bytes);
  }
  group->file = std::fopen(file.c_str(), "ab");
  if (group->file == nullptr) {
    throw Error(ErrorCode::StorageFailure, "cannot open " + file.string());
  }
  position_ += static_cast<int64_t>(group->events.size());
  std::unique_lock lock(groups_mutex_);
  groups_[group_id] = std::move(group);
}

std::shared_ptr<EventLog::Group> EventLog::find_group(const std::string& group_id) const {
  std::shared_lock lock(groups_mutex_);
  auto it = groups_.find(group_id);
  return it == groups_.end() ? nullptr : it->second;
}

int64_t EventLog::append_event(const EventRecord& record) {
  check_payload(record);
  if (!is_valid_group_id(record.group_id)) {
    throw Error(ErrorCode::InvalidArgument, "invalid group id '" + record.group_id + "'");
  }

  std::shared_ptr<Group> group = find_group(record.group_id);
  if (!group) {
    if (record.event_type != EventType::GroupCreated || record.seq != 1) {
      throw Error(ErrorCode::SequenceViolation,
                  "group " + record.group_id + " must start with GroupCreated at seq 1");
    }
    std::unique_lock lock(groups_mutex_);
    auto [it, inserted] = groups_.try_emplace(record.group_id, std::make_shared<Group>());
    group = it->second;
  }

  std::lock_guard lock(group->mutex);
  int64_t expected = static_cast<int64_t>(group->events.size()) + 1;
  if (expected == 1 && record.event_type != EventType::GroupCreated) {
    throw Error(ErrorCode::SequenceViolation,
                "group " + record.group_id + " must start with GroupCreated at seq 1");
  }
  if (record.seq != expected) {
    throw Error(ErrorCode::SequenceViolation, "group " + record.group_id + ": expected seq " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(record.seq));
  }
  if (dir_) {
    if (group->file == nullptr) {
      fs::path path = *dir_ / "groups" / (record.group_id + ".jsonl");
      group->file = std::fopen(path.c_str(), "ab");
      if (group->file == nullptr) {
        throw Error(ErrorCode::StorageFailure, "cannot open " + path.string());
      }
    }
    std::string line = json(record).dump() + "\n";
    bool ok = std::fwrite(line.data(), 1, line.size(), group->file) == line.size() &&
              std::fflush(group->file) == 0;
    if (ok && fsync_) ok = ::fsync(::fileno(group->file)) == 0;
    if (!ok) {
      throw Error(ErrorCode::StorageFailure, "write failed for group " + record.group_id);
    }
  }
  group->events.push_back(record);
  int64_t pos = ++position_;
  group->appended.notify_all();
  return pos;
}

std::vector<EventRecord> EventLog::read_events(const std::string& group_id,
                                               int64_t from_seq) const {
  if (from_seq < 1) throw Error(ErrorCode::InvalidArgument, "from_seq must be >= 1");
  auto group = find_group(group_id);
  if (!group) throw Error(ErrorCode::UnknownGroup, "no group '" + group_id + "'");
  std::lock_guard lock(group->mutex);
  if (from_seq > static_cast<int64_t>(group->events.size())) return {};
  return {group->events.begin() + (from_seq - 1), group->events.end()};
}

int64_t EventLog::tail_seq(const std::string& group_id) const {
  auto group = find_group(group_id);
  if (!group) return 0;
  std::lock_guard lock(group->mutex);
  return static_cast<int64_t>(group->events.size());
}

bool EventLog::has_group(const std::string& group_id) const {
  return find_group(group_id) != nullptr;
}

std::vector<std::string> EventLog::group_ids() const {
  std::shared_lock lock(groups_mutex_);
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const auto& [id, group] : groups_) out.push_back(id);
  return out;
}

std::shared_ptr<Subscription> EventLog::subscribe(const std::string& group_id,
                                                  int64_t from_seq) {
  if (from_seq < 1) throw Error(ErrorCode::InvalidArgument, "from_seq must be >= 1");
  auto group = find_group(group_id);
  if (!group) throw Error(ErrorCode::UnknownGroup, "no group '" + group_id + "'");
  return std::shared_ptr<Subscription>(new Subscription(std::move(group), from_seq));
}

void EventLog::close_subscriptions() {
  std::shared_lock lock(groups_mutex_);
  for (const auto& [id, group] : groups_) {
    std::lock_guard group_lock(group->mutex);
    group->closed = true;
    group->appended.notify_all();
  }
}

}  // namespace gcagent::events
