#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <thread>

#include "gcagent/common/error.hpp"
#include "gcagent/events/event_log.hpp"
#include "support/test_support.hpp"

namespace gcagent::events {
namespace {

using gcagent::testing::TempDir;
using namespace std::chrono_literals;

EventRecord created(const std::string& gid) {
  return {EventType::GroupCreated, gid, 1, nlohmann::json::object(), 100};
}

EventRecord joined(const std::string& gid, int64_t seq, const std::string& user = "u") {
  return {EventType::ParticipantJoined, gid, seq, {{"user_id", user}}, 100 + seq};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

TEST(EventRecordJson, RoundTripAndValidation) {
  EventRecord r = joined("g", 2, "alice");
  EXPECT_EQ(nlohmann::json(r).get<EventRecord>(), r);
  auto bad_type = nlohmann::json(r);
  bad_type["event_type"] = "Teleported";
  EXPECT_EQ(code_of([&] { bad_type.get<EventRecord>(); }), ErrorCode::CorruptLog);
  EventRecord missing{EventType::MessageViewed, "g", 2, {{"user_id", "u"}}, 0};
  EXPECT_EQ(code_of([&] { check_payload(missing); }), ErrorCode::InvalidArgument);
}

TEST(EventLog, AppendToEmptyLogGivesPositionOne) {
  EventLog log;
  EXPECT_EQ(log.append_event(created("g")), 1);
  EXPECT_EQ(log.tail_seq("g"), 1);
}

TEST(EventLog, SequenceViolations) {
  EventLog log;
  EXPECT_EQ(code_of([&] { log.append_event(joined("g", 1)); }), ErrorCode::SequenceViolation);
  log.append_event(created("g"));
  EXPECT_EQ(code_of([&] { log.append_event(joined("g", 3)); }), ErrorCode::SequenceViolation);
  EXPECT_EQ(code_of([&] { log.append_event(joined("g", 1)); }), ErrorCode::SequenceViolation);
  EXPECT_EQ(code_of([&] { log.append_event(created("g")); }), ErrorCode::SequenceViolation);
  EXPECT_EQ(log.append_event(joined("g", 2)), 2);
}

TEST(EventLog, RejectsBadGroupIds) {
  EventLog log;
  for (const std::string& gid : std::vector<std::string>{"", ".hidden", "a/b", "../x", std::string(65, 'a')}) {
    EXPECT_EQ(code_of([&] { log.append_event(created(gid)); }), ErrorCode::InvalidArgument) << gid;
  }
}

TEST(EventLog, ThousandAppendsReadBackInOrder) {
  EventLog log;
  log.append_event(created("g"));
  for (int64_t seq = 2; seq <= 1000; ++seq) log.append_event(joined("g", seq));
  auto all = log.read_events("g", 1);
  ASSERT_EQ(all.size(), 1000u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].seq, static_cast<int64_t>(i + 1));
}

TEST(EventLog, ReadSlices) {
  EventLog log;
  log.append_event(created("g"));
  for (int64_t seq = 2; seq <= 20; ++seq) log.append_event(joined("g", seq));
  EXPECT_TRUE(log.read_events("g", 21).empty());
  EXPECT_EQ(log.read_events("g", 1).size(), 20u);
  for (int64_t k = 1; k <= 20; ++k) {
    auto slice = log.read_events("g", k);
    ASSERT_EQ(slice.size(), static_cast<std::size_t>(20 - k + 1));
    EXPECT_EQ(slice.front().seq, k);
  }
  EXPECT_EQ(code_of([&] { log.read_events("nope", 1); }), ErrorCode::UnknownGroup);
  EXPECT_EQ(code_of([&] { log.read_events("g", 0); }), ErrorCode::InvalidArgument);
}

TEST(EventLog, PositionsStrictlyIncreaseAcrossGroups) {
  EventLog log;
  int64_t last = 0;
  for (int i = 0; i < 5; ++i) {
    std::string gid = "g" + std::to_string(i);
    int64_t pos = log.append_event(created(gid));
    EXPECT_GT(pos, last);
    last = pos;
    pos = log.append_event(joined(gid, 2));
    EXPECT_GT(pos, last);
    last = pos;
  }
}

TEST(EventLog, PersistsAndReloads) {
  TempDir dir;
  {
    EventLog log(dir.path(), false);
    log.append_event(created("g1"));
    log.append_event(joined("g1", 2, "alice"));
    log.append_event(created("g2"));
  }
  EventLog log(dir.path(), false);
  EXPECT_EQ(log.tail_seq("g1"), 2);
  EXPECT_EQ(log.tail_seq("g2"), 1);
  EXPECT_EQ(log.read_events("g1", 2).front().payload["user_id"], "alice");
  EXPECT_EQ(log.append_event(joined("g1", 3)), 4);
  EventLog again(dir.path(), false);
  EXPECT_EQ(again.tail_seq("g1"), 3);
}

TEST(EventLog, TornFinalLineIsDropped) {
  TempDir dir;
  {
    EventLog log(dir.path(), false);
    log.append_event(created("g"));
    log.append_event(joined("g", 2));
  }
  auto file = dir.path() / "groups" / "g.jsonl";
  {
    std::ofstream out(file, std::ios::app | std::ios::binary);
    out << R"({"event_type":"ParticipantJoined","group_id":"g","se)";
  }
  EventLog log(dir.path(), false);
  EXPECT_EQ(log.tail_seq("g"), 2);
  log.append_event(joined("g", 3));
  EventLog again(dir.path(), false);
  EXPECT_EQ(again.tail_seq("g"), 3);
}

TEST(EventLog, CorruptMiddleLineIsAnError) {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "groups");
  std::ofstream(dir.path() / "groups" / "g.jsonl")
      << nlohmann::json(created("g")).dump() << "\n{garbage\n"
      << nlohmann::json(joined("g", 2)).dump() << "\n";
  EXPECT_EQ(code_of([&] { EventLog log(dir.path(), false); }), ErrorCode::CorruptLog);
}

TEST(EventLog, GapInFileIsAnError) {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "groups");
  std::ofstream(dir.path() / "groups" / "g.jsonl")
      << nlohmann::json(created("g")).dump() << "\n"
      << nlohmann::json(joined("g", 3)).dump() << "\n";
  EXPECT_EQ(code_of([&] { EventLog log(dir.path(), false); }), ErrorCode::CorruptLog);
}

TEST(Subscription, BacklogThenLiveEvents) {
  EventLog log;
  log.append_event(created("g"));
  log.append_event(joined("g", 2));
  auto sub = log.subscribe("g", 1);
  std::thread writer([&] {
    std::this_thread::sleep_for(20ms);
    log.append_event(joined("g", 3));
  });
  std::vector<int64_t> seen;
  for (int i = 0; i < 3; ++i) {
    auto e = sub->next(2s);
    ASSERT_TRUE(e);
    seen.push_back(e->seq);
  }
  writer.join();
  EXPECT_EQ(seen, (std::vector<int64_t>{1, 2, 3}));
  EXPECT_FALSE(sub->next(10ms));
}

TEST(Subscription, CloseWakesWaiters) {
  EventLog log;
  log.append_event(created("g"));
  auto sub = log.subscribe("g", 2);
  std::thread closer([&] {
    std::this_thread::sleep_for(20ms);
    log.close_subscriptions();
  });
  auto start = std::chrono::steady_clock::now();
  EXPECT_FALSE(sub->next(5s));
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2s);
  EXPECT_TRUE(sub->closed());
  closer.join();
}

// Property: concurrent writers to many groups with many subscribers; every
// subscriber sees exactly its group's events once, in seq order.
TEST(SubscriptionProperty, OrderedExactlyOnceUnderConcurrency) {
  EventLog log;
  constexpr int kGroups = 4;
  constexpr int kPerGroup = 300;
  for (int g = 0; g < kGroups; ++g) log.append_event(created("g" + std::to_string(g)));
  std::vector<std::shared_ptr<Subscription>> subs;
  for (int g = 0; g < kGroups; ++g) {
    for (int k = 0; k < 2; ++k) subs.push_back(log.subscribe("g" + std::to_string(g), 1));
  }
  std::vector<std::vector<int64_t>> seen(subs.size());
  std::vector<std::thread> readers;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    readers.emplace_back([&, i] {
      while (seen[i].size() < kPerGroup + 1) {
        auto e = subs[i]->next(5s);
        if (!e) break;
        seen[i].push_back(e->seq);
      }
    });
  }
  std::vector<std::thread> writers;
  for (int g = 0; g < kGroups; ++g) {
    writers.emplace_back([&, g] {
      std::string gid = "g" + std::to_string(g);
      for (int64_t seq = 2; seq <= kPerGroup + 1; ++seq) log.append_event(joined(gid, seq));
    });
  }
  for (auto& t : writers) t.join();
  for (auto& t : readers) t.join();
  for (const auto& s : seen) {
    ASSERT_EQ(s.size(), static_cast<std::size_t>(kPerGroup + 1));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], static_cast<int64_t>(i + 1));
  }
}

}  // namespace
}  // namespace gcagent::events
