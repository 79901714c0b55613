// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "gcagent/analytics/analytics.hpp"
#include "gcagent/common/error.hpp"
#include "gcagent/dialogue/dialogue_manager.hpp"
#include "gcagent/dialogue/mentions.hpp"
#include "gcagent/eval/eval.hpp"
#include "gcagent/server/service.hpp"
#include "gcagent/validator/validator.hpp"
#include "support/test_support.hpp"
#include "support/validator_fixtures.hpp"

namespace {

using namespace gcagent;
using Steady = std::chrono::steady_clock;

struct Outcome {
  bool ok = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

bool same_2dp(double got, double want) { return fmt2(got) == fmt2(want); }

// ---- 1 ----------------------------------------------------------------------

std::vector<std::vector<eval::CriterionScore>> corpus_with_sums(const std::array<int, 4>& sums) {
  std::vector<std::vector<eval::CriterionScore>> out(100);
  for (std::size_t c = 0; c < 4; ++c) {
    for (int i = 0; i < 100; ++i) {
      int score = sums[c] / 100 + (i < sums[c] % 100 ? 1 : 0);
      out[static_cast<std::size_t>(i)].push_back({eval::kCriteria[c], score, "fixture"});
    }
  }
  return out;
}

Outcome direct_scoring() {
  struct Row {
    std::array<int, 4> sums;
    std::array<double, 4> means;
    double overall;
  };
  const Row rows[] = {{{440, 479, 494, 459}, {4.40, 4.79, 4.94, 4.59}, 4.68},
                      {{418, 433, 490, 427}, {4.18, 4.33, 4.90, 4.27}, 4.42}};
  std::string detail;
  for (const auto& row : rows) {
    auto summary = eval::aggregate_direct(corpus_with_sums(row.sums));
    for (std::size_t c = 0; c < 4; ++c) {
      if (!same_2dp(summary.means[eval::kCriteria[c]], row.means[c])) {
        return fail("mean " + fmt2(summary.means[eval::kCriteria[c]]) + " != " + fmt2(row.means[c]));
      }
    }
    if (!same_2dp(summary.overall, row.overall)) {
      return fail("overall " + fmt2(summary.overall) + " != " + fmt2(row.overall));
    }
    detail += (detail.empty() ? "overall " : ", ") + fmt2(summary.overall);
  }
  return {true, detail};
}

// ---- 2 ----------------------------------------------------------------------

Outcome pairwise_percentages() {
  std::vector<eval::PairVerdict> verdicts;
  verdicts.insert(verdicts.end(), 5104, eval::PairVerdict::WinA);
  verdicts.insert(verdicts.end(), 2957, eval::PairVerdict::Tie);
  verdicts.insert(verdicts.end(), 1939, eval::PairVerdict::WinB);
  auto s = eval::aggregate_pairwise(verdicts);
  std::string got = fmt2(s.win_pct) + "/" + fmt2(s.tie_pct) + "/" + fmt2(s.lose_pct);
  return {got == "51.04/29.57/19.39", got};
}

// ---- 3 ----------------------------------------------------------------------

Outcome ab_improvements() {
  using testing::AbArm;
  auto control = testing::build_arm(AbArm{255, 218, 1250, 0, 244, 30}, "c");
  auto treatment = testing::build_arm(AbArm{271, 241, 1288, 322, 271, 40}, "t");
  auto reports = analytics::compare(control, treatment);
  const double want[] = {4.02, 6.27, 11.07, 28.80};
  std::string got;
  bool ok = reports.size() == 4;
  for (std::size_t i = 0; ok && i < 4; ++i) {
    ok = same_2dp(reports[i].improvement_pct, want[i]);
    got += (i ? " " : "") + std::string("+") + fmt2(reports[i].improvement_pct);
  }
  return {ok, got};
}

// ---- 4 ----------------------------------------------------------------------

Outcome position_bias() {
  auto samples = eval::synthesize_corpus(1000, 42, {"A", "B"});
  const std::string marker = "<<A-content>>";
  for (auto& s : samples) s.responses["A"] = marker + " " + s.responses["A"];

  testing::PreferFirstJudge first;
  auto biased = eval::run_pairwise(samples, "A", "B", first, 4);
  if (biased.summary.ties != samples.size()) {
    return fail("prefer-first judge gave " + std::to_string(biased.summary.ties) + " ties");
  }
  testing::PreferContentJudge content(marker);
  auto consistent = eval::run_pairwise(samples, "A", "B", content, 4);
  if (consistent.summary.wins != samples.size()) {
    return fail("prefer-A judge gave " + std::to_string(consistent.summary.wins) + " WinA");
  }
  return {true, "1000/1000 Tie, 1000/1000 WinA"};
}

// ---- 5 ----------------------------------------------------------------------

Outcome sequencing_and_replay() {
  testing::TempDir dir;
  constexpr int kWriters = 8;
  constexpr int kPerWriter = 100;
  dialogue::GroupSession before;
  {
    registry::AgentRegistry registry;
    events::EventLog log(dir.path());
    dialogue::DialogueManager manager(registry, log);
    manager.create_group(std::string("g"));
    for (int w = 0; w < kWriters; ++w) manager.join("g", "writer" + std::to_string(w));

    std::vector<std::thread> threads;
    for (int w = 0; w < kWriters; ++w) {
      threads.emplace_back([&manager, w] {
        for (int i = 0; i < kPerWriter; ++i) {
          manager.ingest_message("g", "writer" + std::to_string(w), std::to_string(i));
        }
      });
    }
    for (auto& t : threads) t.join();
    before = manager.snapshot("g");
  }

  const auto& history = before.history;
  if (history.size() != kWriters * kPerWriter) return fail("history size " + std::to_string(history.size()));
  std::map<std::string, int> last_body;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].seq != static_cast<int64_t>(i + 1)) return fail("seq gap at " + std::to_string(i));
    int body = std::stoi(history[i].body);
    auto [it, fresh] = last_body.emplace(history[i].sender, body);
    if (!fresh) {
      if (body != it->second + 1) return fail("writer order broken for " + history[i].sender);
      it->second = body;
    }
  }

  registry::AgentRegistry registry;
  events::EventLog log(dir.path());
  dialogue::DialogueManager manager(registry, log);
  manager.restore_from_log();
  if (!(manager.snapshot("g") == before)) return fail("restored session differs");
  auto events = log.read_events("g", 1);
  if (!(dialogue::replay(events) == before)) return fail("replayed session differs");
  return {true, "seqs 1..800, restart state identical"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome mention_oracle() {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    auto c = testing::random_mention_case(rng);
    if (dialogue::parse_mentions(c.body, c.roster) != testing::brute_force_mentions(c.body, c.roster)) {
      return fail("disagreement on body '" + c.body + "'");
    }
  }
  return {true, "1000/1000 agree"};
}

// ---- 7 ----------------------------------------------------------------------

dialogue::DialogueContext retry_context() {
  dialogue::DialogueContext ctx;
  ctx.agent_id = "agt_000001";
  ctx.agent_name = "DJ Bot";
  ctx.latest_message.msg_id = "g:1";
  ctx.latest_message.group_id = "g";
  ctx.latest_message.seq = 1;
  ctx.latest_message.sender = "alice";
  ctx.latest_message.body = "@DJ Bot play";
  ctx.display_names = {{"alice", "alice"}, {"agt_000001", "DJ Bot"}};
  return ctx;
}

Outcome validator_suite() {
  const auto& rules = validator::Ruleset::builtin();
  auto roster = testing::fixture_roster();
  auto bad = testing::bad_replies();
  auto good = testing::good_replies();
  for (const auto& b : bad) {
    auto report = validator::validate(b.text, rules, roster);
    bool ok = b.repaired ? (!report.has_fatal() && report.repaired_text == b.repaired)
                         : report.has_fatal();
    if (!ok) return fail("bad fixture mishandled: '" + b.text.substr(0, 40) + "'");
  }
  for (const auto& g : good) {
    if (validator::validate(g, rules, roster).has_fatal()) return fail("good fixture flagged: '" + g + "'");
  }
  for (int max_retries = 0; max_retries <= 5; ++max_retries) {
    for (int needed = 1; needed <= 8; ++needed) {
      std::vector<std::string> script(static_cast<std::size_t>(needed - 1), "As an AI, no.");
      script.push_back("Here you go!");
      testing::ScriptedEngine engine(script);
      validator::RetryPolicy policy;
      policy.max_retries = max_retries;
      validator::generate_validated(retry_context(), engine, policy);
      if (engine.calls() != static_cast<std::size_t>(std::min(needed, max_retries + 1))) {
        return fail("retry calls " + std::to_string(engine.calls()) + " for needed=" +
                    std::to_string(needed) + " max_retries=" + std::to_string(max_retries));
      }
    }
  }
  return {true, std::to_string(bad.size()) + " bad, " + std::to_string(good.size()) +
                    " good, 48 retry cases"};
}

// ---- 8 ----------------------------------------------------------------------

Outcome end_to_end() {
  server::ServiceOptions options;
  options.workers = 2;
  server::ChatService service(options, std::make_unique<engine::MockEngine>(1));
  auto x = service.create_agent({"X", "A helpful test agent.", std::nullopt,
                                 registry::Category::Entertainment, std::nullopt, "acceptance"});
  service.create_group(std::string("g"));
  auto subscription = service.log().subscribe("g", 1);
  service.join("g", "alice");
  service.attach_agent("g", x.agent_id);
  auto posted = service.post_message("g", "alice", "@X hi");

  std::vector<events::EventRecord> seen;
  auto deadline = Steady::now() + std::chrono::seconds(4);
  while (Steady::now() < deadline) {
    auto event = subscription->next(std::chrono::milliseconds(100));
    if (!event) continue;
    seen.push_back(*event);
    if (event->event_type == events::EventType::AgentReplied) break;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i].seq != static_cast<int64_t>(i + 1)) return fail("out-of-order delivery");
  }
  if (seen.empty() || seen.back().event_type != events::EventType::AgentReplied) {
    return fail("no AgentReplied delivered");
  }
  const auto& reply_event = seen.back();
  auto reply = reply_event.payload.at("message").get<dialogue::ChatMessage>();
  if (reply_event.seq != 5) return fail("AgentReplied at seq " + std::to_string(reply_event.seq));
  if (reply.sender != x.agent_id) return fail("reply from " + reply.sender);
  if (reply_event.payload.at("trigger_msg_id") != posted.msg_id) return fail("wrong trigger");
  if (validator::validate(reply.body, validator::Ruleset::builtin(), {"X", "alice"}).has_fatal()) {
    return fail("reply fails validation");
  }
  return {true, "AgentReplied from X at seq 5, delivered in order"};
}

// ---- 9 ----------------------------------------------------------------------

constexpr const char* kScopeStatement =
    "The reported model-quality results and deployment outcomes are not reproducible here";

Outcome scope_statement(const std::string& readme_path) {
  std::ifstream in(readme_path);
  if (!in) return fail("cannot read " + readme_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.find(kScopeStatement) == std::string::npos) return fail("README lacks the scope statement");
  return {true, "README states that criteria 1-8 stand in for the unreproducible results"};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  std::string readme = argc > 1 ? argv[1] : "README.md";

  struct Criterion {
    int id;
    const char* title;
    std::chrono::milliseconds limit;
    std::function<Outcome()> run;
  };
  using std::chrono::milliseconds;
  const Criterion criteria[] = {
      {1, "direct-scoring arithmetic", milliseconds(1000), direct_scoring},
      {2, "pairwise arithmetic", milliseconds(1000), pairwise_percentages},
      {3, "A/B improvement arithmetic", milliseconds(5000), ab_improvements},
      {4, "position-bias protocol", milliseconds(10000), position_bias},
      {5, "sequencing and replay", milliseconds(10000), sequencing_and_replay},
      {6, "mention oracle", milliseconds(5000), mention_oracle},
      {7, "validator suite", milliseconds(5000), validator_suite},
      {8, "end-to-end with mock engine", milliseconds(5000), end_to_end},
      {9, "scope statement", milliseconds(1000), [&readme] { return scope_statement(readme); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = Steady::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("threw: ") + e.what());
    }
    auto elapsed = std::chrono::duration_cast<milliseconds>(Steady::now() - start);
    bool in_time = elapsed < c.limit;
    bool pass = outcome.ok && in_time;
    if (!pass) ++failures;
    std::printf("AC%d %s  %-28s %6lld ms (limit %lld ms)  %s%s\n", c.id, pass ? "PASS" : "FAIL",
                c.title, static_cast<long long>(elapsed.count()),
                static_cast<long long>(c.limit.count()), outcome.detail.c_str(),
                in_time ? "" : " [too slow]");
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
