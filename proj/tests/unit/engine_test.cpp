#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "gcagent/common/error.hpp"
#include "gcagent/engine/engine.hpp"

namespace gcagent::engine {
namespace {

using dialogue::ChatMessage;
using dialogue::DialogueContext;
using nlohmann::json;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

ChatMessage msg(int64_t seq, std::string sender, std::string body,
                dialogue::SenderKind kind = dialogue::SenderKind::Human) {
  ChatMessage m;
  m.group_id = "g";
  m.seq = seq;
  m.msg_id = dialogue::make_msg_id("g", seq);
  m.sender = std::move(sender);
  m.sender_kind = kind;
  m.body = std::move(body);
  return m;
}

DialogueContext context_with_window(int window) {
  DialogueContext ctx;
  ctx.agent_id = "agt_000001";
  ctx.agent_name = "DJ Bot";
  ctx.role_configuration = "You spin records and crack jokes.";
  for (int i = 1; i <= window; ++i) {
    bool agent = i % 5 == 0;
    ctx.history_window.push_back(msg(i, agent ? "agt_000001" : (i % 2 ? "alice" : "bob"),
                                     "body " + std::to_string(i),
                                     agent ? dialogue::SenderKind::Agent : dialogue::SenderKind::Human));
  }
  ctx.latest_message = msg(window + 1, "alice", "@DJ Bot sing!");
  ctx.display_names = {{"alice", "alice"}, {"bob", "bob"}, {"agt_000001", "DJ Bot"}};
  return ctx;
}

TEST(BuildPrompt, EmptyWindowGivesOneTurn) {
  auto req = build_prompt(context_with_window(0));
  ASSERT_EQ(req.turns.size(), 1u);
  EXPECT_EQ(req.turns[0].text, "@DJ Bot sing!");
  EXPECT_EQ(req.turns[0].speaker_label, "alice");
  EXPECT_NE(req.system_text.find("You spin records and crack jokes."), std::string::npos);
}

TEST(BuildPrompt, Deterministic) {
  auto ctx = context_with_window(12);
  auto a = build_prompt(ctx);
  auto b = build_prompt(ctx);
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize(a), serialize(b));
}

TEST(BuildPrompt, ThirtyMessageWindowMapsDirectly) {
  auto ctx = context_with_window(30);
  auto req = build_prompt(ctx);
  ASSERT_EQ(req.turns.size(), 31u);
  // Oracle: each window message maps to (display name, body), in order.
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& m = ctx.history_window[i];
    EXPECT_EQ(req.turns[i].text, m.body);
    EXPECT_EQ(req.turns[i].speaker_label, ctx.display_names.at(m.sender));
  }
  EXPECT_EQ(req.turns.back().text, ctx.latest_message.body);
}

TEST(BuildPrompt, DistinctLatestMessagesNeverCollide) {
  auto ctx = context_with_window(5);
  std::set<std::string> ids;
  std::set<std::string> bytes;
  for (int i = 0; i < 500; ++i) {
    ctx.latest_message.body = "message " + std::to_string(i);
    auto req = build_prompt(ctx);
    bytes.insert(serialize(req));
    ids.insert(req.request_id);
  }
  EXPECT_EQ(bytes.size(), 500u);
  EXPECT_EQ(ids.size(), 500u);
}

TEST(BuildPrompt, DoesNotMutateContext) {
  auto ctx = context_with_window(8);
  auto copy = ctx;
  build_prompt(ctx);
  EXPECT_EQ(ctx, copy);
}

TEST(ChatCompletion, WireShape) {
  auto req = build_prompt(context_with_window(5));
  json body = to_chat_completion(req, "m1");
  EXPECT_EQ(body["model"], "m1");
  EXPECT_EQ(body["max_tokens"], 256);
  const auto& messages = body["messages"];
  ASSERT_EQ(messages.size(), 7u);
  EXPECT_EQ(messages[0]["role"], "system");
  EXPECT_EQ(messages[1]["role"], "user");
  EXPECT_EQ(messages[1]["content"], "alice: body 1");
  EXPECT_EQ(messages[5]["role"], "assistant");
  EXPECT_EQ(messages[5]["content"], "body 5");
  EXPECT_EQ(messages[6]["content"], "alice: @DJ Bot sing!");
}

TEST(Mock, DeterministicSeededEcho) {
  auto req = build_prompt(context_with_window(3));
  auto a = mock_complete(req, 7);
  auto b = mock_complete(req, 7);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.finish_reason, FinishReason::Stop);
  EXPECT_NE(a.text.find("sing!"), std::string::npos);
  EXPECT_NE(a.text.find("seed=7"), std::string::npos);
  EXPECT_NE(mock_complete(req, 8).text, a.text);
  MockEngine engine(7);
  EXPECT_EQ(engine.complete(req).text, a.text);
}

TEST(Mock, SeedsRarelyCollide) {
  auto req = build_prompt(context_with_window(3));
  std::set<std::string> texts;
  for (uint64_t seed = 0; seed < 200; ++seed) texts.insert(mock_complete(req, seed).text);
  EXPECT_EQ(texts.size(), 200u);
}

TEST(EngineConfigTest, Validation) {
  EngineConfig c;
  c.endpoint = "http://localhost/x";
  EXPECT_NO_THROW(c.validate());
  c.temperature = 2.5;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
  c.temperature = 0;
  c.max_tokens = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);
  c.max_tokens = 1;
  c.timeout_ms = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidConfig);

  Config cfg = Config::parse(
      "engine.endpoint = http://h:1/v1\nengine.model = m\nengine.temperature = 1.5\n"
      "engine.max_tokens = 64\nengine.timeout_ms = 900\nengine.credential_ref = KEY\n");
  auto parsed = EngineConfig::from_config(cfg);
  EXPECT_EQ(parsed.endpoint, "http://h:1/v1");
  EXPECT_EQ(parsed.model_name, "m");
  EXPECT_DOUBLE_EQ(parsed.temperature, 1.5);
  EXPECT_EQ(parsed.max_tokens, 64);
  EXPECT_EQ(parsed.timeout_ms, 900);
  EXPECT_EQ(parsed.credential_ref, "KEY");
}

TEST(MakeEngine, Backends) {
  EXPECT_NE(dynamic_cast<MockEngine*>(make_engine(Config{}).get()), nullptr);
  Config remote = Config::parse("engine.backend = remote\nengine.endpoint = http://127.0.0.1:9/x\n");
  EXPECT_NE(dynamic_cast<RemoteEngine*>(make_engine(remote).get()), nullptr);
  EXPECT_EQ(code_of([] { make_engine(Config::parse("engine.backend = magic\n")); }),
            ErrorCode::InvalidConfig);
}

// Scripted chat-completion server on a free local port.
class FakeCompletionServer {
 public:
  FakeCompletionServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      res.status = status;
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeCompletionServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

  std::atomic<int> calls{0};
  json last_body;
  std::string last_auth;
  int status = 200;
  int delay_ms = 0;
  json reply = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "hi"}}},
                                          {"finish_reason", "stop"}}})},
                {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 1}}}};

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

EngineConfig config_for(const FakeCompletionServer& server) {
  EngineConfig c;
  c.endpoint = server.url();
  c.model_name = "fake-model";
  c.credential_ref = "GCAGENT_TEST_KEY";
  c.timeout_ms = 2000;
  return c;
}

class RemoteEngineTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv("GCAGENT_TEST_KEY", "sekrit", 1); }
  void TearDown() override { ::unsetenv("GCAGENT_TEST_KEY"); }
  FakeCompletionServer server;
};

TEST_F(RemoteEngineTest, CannedCompletion) {
  auto req = build_prompt(context_with_window(2));
  auto res = complete(req, config_for(server));
  EXPECT_EQ(res.text, "hi");
  EXPECT_EQ(res.finish_reason, FinishReason::Stop);
  EXPECT_EQ(res.token_usage.prompt_tokens, 12);
  EXPECT_EQ(server.calls.load(), 1);
  EXPECT_EQ(server.last_auth, "Bearer sekrit");
  EXPECT_EQ(server.last_body, to_chat_completion(req, "fake-model"));
}

TEST_F(RemoteEngineTest, MissingCredentialMakesNoCall) {
  ::unsetenv("GCAGENT_TEST_KEY");
  auto req = build_prompt(context_with_window(0));
  EXPECT_EQ(code_of([&] { complete(req, config_for(server)); }), ErrorCode::MissingCredential);
  EXPECT_EQ(server.calls.load(), 0);
}

TEST_F(RemoteEngineTest, RemoteErrorCarriesStatus) {
  server.status = 429;
  server.reply = {{"error", {{"message", "slow down"}}}};
  try {
    complete(build_prompt(context_with_window(0)), config_for(server));
    FAIL() << "expected RemoteError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RemoteError);
    EXPECT_EQ(e.status(), 429);
    EXPECT_EQ(e.detail(), "slow down");
  }
}

TEST_F(RemoteEngineTest, TimesOutWithinBound) {
  server.delay_ms = 800;
  EngineConfig c = config_for(server);
  c.timeout_ms = 150;
  auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] { complete(build_prompt(context_with_window(0)), c); }), ErrorCode::Timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(150 + 500));
}

TEST_F(RemoteEngineTest, LengthAndEmptyFinish) {
  server.reply["choices"][0]["finish_reason"] = "length";
  EXPECT_EQ(complete(build_prompt(context_with_window(0)), config_for(server)).finish_reason,
            FinishReason::Length);
  server.reply["choices"][0]["finish_reason"] = "stop";
  server.reply["choices"][0]["message"]["content"] = "";
  EXPECT_EQ(complete(build_prompt(context_with_window(0)), config_for(server)).finish_reason,
            FinishReason::Error);
}

TEST_F(RemoteEngineTest, MalformedBodyIsTransportError) {
  server.reply = {{"unexpected", true}};
  EXPECT_EQ(code_of([&] { complete(build_prompt(context_with_window(0)), config_for(server)); }),
            ErrorCode::TransportError);
}

TEST(RemoteEngineNoServer, ConnectionRefusedIsTransportError) {
  // Port 1 is privileged and unused here.
  EngineConfig c;
  c.endpoint = "http://127.0.0.1:1/v1";
  c.credential_ref = "";
  c.timeout_ms = 1000;
  EXPECT_EQ(code_of([&] { complete(build_prompt(context_with_window(0)), c); }),
            ErrorCode::TransportError);
}

}  // namespace
}  // namespace gcagent::engine
