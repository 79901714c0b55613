#include <gtest/gtest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "gcagent/common/error.hpp"
#include "gcagent/plugins/plugins.hpp"

namespace gcagent::plugins {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

PluginRequest tts(std::string text, std::optional<std::string> style = std::nullopt) {
  PluginRequest r;
  r.kind = PluginKind::TTS;
  r.text = std::move(text);
  r.voice_style_id = std::move(style);
  return r;
}

PluginRequest asr(std::string blob) {
  PluginRequest r;
  r.kind = PluginKind::ASR;
  r.audio_ref = std::move(blob);
  return r;
}

std::string random_utf8(std::mt19937_64& rng) {
  static const char* atoms[] = {"a", "Z", " ", ":", "\n", "\xC3\xA9", "\xE4\xBD\xA0", "\xF0\x9F\x8E\xB5", "0", "%"};
  std::string out;
  int n = static_cast<int>(rng() % 24);
  for (int i = 0; i < n; ++i) out += atoms[rng() % 10];
  return out;
}

TEST(PluginKinds, Parse) {
  EXPECT_EQ(parse_plugin_kind("tts"), PluginKind::TTS);
  EXPECT_EQ(parse_plugin_kind("ASR"), PluginKind::ASR);
  EXPECT_EQ(parse_plugin_kind("TtSing"), PluginKind::TTSing);
  EXPECT_FALSE(parse_plugin_kind("video"));
  EXPECT_EQ(to_string(PluginKind::TTSing), "TTSing");
}

TEST(Stub, TtsThenAsrRoundTrip) {
  auto registry = AdapterRegistry::stubs();
  auto spoken = dispatch(tts("hello there", "warm_female"), registry);
  ASSERT_TRUE(spoken.audio_ref);
  EXPECT_EQ(spoken.kind, PluginKind::TTS);
  EXPECT_EQ(spoken.metadata.at("style"), "warm_female");
  EXPECT_EQ(spoken.metadata.at("duration_ms"), std::to_string(11 * 60));
  auto heard = dispatch(asr(*spoken.audio_ref), registry);
  EXPECT_EQ(heard.text, "hello there");
}

TEST(Stub, SingingIsSlowerThanSpeech) {
  auto sung = stub_ttsing("la la", std::nullopt);
  EXPECT_EQ(sung.kind, PluginKind::TTSing);
  EXPECT_EQ(sung.metadata.at("duration_ms"), std::to_string(5 * 150));
  EXPECT_EQ(stub_asr(*sung.audio_ref).text, "la la");
}

TEST(Stub, Deterministic) {
  EXPECT_EQ(stub_tts("same", "s"), stub_tts("same", "s"));
  EXPECT_NE(stub_tts("same", "s").audio_ref, stub_tts("same", "t").audio_ref);
}

// Property: ASR(TTS(t)) == t for any UTF-8 text, style and synthesis kind.
TEST(StubProperty, RoundTrip) {
  std::mt19937_64 rng(3);
  auto registry = AdapterRegistry::stubs();
  for (int i = 0; i < 1000; ++i) {
    std::string text = random_utf8(rng);
    std::optional<std::string> style;
    if (rng() % 2) style = random_utf8(rng);
    PluginRequest request = tts(text, style);
    if (rng() % 2) request.kind = PluginKind::TTSing;
    auto blob = dispatch(request, registry).audio_ref;
    ASSERT_TRUE(blob);
    auto heard = dispatch(asr(*blob), registry);
    ASSERT_EQ(heard.text, text);
    EXPECT_EQ(heard.metadata.at("style"), style.value_or(""));
  }
}

TEST(Stub, ForeignBlob) {
  EXPECT_EQ(stub_asr("RIFF....WAVEfmt").text, std::string(kUnrecognizedAudio));
}

TEST(Stub, DamagedBlob) {
  EXPECT_EQ(code_of([] { stub_asr(""); }), ErrorCode::MalformedBlob);
  EXPECT_EQ(code_of([] { stub_asr("stub-audio:v1:TTS:zz:41"); }), ErrorCode::MalformedBlob);
  EXPECT_EQ(code_of([] { stub_asr("stub-audio:v1:TTS:41"); }), ErrorCode::MalformedBlob);
  EXPECT_EQ(code_of([] { stub_asr("stub-audio:v1:FAX::41"); }), ErrorCode::MalformedBlob);
  EXPECT_EQ(code_of([] { stub_asr("stub-audio:v1:TTS::4"); }), ErrorCode::MalformedBlob);
}

TEST(Dispatch, PayloadMismatch) {
  auto registry = AdapterRegistry::stubs();
  PluginRequest bad = tts("x");
  bad.audio_ref = "y";
  EXPECT_EQ(code_of([&] { dispatch(bad, registry); }), ErrorCode::InvalidArgument);
  PluginRequest empty_asr;
  empty_asr.kind = PluginKind::ASR;
  EXPECT_EQ(code_of([&] { dispatch(empty_asr, registry); }), ErrorCode::InvalidArgument);
}

TEST(Dispatch, MissingAdapter) {
  AdapterRegistry none;
  EXPECT_EQ(code_of([&] { dispatch(tts("x"), none); }), ErrorCode::UnsupportedPlugin);
}

class ThrowingAdapter : public Adapter {
 public:
  PluginResult run(const PluginRequest&) override { throw std::runtime_error("device busy"); }
  std::string name() const override { return "throwing"; }
};

class WrongKindAdapter : public Adapter {
 public:
  PluginResult run(const PluginRequest&) override {
    PluginResult r;
    r.kind = PluginKind::ASR;
    r.text = "oops";
    return r;
  }
  std::string name() const override { return "wrong"; }
};

TEST(Dispatch, AdapterFailures) {
  AdapterRegistry registry;
  registry.register_adapter(PluginKind::TTS, std::make_shared<ThrowingAdapter>());
  registry.register_adapter(PluginKind::TTSing, std::make_shared<WrongKindAdapter>());
  EXPECT_EQ(code_of([&] { dispatch(tts("x"), registry); }), ErrorCode::AdapterFailure);
  PluginRequest sing = tts("x");
  sing.kind = PluginKind::TTSing;
  EXPECT_EQ(code_of([&] { dispatch(sing, registry); }), ErrorCode::AdapterFailure);
}

TEST(Dispatch, RequestUnchanged) {
  auto registry = AdapterRegistry::stubs();
  PluginRequest request = tts("keep me", "style");
  nlohmann::json before = request;
  dispatch(request, registry);
  EXPECT_EQ(nlohmann::json(request), before);
}

TEST(Json, RequestAndResultRoundTrip) {
  PluginRequest request = tts("hi", "v");
  auto back = nlohmann::json(request).get<PluginRequest>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(request));
  auto result = stub_tts("hi", "v");
  EXPECT_EQ(nlohmann::json(result).get<PluginResult>(), result);
  EXPECT_EQ(code_of([] { nlohmann::json{{"kind", "fax"}}.get<PluginRequest>(); }),
            ErrorCode::UnsupportedPlugin);
}

TEST(Config, Adapters) {
  Config config;
  config.set("plugins.asr.adapter", "none");
  config.set("plugins.tts.adapter", "remote");
  config.set("plugins.tts.url", "http://127.0.0.1:1/tts");
  auto registry = AdapterRegistry::from_config(config);
  EXPECT_EQ(registry.find(PluginKind::ASR), nullptr);
  EXPECT_EQ(registry.find(PluginKind::TTS)->name(), "remote");
  EXPECT_EQ(registry.find(PluginKind::TTSing)->name(), "stub");

  Config missing_url;
  missing_url.set("plugins.tts.adapter", "remote");
  EXPECT_EQ(code_of([&] { AdapterRegistry::from_config(missing_url); }), ErrorCode::InvalidConfig);
  Config unknown;
  unknown.set("plugins.tts.adapter", "magic");
  EXPECT_EQ(code_of([&] { AdapterRegistry::from_config(unknown); }), ErrorCode::InvalidConfig);
}

class FakeAdapterServer {
 public:
  explicit FakeAdapterServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/run", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeAdapterServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/run"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Remote, ForwardsAndParses) {
  FakeAdapterServer server([](const httplib::Request& req, httplib::Response& res) {
    auto request = nlohmann::json::parse(req.body).get<PluginRequest>();
    PluginResult result;
    result.kind = request.kind;
    result.text = "heard: " + request.audio_ref.value_or("");
    res.set_content(nlohmann::json(result).dump(), "application/json");
  });
  AdapterRegistry registry;
  registry.register_adapter(PluginKind::ASR, std::make_shared<RemoteAdapter>(server.url(), 2000));
  EXPECT_EQ(dispatch(asr("blob"), registry).text, "heard: blob");
}

TEST(Remote, FailuresMapToAdapterFailure) {
  FakeAdapterServer broken([](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("nope", "text/plain");
  });
  FakeAdapterServer garbage([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  for (const std::string& url : {broken.url(), garbage.url(), std::string("http://127.0.0.1:1/run"),
                                 std::string("not a url")}) {
    AdapterRegistry registry;
    registry.register_adapter(PluginKind::TTS, std::make_shared<RemoteAdapter>(url, 1000));
    EXPECT_EQ(code_of([&] { dispatch(tts("x"), registry); }), ErrorCode::AdapterFailure) << url;
  }
}

}  // namespace
}  // namespace gcagent::plugins
