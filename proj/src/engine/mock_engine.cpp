#include <sstream>

#include "gcagent/common/text.hpp"
#include "gcagent/engine/engine.hpp"

namespace gcagent::engine {

namespace {

int64_t word_count(std::string_view s) {
  int64_t words = 0;
  bool in_word = false;
  for (char c : s) {
    bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

}  // namespace

EngineResponse mock_complete(const EngineRequest& request, uint64_t seed) {
  uint64_t digest = text::fnv1a64(serialize(request), seed);
  std::string final_text = request.turns.empty() ? std::string() : request.turns.back().text;

  std::ostringstream out;
  out << "[mock seed=" << seed << " " << text::hex64(digest).substr(0, 8) << "] "
      << final_text;

  EngineResponse response;
  response.text = out.str();
  response.finish_reason = FinishReason::Stop;
  for (const auto& turn : request.turns) {
    response.token_usage.prompt_tokens += word_count(turn.text);
  }
  response.token_usage.prompt_tokens += word_count(request.system_text);
  response.token_usage.completion_tokens = word_count(response.text);
  return response;
}

EngineResponse MockEngine::complete(const EngineRequest& request) {
  return mock_complete(request, seed_);
}

}  // namespace gcagent::engine
