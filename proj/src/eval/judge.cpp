#include <cctype>
#include <charconv>
#include <sstream>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"
#include "gcagent/eval/eval.hpp"

namespace gcagent::eval {

using nlohmann::json;

namespace {

constexpr std::string_view kDirectTask = "Task: direct scoring";
constexpr std::string_view kPairTask = "Task: pairwise comparison";

constexpr std::string_view kJudgeSystem =
    "You evaluate replies written by a dialogue agent taking part in a group chat. "
    "Be impartial. Always reason about the reply first and give your final judgement last.";

// Case-insensitive position of the last occurrence of `needle`.
std::size_t rfind_ci(std::string_view haystack, std::string_view needle) {
  std::string lower = text::ascii_lower(haystack);
  return lower.rfind(text::ascii_lower(needle));
}

void write_sample(std::ostringstream& out, const EvalSample& sample) {
  out << "[Agent role]\n" << sample.role_configuration << "\n\n";
  out << "[Conversation so far]\n";
  if (sample.history.empty()) out << "(no earlier messages)\n";
  for (const auto& turn : sample.history) out << turn.speaker << ": " << turn.text << "\n";
  out << "\n[Latest user message]\n" << sample.latest_message << "\n\n";
}

engine::EngineRequest judge_request(std::string body, const JudgeConfig& config) {
  engine::EngineRequest request;
  request.system_text = std::string(kJudgeSystem);
  request.agent_name = "judge";
  request.turns.push_back({"evaluator", std::move(body)});
  request.sampling = config.sampling;
  request.request_id = "judge_" + text::hex64(text::fnv1a64(engine::serialize(request)));
  return request;
}

const std::string& response_for(const EvalSample& sample, const std::string& label) {
  auto it = sample.responses.find(label);
  if (it == sample.responses.end()) {
    throw Error(ErrorCode::InvalidArgument, "sample has no response labelled '" + label + "'");
  }
  return it->second;
}

engine::EngineResponse call_judge(engine::Engine& judge, const engine::EngineRequest& request) {
  try {
    return judge.complete(request);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::Timeout:
      case ErrorCode::TransportError:
      case ErrorCode::RemoteError:
      case ErrorCode::MissingCredential:
        throw Error(ErrorCode::JudgeTransportError, e.what(), e.status());
      default:
        throw;
    }
  }
}

// Calls the judge until `parse` succeeds, at most 1 + parse_retries times.
template <typename Parse>
auto judge_with_retries(engine::Engine& judge, const engine::EngineRequest& request,
                        const JudgeConfig& config, Parse parse) {
  std::string last_problem;
  for (int attempt = 0; attempt <= config.parse_retries; ++attempt) {
    engine::EngineResponse response = call_judge(judge, request);
    try {
      return parse(response.text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoMarker && e.code() != ErrorCode::OutOfRange) throw;
      last_problem = e.what();
    }
  }
  throw Error(ErrorCode::UnparseableJudgeOutput,
              "after " + std::to_string(config.parse_retries + 1) + " calls: " + last_problem);
}

RawVerdict remap_reversed(RawVerdict raw) {
  if (raw == RawVerdict::First) return RawVerdict::Second;
  if (raw == RawVerdict::Second) return RawVerdict::First;
  return RawVerdict::Tie;
}

PairVerdict to_pair(RawVerdict raw_in_a_b_order) {
  switch (raw_in_a_b_order) {
    case RawVerdict::First: return PairVerdict::WinA;
    case RawVerdict::Second: return PairVerdict::WinB;
    case RawVerdict::Tie: return PairVerdict::Tie;
  }
  return PairVerdict::Tie;
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::Correctness: return "Correctness";
    case Criterion::Consistency: return "Consistency";
    case Criterion::Fairness: return "Fairness";
    case Criterion::Engagement: return "Engagement";
  }
  return "Correctness";
}

std::string_view rubric(Criterion criterion) {
  switch (criterion) {
    case Criterion::Correctness:
      return "Does the reply grasp what the user actually wants, and is the information "
             "or solution it offers right?";
    case Criterion::Consistency:
      return "Does the reply stay in the agent's configured role and fit the conversation "
             "so far, keeping a coherent, logical thread across turns?";
    case Criterion::Fairness:
      return "Is the reply free of bias, discrimination and ethically unsuitable content, "
             "without invented or inappropriate material?";
    case Criterion::Engagement:
      return "Is the reply easy to read and follow, to the point, and emotionally "
             "rewarding for the people in the chat?";
  }
  return "";
}

std::string_view to_string(PairVerdict verdict) {
  switch (verdict) {
    case PairVerdict::WinA: return "WinA";
    case PairVerdict::WinB: return "WinB";
    case PairVerdict::Tie: return "Tie";
  }
  return "Tie";
}

PairVerdict mirror(PairVerdict verdict) {
  if (verdict == PairVerdict::WinA) return PairVerdict::WinB;
  if (verdict == PairVerdict::WinB) return PairVerdict::WinA;
  return PairVerdict::Tie;
}

void to_json(json& j, const EvalSample& s) {
  json history = json::array();
  for (const auto& turn : s.history) {
    history.push_back({{"speaker", turn.speaker}, {"text", turn.text}});
  }
  j = json{{"role_configuration", s.role_configuration},
           {"history", std::move(history)},
           {"latest_message", s.latest_message},
           {"responses", s.responses}};
}

void from_json(const json& j, EvalSample& s) {
  s.role_configuration = j.at("role_configuration").get<std::string>();
  s.latest_message = j.at("latest_message").get<std::string>();
  s.history.clear();
  for (const auto& entry : j.value("history", json::array())) {
    if (entry.is_array()) {
      s.history.push_back({entry.at(0).get<std::string>(), entry.at(1).get<std::string>()});
    } else {
      s.history.push_back(
          {entry.at("speaker").get<std::string>(), entry.at("text").get<std::string>()});
    }
  }
  s.responses = j.at("responses").get<std::map<std::string, std::string>>();
  if (s.responses.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sample carries no responses");
  }
}

ParsedRating parse_judge_output(std::string_view text) {
  constexpr std::string_view kMarker = "Rating:";
  std::size_t at = rfind_ci(text, kMarker);
  if (at == std::string::npos) throw Error(ErrorCode::NoMarker, "no 'Rating:' marker");

  std::string_view after = text.substr(at + kMarker.size());
  std::size_t digit = after.find_first_of("0123456789");
  if (digit == std::string_view::npos) {
    throw Error(ErrorCode::NoMarker, "no score after 'Rating:'");
  }
  bool negative = digit > 0 && after[digit - 1] == '-';
  long long value = 0;
  auto [ptr, ec] = std::from_chars(after.data() + digit, after.data() + after.size(), value);
  if (ec != std::errc() || negative || value < 1 || value > 5) {
    throw Error(ErrorCode::OutOfRange,
                "score " + std::string(negative ? "-" : "") +
                    std::string(after.substr(digit, static_cast<std::size_t>(ptr - after.data()) - digit)) +
                    " outside 1..5");
  }
  ParsedRating parsed;
  parsed.rationale = std::string(text::trim(text.substr(0, at)));
  parsed.score = static_cast<int>(value);
  return parsed;
}

RawVerdict parse_pair_output(std::string_view text) {
  constexpr std::string_view kMarker = "Verdict:";
  std::size_t at = rfind_ci(text, kMarker);
  if (at == std::string::npos) throw Error(ErrorCode::NoMarker, "no 'Verdict:' marker");
  std::string_view rest = text::trim(text.substr(at + kMarker.size()));
  std::size_t end = 0;
  while (end < rest.size() && std::isalpha(static_cast<unsigned char>(rest[end]))) ++end;
  std::string word = text::ascii_lower(rest.substr(0, end));
  if (word == "first") return RawVerdict::First;
  if (word == "second") return RawVerdict::Second;
  if (word == "tie") return RawVerdict::Tie;
  throw Error(ErrorCode::OutOfRange, "unknown verdict '" + word + "'");
}

engine::EngineRequest direct_prompt(const EvalSample& sample, const std::string& label,
                                    Criterion criterion, const JudgeConfig& config) {
  std::ostringstream out;
  out << kDirectTask << "\n"
      << "Criterion: " << to_string(criterion) << "\n"
      << "Definition: " << rubric(criterion) << "\n"
      << "Scale: 1 = poor, 2 = fair, 3 = moderate, 4 = good, 5 = excellent.\n\n";
  write_sample(out, sample);
  out << "[Reply to evaluate]\n" << response_for(sample, label) << "\n\n"
      << "Write a detailed analysis of the reply against this criterion first. "
      << "Then end with a final line of the form \"Rating: N\", where N is an integer "
      << "from 1 to 5.";
  return judge_request(out.str(), config);
}

engine::EngineRequest pairwise_prompt(const EvalSample& sample, const std::string& first,
                                      const std::string& second, const JudgeConfig& config) {
  std::ostringstream out;
  out << kPairTask << "\n"
      << "Compare two candidate replies using all of these criteria:\n";
  for (Criterion c : kCriteria) out << "- " << to_string(c) << ": " << rubric(c) << "\n";
  out << "\n";
  write_sample(out, sample);
  out << "[Reply 1]\n" << first << "\n\n"
      << "[Reply 2]\n" << second << "\n\n"
      << "Analyse both replies first. Then end with a final line \"Verdict: first\" if "
      << "Reply 1 is better, \"Verdict: second\" if Reply 2 is better, or \"Verdict: tie\".";
  return judge_request(out.str(), config);
}

std::vector<CriterionScore> judge_direct(const EvalSample& sample, const std::string& label,
                                         engine::Engine& judge, const JudgeConfig& config) {
  std::vector<CriterionScore> scores;
  scores.reserve(kCriteria.size());
  for (Criterion criterion : kCriteria) {
    auto request = direct_prompt(sample, label, criterion, config);
    ParsedRating parsed = judge_with_retries(judge, request, config, parse_judge_output);
    if (parsed.rationale.empty()) parsed.rationale = "(no rationale given)";
    scores.push_back({criterion, parsed.score, std::move(parsed.rationale)});
  }
  return scores;
}

PairVerdict resolve_pair(PairVerdict forward, PairVerdict reversed) {
  return (forward == reversed && forward != PairVerdict::Tie) ? forward : PairVerdict::Tie;
}

PairVerdict judge_pairwise(const EvalSample& sample, const std::string& label_a,
                           const std::string& label_b, engine::Engine& judge,
                           const JudgeConfig& config) {
  const std::string& a = response_for(sample, label_a);
  const std::string& b = response_for(sample, label_b);
  RawVerdict forward =
      judge_with_retries(judge, pairwise_prompt(sample, a, b, config), config, parse_pair_output);
  RawVerdict reversed =
      judge_with_retries(judge, pairwise_prompt(sample, b, a, config), config, parse_pair_output);
  return resolve_pair(to_pair(forward), to_pair(remap_reversed(reversed)));
}

engine::EngineResponse HashJudge::complete(const engine::EngineRequest& request) {
  const std::string& prompt = request.turns.empty() ? request.system_text
                                                    : request.turns.back().text;
  uint64_t digest = text::fnv1a64(prompt, seed_);
  engine::EngineResponse response;
  std::ostringstream out;
  out << "Analysis: deterministic offline judgement " << text::hex64(digest).substr(0, 8)
      << ".\n";
  if (prompt.rfind(kPairTask, 0) == 0) {
    static constexpr const char* kWords[] = {"first", "second", "tie"};
    out << "Verdict: " << kWords[digest % 3];
  } else {
    out << "Rating: " << 1 + digest % 5;
  }
  response.text = out.str();
  return response;
}

std::unique_ptr<engine::Engine> make_judge(const Config& config) {
  std::string backend = config.get_string("judge.backend", "hash");
  if (backend == "hash") {
    return std::make_unique<HashJudge>(static_cast<uint64_t>(config.get_int("judge.seed", 0)));
  }
  if (backend == "remote") {
    engine::EngineConfig engine_config = engine::EngineConfig::from_config(config, "judge.");
    return std::make_unique<engine::RemoteEngine>(std::move(engine_config));
  }
  throw Error(ErrorCode::InvalidConfig, "judge.backend must be hash or remote");
}

}  // namespace gcagent::eval
