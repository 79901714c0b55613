#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/engine/engine.hpp"

namespace gcagent::eval {

enum class Criterion { Correctness, Consistency, Fairness, Engagement };

inline constexpr std::array<Criterion, 4> kCriteria{
    Criterion::Correctness, Criterion::Consistency, Criterion::Fairness, Criterion::Engagement};

std::string_view to_string(Criterion criterion);
// The rubric text embedded in each direct-scoring prompt.
std::string_view rubric(Criterion criterion);

struct HistoryTurn {
  std::string speaker;
  std::string text;

  bool operator==(const HistoryTurn&) const = default;
};

struct EvalSample {
  std::string role_configuration;
  std::vector<HistoryTurn> history;
  std::string latest_message;
  // system label -> candidate response
  std::map<std::string, std::string> responses;

  bool operator==(const EvalSample&) const = default;
};

void to_json(nlohmann::json& j, const EvalSample& s);
// History entries may be {"speaker","text"} objects or [speaker, text]
// pairs. Throws InvalidArgument when no response is present.
void from_json(const nlohmann::json& j, EvalSample& s);

struct CriterionScore {
  Criterion criterion = Criterion::Correctness;
  int score = 1;  // 1..5
  std::string rationale;

  bool operator==(const CriterionScore&) const = default;
};

enum class PairVerdict { WinA, WinB, Tie };
// A judge's answer in terms of presentation order.
enum class RawVerdict { First, Second, Tie };

std::string_view to_string(PairVerdict verdict);
PairVerdict mirror(PairVerdict verdict);

struct JudgeConfig {
  engine::Sampling sampling{0.0, 512};
  // Extra judge calls allowed when the output cannot be parsed.
  int parse_retries = 2;
};

struct ParsedRating {
  std::string rationale;
  int score = 0;
};

// rationale = text before the final "Rating:" marker (trimmed); score = the
// first integer after it. Errors: NoMarker, OutOfRange (outside 1..5).
ParsedRating parse_judge_output(std::string_view text);

// Reads the word after the final "Verdict:" marker: first | second | tie.
// Errors: NoMarker, OutOfRange (any other word).
RawVerdict parse_pair_output(std::string_view text);

engine::EngineRequest direct_prompt(const EvalSample& sample, const std::string& label,
                                    Criterion criterion, const JudgeConfig& config = {});
engine::EngineRequest pairwise_prompt(const EvalSample& sample, const std::string& first,
                                      const std::string& second, const JudgeConfig& config = {});

// One judge call per criterion, each retried on unparseable output.
// Errors: InvalidArgument (label missing), JudgeTransportError,
// UnparseableJudgeOutput.
std::vector<CriterionScore> judge_direct(const EvalSample& sample, const std::string& label,
                                         engine::Engine& judge, const JudgeConfig& config = {});

// Both winners must agree; anything else is a tie.
PairVerdict resolve_pair(PairVerdict forward, PairVerdict reversed);

// Forward pass shows A first, the reversed pass shows B first; the raw
// verdicts are mapped back to labels and combined with resolve_pair.
PairVerdict judge_pairwise(const EvalSample& sample, const std::string& label_a,
                           const std::string& label_b, engine::Engine& judge,
                           const JudgeConfig& config = {});

struct DirectSummary {
  std::size_t samples = 0;
  std::map<Criterion, double> means;  // 2 decimals
  double overall = 0.0;               // mean of the four means, 2 decimals
};

// Rounding is half-up on exact ratios. Errors: EmptyInput, OutOfRange,
// InvalidArgument (a sample without exactly one score per criterion).
DirectSummary aggregate_direct(const std::vector<std::vector<CriterionScore>>& per_sample);

struct PairwiseSummary {
  std::size_t total = 0;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  double win_pct = 0.0;
  double tie_pct = 0.0;
  double lose_pct = 0.0;
};

// Win/lose are from label A's point of view. Errors: EmptyInput.
PairwiseSummary aggregate_pairwise(const std::vector<PairVerdict>& verdicts);

nlohmann::json to_json(const DirectSummary& summary);
nlohmann::json to_json(const PairwiseSummary& summary);

// Corpus files are line-delimited JSON, one EvalSample per line.
std::vector<EvalSample> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<EvalSample>& samples);

// Deterministic synthetic corpus for fixtures and dry runs.
std::vector<EvalSample> synthesize_corpus(std::size_t count, uint64_t seed,
                                          const std::vector<std::string>& labels);

// Deterministic offline judge: rating / verdict derived from a hash of the
// prompt. Lets the harness run without a hosted judge.
class HashJudge : public engine::Engine {
 public:
  explicit HashJudge(uint64_t seed = 0) : seed_(seed) {}
  engine::EngineResponse complete(const engine::EngineRequest& request) override;

 private:
  uint64_t seed_;
};

// judge.backend = hash (default) | remote, plus judge.* engine keys.
std::unique_ptr<engine::Engine> make_judge(const Config& config);

struct DirectReport {
  std::string label;
  std::vector<std::vector<CriterionScore>> scores;
  DirectSummary summary;
};

struct PairwiseReport {
  std::string label_a;
  std::string label_b;
  std::vector<PairVerdict> verdicts;
  PairwiseSummary summary;
};

// Judge samples on up to `parallelism` threads, then aggregate. The judge
// must tolerate concurrent calls.
DirectReport run_direct(const std::vector<EvalSample>& samples, const std::string& label,
                        engine::Engine& judge, std::size_t parallelism = 4,
                        const JudgeConfig& config = {});
PairwiseReport run_pairwise(const std::vector<EvalSample>& samples, const std::string& label_a,
                            const std::string& label_b, engine::Engine& judge,
                            std::size_t parallelism = 4, const JudgeConfig& config = {});

nlohmann::json to_json(const DirectReport& report);
nlohmann::json to_json(const PairwiseReport& report);

}  // namespace gcagent::eval
