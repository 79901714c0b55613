#include "gcagent/common/decimal.hpp"
#include "gcagent/common/error.hpp"
#include "gcagent/eval/eval.hpp"

namespace gcagent::eval {

using nlohmann::json;

DirectSummary aggregate_direct(const std::vector<std::vector<CriterionScore>>& per_sample) {
  if (per_sample.empty()) throw Error(ErrorCode::EmptyInput, "no samples to aggregate");

  std::map<Criterion, int64_t> sums;
  for (const auto& scores : per_sample) {
    std::map<Criterion, int> seen;
    for (const auto& s : scores) {
      if (s.score < 1 || s.score > 5) {
        throw Error(ErrorCode::OutOfRange, "score " + std::to_string(s.score) + " outside 1..5");
      }
      if (++seen[s.criterion] > 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "duplicate " + std::string(to_string(s.criterion)) + " score");
      }
      sums[s.criterion] += s.score;
    }
    if (seen.size() != kCriteria.size()) {
      throw Error(ErrorCode::InvalidArgument, "sample lacks a score for some criterion");
    }
  }

  auto n = static_cast<int64_t>(per_sample.size());
  DirectSummary summary;
  summary.samples = per_sample.size();
  int64_t total = 0;
  for (Criterion c : kCriteria) {
    summary.means[c] = from_hundredths(ratio_hundredths(sums[c], n));
    total += sums[c];
  }
  // Every sample scores all four criteria, so the mean of the unrounded
  // per-criterion means is total / (4n).
  summary.overall =
      from_hundredths(ratio_hundredths(total, n * static_cast<int64_t>(kCriteria.size())));
  return summary;
}

PairwiseSummary aggregate_pairwise(const std::vector<PairVerdict>& verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::EmptyInput, "no verdicts to aggregate");
  PairwiseSummary summary;
  summary.total = verdicts.size();
  for (PairVerdict v : verdicts) {
    if (v == PairVerdict::WinA) {
      ++summary.wins;
    } else if (v == PairVerdict::WinB) {
      ++summary.losses;
    } else {
      ++summary.ties;
    }
  }
  auto total = static_cast<int64_t>(summary.total);
  summary.win_pct = from_hundredths(percent_hundredths(static_cast<int64_t>(summary.wins), total));
  summary.tie_pct = from_hundredths(percent_hundredths(static_cast<int64_t>(summary.ties), total));
  summary.lose_pct =
      from_hundredths(percent_hundredths(static_cast<int64_t>(summary.losses), total));
  return summary;
}

json to_json(const DirectSummary& summary) {
  json means = json::object();
  for (const auto& [criterion, mean] : summary.means) means[std::string(to_string(criterion))] = mean;
  return json{{"samples", summary.samples}, {"means", std::move(means)}, {"overall", summary.overall}};
}

json to_json(const PairwiseSummary& summary) {
  return json{{"total", summary.total},
              {"counts", {{"win", summary.wins}, {"tie", summary.ties}, {"lose", summary.losses}}},
              {"win_pct", summary.win_pct},
              {"tie_pct", summary.tie_pct},
              {"lose_pct", summary.lose_pct}};
}

}  // namespace gcagent::eval
