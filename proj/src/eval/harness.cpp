#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "gcagent/eval/eval.hpp"

namespace gcagent::eval {

using nlohmann::json;

namespace {

// Runs work(i) for i in [0, count) on up to `parallelism` threads. The first
// exception stops further work and is rethrown.
template <typename Work>
void parallel_for(std::size_t count, std::size_t parallelism, Work work) {
  std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, count));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(run);
  run();
  for (auto& thread : threads) thread.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

DirectReport run_direct(const std::vector<EvalSample>& samples, const std::string& label,
                        engine::Engine& judge, std::size_t parallelism,
                        const JudgeConfig& config) {
  DirectReport report;
  report.label = label;
  report.scores.resize(samples.size());
  parallel_for(samples.size(), parallelism, [&](std::size_t i) {
    report.scores[i] = judge_direct(samples[i], label, judge, config);
  });
  report.summary = aggregate_direct(report.scores);
  return report;
}

PairwiseReport run_pairwise(const std::vector<EvalSample>& samples, const std::string& label_a,
                            const std::string& label_b, engine::Engine& judge,
                            std::size_t parallelism, const JudgeConfig& config) {
  PairwiseReport report;
  report.label_a = label_a;
  report.label_b = label_b;
  report.verdicts.resize(samples.size(), PairVerdict::Tie);
  parallel_for(samples.size(), parallelism, [&](std::size_t i) {
    report.verdicts[i] = judge_pairwise(samples[i], label_a, label_b, judge, config);
  });
  report.summary = aggregate_pairwise(report.verdicts);
  return report;
}

json to_json(const DirectReport& report) {
  json samples = json::array();
  for (const auto& scores : report.scores) {
    json entry = json::object();
    for (const auto& s : scores) {
      entry[std::string(to_string(s.criterion))] = {{"score", s.score}, {"rationale", s.rationale}};
    }
    samples.push_back(std::move(entry));
  }
  json out = to_json(report.summary);
  out["label"] = report.label;
  out["per_sample"] = std::move(samples);
  return out;
}

json to_json(const PairwiseReport& report) {
  json out = to_json(report.summary);
  out["label_a"] = report.label_a;
  out["label_b"] = report.label_b;
  json verdicts = json::array();
  for (PairVerdict v : report.verdicts) verdicts.push_back(to_string(v));
  out["verdicts"] = std::move(verdicts);
  return out;
}

}  // namespace gcagent::eval
