#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "gcagent/analytics/analytics.hpp"
#include "gcagent/common/config.hpp"
#include "gcagent/common/error.hpp"
#include "gcagent/eval/eval.hpp"
#include "gcagent/server/http_server.hpp"
#include "gcagent/server/service.hpp"

namespace {

using nlohmann::json;
using namespace gcagent;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

int serve(const std::string& config_path) {
  // Signals are blocked before any thread starts so that only the waiter
  // below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Config config = Config::load(config_path);
  server::ServiceOptions options = server::ServiceOptions::from_config(config);
  server::HttpOptions http_options = server::HttpOptions::from_config(config);
  server::ChatService service(options, engine::make_engine(config),
                              plugins::AdapterRegistry::from_config(config));
  server::HttpServer http(service, http_options);
  int port = http.bind();
  spdlog::info("listening on {}:{}", http_options.host, port);
  std::atomic<bool> signalled{false};
  std::thread waiter([&http, &signalled, signals] {
    int received = 0;
    sigwait(&signals, &received);
    signalled = true;
    spdlog::info("signal {}, shutting down", received);
    http.stop();
  });
  http.run();
  // run() also returns when listening fails; wake the waiter in that case.
  if (!signalled.load()) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  service.wait_idle();
  spdlog::info("stopped");
  return 0;
}

std::vector<int> parse_horizons(const std::string& text) {
  std::vector<int> horizons;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      int value = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      horizons.push_back(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad horizon '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return horizons;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gcagent: group chat agent service, evaluation harness and analytics"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API and event streams");
  serve_cmd->add_option("--config", config_path, "flat key = value config file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Judge-based response evaluation");
  eval_cmd->require_subcommand(1);
  std::string input, label, label_a, label_b, judge_config, out = "-";
  std::size_t parallelism = 4;
  auto* direct_cmd = eval_cmd->add_subcommand("direct", "Score one system on the four criteria");
  direct_cmd->add_option("--input", input, "EvalSample JSONL corpus")->required();
  direct_cmd->add_option("--label", label, "system label to score")->required();
  direct_cmd->add_option("--judge", judge_config, "judge config file")->required();
  direct_cmd->add_option("--out", out, "report path ('-' for stdout)");
  direct_cmd->add_option("--parallel", parallelism, "concurrent judge calls");
  auto* pair_cmd = eval_cmd->add_subcommand("pairwise", "Order-swapped pairwise comparison");
  pair_cmd->add_option("--input", input, "EvalSample JSONL corpus")->required();
  pair_cmd->add_option("--label-a", label_a, "first system label")->required();
  pair_cmd->add_option("--label-b", label_b, "second system label")->required();
  pair_cmd->add_option("--judge", judge_config, "judge config file")->required();
  pair_cmd->add_option("--out", out, "report path ('-' for stdout)");
  pair_cmd->add_option("--parallel", parallelism, "concurrent judge calls");
  std::size_t synth_count = 100;
  uint64_t synth_seed = 1;
  std::vector<std::string> synth_labels{"gcagent", "baseline"};
  auto* synth_cmd = eval_cmd->add_subcommand("synth", "Write a synthetic EvalSample corpus");
  synth_cmd->add_option("--count", synth_count, "number of samples");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--labels", synth_labels, "system labels")->delimiter(',');
  synth_cmd->add_option("--out", out, "corpus path ('-' for stdout)");

  auto* analytics_cmd = app.add_subcommand("analytics", "Event log analytics");
  analytics_cmd->require_subcommand(1);
  std::string control_dir, treatment_dir, log_dir, horizons_text = "1,3,7", format = "json";
  std::size_t top_k = 20;
  std::optional<int64_t> cohort_day;
  std::optional<TimestampMs> window_begin, window_end;
  int64_t min_messages = 1;
  bool no_agent_replies = false;
  auto* ab_cmd = analytics_cmd->add_subcommand("ab", "Compare control and treatment logs");
  ab_cmd->add_option("--control", control_dir, "control data dir")->required();
  ab_cmd->add_option("--treatment", treatment_dir, "treatment data dir")->required();
  ab_cmd->add_option("--out", out, "report path ('-' for stdout)");
  ab_cmd->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
  ab_cmd->add_option("--window-begin", window_begin, "inclusive start, epoch ms");
  ab_cmd->add_option("--window-end", window_end, "exclusive end, epoch ms");
  ab_cmd->add_option("--min-messages", min_messages, "messages that make a group active");
  ab_cmd->add_flag("--no-agent-replies", no_agent_replies, "exclude agent replies from volume");
  auto* ret_cmd = analytics_cmd->add_subcommand("retention", "Cohort retention by horizon");
  ret_cmd->add_option("--log", log_dir, "data dir")->required();
  ret_cmd->add_option("--horizons", horizons_text, "comma-separated day offsets");
  ret_cmd->add_option("--cohort-day", cohort_day, "UTC day number of the cohort");
  ret_cmd->add_option("--out", out, "report path ('-' for stdout)");
  ret_cmd->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
  auto* roles_cmd = analytics_cmd->add_subcommand("roles", "Most used agents and category shares");
  roles_cmd->add_option("--log", log_dir, "data dir")->required();
  roles_cmd->add_option("--top", top_k, "entries to keep");
  roles_cmd->add_option("--out", out, "report path ('-' for stdout)");
  roles_cmd->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve_cmd->parsed()) return serve(config_path);

    if (direct_cmd->parsed()) {
      auto judge = eval::make_judge(Config::load(judge_config));
      auto report = eval::run_direct(eval::read_corpus(input), label, *judge, parallelism);
      write_output(out, eval::to_json(report).dump(2));
      return 0;
    }
    if (pair_cmd->parsed()) {
      auto judge = eval::make_judge(Config::load(judge_config));
      auto report =
          eval::run_pairwise(eval::read_corpus(input), label_a, label_b, *judge, parallelism);
      write_output(out, eval::to_json(report).dump(2));
      return 0;
    }
    if (synth_cmd->parsed()) {
      auto samples = eval::synthesize_corpus(synth_count, synth_seed, synth_labels);
      if (out == "-") {
        for (const auto& sample : samples) std::cout << json(sample).dump() << '\n';
      } else {
        eval::write_corpus(out, samples);
      }
      return 0;
    }

    if (ab_cmd->parsed()) {
      analytics::MetricOptions options;
      options.activity_min_messages = min_messages;
      options.count_agent_replies = !no_agent_replies;
      options.window_begin = window_begin;
      options.window_end = window_end;
      auto reports = analytics::compare(analytics::load_log_dir(control_dir),
                                        analytics::load_log_dir(treatment_dir), options);
      write_output(out, format == "table" ? analytics::format_table(reports)
                                          : analytics::to_json(reports).dump(2));
      return 0;
    }
    if (ret_cmd->parsed()) {
      auto reports =
          analytics::retention(analytics::load_log_dir(log_dir), parse_horizons(horizons_text), cohort_day);
      write_output(out, format == "table" ? analytics::format_table(reports)
                                          : analytics::to_json(reports).dump(2));
      return 0;
    }
    if (roles_cmd->parsed()) {
      auto distribution = analytics::role_distribution(analytics::load_agents(log_dir),
                                                       analytics::load_log_dir(log_dir), top_k);
      write_output(out, format == "table" ? analytics::format_table(distribution)
                                          : analytics::to_json(distribution).dump(2));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
