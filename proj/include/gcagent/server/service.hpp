#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gcagent/common/config.hpp"
#include "gcagent/dialogue/dialogue_manager.hpp"
#include "gcagent/engine/engine.hpp"
#include "gcagent/events/event_log.hpp"
#include "gcagent/plugins/plugins.hpp"
#include "gcagent/registry/agent_registry.hpp"
#include "gcagent/server/strand.hpp"
#include "gcagent/validator/validator.hpp"

namespace gcagent::server {

struct ServiceOptions {
  // No data directory means an in-memory event log.
  std::optional<std::filesystem::path> data_dir;
  bool fsync = true;
  std::optional<std::filesystem::path> seed_path;
  std::optional<std::filesystem::path> rules_path;
  dialogue::ManagerOptions manager;
  validator::RetryPolicy retry;
  engine::Sampling sampling;
  std::size_t workers = 4;

  static ServiceOptions from_config(const Config& config);
};

struct PipelineStats {
  std::size_t replies = 0;
  std::size_t fallbacks = 0;
  std::size_t failures = 0;
};

// Owns the registry, event log and dialogue manager and runs the invocation
// pipeline: ingest -> decide_invocations -> per agent assemble_context ->
// generate_validated -> ingest reply. Pipeline work for one group runs on
// that group's strand, so each group has at most one completion in flight.
class ChatService {
 public:
  ChatService(ServiceOptions options, std::unique_ptr<engine::Engine> engine,
              plugins::AdapterRegistry adapters = plugins::AdapterRegistry::stubs(),
              Clock clock = system_clock());
  ~ChatService();

  ChatService(const ChatService&) = delete;
  ChatService& operator=(const ChatService&) = delete;

  registry::AgentRegistry& registry() { return *registry_; }
  dialogue::DialogueManager& manager() { return *manager_; }
  events::EventLog& log() { return *log_; }
  const ServiceOptions& options() const { return options_; }

  registry::AgentProfile create_agent(const registry::AgentDraft& draft);
  dialogue::GroupSession create_group(std::optional<std::string> group_id = std::nullopt);
  void join(const std::string& group_id, const std::string& user_id);
  std::vector<std::string> attach_agent(const std::string& group_id, const std::string& agent_id);

  // Ingests synchronously; agent replies are produced asynchronously and
  // show up as AgentReplied events.
  dialogue::ChatMessage post_message(const std::string& group_id, const std::string& sender,
                                     const std::string& body,
                                     const std::optional<std::string>& reply_to = std::nullopt);

  void record_view(const std::string& group_id, const std::string& user_id,
                   const std::string& msg_id);

  // When group and user are given the use is recorded as PluginInvoked.
  plugins::PluginResult invoke_plugin(const plugins::PluginRequest& request,
                                      const std::optional<std::string>& group_id = std::nullopt,
                                      const std::optional<std::string>& user_id = std::nullopt);

  // Blocks until every scheduled invocation has finished.
  void wait_idle();
  PipelineStats stats() const;

 private:
  void run_invocations(const dialogue::ChatMessage& message,
                       const std::vector<std::string>& agents);
  std::vector<std::string> roster_names(const std::string& group_id) const;
  std::shared_ptr<Strand> strand_for(const std::string& group_id);

  ServiceOptions options_;
  std::unique_ptr<engine::Engine> engine_;
  plugins::AdapterRegistry adapters_;
  validator::Ruleset ruleset_;
  std::unique_ptr<events::EventLog> log_;
  std::unique_ptr<registry::AgentRegistry> registry_;
  std::unique_ptr<dialogue::DialogueManager> manager_;

  std::mutex strands_mutex_;
  std::map<std::string, std::shared_ptr<Strand>> strands_;

  std::atomic<std::size_t> replies_{0};
  std::atomic<std::size_t> fallbacks_{0};
  std::atomic<std::size_t> failures_{0};

  // Declared last: destroyed first, so queued work finishes while the
  // members above are still alive.
  std::unique_ptr<WorkerPool> pool_;
};

}  // namespace gcagent::server
