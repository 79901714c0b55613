#include "gcagent/server/service.hpp"

#include <spdlog/spdlog.h>

#include "gcagent/common/error.hpp"

namespace gcagent::server {

ServiceOptions ServiceOptions::from_config(const Config& config) {
  ServiceOptions options;
  if (auto dir = config.find("server.data_dir")) options.data_dir = *dir;
  options.fsync = config.get_bool("server.fsync", options.fsync);
  if (auto seed = config.find("registry.seed_path")) options.seed_path = *seed;
  if (auto rules = config.find("validator.rules_path")) options.rules_path = *rules;
  options.manager.context_window = static_cast<std::size_t>(
      config.get_int("manager.context_window", static_cast<int64_t>(options.manager.context_window)));
  options.manager.reply_triggers =
      config.get_bool("manager.reply_triggers", options.manager.reply_triggers);
  options.retry.max_retries =
      static_cast<int>(config.get_int("validator.max_retries", options.retry.max_retries));
  options.retry.fallback_text =
      config.get_string("validator.fallback_text", options.retry.fallback_text);
  std::string on_exhaust = config.get_string("validator.on_exhaust", "fallback");
  if (on_exhaust == "error") {
    options.retry.on_exhaust = validator::RetryPolicy::OnExhaust::Error;
  } else if (on_exhaust != "fallback") {
    throw Error(ErrorCode::InvalidConfig, "validator.on_exhaust must be fallback or error");
  }
  options.retry.validate();
  options.sampling.temperature = config.get_double("engine.temperature", options.sampling.temperature);
  options.sampling.max_tokens =
      static_cast<int>(config.get_int("engine.max_tokens", options.sampling.max_tokens));
  options.workers = static_cast<std::size_t>(
      config.get_int("server.workers", static_cast<int64_t>(options.workers)));
  return options;
}

ChatService::ChatService(ServiceOptions options, std::unique_ptr<engine::Engine> engine,
                         plugins::AdapterRegistry adapters, Clock clock)
    : options_(std::move(options)),
      engine_(std::move(engine)),
      adapters_(std::move(adapters)),
      ruleset_(options_.rules_path ? validator::Ruleset::load(*options_.rules_path)
                                   : validator::Ruleset::defaults()) {
  options_.retry.validate();
  log_ = options_.data_dir ? std::make_unique<events::EventLog>(*options_.data_dir, options_.fsync)
                           : std::make_unique<events::EventLog>();
  registry_ = std::make_unique<registry::AgentRegistry>(registry::default_voice_styles(), clock);
  if (options_.data_dir) {
    std::size_t loaded = registry_->open_journal(*options_.data_dir / "agents.jsonl");
    if (loaded > 0) spdlog::info("restored {} agents", loaded);
  }
  if (registry_->size() == 0 && options_.seed_path) {
    std::size_t seeded = registry_->load_seed(*options_.seed_path);
    spdlog::info("seeded {} agents from {}", seeded, options_.seed_path->string());
  }
  manager_ = std::make_unique<dialogue::DialogueManager>(*registry_, *log_, options_.manager,
                                                         std::move(clock));
  std::size_t restored = manager_->restore_from_log();
  if (restored > 0) spdlog::info("replayed {} groups", restored);
  pool_ = std::make_unique<WorkerPool>(options_.workers);
}

ChatService::~ChatService() {
  pool_.reset();
  log_->close_subscriptions();
}

registry::AgentProfile ChatService::create_agent(const registry::AgentDraft& draft) {
  return registry_->create_agent(draft);
}

dialogue::GroupSession ChatService::create_group(std::optional<std::string> group_id) {
  return manager_->create_group(std::move(group_id));
}

void ChatService::join(const std::string& group_id, const std::string& user_id) {
  manager_->join(group_id, user_id);
}

std::vector<std::string> ChatService::attach_agent(const std::string& group_id,
                                                   const std::string& agent_id) {
  return manager_->attach_agent(group_id, agent_id);
}

std::shared_ptr<Strand> ChatService::strand_for(const std::string& group_id) {
  std::lock_guard lock(strands_mutex_);
  auto& strand = strands_[group_id];
  if (!strand) strand = std::make_shared<Strand>(*pool_);
  return strand;
}

std::vector<std::string> ChatService::roster_names(const std::string& group_id) const {
  dialogue::GroupSession session = manager_->snapshot(group_id);
  std::vector<std::string> names;
  for (const auto& agent_id : session.agent_roster) {
    if (auto profile = registry_->find(agent_id)) names.push_back(profile->name);
  }
  for (const auto& user_id : session.human_roster) names.push_back(user_id);
  return names;
}

dialogue::ChatMessage ChatService::post_message(const std::string& group_id,
                                                const std::string& sender,
                                                const std::string& body,
                                                const std::optional<std::string>& reply_to) {
  dialogue::ChatMessage message = manager_->ingest_message(group_id, sender, body, reply_to);
  std::vector<std::string> agents = manager_->decide_invocations(message);
  if (!agents.empty()) {
    strand_for(group_id)->post(
        [this, message, agents = std::move(agents)] { run_invocations(message, agents); });
  }
  return message;
}

void ChatService::run_invocations(const dialogue::ChatMessage& message,
                                  const std::vector<std::string>& agents) {
  for (const auto& agent_id : agents) {
    try {
      dialogue::DialogueContext context =
          manager_->assemble_context(message.group_id, agent_id, message.msg_id);
      validator::GenerationResult result =
          validator::generate_validated(context, *engine_, options_.sampling, options_.retry,
                                        ruleset_, roster_names(message.group_id));
      manager_->ingest_agent_reply(message.group_id, agent_id, result.text, message.msg_id);
      ++replies_;
      if (result.used_fallback) ++fallbacks_;
    } catch (const std::exception& e) {
      ++failures_;
      spdlog::warn("agent {} failed to answer {}: {}", agent_id, message.msg_id, e.what());
    }
  }
}

void ChatService::record_view(const std::string& group_id, const std::string& user_id,
                              const std::string& msg_id) {
  manager_->record_view(group_id, user_id, msg_id);
}

plugins::PluginResult ChatService::invoke_plugin(const plugins::PluginRequest& request,
                                                 const std::optional<std::string>& group_id,
                                                 const std::optional<std::string>& user_id) {
  plugins::PluginResult result = plugins::dispatch(request, adapters_);
  if (group_id && user_id) {
    manager_->record_plugin_use(*group_id, *user_id, std::string(plugins::to_string(request.kind)));
  }
  return result;
}

void ChatService::wait_idle() { pool_->wait_idle(); }

PipelineStats ChatService::stats() const {
  return {replies_.load(), fallbacks_.load(), failures_.load()};
}

}  // namespace gcagent::server
