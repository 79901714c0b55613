#include "gcagent/common/error.hpp"
#include "gcagent/validator/validator.hpp"

namespace gcagent::validator {

void RetryPolicy::validate() const {
  if (max_retries < 0 || max_retries > 5) {
    throw Error(ErrorCode::InvalidConfig, "max_retries must lie in [0, 5]");
  }
}

GenerationResult generate_validated(const dialogue::DialogueContext& context,
                                    engine::Engine& engine, const engine::Sampling& sampling,
                                    const RetryPolicy& policy, const Ruleset& ruleset,
                                    const std::vector<std::string>& roster_names) {
  policy.validate();
  engine::EngineRequest request = engine::build_prompt(context, sampling);

  GenerationResult result;
  const int attempts = policy.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    engine::EngineResponse response = engine.complete(request);
    ++result.engine_calls;
    if (response.finish_reason == engine::FinishReason::Error) continue;

    ValidationReport report = validate(response.text, ruleset, roster_names);
    if (report.passed) {
      result.text = report.repaired_text ? *report.repaired_text : response.text;
      return result;
    }
  }

  if (policy.on_exhaust == RetryPolicy::OnExhaust::Error) {
    throw Error(ErrorCode::ExhaustedRetries,
                "no acceptable reply after " + std::to_string(result.engine_calls) + " calls");
  }
  result.text = policy.fallback_text;
  result.used_fallback = true;
  return result;
}

GenerationResult generate_validated(const dialogue::DialogueContext& context,
                                    engine::Engine& engine, const RetryPolicy& policy,
                                    const Ruleset& ruleset) {
  std::vector<std::string> names;
  for (const auto& [ref, name] : context.display_names) names.push_back(name);
  return generate_validated(context, engine, engine::Sampling{}, policy, ruleset, names);
}

}  // namespace gcagent::validator
