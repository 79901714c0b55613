#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcagent/dialogue/types.hpp"
#include "gcagent/engine/engine.hpp"

namespace gcagent::validator {

enum class RuleKind { EmptyCheck, LengthCheck, ForbiddenPattern, LabelLeak, Repetition, Custom };
enum class Severity { Repairable, Fatal };

std::string_view to_string(RuleKind kind);
std::string_view to_string(Severity severity);

// Byte range in the checked text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

// Extension point for checks that are not pattern based. Returns the
// offending span, or nullopt when the text is acceptable. Custom rules are
// never repaired.
using CustomCheck = std::function<std::optional<Span>(std::string_view)>;

struct ValidationRule {
  std::string rule_id;
  RuleKind kind = RuleKind::EmptyCheck;
  Severity severity = Severity::Fatal;
  // LengthCheck
  std::size_t max_chars = 1000;
  // ForbiddenPattern: ECMAScript regex, matched case-insensitively.
  std::string pattern;
  // Repetition: a substring of at least this many characters occurring at
  // least this many times without overlap.
  std::size_t min_repeat_chars = 12;
  std::size_t min_repeat_count = 4;
  CustomCheck custom;
};

// An immutable, compiled, nonempty list of rules.
class Ruleset {
 public:
  // Throws InvalidConfig for an empty list or inconsistent parameters.
  explicit Ruleset(std::vector<ValidationRule> rules);

  // Empty / length 1000 / role-leak and template-token patterns / speaker
  // labels / 12-char-4-times repetition.
  static Ruleset defaults();
  // Shared compiled copy of defaults().
  static const Ruleset& builtin();
  // JSON array of rule records; see README for the schema.
  static Ruleset from_json(const nlohmann::json& doc);
  static Ruleset load(const std::filesystem::path& path);

  const std::vector<ValidationRule>& rules() const { return rules_; }
  const std::regex* regex_for(std::size_t index) const;

 private:
  std::vector<ValidationRule> rules_;
  std::vector<std::optional<std::regex>> compiled_;
};

struct Violation {
  std::string rule_id;
  RuleKind kind = RuleKind::EmptyCheck;
  Span span;
  Severity severity = Severity::Fatal;
};

struct ValidationReport {
  bool passed = false;
  // Violations of the input, then any Fatal violation a repair produced
  // (spanning the whole input).
  std::vector<Violation> violations;
  // Present iff every violation was Repairable and the repaired text
  // validates cleanly.
  std::optional<std::string> repaired_text;

  bool has_fatal() const;
};

// Pure and total. `roster_names` feeds the LabelLeak rule.
ValidationReport validate(std::string_view text, const Ruleset& ruleset,
                          const std::vector<std::string>& roster_names = {});

// Cut to at most max_chars characters, at the last sentence end if there is
// one, else at the last space.
std::string truncate_at_sentence(std::string_view text, std::size_t max_chars);

inline constexpr const char* kDefaultFallbackText =
    "Sorry, I can't come up with a good reply right now. Let's pick this up in a moment!";

struct RetryPolicy {
  enum class OnExhaust { Fallback, Error };

  int max_retries = 2;
  OnExhaust on_exhaust = OnExhaust::Fallback;
  std::string fallback_text = kDefaultFallbackText;

  // Throws InvalidConfig unless 0 <= max_retries <= 5.
  void validate() const;
};

struct GenerationResult {
  std::string text;
  int engine_calls = 0;
  bool used_fallback = false;
};

// complete -> validate loop. Clean or repaired text is returned at once; a
// Fatal verdict (or an engine-side error finish) calls the engine again, up
// to max_retries + 1 calls in total. Errors: ExhaustedRetries when
// on_exhaust is Error; engine transport errors propagate.
GenerationResult generate_validated(const dialogue::DialogueContext& context,
                                    engine::Engine& engine, const engine::Sampling& sampling,
                                    const RetryPolicy& policy, const Ruleset& ruleset,
                                    const std::vector<std::string>& roster_names);

// As above with the context's display names as the roster.
GenerationResult generate_validated(const dialogue::DialogueContext& context,
                                    engine::Engine& engine, const RetryPolicy& policy,
                                    const Ruleset& ruleset = Ruleset::builtin());

}  // namespace gcagent::validator
