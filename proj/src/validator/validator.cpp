#include "gcagent/validator/validator.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"

namespace gcagent::validator {

using nlohmann::json;

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::EmptyCheck: return "EmptyCheck";
    case RuleKind::LengthCheck: return "LengthCheck";
    case RuleKind::ForbiddenPattern: return "ForbiddenPattern";
    case RuleKind::LabelLeak: return "LabelLeak";
    case RuleKind::Repetition: return "Repetition";
    case RuleKind::Custom: return "Custom";
  }
  return "Custom";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Fatal ? "Fatal" : "Repairable";
}

namespace {

RuleKind parse_kind(const std::string& name) {
  for (RuleKind kind : {RuleKind::EmptyCheck, RuleKind::LengthCheck, RuleKind::ForbiddenPattern,
                        RuleKind::LabelLeak, RuleKind::Repetition}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown rule kind '" + name + "'");
}

Severity parse_severity(const std::string& name) {
  if (name == "Fatal") return Severity::Fatal;
  if (name == "Repairable") return Severity::Repairable;
  throw Error(ErrorCode::InvalidConfig, "unknown severity '" + name + "'");
}

ValidationRule pattern_rule(std::string id, std::string pattern) {
  ValidationRule rule;
  rule.rule_id = std::move(id);
  rule.kind = RuleKind::ForbiddenPattern;
  rule.severity = Severity::Fatal;
  rule.pattern = std::move(pattern);
  return rule;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

// Length of a leading "Name:" label (plus following spaces), or 0.
std::size_t label_length(std::string_view text, const std::vector<std::string>& names) {
  std::size_t start = skip_spaces(text, 0);
  std::size_t best = 0;
  for (const auto& name : names) {
    if (name.empty()) continue;
    std::string_view rest = text.substr(start);
    if (!text::istarts_with(rest, name)) continue;
    std::size_t i = start + name.size();
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i < text.size() && text[i] == ':') {
      std::size_t end = skip_spaces(text, i + 1);
      best = std::max(best, end);
    }
  }
  return best;
}

std::optional<Span> find_repetition(std::string_view text, std::size_t min_chars,
                                    std::size_t min_count) {
  std::vector<std::size_t> bounds;  // code point start offsets, plus end
  for (std::size_t i = 0; i < text.size();) {
    bounds.push_back(i);
    i = i + text::byte_offset_of_char(text.substr(i), 1);
  }
  bounds.push_back(text.size());
  if (bounds.size() <= min_chars) return std::nullopt;

  std::unordered_map<std::string_view, std::vector<std::size_t>> starts;
  for (std::size_t k = 0; k + min_chars < bounds.size(); ++k) {
    std::size_t b = bounds[k];
    std::size_t e = bounds[k + min_chars];
    starts[text.substr(b, e - b)].push_back(b);
  }

  std::optional<Span> found;
  for (const auto& [piece, positions] : starts) {
    if (positions.size() < min_count) continue;
    std::size_t count = 0;
    std::size_t free_from = 0;
    for (std::size_t p : positions) {
      if (p >= free_from) {
        ++count;
        free_from = p + piece.size();
      }
    }
    if (count >= min_count && (!found || positions.front() < found->begin)) {
      found = Span{positions.front(), positions.front() + piece.size()};
    }
  }
  return found;
}

std::optional<Span> check(const ValidationRule& rule, const std::regex* regex,
                          std::string_view text, const std::vector<std::string>& names) {
  switch (rule.kind) {
    case RuleKind::EmptyCheck:
      if (text::trim(text).empty()) return Span{0, text.size()};
      return std::nullopt;
    case RuleKind::LengthCheck:
      if (text::char_count(text) > rule.max_chars) {
        return Span{text::byte_offset_of_char(text, rule.max_chars), text.size()};
      }
      return std::nullopt;
    case RuleKind::ForbiddenPattern: {
      std::match_results<std::string_view::const_iterator> match;
      if (regex != nullptr && std::regex_search(text.begin(), text.end(), match, *regex)) {
        auto begin = static_cast<std::size_t>(match.position(0));
        return Span{begin, begin + static_cast<std::size_t>(match.length(0))};
      }
      return std::nullopt;
    }
    case RuleKind::LabelLeak: {
      std::size_t length = label_length(text, names);
      if (length > 0) return Span{0, length};
      return std::nullopt;
    }
    case RuleKind::Repetition:
      return find_repetition(text, rule.min_repeat_chars, rule.min_repeat_count);
    case RuleKind::Custom:
      return rule.custom ? rule.custom(text) : std::nullopt;
  }
  return std::nullopt;
}

std::vector<Violation> evaluate(std::string_view text, const Ruleset& ruleset,
                                const std::vector<std::string>& names) {
  std::vector<Violation> out;
  const auto& rules = ruleset.rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (auto span = check(rules[i], ruleset.regex_for(i), text, names)) {
      out.push_back({rules[i].rule_id, rules[i].kind, *span, rules[i].severity});
    }
  }
  return out;
}

// Applies one round of repairs. Returns false when some violation has no
// repair.
bool repair_once(std::string& text, const std::vector<Violation>& violations,
                 const Ruleset& ruleset, const std::vector<std::string>& names) {
  for (const auto& v : violations) {
    if (v.kind == RuleKind::LabelLeak) {
      text.erase(0, label_length(text, names));
    }
  }
  for (const auto& v : violations) {
    switch (v.kind) {
      case RuleKind::LabelLeak:
        break;
      case RuleKind::LengthCheck: {
        const auto& rules = ruleset.rules();
        auto rule = std::find_if(rules.begin(), rules.end(),
                                 [&](const ValidationRule& r) { return r.rule_id == v.rule_id; });
        text = truncate_at_sentence(text, rule->max_chars);
        break;
      }
      default:
        return false;
    }
  }
  return true;
}

}  // namespace

Ruleset::Ruleset(std::vector<ValidationRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw Error(ErrorCode::InvalidConfig, "ruleset is empty");
  for (const auto& rule : rules_) {
    if (rule.rule_id.empty()) throw Error(ErrorCode::InvalidConfig, "rule without rule_id");
    switch (rule.kind) {
      case RuleKind::LengthCheck:
        if (rule.max_chars == 0) {
          throw Error(ErrorCode::InvalidConfig, rule.rule_id + ": max_chars must be > 0");
        }
        break;
      case RuleKind::ForbiddenPattern:
        if (rule.pattern.empty()) {
          throw Error(ErrorCode::InvalidConfig, rule.rule_id + ": empty pattern");
        }
        break;
      case RuleKind::Repetition:
        if (rule.min_repeat_chars == 0 || rule.min_repeat_count < 2) {
          throw Error(ErrorCode::InvalidConfig, rule.rule_id + ": bad repetition thresholds");
        }
        break;
      case RuleKind::Custom:
        if (!rule.custom) throw Error(ErrorCode::InvalidConfig, rule.rule_id + ": no check");
        break;
      default:
        break;
    }
    if (rule.kind == RuleKind::ForbiddenPattern) {
      try {
        compiled_.emplace_back(std::regex(rule.pattern, std::regex::ECMAScript |
                                                            std::regex::icase |
                                                            std::regex::optimize));
      } catch (const std::regex_error& e) {
        throw Error(ErrorCode::InvalidConfig, rule.rule_id + ": bad pattern: " + e.what());
      }
    } else {
      compiled_.emplace_back(std::nullopt);
    }
  }
}

const std::regex* Ruleset::regex_for(std::size_t index) const {
  const auto& slot = compiled_.at(index);
  return slot ? &*slot : nullptr;
}

Ruleset Ruleset::defaults() {
  std::vector<ValidationRule> rules;

  ValidationRule empty;
  empty.rule_id = "empty";
  empty.kind = RuleKind::EmptyCheck;
  empty.severity = Severity::Fatal;
  rules.push_back(empty);

  ValidationRule length;
  length.rule_id = "length";
  length.kind = RuleKind::LengthCheck;
  length.severity = Severity::Repairable;
  length.max_chars = 1000;
  rules.push_back(length);

  rules.push_back(pattern_rule("ai-disclaimer", R"(\bas an? (ai|artificial intelligence)\b)"));
  rules.push_back(pattern_rule("ai-self-reference",
                               R"(\bi('m| am) (just |only )?an? (ai|language model|large language model)\b)"));
  rules.push_back(pattern_rule("template-open", R"(\{\{)"));
  rules.push_back(pattern_rule("template-close", R"(\}\})"));
  rules.push_back(pattern_rule("special-token", R"(<\|[a-z_]+\|>|\[/?INST\]|<</?SYS>>)"));

  ValidationRule label;
  label.rule_id = "speaker-label";
  label.kind = RuleKind::LabelLeak;
  label.severity = Severity::Repairable;
  rules.push_back(label);

  ValidationRule repetition;
  repetition.rule_id = "repetition";
  repetition.kind = RuleKind::Repetition;
  repetition.severity = Severity::Fatal;
  rules.push_back(repetition);

  return Ruleset(std::move(rules));
}

const Ruleset& Ruleset::builtin() {
  static const Ruleset rules = defaults();
  return rules;
}

Ruleset Ruleset::from_json(const json& doc) {
  if (!doc.is_array()) throw Error(ErrorCode::InvalidConfig, "ruleset must be a JSON array");
  std::vector<ValidationRule> rules;
  try {
    for (const auto& entry : doc) {
      ValidationRule rule;
      rule.rule_id = entry.at("rule_id").get<std::string>();
      rule.kind = parse_kind(entry.at("kind").get<std::string>());
      rule.severity = parse_severity(entry.value("severity", std::string("Fatal")));
      const json params = entry.value("parameters", json::object());
      rule.max_chars = params.value("max_chars", rule.max_chars);
      rule.pattern = params.value("pattern", rule.pattern);
      rule.min_repeat_chars = params.value("min_repeat_chars", rule.min_repeat_chars);
      rule.min_repeat_count = params.value("min_repeat_count", rule.min_repeat_count);
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed rule: ") + e.what());
  }
  return Ruleset(std::move(rules));
}

Ruleset Ruleset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open rules file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

bool ValidationReport::has_fatal() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::Fatal; });
}

std::string truncate_at_sentence(std::string_view text, std::size_t max_chars) {
  std::string_view head = text.substr(0, text::byte_offset_of_char(text, max_chars));
  if (head.size() == text.size()) return std::string(text);

  std::size_t cut = std::string_view::npos;
  for (std::size_t i = head.size(); i-- > 0;) {
    char c = head[i];
    bool end_mark = c == '.' || c == '!' || c == '?';
    // U+3002, U+FF01, U+FF1F and U+2026 end in these bytes.
    if (!end_mark && i >= 2) {
      std::string_view tail = head.substr(i - 2, 3);
      end_mark = tail == "\xE3\x80\x82" || tail == "\xEF\xBC\x81" || tail == "\xEF\xBC\x9F" ||
                 tail == "\xE2\x80\xA6";
    }
    if (end_mark) {
      cut = i + 1;
      break;
    }
  }
  if (cut == std::string_view::npos) {
    auto space = head.find_last_of(" \t\n");
    cut = (space == std::string_view::npos || space == 0) ? head.size() : space;
  }
  return std::string(text::trim(head.substr(0, cut)));
}

ValidationReport validate(std::string_view text, const Ruleset& ruleset,
                          const std::vector<std::string>& roster_names) {
  ValidationReport report;
  report.violations = evaluate(text, ruleset, roster_names);
  if (report.violations.empty()) {
    report.passed = true;
    return report;
  }
  if (report.has_fatal()) return report;

  std::string current(text);
  std::vector<Violation> pending = report.violations;
  for (int round = 0; round < 8; ++round) {
    if (!repair_once(current, pending, ruleset, roster_names)) return report;
    pending = evaluate(current, ruleset, roster_names);
    if (pending.empty()) {
      report.repaired_text = std::move(current);
      report.passed = true;
      return report;
    }
    bool fatal = false;
    for (const auto& v : pending) {
      if (v.severity != Severity::Fatal) continue;
      // Surfaced by the repair itself; reported against the whole input.
      report.violations.push_back({v.rule_id, v.kind, Span{0, text.size()}, v.severity});
      fatal = true;
    }
    if (fatal) return report;
  }
  return report;
}

}  // namespace gcagent::validator
