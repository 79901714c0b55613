#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gcagent::dialogue {

struct RosterName {
  std::string name;
  std::string ref;
};

// Resolves "@Name" mentions against a roster. At every '@' the longest
// roster name that immediately follows (ASCII case-insensitive) wins; there
// is no word-boundary requirement after the name. Refs come back in order of
// first appearance without duplicates. When two roster entries share a name,
// the earlier entry wins.
class MentionMatcher {
 public:
  explicit MentionMatcher(const std::vector<RosterName>& roster);
  ~MentionMatcher();
  MentionMatcher(MentionMatcher&&) noexcept;
  MentionMatcher& operator=(MentionMatcher&&) noexcept;

  std::vector<std::string> match(std::string_view body) const;

 private:
  struct Node;
  std::unique_ptr<Node> root_;
};

std::vector<std::string> parse_mentions(std::string_view body,
                                        const std::vector<RosterName>& roster);

}  // namespace gcagent::dialogue
