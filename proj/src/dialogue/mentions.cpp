#include "gcagent/dialogue/mentions.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace gcagent::dialogue {

namespace {

unsigned char fold(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c;
}

}  // namespace

struct MentionMatcher::Node {
  std::map<unsigned char, std::unique_ptr<Node>> children;
  std::optional<std::string> ref;
};

MentionMatcher::MentionMatcher(const std::vector<RosterName>& roster)
    : root_(std::make_unique<Node>()) {
  for (const auto& entry : roster) {
    if (entry.name.empty()) continue;
    Node* node = root_.get();
    for (unsigned char c : entry.name) {
      auto& child = node->children[fold(c)];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    if (!node->ref) node->ref = entry.ref;
  }
}

MentionMatcher::~MentionMatcher() = default;
MentionMatcher::MentionMatcher(MentionMatcher&&) noexcept = default;
MentionMatcher& MentionMatcher::operator=(MentionMatcher&&) noexcept = default;

std::vector<std::string> MentionMatcher::match(std::string_view body) const {
  std::vector<std::string> out;
  for (std::size_t at = body.find('@'); at != std::string_view::npos;
       at = body.find('@', at + 1)) {
    const Node* node = root_.get();
    const std::string* longest = nullptr;
    for (std::size_t i = at + 1; i < body.size(); ++i) {
      auto it = node->children.find(fold(static_cast<unsigned char>(body[i])));
      if (it == node->children.end()) break;
      node = it->second.get();
      if (node->ref) longest = &*node->ref;
    }
    if (longest != nullptr && std::find(out.begin(), out.end(), *longest) == out.end()) {
      out.push_back(*longest);
    }
  }
  return out;
}

std::vector<std::string> parse_mentions(std::string_view body,
                                        const std::vector<RosterName>& roster) {
  return MentionMatcher(roster).match(body);
}

}  // namespace gcagent::dialogue
