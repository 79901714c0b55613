#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gcagent::testing {

struct BadReply {
  std::string text;
  // nullopt: must carry a Fatal violation. Otherwise: the expected repair.
  std::optional<std::string> repaired;
};

inline std::string repeat(const std::string& piece, int times) {
  std::string out;
  for (int i = 0; i < times; ++i) out += piece;
  return out;
}

// Lowercase pseudo-words of exactly `chars` characters; no 12-character
// substring repeats, so only length rules can fire.
inline std::string random_words(std::size_t chars, uint64_t seed) {
  std::string out;
  uint64_t state = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  std::size_t word = 0;
  while (out.size() < chars) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    if (word >= 3 && (state >> 60) < 4 && out.size() + 1 < chars) {
      out += ' ';
      word = 0;
    } else {
      out += static_cast<char>('a' + (state >> 33) % 26);
      ++word;
    }
  }
  return out;
}

// Ten 110-character sentences: 108 characters ending in '.', then a space.
inline std::string long_reply() {
  std::string out;
  for (int i = 0; i < 10; ++i) out += random_words(108, 100 + i) + ". ";
  return out;
}

inline std::vector<std::string> fixture_roster() { return {"DJ Bot", "Luna", "Mochi", "alice"}; }

inline std::vector<BadReply> bad_replies() {
  std::string longest = long_reply();
  // Nine sentences fit in 1000 characters; the cut keeps them whole.
  std::string nine = longest.substr(0, 110 * 9 - 1);
  return {
      {"", std::nullopt},
      {"  \n\t ", std::nullopt},
      {"As an AI language model, I cannot do that.", std::nullopt},
      {"as an AI, I don't have feelings about songs.", std::nullopt},
      {"AS AN ARTIFICIAL INTELLIGENCE I must decline.", std::nullopt},
      {"I'm just an AI so I can't sing.", std::nullopt},
      {"Honestly I am a language model trained to help.", std::nullopt},
      {"I am an AI and cannot love.", std::nullopt},
      {"Hello {{user_name}}, welcome!", std::nullopt},
      {"Sure thing }} done", std::nullopt},
      {"{{#each items}}", std::nullopt},
      {"Goodbye<|im_end|>", std::nullopt},
      {"[INST] tell me a joke [/INST]", std::nullopt},
      {"<<SYS>> you are helpful", std::nullopt},
      {repeat("I love this song! ", 4), std::nullopt},
      {repeat("na ", 18), std::nullopt},
      {repeat("\xE5\x93\x88", 48), std::nullopt},  // 哈 x 48
      {repeat("Buy now! ", 8), std::nullopt},
      {"Luna: As an AI I cannot answer.", std::nullopt},
      {"DJ Bot:", std::nullopt},
      {"DJ Bot: hey hey", std::string("hey hey")},
      {"  luna :  Good night, sweet dreams.", std::string("Good night, sweet dreams.")},
      {"Mochi: Mochi: nom nom", std::string("nom nom")},
      {longest, nine},
      {"Luna: " + longest, nine},
  };
}

inline std::vector<std::string> good_replies() {
  return {
      "Hey everyone, what should we listen to tonight?",
      "Haha, that's a great idea! Let's do it.",
      "I love AI art, especially the dreamy ones.",
      "As an artist, I adore bright colours.",
      "The pirate said: arr, hoist the sails!",
      "Note: the party starts at eight.",
      "@Luna your turn to pick a song.",
      "Curly braces { like this } are fine.",
      "A single } or { is harmless too.",
      "\xE4\xBD\xA0\xE5\xA5\xBD\xEF\xBC\x81\xE4\xBB\x8A\xE5\xA4\xA9\xE8\xBF\x87\xE5\xBE\x97\xE6\x80\x8E\xE4\xB9\x88\xE6\xA0\xB7\xEF\xBC\x9F",
      "Good night \xF0\x9F\x8C\x99 sleep well!",
      "hahahahahaha hahahahahaha hahahahahaha",
      "la la la la la la",
      random_words(1000, 7),
      "Well... I think so? Maybe.",
      "Alice wanted jazz: we should play some.",
      "The robot learned: humans like pizza.",
      "Say \"hi\" to the group for me.",
      "Mochi is napping again, so quiet!",
      "Let's meet at 7:30 by the fountain.",
      "Is an AI-free weekend possible? Who knows.",
      "Chef says: more garlic.",
  };
}

}  // namespace gcagent::testing
