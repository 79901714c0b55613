#include <fstream>
#include <random>

#include "gcagent/common/error.hpp"
#include "gcagent/common/text.hpp"
#include "gcagent/eval/eval.hpp"

namespace gcagent::eval {

using nlohmann::json;

std::vector<EvalSample> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open corpus " + path.string());
  std::vector<EvalSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      samples.push_back(json::parse(line).get<EvalSample>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

void write_corpus(const std::filesystem::path& path, const std::vector<EvalSample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + path.string());
  for (const auto& sample : samples) out << json(sample).dump() << '\n';
}

std::vector<EvalSample> synthesize_corpus(std::size_t count, uint64_t seed,
                                          const std::vector<std::string>& labels) {
  static const std::vector<std::string> kPersonas = {
      "A cheerful DJ who loves recommending songs and hyping up the group.",
      "A calm study buddy who explains things step by step.",
      "A witty storyteller who turns group banter into short tales.",
      "The group leader's secretary: tracks plans, deadlines and who said what.",
      "A patient expert who answers general knowledge questions clearly.",
      "A pet-loving companion who chats about cats and dogs.",
  };
  static const std::vector<std::string> kSpeakers = {"mia", "leo", "sam", "ava", "kai"};
  static const std::vector<std::string> kLines = {
      "anyone up for a movie tonight?",
      "I just finished my exam, finally free",
      "what should we eat this weekend",
      "can someone remind me when the meetup is",
      "this song has been stuck in my head all day",
      "my cat knocked over my coffee again",
      "does anyone know how to fix a flat bike tire",
      "we should plan a trip for the holidays",
  };
  static const std::vector<std::string> kReplies = {
      "Sounds fun! How about a comedy so everyone can unwind?",
      "Congrats on finishing! Time to celebrate with something you enjoy.",
      "Hot pot is always a crowd pleaser for a group weekend.",
      "The meetup is on Saturday at 3pm; I'll post a reminder the day before.",
      "Ha, that tune is catchy. Want me to share a few similar tracks?",
      "Oh no, poor coffee! Maybe a mug with a lid would survive the cat.",
      "Remove the tube, find the leak with soapy water, then patch it and reinflate.",
      "A holiday trip sounds great. Beach or mountains?",
  };

  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
    return pool[rng() % pool.size()];
  };

  std::vector<EvalSample> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    EvalSample sample;
    sample.role_configuration = pick(kPersonas);
    std::size_t turns = rng() % 5;
    for (std::size_t t = 0; t < turns; ++t) sample.history.push_back({pick(kSpeakers), pick(kLines)});
    sample.latest_message = pick(kLines) + " (#" + std::to_string(i) + ")";
    for (const auto& label : labels) sample.responses[label] = pick(kReplies);
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace gcagent::eval
