#pragma once

// Shared hand-written fixtures.

#include <string>
#include <vector>

#include "simdoc/corpus.hpp"
#include "simdoc/harness.hpp"

namespace fixture {

// Five articles, each with all five readability levels.
inline std::vector<simdoc::LeveledArticle> five_full_articles() {
  const std::vector<std::string> topics = {"river", "market", "school", "harbor", "forest"};
  std::vector<simdoc::LeveledArticle> out;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    simdoc::LeveledArticle a;
    a.article_id = "art" + std::to_string(i);
    const auto& t = topics[i];
    a.versions[0] = "Numerous individuals frequently observe the " + t +
                    " because it is magnificent. The " + t + " was ancient and it was enormous.";
    a.versions[1] = "Many individuals frequently see the " + t + " because it is magnificent. The " + t +
                    " was ancient and it was enormous.";
    a.versions[2] = "Many people often see the " + t + " because it is great. The " + t + " was old. It was big.";
    a.versions[3] = "Many people see the " + t + ". It is great. The " + t + " was old. It was big.";
    a.versions[4] = "People see the " + t + ". It is great. It is old.";
    out.push_back(a);
  }
  return out;
}

// Readability fixtures with hand-counted words, sentences and syllables
// (vowel groups over aeiouy, silent final e unless consonant+le, min 1).
struct ReadabilityCase {
  const char* text;
  int words;
  int sentences;
  int syllables;
};

inline const std::vector<ReadabilityCase>& readability_cases() {
  static const std::vector<ReadabilityCase> cases = {
      {"The cat sat on the mat.", 6, 1, 6},
      {"Go. Go.", 2, 2, 2},
      {"Go.", 1, 1, 1},
      {"A simple table.", 3, 1, 5},                      // sim-ple ta-ble
      {"Make the cake.", 3, 1, 3},                       // silent e twice
      {"The beautiful garden grew.", 4, 1, 7},           // beau-ti-ful gar-den
      {"Rhythm and blues.", 3, 1, 3},                    // y is a vowel
      {"Elephants remember everything.", 3, 1, 10},      // 3 + 3 + 4
      {"I like apples, and she likes pears.", 7, 1, 9},  // like 1, she 1 (clamped), likes 2
      {"The bridge is old. It stands still.", 7, 2, 7},
      {"Yesterday, we visited the museum.", 5, 1, 10},   // ye-ster-day 3, we 1, vi-si-ted 3, mu-seum 2
      {"Cooperation requires patience.", 3, 1, 9},       // coo-pe-ra-tion 4, re-qui-res 3, pa-tien-ce 2
      {"Little people whistle.", 3, 1, 6},               // consonant+le keeps its syllable
      {"The queue was long.", 4, 1, 4},                  // queue: one group, clamped to 1
      {"Fly high!", 2, 1, 2},
      {"Dr. Smith left. He ran.", 5, 2, 5},              // abbreviation; Dr clamped to 1
      {"It's a well-known fact.", 4, 1, 5},              // well-known 2
      {"Communication improves understanding.", 3, 1, 12},  // 5 + 3 + 4
      {"She ate 42 apples.", 4, 1, 5},                   // 42 clamped to 1
      {"Birds sing. Dogs bark. Cats sleep.", 6, 3, 6},
  };
  return cases;
}

inline double hand_fkgl(const ReadabilityCase& c) {
  return 0.39 * (static_cast<double>(c.words) / c.sentences) + 11.8 * (static_cast<double>(c.syllables) / c.words) -
         15.59;
}

inline double hand_fre(const ReadabilityCase& c) {
  return 206.835 - 1.015 * (static_cast<double>(c.words) / c.sentences) -
         84.6 * (static_cast<double>(c.syllables) / c.words);
}

// Seeded synthetic instances capped per split: the first n_train train and
// n_test test instances in builder order.
inline std::vector<simdoc::SimplificationInstance> capped_synthetic(bool labeled, std::size_t n_train = 500,
                                                                    std::size_t n_test = 50,
                                                                    std::uint64_t seed = 2024,
                                                                    std::size_t n_articles = 700) {
  const auto arts = simdoc::generate_synthetic_corpus(seed, n_articles);
  const auto built = labeled ? simdoc::build_newsela_sl(arts) : simdoc::build_newsela_s(arts);
  std::vector<simdoc::SimplificationInstance> out;
  std::size_t tr = 0, te = 0;
  for (const auto& i : built.instances) {
    if (i.split == simdoc::Split::Train && tr < n_train) {
      out.push_back(i);
      ++tr;
    } else if (i.split == simdoc::Split::Test && te < n_test) {
      out.push_back(i);
      ++te;
    }
  }
  return out;
}

}  // namespace fixture
