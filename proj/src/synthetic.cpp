#include <array>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "simdoc/corpus.hpp"
#include "simdoc/error.hpp"
#include "simdoc/metrics.hpp"

namespace simdoc {

namespace {

// Lexicon entries are grouped by part of speech; the easy side is always
// shorter in syllables than the hard side.
const std::vector<std::pair<std::string, std::string>> kVerbs = {
    {"purchase", "buy"},     {"observe", "see"},       {"construct", "build"},  {"utilize", "use"},
    {"require", "need"},     {"assist", "help"},       {"examine", "check"},    {"obtain", "get"},
    {"locate", "find"},      {"transport", "move"},    {"demolish", "wreck"},   {"consume", "eat"},
    {"comprehend", "grasp"}, {"discover", "spot"},     {"encounter", "meet"},   {"accompany", "join"},
    {"investigate", "probe"},{"abandon", "leave"},     {"commence", "start"},   {"terminate", "end"},
    {"repair", "fix"},       {"remember", "recall"},   {"illuminate", "light"}, {"emulate", "copy"},
    {"telephone", "call"},   {"celebrate", "cheer"},   {"imitate", "mimic"},    {"exhibit", "show"},
    {"inhabit", "fill"},     {"decorate", "trim"}};
const std::vector<std::pair<std::string, std::string>> kAdjectives = {
    {"enormous", "big"},       {"magnificent", "great"}, {"exhausted", "tired"},   {"intelligent", "smart"},
    {"beneficial", "good"},    {"difficult", "hard"},    {"fortunate", "lucky"},   {"delicious", "tasty"},
    {"ancient", "old"},        {"elevated", "high"},     {"miniature", "small"},   {"courageous", "brave"},
    {"furious", "mad"},        {"immaculate", "clean"},  {"melancholy", "sad"},    {"affluent", "rich"},
    {"ferocious", "fierce"},   {"fragile", "weak"},      {"gigantic", "huge"},     {"peculiar", "odd"},
    {"tranquil", "calm"},      {"vigilant", "alert"},    {"luminous", "bright"},   {"obsolete", "dated"},
    {"energetic", "lively"},   {"hazardous", "risky"},   {"abundant", "full"},     {"exquisite", "fine"},
    {"industrious", "busy"},   {"inebriated", "drunk"}};
const std::vector<std::pair<std::string, std::string>> kAdverbs = {
    {"immediately", "now"},   {"frequently", "often"},  {"cautiously", "slowly"},
    {"rapidly", "fast"},      {"eventually", "later"},  {"completely", "fully"},
    {"occasionally", "sometimes"}, {"reluctantly", "slowly"}, {"enthusiastically", "gladly"},
    {"diligently", "hard"},   {"previously", "before"}, {"silently", "quietly"},
    {"furiously", "madly"},   {"courageously", "bravely"}, {"gradually", "slowly"}};
const std::vector<std::pair<std::string, std::string>> kQuantifiers = {
    {"numerous", "many"}, {"additional", "more"}, {"countless", "lots"}};
const std::vector<std::pair<std::string, std::string>> kGroups = {
    {"individuals", "people"}, {"residents", "locals"}, {"inhabitants", "folks"}};

const std::array<std::string_view, 40> kEntities = {
    "farmer",  "horse",   "cart",    "village", "market",  "river",   "bridge",  "teacher",
    "student", "school",  "garden",  "doctor",  "clinic",  "city",    "train",   "station",
    "child",   "ball",    "park",    "dog",     "baker",   "bread",   "oven",    "kitchen",
    "sailor",  "boat",    "harbor",  "island",  "painter", "picture", "museum",  "artist",
    "pilot",   "plane",   "airport", "storm",   "king",    "castle",  "soldier", "forest"};

// Only the mt19937_64 output sequence is standardized, so draws avoid the
// implementation-defined distribution classes.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

template <class Table>
const std::string& hard(const Table& t, std::size_t i) {
  return t[i].first;
}

// One level-0 sentence linking entity a to entity b. Returns whitespace
// separated words with a final period.
std::string complex_sentence(Draw& draw, std::string_view a, std::string_view b) {
  const auto& verb = hard(kVerbs, draw.below(kVerbs.size()));
  const auto& adj = hard(kAdjectives, draw.below(kAdjectives.size()));
  const auto& adj2 = hard(kAdjectives, draw.below(kAdjectives.size()));
  const auto& adv = hard(kAdverbs, draw.below(kAdverbs.size()));
  const std::string A(a), B(b);
  switch (draw.below(5)) {
    case 0:
    case 1:
      return "The " + A + " will " + verb + " the " + B + " " + adv + ".";
    case 2:
      return "The " + A + " was " + adj + " and the " + B + " was " + adj2 + ".";
    case 3: {
      const auto& q = hard(kQuantifiers, draw.below(kQuantifiers.size()));
      const auto& g = hard(kGroups, draw.below(kGroups.size()));
      return capitalize(q) + " " + g + " " + verb + " the " + A + " because the " + B + " is " + adj + ".";
    }
    default:
      return "The " + A + " will " + verb + " the " + B + " but the " + B + " was " + adj + ".";
  }
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    auto sp = s.find(' ', start);
    if (sp == std::string::npos) sp = s.size();
    out.push_back(s.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

std::string join_words(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& x : w) {
    if (!out.empty()) out += ' ';
    out += x;
  }
  return out;
}

// Applies substitutions for lexicon entries whose group (index % 3) is below
// `groups`, preserving capitalization and the trailing period.
std::string substitute(const std::string& sentence, std::size_t groups) {
  auto words = split_words(sentence);
  for (auto& w : words) {
    const bool period = !w.empty() && w.back() == '.';
    std::string core = period ? w.substr(0, w.size() - 1) : w;
    const bool cap = !core.empty() && std::isupper(static_cast<unsigned char>(core[0]));
    const std::string lower = to_lower_ascii(core);
    const auto& lex = synthetic_lexicon();
    for (std::size_t i = 0; i < lex.size(); ++i) {
      if (i % 3 < groups && lex[i].first == lower) {
        core = cap ? capitalize(lex[i].second) : lex[i].second;
        break;
      }
    }
    w = core + (period ? "." : "");
  }
  return join_words(words);
}

// Splits "X <conj> Y." into "X." and "Y." for the given conjunctions.
std::vector<std::string> split_at(const std::string& sentence, const std::vector<std::string_view>& conjunctions) {
  auto words = split_words(sentence);
  for (std::size_t i = 1; i + 1 < words.size(); ++i) {
    for (auto conj : conjunctions) {
      if (words[i] == conj) {
        std::vector<std::string> left(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(i));
        std::vector<std::string> right(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, words.end());
        left.back() += ".";
        right.front() = capitalize(right.front());
        return {join_words(left), join_words(right)};
      }
    }
  }
  return {sentence};
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::vector<std::string> next_level(const std::vector<std::string>& sentences, int level) {
  static const std::vector<std::vector<std::string_view>> kSplits = {
      {}, {}, {"and"}, {"and", "because"}, {"and", "because", "but"}};
  const std::size_t groups = level >= 3 ? 3 : static_cast<std::size_t>(level);
  std::vector<std::string> out;
  for (const auto& s : sentences) {
    for (auto& piece : split_at(substitute(s, groups), kSplits[static_cast<std::size_t>(level)])) {
      out.push_back(std::move(piece));
    }
  }
  return out;
}

// Sentence i links entity i to entity i+1, so only neighbours share an
// entity mention.
std::vector<std::string> chain_sentences(Draw& draw, std::size_t n_sentences) {
  std::vector<std::string_view> chain{kEntities[draw.below(kEntities.size())]};
  while (chain.size() <= n_sentences) {
    auto next = kEntities[draw.below(kEntities.size())];
    if (next != chain.back()) chain.push_back(next);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n_sentences; ++i) out.push_back(complex_sentence(draw, chain[i], chain[i + 1]));
  return out;
}

}  // namespace

std::vector<std::string> synthetic_chain_text(std::uint64_t seed, std::size_t n_sentences) {
  require(n_sentences >= 1, "need at least one sentence");
  Draw draw(seed);
  return chain_sentences(draw, n_sentences);
}

const std::vector<std::pair<std::string, std::string>>& synthetic_lexicon() {
  static const auto table = [] {
    std::vector<std::pair<std::string, std::string>> t;
    for (const auto* part : {&kVerbs, &kAdjectives, &kAdverbs, &kQuantifiers, &kGroups}) {
      t.insert(t.end(), part->begin(), part->end());
    }
    return t;
  }();
  return table;
}

std::vector<LeveledArticle> generate_synthetic_corpus(std::uint64_t seed, std::size_t n_articles) {
  require(n_articles >= 1, "synthetic corpus needs at least one article");
  Draw draw(seed);
  std::vector<LeveledArticle> out;
  out.reserve(n_articles);
  for (std::size_t a = 0; a < n_articles; ++a) {
    const auto level0 = chain_sentences(draw, 5 + draw.below(2));

    LeveledArticle article;
    article.article_id = "syn-" + std::to_string(seed) + "-" + std::to_string(a);
    article.versions[0] = join_sentences(level0);
    std::vector<std::string> current = level0;
    for (int level = 1; level <= 4; ++level) {
      current = next_level(current, level);
      if (level == 4 && current.size() >= 4) {
        auto trimmed = current;
        trimmed.pop_back();
        const auto text = join_sentences(trimmed);
        if (fkgl(make_document(text, 64)) <= fkgl(make_document(article.versions[0], 64))) current = trimmed;
      }
      article.versions[level] = join_sentences(current);
    }
    out.push_back(std::move(article));
  }
  return out;
}

}  // namespace simdoc
