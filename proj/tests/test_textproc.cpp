#include <doctest.h>

#include "simdoc/error.hpp"
#include "simdoc/textproc.hpp"

using namespace simdoc;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& ss) {
  std::vector<std::string> out;
  for (const auto& s : ss) out.push_back(s.text);
  return out;
}

std::vector<Sentence> n_sentences(int n) {
  std::vector<Sentence> out;
  for (int i = 0; i < n; ++i) out.push_back(make_sentence("Sentence number " + std::to_string(i) + "."));
  return out;
}

}  // namespace

TEST_SUITE("textproc") {
  TEST_CASE("split at terminators followed by a capital") {
    CHECK(texts(split_sentences("A cat. A dog.")) == std::vector<std::string>{"A cat.", "A dog."});
    CHECK(texts(split_sentences("Really? Yes! Go 2 now. 3 left.")) ==
          std::vector<std::string>{"Really?", "Yes!", "Go 2 now.", "3 left."});
  }

  TEST_CASE("no split before lowercase or without whitespace") {
    CHECK(split_sentences("It costs 3.50 dollars. ok then").size() == 1);
    CHECK(split_sentences("see fig.3 here").size() == 1);
  }

  TEST_CASE("abbreviations on the stop-list never end a sentence") {
    CHECK(texts(split_sentences("Dr. Smith left. He ran.")) == std::vector<std::string>{"Dr. Smith left.", "He ran."});
    CHECK(split_sentences("Mr. A met Mrs. B and Prof. C at St. Paul vs. Team X.").size() == 1);
    CHECK(split_sentences("Bring fruit, e.g. Apples. Then go.").size() == 2);
  }

  TEST_CASE("closing quotes stay with their sentence") {
    CHECK(texts(split_sentences("He said \"Stop.\" Then he left.")) ==
          std::vector<std::string>{"He said \"Stop.\"", "Then he left."});
  }

  TEST_CASE("whitespace is normalised and characters preserved") {
    const auto ss = split_sentences("  One\n two.\t\tThree   four!  ");
    CHECK(texts(ss) == std::vector<std::string>{"One two.", "Three four!"});
  }

  TEST_CASE("empty text is an error") {
    CHECK_THROWS_AS(split_sentences(""), Error);
    try {
      split_sentences(" \n\t ");
      FAIL("expected EmptyText");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyText);
    }
  }

  TEST_CASE("splitting is idempotent per sentence") {
    for (const auto& s : split_sentences("Dr. Who arrived. It rained! Did it? Yes, e.g. twice. Done.")) {
      const auto again = split_sentences(s.text);
      REQUIRE(again.size() == 1);
      CHECK(again[0] == s);
    }
  }

  TEST_CASE("tokenizer") {
    CHECK(tokenize_words("The cat sat.") == std::vector<std::string>{"The", "cat", "sat"});
    CHECK(tokenize_words("well-known don't") == std::vector<std::string>{"well-known", "don't"});
    CHECK(tokenize_words("...").empty());
    CHECK(tokenize_words("").empty());
    CHECK(tokenize_words("'quoted' -dash- x--y") == std::vector<std::string>{"quoted", "dash", "x", "y"});  // a double hyphen is a dash
    CHECK(tokenize_words("café “naïve” — ok") == std::vector<std::string>{"café", "naïve", "ok"});
  }

  TEST_CASE("re-tokenizing a sentence reproduces its tokens") {
    for (const auto& s : split_sentences("It's well-known. Numbers like 42 count! “Quotes” don't.")) {
      CHECK(tokenize_words(s.text) == s.tokens);
    }
  }

  TEST_CASE("syllables") {
    CHECK(count_syllables("cat") == 1);
    CHECK(count_syllables("make") == 1);
    CHECK(count_syllables("simple") == 2);
    CHECK(count_syllables("the") == 1);
    CHECK(count_syllables("rhythm") == 1);  // y is a vowel
    CHECK(count_syllables("beautiful") == 3);
    CHECK(count_syllables("Table") == 2);
    CHECK(count_syllables("ale") == 1);  // vowel before "le": the e is silent
    CHECK(count_syllables("shh") == 1);  // clamped
    CHECK(count_syllables("42") == 1);
    CHECK_THROWS_AS(count_syllables(""), Error);
  }

  TEST_CASE("framing pads or truncates to the frame") {
    const auto twelve = frame_document(n_sentences(12), 10);
    CHECK(twelve.sentences.size() == 10);
    CHECK(twelve.pad_count == 0);
    CHECK(twelve.sentences[9].text == "Sentence number 9.");

    const auto seven = frame_document(n_sentences(7), 10);
    CHECK(seven.sentences.size() == 10);
    CHECK(seven.pad_count == 3);
    for (int i = 7; i < 10; ++i) {
      CHECK(seven.sentences[static_cast<std::size_t>(i)].is_pad);
      CHECK(seven.sentences[static_cast<std::size_t>(i)].tokens == std::vector<std::string>{std::string(kPadToken)});
    }
    CHECK(seven.real_sentence_count() == 7);

    const auto ten = frame_document(n_sentences(10), 10);
    CHECK(ten.pad_count == 0);
    CHECK(ten.sentences == n_sentences(10));
  }

  TEST_CASE("framing is idempotent and rejects empty input") {
    const auto d = frame_document(n_sentences(4), 10, "x");
    CHECK(frame_document(d, 10) == d);
    CHECK_THROWS_AS(frame_document(std::vector<Sentence>{}, 10), Error);
  }

  TEST_CASE("pads contribute no words") {
    const auto d = make_document("One two. Three.", 10);
    CHECK(d.words() == std::vector<std::string>{"One", "two", "Three"});
    CHECK(d.text() == "One two. Three.");
  }
}
