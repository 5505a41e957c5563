#pragma once

// Deterministic segmentation, tokenization, syllable counting and the
// fixed-size sentence framing used by every other module.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace simdoc {

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::size_t kDefaultFrame = 10;

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;
  bool is_pad = false;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::size_t pad_count = 0;

  bool operator==(const Document&) const = default;

  std::size_t real_sentence_count() const;
  // Word tokens of non-pad sentences, in order.
  std::vector<std::string> words() const;
  // Non-pad sentence texts joined by single spaces.
  std::string text() const;
};

Sentence make_sentence(std::string text);
Sentence pad_sentence();

std::vector<Sentence> split_sentences(std::string_view text);
std::vector<std::string> tokenize_words(std::string_view sentence_text);
int count_syllables(std::string_view word);

Document frame_document(std::span<const Sentence> sentences, std::size_t frame = kDefaultFrame,
                        std::string id = {});
Document frame_document(const Document& doc, std::size_t frame = kDefaultFrame);

// split_sentences followed by frame_document.
Document make_document(std::string_view text, std::size_t frame = kDefaultFrame,
                       std::string id = {});

std::string to_lower_ascii(std::string_view s);

}  // namespace simdoc
