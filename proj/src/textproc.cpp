#include "simdoc/textproc.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "simdoc/error.hpp"

namespace simdoc {

namespace {

constexpr std::array<std::string_view, 10> kAbbreviations = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "vs.", "e.g.", "i.e.", "etc."};

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Decodes one UTF-8 code point starting at pos; invalid bytes decode as
// themselves with length 1.
char32_t decode_utf8(std::string_view s, std::size_t pos, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) -> int {
    if (pos + i >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + i]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      len = 2;
      return (static_cast<char32_t>(b0 & 0x1F) << 6) | c1;
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      len = 3;
      return (static_cast<char32_t>(b0 & 0x0F) << 12) | (c1 << 6) | c2;
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      len = 4;
      return (static_cast<char32_t>(b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3;
    }
  }
  len = 1;
  return b0;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp <= 0xBF) return false;  // Latin-1 punctuation and symbols
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  return true;
}

bool is_joiner(char32_t cp) {
  return cp == '\'' || cp == '-' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011;
}

bool is_upper_or_digit(char32_t cp) {
  if (cp < 0x80) return std::isupper(static_cast<int>(cp)) || std::isdigit(static_cast<int>(cp));
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

bool is_closing(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x201D || cp == 0x2019;
}

bool is_opening(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// The whitespace-delimited word ending at `end` (exclusive), with leading
// opening brackets/quotes removed.
std::string_view word_before(std::string_view s, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !is_space(static_cast<unsigned char>(s[b - 1]))) --b;
  while (b < end && (s[b] == '(' || s[b] == '[' || s[b] == '"' || s[b] == '\'')) ++b;
  return s.substr(b, end - b);
}

bool is_abbreviation(std::string_view word) {
  const std::string lower = to_lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t Document::real_sentence_count() const {
  return static_cast<std::size_t>(
      std::count_if(sentences.begin(), sentences.end(), [](const Sentence& s) { return !s.is_pad; }));
}

std::vector<std::string> Document::words() const {
  std::vector<std::string> out;
  for (const auto& s : sentences) {
    if (s.is_pad) continue;
    out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  }
  return out;
}

std::string Document::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (s.is_pad) continue;
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

Sentence make_sentence(std::string text) {
  Sentence s;
  s.tokens = tokenize_words(text);
  s.text = std::move(text);
  return s;
}

Sentence pad_sentence() {
  return Sentence{std::string(kPadToken), {std::string(kPadToken)}, true};
}

std::vector<Sentence> split_sentences(std::string_view text) {
  if (trim(text).empty()) fail(ErrorCode::EmptyText, "text is empty or whitespace-only");

  std::vector<Sentence> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    const auto piece = trim(text.substr(b, e - b));
    if (piece.empty()) return;
    std::string normalized;
    normalized.reserve(piece.size());
    for (char ch : piece) {
      if (is_space(static_cast<unsigned char>(ch))) {
        if (normalized.back() != ' ') normalized += ' ';
      } else {
        normalized += ch;
      }
    }
    out.push_back(make_sentence(std::move(normalized)));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) ++end;
    const bool single_period = (end == i + 1 && c == '.');
    std::size_t len = 0;
    while (end < text.size() && is_closing(decode_utf8(text, end, len))) end += len;

    std::size_t next = end;
    while (next < text.size() && is_space(static_cast<unsigned char>(text[next]))) ++next;
    bool boundary = next > end && next < text.size();
    if (boundary) {
      std::size_t probe = next;
      char32_t cp = decode_utf8(text, probe, len);
      while (is_opening(cp) && probe + len < text.size()) {
        probe += len;
        cp = decode_utf8(text, probe, len);
      }
      boundary = is_upper_or_digit(cp);
    }
    if (boundary && single_period && is_abbreviation(word_before(text, i + 1))) boundary = false;

    if (boundary) {
      emit(start, end);
      start = next;
      i = next;
    } else {
      i = end;
    }
  }
  emit(start, text.size());
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  char32_t prev = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len = 0;
    const char32_t cp = decode_utf8(text, pos, len);
    if (is_word_char(cp)) {
      current.append(text.substr(pos, len));
    } else if (is_joiner(cp) && !current.empty() && is_word_char(prev) && pos + len < text.size()) {
      std::size_t next_len = 0;
      if (is_word_char(decode_utf8(text, pos + len, next_len))) {
        current.append(text.substr(pos, len));
      } else {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
    prev = cp;
    pos += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

int count_syllables(std::string_view word) {
  if (word.empty()) fail(ErrorCode::EmptyToken, "cannot count syllables of an empty token");
  const std::string w = to_lower_ascii(word);

  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }

  const std::size_t n = w.size();
  if (n >= 1 && w[n - 1] == 'e') {
    const bool consonant_le = n >= 3 && w[n - 2] == 'l' &&
                              std::isalpha(static_cast<unsigned char>(w[n - 3])) && !is_vowel(w[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

Document frame_document(std::span<const Sentence> sentences, std::size_t frame, std::string id) {
  if (sentences.empty()) fail(ErrorCode::EmptyText, "cannot frame an empty sentence list");
  require(frame >= 1, "frame size must be positive");

  Document doc;
  doc.id = std::move(id);
  const std::size_t keep = std::min(frame, sentences.size());
  doc.sentences.assign(sentences.begin(), sentences.begin() + static_cast<std::ptrdiff_t>(keep));
  while (doc.sentences.size() < frame) doc.sentences.push_back(pad_sentence());
  doc.pad_count = doc.sentences.size() - doc.real_sentence_count();
  return doc;
}

Document frame_document(const Document& doc, std::size_t frame) {
  return frame_document(doc.sentences, frame, doc.id);
}

Document make_document(std::string_view text, std::size_t frame, std::string id) {
  const auto sentences = split_sentences(text);
  return frame_document(sentences, frame, std::move(id));
}

}  // namespace simdoc
