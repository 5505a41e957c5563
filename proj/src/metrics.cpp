#include "simdoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "simdoc/coherence.hpp"
#include "simdoc/error.hpp"

namespace simdoc {

namespace {

using Counts = std::map<std::string, long>;

constexpr char kGramSep = '\x1f';
constexpr int kMaxOrder = 4;

Counts ngram_counts(std::span<const std::string> tokens, int n, long weight = 1) {
  Counts out;
  const auto len = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string key = tokens[static_cast<std::size_t>(i)];
    for (int j = 1; j < n; ++j) {
      key += kGramSep;
      key += tokens[static_cast<std::size_t>(i + j)];
    }
    out[key] += weight;
  }
  return out;
}

long count_of(const Counts& c, const std::string& key) {
  const auto it = c.find(key);
  return it == c.end() ? 0 : it->second;
}

// F1 with the convention that an operation absent from both the system and
// the references scores 1.
double f1(std::optional<double> precision, std::optional<double> recall) {
  if (!precision && !recall) return 1.0;
  const double p = precision.value_or(0.0);
  const double r = recall.value_or(0.0);
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

struct OrderScores {
  double keep, del, add;
};

OrderScores score_order(std::span<const std::string> source, std::span<const std::string> prediction,
                        std::span<const Tokens> references, int n) {
  const long num_refs = static_cast<long>(references.size());
  const Counts s = ngram_counts(source, n, num_refs);
  const Counts c = ngram_counts(prediction, n, num_refs);
  Counts r;
  for (const auto& ref : references) {
    for (const auto& [g, k] : ngram_counts(ref, n)) r[g] += k;
  }

  // keep
  Counts sys_keep, ref_keep;
  for (const auto& [g, ks] : s) {
    const long kc = count_of(c, g), kr = count_of(r, g);
    if (kc > 0) sys_keep[g] = std::min(ks, kc);
    if (kr > 0) ref_keep[g] = std::min(ks, kr);
  }
  std::optional<double> keep_p, keep_r;
  if (!sys_keep.empty()) {
    double sum = 0.0;
    for (const auto& [g, k] : sys_keep) sum += static_cast<double>(std::min(k, count_of(r, g))) / static_cast<double>(k);
    keep_p = sum / static_cast<double>(sys_keep.size());
  }
  if (!ref_keep.empty()) {
    double sum = 0.0;
    for (const auto& [g, k] : ref_keep) {
      const long good = std::min(count_of(sys_keep, g), count_of(r, g));
      sum += static_cast<double>(good) / static_cast<double>(k);
    }
    keep_r = sum / static_cast<double>(ref_keep.size());
  }

  // delete (precision only)
  Counts sys_del, ref_del;
  for (const auto& [g, ks] : s) {
    const long dc = ks - count_of(c, g), dr = ks - count_of(r, g);
    if (dc > 0) sys_del[g] = dc;
    if (dr > 0) ref_del[g] = dr;
  }
  double del;
  if (sys_del.empty()) {
    del = ref_del.empty() ? 1.0 : 0.0;
  } else {
    double sum = 0.0;
    for (const auto& [g, k] : sys_del) sum += static_cast<double>(std::min(k, count_of(ref_del, g))) / static_cast<double>(k);
    del = sum / static_cast<double>(sys_del.size());
  }

  // add (set based)
  long sys_add = 0, ref_add = 0, good_add = 0;
  for (const auto& [g, k] : c) {
    if (s.contains(g)) continue;
    ++sys_add;
    if (r.contains(g)) ++good_add;
  }
  for (const auto& [g, k] : r) {
    if (!s.contains(g)) ++ref_add;
  }
  std::optional<double> add_p, add_r;
  if (sys_add > 0) add_p = static_cast<double>(good_add) / static_cast<double>(sys_add);
  if (ref_add > 0) add_r = static_cast<double>(good_add) / static_cast<double>(ref_add);

  return {f1(keep_p, keep_r), del, f1(add_p, add_r)};
}

Tokens lowered_words(const Document& doc) {
  Tokens out = doc.words();
  for (auto& t : out) t = to_lower_ascii(t);
  return out;
}

std::vector<Tokens> lowered_words(std::span<const Document> docs) {
  std::vector<Tokens> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(lowered_words(d));
  return out;
}

}  // namespace

ReadabilityCounts readability_counts(const Document& doc) {
  ReadabilityCounts counts;
  for (const auto& s : doc.sentences) {
    if (s.is_pad || s.tokens.empty()) continue;
    ++counts.sentences;
    counts.words += s.tokens.size();
    for (const auto& t : s.tokens) counts.syllables += static_cast<std::size_t>(count_syllables(t));
  }
  return counts;
}

double fkgl(const ReadabilityCounts& c) {
  if (c.words == 0) fail(ErrorCode::NoText, "no countable words");
  const double wps = static_cast<double>(c.words) / static_cast<double>(c.sentences);
  const double spw = static_cast<double>(c.syllables) / static_cast<double>(c.words);
  return 0.39 * wps + 11.8 * spw - 15.59;
}

double fre(const ReadabilityCounts& c) {
  if (c.words == 0) fail(ErrorCode::NoText, "no countable words");
  const double wps = static_cast<double>(c.words) / static_cast<double>(c.sentences);
  const double spw = static_cast<double>(c.syllables) / static_cast<double>(c.words);
  return 206.835 - 1.015 * wps - 84.6 * spw;
}

double fkgl(const Document& doc) { return fkgl(readability_counts(doc)); }
double fre(const Document& doc) { return fre(readability_counts(doc)); }

SariComponents sari_components(std::span<const std::string> source, std::span<const std::string> prediction,
                               std::span<const Tokens> references) {
  if (references.empty()) fail(ErrorCode::NoReference, "at least one reference is required");
  double keep = 0.0, del = 0.0, add = 0.0;
  for (int n = 1; n <= kMaxOrder; ++n) {
    const auto o = score_order(source, prediction, references, n);
    keep += o.keep;
    del += o.del;
    add += o.add;
  }
  return {keep / kMaxOrder, del / kMaxOrder, add / kMaxOrder};
}

double sari(std::span<const std::string> source, std::span<const std::string> prediction,
            std::span<const Tokens> references) {
  const auto c = sari_components(source, prediction, references);
  return 100.0 * (c.keep + c.del + c.add) / 3.0;
}

double sari(const Document& source, const Document& prediction, std::span<const Document> references) {
  if (references.empty()) fail(ErrorCode::NoReference, "at least one reference is required");
  const auto refs = lowered_words(references);
  return sari(lowered_words(source), lowered_words(prediction), refs);
}

DocumentPenalties document_penalties(std::size_t input_length, std::size_t output_length,
                                     double reference_length, std::size_t output_sentences,
                                     double reference_sentences) {
  DocumentPenalties p;
  const double in = static_cast<double>(input_length);
  const double out = static_cast<double>(output_length);
  if (out < reference_length) p.lp_add = out == 0.0 ? 0.0 : std::exp((out - reference_length) / out);
  if (out > reference_length) p.lp_keep = std::exp((reference_length - out) / std::max(in - reference_length, 1.0));
  const double os = static_cast<double>(output_sentences);
  const double most = std::max(os, reference_sentences);
  if (most > 0.0) p.slp = std::exp(-std::abs(reference_sentences - os) / most);
  return p;
}

double d_sari(const Document& source, const Document& prediction, std::span<const Document> references) {
  if (references.empty()) fail(ErrorCode::NoReference, "at least one reference is required");
  const auto src = lowered_words(source);
  const auto pred = lowered_words(prediction);
  const auto refs = lowered_words(references);
  const auto c = sari_components(src, pred, refs);

  // Multiple references contribute their mean length and sentence count.
  double ref_len = 0.0, ref_sent = 0.0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    ref_len += static_cast<double>(refs[i].size());
    ref_sent += static_cast<double>(references[i].real_sentence_count());
  }
  ref_len /= static_cast<double>(references.size());
  ref_sent /= static_cast<double>(references.size());

  const auto p = document_penalties(src.size(), pred.size(), ref_len, prediction.real_sentence_count(), ref_sent);
  return 100.0 * (c.keep * p.lp_keep * p.slp + c.del * p.lp_keep + c.add * p.lp_add) / 3.0;
}

double coherence_rate(std::span<const Document> predictions, const CoherenceModel& model) {
  if (predictions.empty()) fail(ErrorCode::NoSamples, "no predictions to rate");
  std::size_t coherent = 0;
  for (const auto& d : predictions) coherent += static_cast<std::size_t>(predict_coherence(model, d).label);
  return static_cast<double>(coherent) / static_cast<double>(predictions.size());
}

}  // namespace simdoc
