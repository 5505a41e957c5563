#pragma once

// Readability (FKGL, FRE), edit-based simplification quality (SARI and its
// document-level variant D-SARI) and the coherence rate.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "simdoc/textproc.hpp"

namespace simdoc {

class CoherenceModel;

struct ReadabilityCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
};

// Counts over non-pad sentences that carry at least one word.
ReadabilityCounts readability_counts(const Document& doc);

double fkgl(const Document& doc);
double fre(const Document& doc);
double fkgl(const ReadabilityCounts& counts);
double fre(const ReadabilityCounts& counts);

using Tokens = std::vector<std::string>;

// Averaged over n-gram orders 1..4, each in [0,1].
struct SariComponents {
  double keep = 0.0;
  double del = 0.0;
  double add = 0.0;
};

SariComponents sari_components(std::span<const std::string> source, std::span<const std::string> prediction,
                               std::span<const Tokens> references);

// Token-level SARI in [0,100]; tokens are compared as given.
double sari(std::span<const std::string> source, std::span<const std::string> prediction,
            std::span<const Tokens> references);

// Document-level SARI over lowercased word tokens of non-pad sentences.
double sari(const Document& source, const Document& prediction, std::span<const Document> references);

struct DocumentPenalties {
  double lp_add = 1.0;   // output shorter than the reference
  double lp_keep = 1.0;  // output longer than the reference
  double slp = 1.0;      // sentence-count mismatch
};

DocumentPenalties document_penalties(std::size_t input_length, std::size_t output_length,
                                     double reference_length, std::size_t output_sentences,
                                     double reference_sentences);

double d_sari(const Document& source, const Document& prediction, std::span<const Document> references);

double coherence_rate(std::span<const Document> predictions, const CoherenceModel& model);

struct MetricsReport {
  double d_sari_s = 0.0;
  double fkgl_c = 0.0;
  double fkgl_s = 0.0;
  double fre_c = 0.0;
  double fre_s = 0.0;
  double coh_s = 0.0;
  std::size_t n_samples = 0;

  bool operator==(const MetricsReport&) const = default;
};

}  // namespace simdoc
