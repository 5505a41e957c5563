#pragma once

// Training-triple construction from leveled article collections, coherence
// data ingestion, control-token formatting and the on-disk corpus format.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simdoc/textproc.hpp"

namespace simdoc {

enum class Task { Simplify, ReadClassify };
enum class Split { Train, Valid, Test };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);
std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct LeveledArticle {
  std::string article_id;
  std::map<int, std::string> versions;  // readability level 0..4 -> raw text

  bool operator==(const LeveledArticle&) const = default;
};

struct SimplificationInstance {
  std::string id;
  Document source;
  Document target;
  std::optional<int> readability_label;
  Split split = Split::Train;

  bool operator==(const SimplificationInstance&) const = default;
};

enum class Consensus { Low, Medium, High };
std::string_view consensus_name(Consensus c);

struct CoherenceExample {
  Document document;
  std::vector<int> expert_ratings;
  Consensus consensus_class = Consensus::Low;
  int binary_label = 0;
};

struct GcdcRecord {
  std::string text;
  std::vector<int> expert_ratings;
};

struct BuildResult {
  std::vector<SimplificationInstance> instances;
  std::vector<std::string> skipped;  // article ids without a usable simple level
};

// Stable 80/10/10 assignment from the article id.
Split assign_split(std::string_view article_id);

BuildResult build_newsela_s(const std::vector<LeveledArticle>& articles, std::size_t frame = kDefaultFrame);
BuildResult build_newsela_sl(const std::vector<LeveledArticle>& articles, std::size_t frame = kDefaultFrame);

Consensus consensus_from_ratings(const std::vector<int>& ratings);
int binary_coherence_label(Consensus c);
std::vector<CoherenceExample> ingest_gcdc(const std::vector<GcdcRecord>& records,
                                          std::size_t frame = kDefaultFrame);

std::vector<SimplificationInstance> ingest_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs, std::size_t frame = kDefaultFrame);

std::string format_control_input(Task task, std::string_view text);
// Inverse of format_control_input; ParseError when the prefix is absent.
std::pair<Task, std::string> parse_control_input(std::string_view input);

// Deterministic leveled articles where each level is derived from the
// previous one by lexical substitution, conjunction splitting and trailing
// sentence deletion.
std::vector<LeveledArticle> generate_synthetic_corpus(std::uint64_t seed, std::size_t n_articles);

// Level-0 sentences of one entity chain, n_sentences long.
std::vector<std::string> synthetic_chain_text(std::uint64_t seed, std::size_t n_sentences);

// Hard -> easy substitution table used by the synthetic generator.
const std::vector<std::pair<std::string, std::string>>& synthetic_lexicon();

// Sentences joined by '\n', padding sentences written as the pad token.
std::string encode_document(const Document& doc);
Document decode_document(std::string_view encoded, std::string id = {});

void write_corpus(std::ostream& out, const std::vector<SimplificationInstance>& instances);
std::vector<SimplificationInstance> read_corpus(std::istream& in);
void write_corpus_file(const std::string& path, const std::vector<SimplificationInstance>& instances);
std::vector<SimplificationInstance> read_corpus_file(const std::string& path);

std::vector<GcdcRecord> read_gcdc(std::istream& in);
void write_gcdc(std::ostream& out, const std::vector<CoherenceExample>& examples);

}  // namespace simdoc
