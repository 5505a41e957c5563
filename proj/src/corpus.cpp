#include "simdoc/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "simdoc/error.hpp"

namespace simdoc {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kSimplifyPrefix = "simplify: ";
constexpr std::string_view kReadClassifyPrefix = "read classify: ";

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

SimplificationInstance make_instance(std::string id, std::string_view source, std::string_view target,
                                     std::optional<int> label, Split split, std::size_t frame) {
  SimplificationInstance inst;
  inst.source = make_document(source, frame, id + "#source");
  inst.target = make_document(target, frame, id + "#target");
  inst.id = std::move(id);
  inst.readability_label = label;
  inst.split = split;
  return inst;
}

void check_complex(const std::vector<LeveledArticle>& articles) {
  std::string missing;
  for (const auto& a : articles) {
    if (!a.versions.contains(0)) {
      if (!missing.empty()) missing += ", ";
      missing += a.article_id;
    }
  }
  if (!missing.empty()) fail(ErrorCode::MissingComplex, "articles without level 0: " + missing);
}

}  // namespace

std::string_view task_name(Task task) {
  return task == Task::Simplify ? "simplify" : "read_classify";
}

Task parse_task(std::string_view name) {
  if (name == "simplify") return Task::Simplify;
  if (name == "read_classify") return Task::ReadClassify;
  fail(ErrorCode::ParseError, "unknown task '" + std::string(name) + "'");
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "valid") return Split::Valid;
  if (name == "test") return Split::Test;
  fail(ErrorCode::ParseError, "unknown split '" + std::string(name) + "'");
}

std::string_view consensus_name(Consensus c) {
  switch (c) {
    case Consensus::Low: return "low";
    case Consensus::Medium: return "medium";
    case Consensus::High: return "high";
  }
  return "low";
}

Split assign_split(std::string_view article_id) {
  const auto bucket = fnv1a(article_id) % 100;
  if (bucket < 80) return Split::Train;
  if (bucket < 90) return Split::Valid;
  return Split::Test;
}

BuildResult build_newsela_s(const std::vector<LeveledArticle>& articles, std::size_t frame) {
  check_complex(articles);
  BuildResult result;
  for (const auto& a : articles) {
    auto simple = a.versions.find(4);
    if (simple == a.versions.end()) simple = a.versions.find(3);
    if (simple == a.versions.end()) {
      result.skipped.push_back(a.article_id);
      continue;
    }
    result.instances.push_back(make_instance(a.article_id, a.versions.at(0), simple->second, std::nullopt,
                                             assign_split(a.article_id), frame));
  }
  return result;
}

BuildResult build_newsela_sl(const std::vector<LeveledArticle>& articles, std::size_t frame) {
  check_complex(articles);
  BuildResult result;
  for (const auto& a : articles) {
    const auto& complex = a.versions.at(0);
    bool any = false;
    for (int level = 1; level <= 4; ++level) {
      const auto it = a.versions.find(level);
      if (it == a.versions.end()) continue;
      any = true;
      result.instances.push_back(make_instance(a.article_id + "-L" + std::to_string(level), complex, it->second,
                                               level, assign_split(a.article_id), frame));
    }
    if (!any) result.skipped.push_back(a.article_id);
  }
  return result;
}

Consensus consensus_from_ratings(const std::vector<int>& ratings) {
  require(!ratings.empty(), "at least one expert rating is required");
  long sum = 0;
  for (int r : ratings) {
    if (r < 1 || r > 3) fail(ErrorCode::InvalidRating, "rating " + std::to_string(r) + " outside [1,3]");
    sum += r;
  }
  // mean <= 1.8  <=>  5*sum <= 9*n ; mean <= 2.2  <=>  5*sum <= 11*n
  const long n = static_cast<long>(ratings.size());
  if (5 * sum <= 9 * n) return Consensus::Low;
  if (5 * sum <= 11 * n) return Consensus::Medium;
  return Consensus::High;
}

int binary_coherence_label(Consensus c) { return c == Consensus::High ? 1 : 0; }

std::vector<CoherenceExample> ingest_gcdc(const std::vector<GcdcRecord>& records, std::size_t frame) {
  std::vector<CoherenceExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    CoherenceExample ex;
    ex.consensus_class = consensus_from_ratings(r.expert_ratings);
    ex.binary_label = binary_coherence_label(ex.consensus_class);
    ex.expert_ratings = r.expert_ratings;
    ex.document = make_document(r.text, frame, "gcdc-" + std::to_string(i));
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<SimplificationInstance> ingest_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                                 std::size_t frame) {
  std::vector<SimplificationInstance> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [complex, simple] = pairs[i];
    auto blank = [](const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; };
    if (blank(complex) || blank(simple)) {
      fail(ErrorCode::EmptyText, "pair " + std::to_string(i) + " has an empty side");
    }
    const std::string id = "pair-" + std::to_string(i);
    out.push_back(make_instance(id, complex, simple, std::nullopt, assign_split(id), frame));
  }
  return out;
}

std::string format_control_input(Task task, std::string_view text) {
  require(!text.empty(), "control input text must be non-empty");
  const auto prefix = task == Task::Simplify ? kSimplifyPrefix : kReadClassifyPrefix;
  std::string out(prefix);
  out += text;
  return out;
}

std::pair<Task, std::string> parse_control_input(std::string_view input) {
  if (input.starts_with(kSimplifyPrefix)) return {Task::Simplify, std::string(input.substr(kSimplifyPrefix.size()))};
  if (input.starts_with(kReadClassifyPrefix)) {
    return {Task::ReadClassify, std::string(input.substr(kReadClassifyPrefix.size()))};
  }
  fail(ErrorCode::ParseError, "input lacks a control prefix");
}

std::string encode_document(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (i) out += '\n';
    out += doc.sentences[i].is_pad ? std::string(kPadToken) : doc.sentences[i].text;
  }
  return out;
}

Document decode_document(std::string_view encoded, std::string id) {
  Document doc;
  doc.id = std::move(id);
  std::size_t start = 0;
  while (start <= encoded.size()) {
    const auto nl = encoded.find('\n', start);
    const auto line = encoded.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (line == kPadToken) {
      doc.sentences.push_back(pad_sentence());
      ++doc.pad_count;
    } else if (!line.empty()) {
      doc.sentences.push_back(make_sentence(std::string(line)));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return doc;
}

void write_corpus(std::ostream& out, const std::vector<SimplificationInstance>& instances) {
  for (const auto& inst : instances) {
    ordered_json rec;
    rec["id"] = inst.id;
    rec["source"] = encode_document(inst.source);
    rec["target"] = encode_document(inst.target);
    if (inst.readability_label) rec["level"] = *inst.readability_label;
    rec["split"] = split_name(inst.split);
    out << rec.dump() << '\n';
  }
}

std::vector<SimplificationInstance> read_corpus(std::istream& in) {
  std::vector<SimplificationInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto rec = ordered_json::parse(line);
      SimplificationInstance inst;
      inst.id = rec.at("id").get<std::string>();
      inst.source = decode_document(rec.at("source").get<std::string>(), inst.id + "#source");
      inst.target = decode_document(rec.at("target").get<std::string>(), inst.id + "#target");
      if (rec.contains("level") && !rec["level"].is_null()) inst.readability_label = rec["level"].get<int>();
      inst.split = parse_split(rec.at("split").get<std::string>());
      if (inst.source.sentences.empty() || inst.target.sentences.empty()) {
        fail(ErrorCode::EmptyText, "record " + inst.id + " has an empty document");
      }
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, "corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus_file(const std::string& path, const std::vector<SimplificationInstance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  write_corpus(out, instances);
}

std::vector<SimplificationInstance> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  return read_corpus(in);
}

std::vector<GcdcRecord> read_gcdc(std::istream& in) {
  std::vector<GcdcRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      out.push_back({rec.at("text").get<std::string>(), rec.at("expert_ratings").get<std::vector<int>>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, "gcdc line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_gcdc(std::ostream& out, const std::vector<CoherenceExample>& examples) {
  for (const auto& ex : examples) {
    ordered_json rec;
    rec["text"] = ex.document.text();
    rec["expert_ratings"] = ex.expert_ratings;
    rec["consensus_class"] = consensus_name(ex.consensus_class);
    rec["binary_label"] = ex.binary_label;
    out << rec.dump() << '\n';
  }
}

}  // namespace simdoc
