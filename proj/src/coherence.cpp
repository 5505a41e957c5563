#include "simdoc/coherence.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "simdoc/error.hpp"
#include "simdoc/linalg.hpp"
#include "simdoc/numfmt.hpp"

namespace simdoc {

namespace {

bool contains(const std::vector<std::string_view>& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

std::set<std::string> content_words(const Sentence& s) {
  std::set<std::string> out;
  for (const auto& t : s.tokens) {
    auto lower = to_lower_ascii(t);
    if (!contains(coherence_stop_words(), lower)) out.insert(std::move(lower));
  }
  return out;
}

// Jaccard overlap; two empty sets share no content evidence and score 0.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

CoherenceVector CoherenceFeatureVector::as_vector() const {
  CoherenceVector v;
  v << adjacent_overlap, connective_density, pronoun_density, type_token_ratio, length_norm, bias;
  return v;
}

const std::vector<std::string_view>& coherence_feature_names() {
  static const std::vector<std::string_view> names = {"adjacent_overlap", "connective_density", "pronoun_density",
                                                      "type_token_ratio", "length_norm",        "bias"};
  return names;
}

const std::vector<std::string_view>& coherence_stop_words() {
  static const std::vector<std::string_view> words = {
      "a",    "an",   "the",   "and",   "or",    "but",  "if",   "of",   "to",    "in",    "on",  "at",
      "by",   "for",  "with",  "from",  "as",    "is",   "are",  "was",  "were",  "be",    "been", "being",
      "will", "would", "can",  "could", "should", "has", "have", "had",  "do",    "does",  "did", "it",
      "its",  "this", "that",  "these", "those", "he",   "she",  "they", "we",    "you",   "i",   "his",
      "her",  "their", "our",  "my",    "your",  "him",  "them", "us",   "me",    "not",   "no",  "so",
      "then", "there", "very", "also",  "because"};
  return words;
}

const std::vector<std::string_view>& coherence_connectives() {
  static const std::vector<std::string_view> words = {
      "however", "therefore", "because",   "so",      "then",    "also",         "but",     "and",
      "thus",    "moreover",  "furthermore", "first", "second",  "finally",      "later",   "meanwhile",
      "consequently", "instead", "although", "while", "since",   "hence",        "afterwards", "next"};
  return words;
}

const std::vector<std::string_view>& coherence_pronouns() {
  static const std::vector<std::string_view> words = {"i",   "me",   "my",    "you",  "your",  "he",   "him",
                                                      "his", "she",  "her",   "it",   "its",   "we",   "us",
                                                      "our", "they", "them",  "their", "this", "these", "those"};
  return words;
}

CoherenceFeatureVector extract_features(const Document& doc) {
  std::vector<const Sentence*> real;
  for (const auto& s : doc.sentences) {
    if (!s.is_pad) real.push_back(&s);
  }
  if (real.empty()) fail(ErrorCode::NoText, "document has no non-pad sentences");

  CoherenceFeatureVector f;
  const auto n = static_cast<double>(real.size());

  if (real.size() > 1) {
    double sum = 0.0;
    auto prev = content_words(*real[0]);
    for (std::size_t i = 1; i < real.size(); ++i) {
      auto cur = content_words(*real[i]);
      sum += jaccard(prev, cur);
      prev = std::move(cur);
    }
    f.adjacent_overlap = sum / static_cast<double>(real.size() - 1);
  }

  std::size_t connectives = 0, pronouns = 0, total = 0;
  std::set<std::string> types;
  for (const auto* s : real) {
    for (const auto& t : s->tokens) {
      auto lower = to_lower_ascii(t);
      connectives += contains(coherence_connectives(), lower);
      pronouns += contains(coherence_pronouns(), lower);
      types.insert(std::move(lower));
      ++total;
    }
  }
  f.connective_density = static_cast<double>(connectives) / n;
  f.pronoun_density = static_cast<double>(pronouns) / n;
  f.type_token_ratio = total == 0 ? 1.0 : static_cast<double>(types.size()) / static_cast<double>(total);
  f.length_norm = n / static_cast<double>(doc.sentences.size());
  return f;
}

double coherence_loss(const CoherenceVector& weights, std::span<const CoherenceVector> features,
                      std::span<const int> labels, CoherenceVector* gradient) {
  require(!features.empty() && features.size() == labels.size(), "features and labels must align");
  double loss = 0.0;
  if (gradient) gradient->setZero();
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double z = weights.dot(features[i]);
    loss += bce_with_logit(z, labels[i]);
    if (gradient) *gradient += (sigmoid(z) - labels[i]) * features[i];
  }
  const auto n = static_cast<double>(features.size());
  if (gradient) *gradient /= n;
  return loss / n;
}

CoherenceModel train_coherence(std::span<const CoherenceExample> examples, const CoherenceTrainConfig& config) {
  require(config.learning_rate > 0.0 && config.epochs >= 0, "learning rate must be positive");
  bool has_pos = false, has_neg = false;
  for (const auto& ex : examples) (ex.binary_label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) fail(ErrorCode::DegenerateLabels, "training data must contain both classes");

  // Canonical order first so the seeded shuffle alone decides visit order.
  struct Row {
    CoherenceVector x;
    int y;
  };
  std::vector<Row> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) rows.push_back({extract_features(ex.document).as_vector(), ex.binary_label});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    for (int k = 0; k < kCoherenceFeatureCount; ++k) {
      if (a.x[k] != b.x[k]) return a.x[k] < b.x[k];
    }
    return a.y < b.y;
  });
  std::vector<CoherenceVector> xs;
  std::vector<int> ys;
  for (const auto& r : rows) {
    xs.push_back(r.x);
    ys.push_back(r.y);
  }

  CoherenceModel model;
  auto& w = model.weights();
  model.training_log().emplace_back(0, coherence_loss(w, xs, ys));

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (auto i : order) {
      const double p = sigmoid(w.dot(xs[i]));
      w -= config.learning_rate * (p - ys[i]) * xs[i];
    }
    model.training_log().emplace_back(epoch, coherence_loss(w, xs, ys));
  }
  return model;
}

CoherencePrediction predict_coherence(const CoherenceModel& model, const Document& doc) {
  const double p = sigmoid(model.weights().dot(extract_features(doc).as_vector()));
  return {p >= model.threshold() ? 1 : 0, p};
}

double gradient_check_coherence(const CoherenceModel& model, std::span<const CoherenceExample> examples,
                                double epsilon) {
  require(epsilon > 0.0, "epsilon must be positive");
  std::vector<CoherenceVector> xs;
  std::vector<int> ys;
  for (const auto& ex : examples) {
    xs.push_back(extract_features(ex.document).as_vector());
    ys.push_back(ex.binary_label);
  }
  CoherenceVector analytic;
  coherence_loss(model.weights(), xs, ys, &analytic);

  double worst = 0.0;
  for (int k = 0; k < kCoherenceFeatureCount; ++k) {
    CoherenceVector plus = model.weights(), minus = model.weights();
    plus[k] += epsilon;
    minus[k] -= epsilon;
    const double numeric = (coherence_loss(plus, xs, ys) - coherence_loss(minus, xs, ys)) / (2.0 * epsilon);
    worst = std::max(worst, relative_error(analytic[k], numeric));
  }
  return worst;
}

double coherence_accuracy(const CoherenceModel& model, std::span<const CoherenceExample> examples) {
  require(!examples.empty(), "no examples");
  std::size_t correct = 0;
  for (const auto& ex : examples) correct += predict_coherence(model, ex.document).label == ex.binary_label;
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::vector<CoherenceExample> synthetic_coherence_examples(std::uint64_t seed, std::size_t n_documents,
                                                           std::size_t frame) {
  require(n_documents >= 2, "need at least two documents");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<CoherenceExample> out;
  out.reserve(n_documents);
  for (std::size_t i = 0; i < n_documents; ++i) {
    // One full frame of chained sentences per document.
    std::string text;
    for (const auto& sent : synthetic_chain_text(seed * 1000003u + i, frame)) text += (text.empty() ? "" : " ") + sent;
    auto sentences = split_sentences(text);
    CoherenceExample ex;
    if (i % 2 == 0) {
      ex.expert_ratings = {3, 3, 3};
    } else {
      const auto original = sentences;
      std::vector<std::size_t> idx(sentences.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      do {
        shuffle_indices(idx, rng);
        for (std::size_t k = 0; k < idx.size(); ++k) sentences[k] = original[idx[k]];
      } while (sentences == original);
      ex.expert_ratings = {1, 1, 1};
    }
    ex.consensus_class = consensus_from_ratings(ex.expert_ratings);
    ex.binary_label = binary_coherence_label(ex.consensus_class);
    ex.document = frame_document(sentences, frame, "coh-" + std::to_string(seed) + "-" + std::to_string(i));
    out.push_back(std::move(ex));
  }
  return out;
}

void save_coherence_model(std::ostream& out, const CoherenceModel& model) {
  out << "format simdoc-coherence-v1\n";
  out << "threshold " << shortest(model.threshold()) << '\n';
  const auto& names = coherence_feature_names();
  for (int k = 0; k < kCoherenceFeatureCount; ++k) {
    out << "weight " << names[static_cast<std::size_t>(k)] << ' ' << shortest(model.weights()[k]) << '\n';
  }
  for (const auto& [epoch, loss] : model.training_log()) out << "log " << epoch << ' ' << shortest(loss) << '\n';
}

CoherenceModel load_coherence_model(std::istream& in) {
  CoherenceModel model;
  std::string line;
  bool header = false;
  std::vector<bool> seen(kCoherenceFeatureCount, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string v;
      ls >> v;
      if (v != "simdoc-coherence-v1") fail(ErrorCode::ParseError, "unknown coherence model format " + v);
      header = true;
    } else if (key == "threshold") {
      std::string v;
      ls >> v;
      model.set_threshold(parse_double(v));
    } else if (key == "weight") {
      std::string name, v;
      ls >> name >> v;
      const auto& names = coherence_feature_names();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) fail(ErrorCode::ParseError, "unknown feature " + name);
      const auto k = static_cast<std::size_t>(it - names.begin());
      model.weights()[static_cast<int>(k)] = parse_double(v);
      seen[k] = true;
    } else if (key == "log") {
      std::string e, v;
      ls >> e >> v;
      model.training_log().emplace_back(static_cast<int>(parse_int(e)), parse_double(v));
    } else {
      fail(ErrorCode::ParseError, "unexpected key " + key);
    }
  }
  if (!header) fail(ErrorCode::ParseError, "missing format header");
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) fail(ErrorCode::ParseError, "missing weights");
  return model;
}

void save_coherence_model_file(const std::string& path, const CoherenceModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  save_coherence_model(out, model);
}

CoherenceModel load_coherence_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  return load_coherence_model(in);
}

}  // namespace simdoc
