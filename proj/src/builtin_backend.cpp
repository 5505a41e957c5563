#include <algorithm>
#include <cctype>
#include <cmath>

#include "simdoc/backend.hpp"
#include "simdoc/error.hpp"
#include "simdoc/linalg.hpp"
#include "simdoc/metrics.hpp"

namespace simdoc {

namespace {

// Log-probability of a target token with no source partner: the uniform
// prior over {copy, delete, unseen substitution} of an unseen token.
const double kInsertionNll = std::log(3.0);

std::vector<std::string> lowered(const std::vector<std::string>& tokens) {
  std::vector<std::string> out = tokens;
  for (auto& t : out) t = to_lower_ascii(t);
  return out;
}

bool starts_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

char terminal_punct(const std::string& text) {
  if (!text.empty() && (text.back() == '.' || text.back() == '!' || text.back() == '?')) return text.back();
  return '.';
}

}  // namespace

Alignment align_tokens(std::span<const std::string> source, std::span<const std::string> target) {
  const std::size_t n = source.size(), m = target.size();
  // suffix LCS lengths
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = source[i] == target[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }

  Alignment out;
  out.edits.resize(n);
  std::vector<std::size_t> gap_src;
  std::vector<std::size_t> gap_tgt;
  auto flush = [&] {
    const std::size_t paired = std::min(gap_src.size(), gap_tgt.size());
    for (std::size_t k = 0; k < gap_src.size(); ++k) {
      out.edits[gap_src[k]] = k < paired ? TokenEdit{EditKind::Substitute, target[gap_tgt[k]]}
                                         : TokenEdit{EditKind::Delete, {}};
    }
    out.insertions += gap_tgt.size() - paired;
    gap_src.clear();
    gap_tgt.clear();
  };

  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && source[i] == target[j] && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
      flush();
      out.edits[i] = {EditKind::Copy, {}};
      ++i;
      ++j;
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      gap_src.push_back(i++);
    } else {
      gap_tgt.push_back(j++);
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------

double SubstitutionModel::Counts::total() const {
  double t = copy + del;
  for (const auto& [w, c] : substitutions) t += c;
  return t;
}

SubstitutionModel::SubstitutionModel(double alpha)
    : alpha_(alpha), split_lexicon_{"and", "but", "because", "so", "while", "although", "whereas"} {
  require(alpha > 0.0, "smoothing constant must be positive");
}

double SubstitutionModel::probability(const std::string& token, const TokenEdit& edit) const {
  const auto it = table_.find(token);
  static const Counts kEmpty;
  const Counts& c = it == table_.end() ? kEmpty : it->second;
  const double outcomes = 3.0 + static_cast<double>(c.substitutions.size());
  const double denom = c.total() + alpha_ * outcomes;
  double count = 0.0;
  switch (edit.kind) {
    case EditKind::Copy: count = c.copy; break;
    case EditKind::Delete: count = c.del; break;
    case EditKind::Substitute: {
      const auto s = c.substitutions.find(edit.replacement);
      count = s == c.substitutions.end() ? 0.0 : s->second;
      break;
    }
  }
  return (count + alpha_) / denom;
}

TokenEdit SubstitutionModel::best_edit(const std::string& token) const {
  const auto it = table_.find(token);
  if (it == table_.end()) return {EditKind::Copy, {}};
  const Counts& c = it->second;
  TokenEdit best{EditKind::Copy, {}};
  double best_count = c.copy;
  if (c.del > best_count) {
    best = {EditKind::Delete, {}};
    best_count = c.del;
  }
  for (const auto& [w, n] : c.substitutions) {
    if (n > best_count) {
      best = {EditKind::Substitute, w};
      best_count = n;
    }
  }
  return best;
}

void SubstitutionModel::observe(const std::string& token, const TokenEdit& edit, double weight) {
  auto& c = table_[token];
  switch (edit.kind) {
    case EditKind::Copy: c.copy += weight; break;
    case EditKind::Delete: c.del += weight; break;
    case EditKind::Substitute: c.substitutions[edit.replacement] += weight; break;
  }
}

void SubstitutionModel::set_counts(const std::string& token, Counts counts) { table_[token] = std::move(counts); }

bool SubstitutionModel::is_split_conjunction(const std::string& token) const {
  return split_lexicon_.contains(token);
}

// ---------------------------------------------------------------------------

ReadabilityInput readability_features(const Document& doc) {
  const auto counts = readability_counts(doc);
  if (counts.words == 0) fail(ErrorCode::NoText, "no countable words");
  std::size_t chars = 0;
  for (const auto& w : doc.words()) chars += w.size();
  const double words = static_cast<double>(counts.words);
  ReadabilityInput x;
  x << words / static_cast<double>(counts.sentences) / 20.0, static_cast<double>(chars) / words / 10.0,
      static_cast<double>(counts.syllables) / words / 2.0, fre(counts) / 100.0, 1.0;
  return x;
}

ReadabilityProbs ReadabilityClassifier::probabilities(const Document& doc) const {
  return softmax(weights_ * readability_features(doc));
}

int ReadabilityClassifier::classify(const Document& doc) const {
  const ReadabilityProbs p = probabilities(doc);
  int best = 0;
  for (int k = 1; k < kReadabilityClasses; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best + 1;
}

double ReadabilityClassifier::nll(const Document& doc, int label) const {
  require(label >= 1 && label <= kReadabilityClasses, "readability label must be in [1,4]");
  const ReadabilityProbs lp = log_softmax(weights_ * readability_features(doc));
  return -lp[label - 1];
}

void ReadabilityClassifier::sgd_step(const Document& doc, int label, double learning_rate) {
  require(label >= 1 && label <= kReadabilityClasses, "readability label must be in [1,4]");
  const ReadabilityInput x = readability_features(doc);
  ReadabilityProbs residual = softmax(weights_ * x);
  residual[label - 1] -= 1.0;
  weights_ -= learning_rate * residual * x.transpose();
}

double readability_loss(const ReadabilityWeights& w, std::span<const ReadabilityInput> xs, std::span<const int> labels,
                        ReadabilityWeights* gradient) {
  require(!xs.empty() && xs.size() == labels.size(), "features and labels must align");
  double loss = 0.0;
  if (gradient) gradient->setZero();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const ReadabilityProbs logits = w * xs[i];
    loss -= log_softmax(logits)[labels[i] - 1];
    if (gradient) {
      ReadabilityProbs residual = softmax(logits);
      residual[labels[i] - 1] -= 1.0;
      *gradient += residual * xs[i].transpose();
    }
  }
  const auto n = static_cast<double>(xs.size());
  if (gradient) *gradient /= n;
  return loss / n;
}

double gradient_check_readability(const ReadabilityWeights& w, std::span<const ReadabilityInput> xs,
                                  std::span<const int> labels, double epsilon) {
  require(epsilon > 0.0, "epsilon must be positive");
  ReadabilityWeights analytic;
  readability_loss(w, xs, labels, &analytic);
  double worst = 0.0;
  for (int r = 0; r < kReadabilityClasses; ++r) {
    for (int c = 0; c < kReadabilityFeatures; ++c) {
      ReadabilityWeights plus = w, minus = w;
      plus(r, c) += epsilon;
      minus(r, c) -= epsilon;
      const double numeric = (readability_loss(plus, xs, labels) - readability_loss(minus, xs, labels)) / (2.0 * epsilon);
      worst = std::max(worst, relative_error(analytic(r, c), numeric));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

BuiltinBackend::BuiltinBackend(BuiltinConfig config) : config_(config), simplifier_(config.alpha) {}

Document BuiltinBackend::simplify(const Document& doc) const {
  require(doc.real_sentence_count() > 0, "cannot simplify an empty document");

  std::vector<Sentence> out;
  for (const auto& s : doc.sentences) {
    if (s.is_pad) continue;
    std::vector<std::vector<std::string>> pieces(1);
    bool changed = false;
    for (std::size_t k = 0; k < s.tokens.size(); ++k) {
      const auto& tok = s.tokens[k];
      const auto lower = to_lower_ascii(tok);
      const auto edit = simplifier_.best_edit(lower);
      switch (edit.kind) {
        case EditKind::Copy:
          pieces.back().push_back(tok);
          break;
        case EditKind::Substitute:
          pieces.back().push_back(starts_upper(tok) ? capitalized(edit.replacement) : edit.replacement);
          changed = true;
          break;
        case EditKind::Delete:
          changed = true;
          if (simplifier_.is_split_conjunction(lower) && !pieces.back().empty() && k + 1 < s.tokens.size()) {
            pieces.emplace_back();
          }
          break;
      }
    }
    if (!changed) {
      out.push_back(s);
      continue;
    }
    const char punct = terminal_punct(s.text);
    for (auto& words : pieces) {
      if (words.empty()) continue;
      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      text = capitalized(std::move(text));
      text += punct;
      out.push_back(make_sentence(std::move(text)));
    }
  }
  // Everything deleted: fall back to the input rather than an empty output.
  if (out.empty()) return doc;
  return frame_document(out, doc.sentences.size(), doc.id);
}

double BuiltinBackend::simplification_nll(const Document& source, const Document& target) const {
  const auto src = lowered(source.words());
  const auto tgt = lowered(target.words());
  const auto alignment = align_tokens(src, tgt);
  double nll = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) nll -= std::log(simplifier_.probability(src[i], alignment.edits[i]));
  nll += static_cast<double>(alignment.insertions) * kInsertionNll;
  const std::size_t events = src.size() + alignment.insertions;
  return events == 0 ? 0.0 : nll / static_cast<double>(events);
}

Document BuiltinBackend::generate(const Document& doc) { return simplify(doc); }

double BuiltinBackend::score(Task task, const Document& input, const ScoreTarget& target) {
  if (task == Task::Simplify) {
    const auto* doc = std::get_if<Document>(&target);
    require(doc != nullptr, "simplify scoring needs a target document");
    return simplification_nll(input, *doc);
  }
  const auto* label = std::get_if<int>(&target);
  require(label != nullptr, "readability scoring needs a label");
  return readability_.nll(input, *label);
}

int BuiltinBackend::classify(const Document& doc) { return readability_.classify(doc); }

void BuiltinBackend::update(const SimplificationInstance& sample, double gate, const LossConfig& config) {
  const auto src = lowered(sample.source.words());
  const auto tgt = lowered(sample.target.words());
  const auto alignment = align_tokens(src, tgt);
  for (std::size_t i = 0; i < src.size(); ++i) simplifier_.observe(src[i], alignment.edits[i], gate);
  if (uses_readability(config.mode) && sample.readability_label) {
    readability_.sgd_step(sample.target, *sample.readability_label, config_.read_learning_rate * gate);
  }
}

void BuiltinBackend::reset() {
  simplifier_.clear();
  readability_ = ReadabilityClassifier{};
}

}  // namespace simdoc
