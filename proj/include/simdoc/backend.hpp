#pragma once

// Simplifier/classifier backends: the abstract interface the harness drives,
// a built-in count-based simplifier with a softmax readability classifier,
// and a subprocess backend speaking the newline-delimited JSON protocol.

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "simdoc/coherence.hpp"
#include "simdoc/corpus.hpp"
#include "simdoc/loss.hpp"
#include "simdoc/textproc.hpp"

namespace simdoc {

using ScoreTarget = std::variant<Document, int>;

class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;
  virtual Document generate(const Document& doc) = 0;
  virtual double score(Task task, const Document& input, const ScoreTarget& target) = 0;
  virtual int classify(const Document& doc) = 0;
  // Applies one update for a sample; `gate` scales the step (1, or delta for
  // coherent predictions under a coherence mode).
  virtual void update(const SimplificationInstance& sample, double gate, const LossConfig& config) = 0;
  virtual void reset() = 0;
  // True when generate/score/classify may run concurrently on one instance.
  virtual bool concurrent_reads() const { return false; }
};

// One batch step: losses are computed for every sample with the current
// parameters, combined per sample, then the updates are applied. A closed
// gate (warm-up) records every sample as not coherent.
BatchLoss train_step(Backend& backend, std::span<const SimplificationInstance> batch, const LossConfig& config,
                     const CoherenceModel* coherence, bool gate_open = true);

// Coherence label of a prediction; predictions without text count as 0.
int coherence_label(const CoherenceModel& model, const Document& prediction);

// ---------------------------------------------------------------------------
// Token alignment

enum class EditKind { Copy, Delete, Substitute };

struct TokenEdit {
  EditKind kind = EditKind::Copy;
  std::string replacement;  // set for Substitute

  bool operator==(const TokenEdit&) const = default;
};

struct Alignment {
  std::vector<TokenEdit> edits;  // one per source token
  std::size_t insertions = 0;    // target tokens with no source partner
};

// Longest-common-subsequence alignment. Ties prefer copy, then delete; the
// unmatched source and target tokens inside each gap pair up positionally
// as substitutions.
Alignment align_tokens(std::span<const std::string> source, std::span<const std::string> target);

// ---------------------------------------------------------------------------
// Built-in simplifier

class SubstitutionModel {
 public:
  struct Counts {
    double copy = 0.0;
    double del = 0.0;
    std::map<std::string, double> substitutions;

    double total() const;
    bool operator==(const Counts&) const = default;
  };

  explicit SubstitutionModel(double alpha = 1.0);

  double alpha() const { return alpha_; }
  // Probability of an edit for a (lowercased) source token. Substitutions to
  // unobserved words share one smoothed bucket.
  double probability(const std::string& token, const TokenEdit& edit) const;
  TokenEdit best_edit(const std::string& token) const;
  void observe(const std::string& token, const TokenEdit& edit, double weight);
  void set_counts(const std::string& token, Counts counts);
  const std::map<std::string, Counts>& table() const { return table_; }
  const std::set<std::string>& split_lexicon() const { return split_lexicon_; }
  bool is_split_conjunction(const std::string& token) const;

  void clear() { table_.clear(); }
  bool operator==(const SubstitutionModel&) const = default;

 private:
  double alpha_;
  std::map<std::string, Counts> table_;
  std::set<std::string> split_lexicon_;
};

inline constexpr int kReadabilityClasses = 4;
inline constexpr int kReadabilityFeatures = 5;
using ReadabilityWeights = Eigen::Matrix<double, kReadabilityClasses, kReadabilityFeatures>;
using ReadabilityInput = Eigen::Matrix<double, kReadabilityFeatures, 1>;
using ReadabilityProbs = Eigen::Matrix<double, kReadabilityClasses, 1>;

// Surface features (words/sentence, chars/word, syllables/word, FRE, bias),
// each divided by a fixed scale so they share a magnitude.
ReadabilityInput readability_features(const Document& doc);

class ReadabilityClassifier {
 public:
  ReadabilityClassifier() : weights_(ReadabilityWeights::Zero()) {}
  explicit ReadabilityClassifier(const ReadabilityWeights& w) : weights_(w) {}

  const ReadabilityWeights& weights() const { return weights_; }
  ReadabilityWeights& weights() { return weights_; }

  ReadabilityProbs probabilities(const Document& doc) const;
  // Labels are 1..4; ties go to the lower label.
  int classify(const Document& doc) const;
  double nll(const Document& doc, int label) const;
  void sgd_step(const Document& doc, int label, double learning_rate);

  bool operator==(const ReadabilityClassifier&) const = default;

 private:
  ReadabilityWeights weights_;
};

// Mean cross-entropy over (features, label) pairs and its analytic gradient.
double readability_loss(const ReadabilityWeights& w, std::span<const ReadabilityInput> xs, std::span<const int> labels,
                        ReadabilityWeights* gradient = nullptr);
double gradient_check_readability(const ReadabilityWeights& w, std::span<const ReadabilityInput> xs,
                                  std::span<const int> labels, double epsilon);

struct BuiltinConfig {
  double alpha = 1.0;
  double read_learning_rate = 0.5;
};

class BuiltinBackend final : public Backend {
 public:
  explicit BuiltinBackend(BuiltinConfig config = {});

  std::string name() const override { return "builtin"; }
  Document generate(const Document& doc) override;
  double score(Task task, const Document& input, const ScoreTarget& target) override;
  int classify(const Document& doc) override;
  void update(const SimplificationInstance& sample, double gate, const LossConfig& config) override;
  void reset() override;
  bool concurrent_reads() const override { return true; }

  Document simplify(const Document& doc) const;
  double simplification_nll(const Document& source, const Document& target) const;

  SubstitutionModel& simplifier() { return simplifier_; }
  const SubstitutionModel& simplifier() const { return simplifier_; }
  ReadabilityClassifier& readability() { return readability_; }
  const ReadabilityClassifier& readability() const { return readability_; }
  const BuiltinConfig& config() const { return config_; }

  bool operator==(const BuiltinBackend& other) const {
    return simplifier_ == other.simplifier_ && readability_ == other.readability_;
  }

 private:
  BuiltinConfig config_;
  SubstitutionModel simplifier_;
  ReadabilityClassifier readability_;
};

// ---------------------------------------------------------------------------
// External subprocess backend

inline constexpr int kProtocolVersion = 1;

struct ExternalOptions {
  std::chrono::milliseconds handshake_timeout{30000};
  std::chrono::milliseconds request_timeout{300000};
  std::size_t frame = kDefaultFrame;
  nlohmann::json config = nlohmann::json::object();  // passed through on every request
};

class ExternalBackend final : public Backend {
 public:
  ExternalBackend(const std::string& command, ExternalOptions options);
  ~ExternalBackend() override;
  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  std::string name() const override { return "external"; }
  Document generate(const Document& doc) override;
  double score(Task task, const Document& input, const ScoreTarget& target) override;
  int classify(const Document& doc) override;
  void update(const SimplificationInstance& sample, double gate, const LossConfig& config) override;
  void reset() override;

  const std::vector<std::string>& supported_ops() const { return ops_; }
  int remote_version() const { return remote_version_; }

  // Sends one request and returns the validated response object.
  nlohmann::json request(const std::string& op, Task task, const std::string& input, const nlohmann::json& target,
                         const nlohmann::json& extra_config = nlohmann::json::object());

 private:
  void send_line(const std::string& line);
  std::string read_line(std::chrono::milliseconds timeout);
  void shutdown();

  ExternalOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long next_id_ = 1;
  int remote_version_ = 0;
  std::vector<std::string> ops_;
};

std::unique_ptr<Backend> spawn_external(const std::string& command, ExternalOptions options = {});

// Plain-text document payload used on the wire: non-pad sentences joined by
// '\n'. The reverse direction re-frames to `frame` sentences.
std::string wire_text(const Document& doc);
Document from_wire_text(const std::string& text, std::size_t frame, std::string id = {});

}  // namespace simdoc
