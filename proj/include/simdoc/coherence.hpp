#pragma once

// Binary coherence scorer: logistic regression over discourse surface
// features of a framed document.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "simdoc/corpus.hpp"
#include "simdoc/textproc.hpp"

namespace simdoc {

inline constexpr int kCoherenceFeatureCount = 6;
using CoherenceVector = Eigen::Matrix<double, kCoherenceFeatureCount, 1>;

struct CoherenceFeatureVector {
  double adjacent_overlap = 0.0;
  double connective_density = 0.0;
  double pronoun_density = 0.0;
  double type_token_ratio = 1.0;
  double length_norm = 1.0;
  double bias = 1.0;

  CoherenceVector as_vector() const;
};

const std::vector<std::string_view>& coherence_feature_names();
const std::vector<std::string_view>& coherence_stop_words();
const std::vector<std::string_view>& coherence_connectives();
const std::vector<std::string_view>& coherence_pronouns();

CoherenceFeatureVector extract_features(const Document& doc);

struct CoherenceTrainConfig {
  double learning_rate = 0.1;
  int epochs = 50;
  std::uint64_t seed = 42;
};

class CoherenceModel {
 public:
  CoherenceModel() : weights_(CoherenceVector::Zero()) {}
  explicit CoherenceModel(const CoherenceVector& weights, double threshold = 0.5)
      : weights_(weights), threshold_(threshold) {}

  const CoherenceVector& weights() const { return weights_; }
  CoherenceVector& weights() { return weights_; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }

  // (epoch, mean training loss); epoch 0 is the loss before any update.
  const std::vector<std::pair<int, double>>& training_log() const { return log_; }
  std::vector<std::pair<int, double>>& training_log() { return log_; }

  bool operator==(const CoherenceModel&) const = default;

 private:
  CoherenceVector weights_;
  double threshold_ = 0.5;
  std::vector<std::pair<int, double>> log_;
};

struct CoherencePrediction {
  int label = 0;
  double probability = 0.5;
};

CoherenceModel train_coherence(std::span<const CoherenceExample> examples, const CoherenceTrainConfig& config = {});
CoherencePrediction predict_coherence(const CoherenceModel& model, const Document& doc);

// Mean binary cross-entropy and its analytic gradient over the examples.
double coherence_loss(const CoherenceVector& weights, std::span<const CoherenceVector> features,
                      std::span<const int> labels, CoherenceVector* gradient = nullptr);

// Max relative error between the analytic gradient and central differences.
double gradient_check_coherence(const CoherenceModel& model, std::span<const CoherenceExample> examples,
                                double epsilon);

double coherence_accuracy(const CoherenceModel& model, std::span<const CoherenceExample> examples);

// Ordered documents (label 1) and sentence-shuffled copies (label 0) built
// from synthetic entity chains that fill the frame; n_documents total,
// alternating classes.
std::vector<CoherenceExample> synthetic_coherence_examples(std::uint64_t seed, std::size_t n_documents,
                                                           std::size_t frame = kDefaultFrame);

void save_coherence_model(std::ostream& out, const CoherenceModel& model);
CoherenceModel load_coherence_model(std::istream& in);
void save_coherence_model_file(const std::string& path, const CoherenceModel& model);
CoherenceModel load_coherence_model_file(const std::string& path);

}  // namespace simdoc
