#pragma once

// Experiment grid runner: zero/few/fine regimes over one- or multi-stage
// training schedules, evaluated into report rows.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simdoc/backend.hpp"
#include "simdoc/coherence.hpp"
#include "simdoc/corpus.hpp"
#include "simdoc/loss.hpp"
#include "simdoc/metrics.hpp"
#include "simdoc/report.hpp"

namespace simdoc {

enum class Regime { Zero, Few, Fine };
std::string_view regime_name(Regime r);
Regime parse_regime(std::string_view name);
// Row label of a loss mode ("simple", "simple+read", ...).
std::string_view loss_mode_label(LossMode mode);

struct Stage {
  std::string corpus;
  int epochs = 5;

  bool operator==(const Stage&) const = default;
};

struct ExperimentConfig {
  Regime regime = Regime::Fine;
  LossConfig loss;
  std::vector<Stage> stages;
  std::size_t few_shot_samples = 10;
  int few_shot_epochs = 1;
  int fine_epochs = 5;
  std::uint64_t seed = 0;
  std::size_t frame = kDefaultFrame;
  std::size_t batch_size = 8;
  std::size_t warmup_steps = 0;
  std::string test_corpus;  // defaults to the last stage's corpus
  std::string model = "builtin";
  std::string dataset;      // report label; defaults to the test corpus id
  std::string backend = "builtin";  // builtin | external
  std::string backend_command;
  double learning_rate = 2e-5;  // passed through to external backends
  double weight_decay = 0.01;
  double alpha = 1.0;
  double read_learning_rate = 0.5;
  std::string coherence_model;  // path; empty trains the synthetic default
  std::map<std::string, std::string> corpus_paths;

  // Validates field ranges and the regime/stage invariants (ConfigError).
  void validate() const;
  std::string resolved_test_corpus() const;
  std::string resolved_dataset() const;
};

// Flat "key = value" text. Unknown keys are a ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
// Canonical key-value echo that parse_config reads back to the same config.
std::string echo_config(const ExperimentConfig& config);

struct EpochLoss {
  std::size_t stage = 0;
  std::string corpus;
  int epoch = 0;
  double total = 0.0;
  std::size_t n = 0;

  bool operator==(const EpochLoss&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<EpochLoss> trace;
  MetricsReport report;
  std::chrono::duration<double> duration{0.0};

  ReportRow row() const;
};

using Corpora = std::map<std::string, std::vector<SimplificationInstance>>;

MetricsReport evaluate(Backend& backend, std::span<const SimplificationInstance> test, const CoherenceModel& coherence,
                       std::size_t frame = kDefaultFrame);

ExperimentResult run_experiment(const ExperimentConfig& config, const Corpora& corpora, Backend& backend,
                                const CoherenceModel& coherence);

struct Comparison {
  std::vector<ExperimentResult> results;
  std::vector<ReportRow> rows;
};

using BackendFactory = std::function<std::unique_ptr<Backend>(const ExperimentConfig&)>;

// One row per config; the best D-SARI within each (model, dataset, loss)
// group is flagged. All configs must share a test corpus.
Comparison compare_regimes(const std::vector<ExperimentConfig>& configs, const Corpora& corpora,
                           const BackendFactory& make_backend, const CoherenceModel& coherence);

std::unique_ptr<Backend> make_backend(const ExperimentConfig& config);
CoherenceModel default_coherence_model(std::uint64_t seed);
// Loads the configured corpus files that the config references.
Corpora load_corpora(const ExperimentConfig& config);

// report.tsv, report.txt, trace.jsonl, config.txt and metadata.txt; the
// files hold no timing so identical runs write identical bytes.
void write_experiment_result(const std::string& dir, const ExperimentResult& result);
void write_trace(std::ostream& out, const std::vector<EpochLoss>& trace);

}  // namespace simdoc
