#include "simdoc/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "simdoc/error.hpp"
#include "simdoc/numfmt.hpp"

namespace simdoc {

namespace {

// std::shuffle's draw pattern is unspecified; this one is fixed.
void seeded_shuffle(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

std::vector<SimplificationInstance> with_split(const std::vector<SimplificationInstance>& all, Split split) {
  std::vector<SimplificationInstance> out;
  for (const auto& inst : all) {
    if (inst.split == split) out.push_back(inst);
  }
  return out;
}

const std::vector<SimplificationInstance>& corpus_or_fail(const Corpora& corpora, const std::string& id) {
  const auto it = corpora.find(id);
  if (it == corpora.end()) fail(ErrorCode::ConfigError, "unknown corpus id '" + id + "'");
  return it->second;
}

struct SampleMetrics {
  double d_sari = 0.0;
  double fkgl_c = 0.0;
  double fre_c = 0.0;
  std::optional<double> fkgl_s;
  std::optional<double> fre_s;
  int coherent = 0;
};

class Trainer {
 public:
  Trainer(const ExperimentConfig& config, Backend& backend, const CoherenceModel& coherence)
      : config_(config), backend_(backend), coherence_(coherence), rng_(config.seed) {}

  void run_stage(std::size_t stage, const std::string& corpus, const std::vector<SimplificationInstance>& data,
                 int epochs, std::vector<EpochLoss>& trace) {
    if (data.empty()) fail(ErrorCode::NoSamples, "corpus '" + corpus + "' has no training instances");
    std::vector<std::size_t> order(data.size());
    for (int epoch = 1; epoch <= epochs; ++epoch) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      seeded_shuffle(order, rng_);
      std::vector<LossBreakdown> seen;
      seen.reserve(data.size());
      for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
        std::vector<SimplificationInstance> batch;
        for (std::size_t k = start; k < std::min(order.size(), start + config_.batch_size); ++k) {
          batch.push_back(data[order[k]]);
        }
        const bool gate_open = step_ >= config_.warmup_steps;
        auto loss = train_step(backend_, batch, config_.loss, &coherence_, gate_open);
        ++step_;
        for (auto& s : loss.samples) seen.push_back(std::move(s));
      }
      const auto epoch_loss = total_loss(seen);
      trace.push_back({stage, corpus, epoch, epoch_loss.total, epoch_loss.n});
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const ExperimentConfig& config_;
  Backend& backend_;
  const CoherenceModel& coherence_;
  std::mt19937_64 rng_;
  std::size_t step_ = 0;
};

}  // namespace

ReportRow ExperimentResult::row() const {
  return {config.model, config.resolved_dataset(), std::string(loss_mode_label(config.loss.mode)),
          std::string(regime_name(config.regime)), report, false};
}

MetricsReport evaluate(Backend& backend, std::span<const SimplificationInstance> test, const CoherenceModel& coherence,
                       std::size_t frame) {
  if (test.empty()) fail(ErrorCode::NoSamples, "empty test set");
  require(frame >= 1, "frame must be positive");
  std::vector<SampleMetrics> rows(test.size());

  auto work = [&](std::size_t i) {
    const auto& inst = test[i];
    const Document pred = backend.generate(inst.source);
    auto& r = rows[i];
    r.d_sari = d_sari(inst.source, pred, std::span<const Document>(&inst.target, 1));
    const auto c = readability_counts(inst.source);
    r.fkgl_c = fkgl(c);
    r.fre_c = fre(c);
    const auto s = readability_counts(pred);
    if (s.words > 0) {
      r.fkgl_s = fkgl(s);
      r.fre_s = fre(s);
    }
    r.coherent = coherence_label(coherence, pred);
  };

  const std::size_t threads =
      backend.concurrent_reads() ? std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), test.size())
                                 : 1;
  if (threads <= 1) {
    for (std::size_t i = 0; i < test.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < test.size(); i += threads) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Index-order sums keep the report independent of thread scheduling.
  MetricsReport rep;
  rep.n_samples = test.size();
  std::size_t with_text = 0;
  std::size_t coherent = 0;
  for (const auto& r : rows) {
    rep.d_sari_s += r.d_sari;
    rep.fkgl_c += r.fkgl_c;
    rep.fre_c += r.fre_c;
    if (r.fkgl_s) {
      rep.fkgl_s += *r.fkgl_s;
      rep.fre_s += *r.fre_s;
      ++with_text;
    }
    coherent += static_cast<std::size_t>(r.coherent);
  }
  const auto n = static_cast<double>(test.size());
  rep.d_sari_s /= n;
  rep.fkgl_c /= n;
  rep.fre_c /= n;
  if (with_text > 0) {
    rep.fkgl_s /= static_cast<double>(with_text);
    rep.fre_s /= static_cast<double>(with_text);
  }
  rep.coh_s = static_cast<double>(coherent) / n;
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Corpora& corpora, Backend& backend,
                                const CoherenceModel& coherence) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = config;

  const auto test = with_split(corpus_or_fail(corpora, config.resolved_test_corpus()), Split::Test);
  if (test.empty()) fail(ErrorCode::NoSamples, "corpus '" + config.resolved_test_corpus() + "' has no test split");
  std::vector<std::vector<SimplificationInstance>> stage_data;
  for (const auto& st : config.stages) stage_data.push_back(with_split(corpus_or_fail(corpora, st.corpus), Split::Train));

  Trainer trainer(config, backend, coherence);
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    const auto& st = config.stages[s];
    const bool last = s + 1 == config.stages.size();
    if (config.regime == Regime::Few && last) {
      // Earlier stages act as pretraining; only the target stage is few-shot.
      auto& data = stage_data[s];
      std::vector<std::size_t> idx(data.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      seeded_shuffle(idx, trainer.rng());
      std::vector<SimplificationInstance> few;
      for (std::size_t i = 0; i < std::min(config.few_shot_samples, idx.size()); ++i) few.push_back(data[idx[i]]);
      trainer.run_stage(s, st.corpus, few, config.few_shot_epochs, result.trace);
    } else {
      trainer.run_stage(s, st.corpus, stage_data[s], st.epochs, result.trace);
    }
  }

  result.report = evaluate(backend, test, coherence, config.frame);
  result.duration = std::chrono::steady_clock::now() - start;
  return result;
}

Comparison compare_regimes(const std::vector<ExperimentConfig>& configs, const Corpora& corpora,
                           const BackendFactory& make, const CoherenceModel& coherence) {
  if (configs.empty()) fail(ErrorCode::ConfigError, "no configs to compare");
  const auto test = configs.front().resolved_test_corpus();
  for (const auto& c : configs) {
    if (c.resolved_test_corpus() != test) {
      fail(ErrorCode::ConfigError,
           "configs evaluate on different test corpora ('" + test + "' vs '" + c.resolved_test_corpus() + "')");
    }
  }
  Comparison out;
  for (const auto& c : configs) {
    auto backend = make(c);
    out.results.push_back(run_experiment(c, corpora, *backend, coherence));
    out.rows.push_back(out.results.back().row());
  }
  // best D-SARI per (model, dataset, loss); first row wins ties
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> best;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& r = out.rows[i];
    const auto key = std::make_tuple(r.model, r.dataset, r.loss);
    const auto it = best.find(key);
    if (it == best.end() || r.metrics.d_sari_s > out.rows[it->second].metrics.d_sari_s) best[key] = i;
  }
  for (const auto& [key, i] : best) out.rows[i].best = true;
  return out;
}

std::unique_ptr<Backend> make_backend(const ExperimentConfig& config) {
  if (config.backend == "builtin") {
    return std::make_unique<BuiltinBackend>(BuiltinConfig{config.alpha, config.read_learning_rate});
  }
  if (config.backend == "external") {
    ExternalOptions opts;
    opts.frame = config.frame;
    opts.config = {{"learning_rate", config.learning_rate},
                   {"weight_decay", config.weight_decay},
                   {"batch_size", config.batch_size},
                   {"seed", config.seed}};
    return spawn_external(config.backend_command, opts);
  }
  fail(ErrorCode::ConfigError, "unknown backend '" + config.backend + "'");
}

CoherenceModel default_coherence_model(std::uint64_t seed) {
  const auto examples = synthetic_coherence_examples(seed, 200);
  CoherenceTrainConfig tc;
  tc.seed = seed;
  return train_coherence(examples, tc);
}

Corpora load_corpora(const ExperimentConfig& config) {
  std::set<std::string> ids;
  for (const auto& st : config.stages) ids.insert(st.corpus);
  if (!config.resolved_test_corpus().empty()) ids.insert(config.resolved_test_corpus());
  Corpora out;
  for (const auto& id : ids) {
    const auto it = config.corpus_paths.find(id);
    if (it == config.corpus_paths.end()) fail(ErrorCode::ConfigError, "no path for corpus '" + id + "' (set corpus." + id + ")");
    out[id] = read_corpus_file(it->second);
  }
  return out;
}

void write_trace(std::ostream& out, const std::vector<EpochLoss>& trace) {
  for (const auto& e : trace) {
    nlohmann::ordered_json j;
    j["stage"] = e.stage;
    j["corpus"] = e.corpus;
    j["epoch"] = e.epoch;
    j["total"] = e.total;
    j["n"] = e.n;
    out << j.dump() << '\n';
  }
}

void write_experiment_result(const std::string& dir, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  const std::vector<ReportRow> rows{result.row()};
  {
    auto f = open("report.tsv");
    write_report_tsv(f, rows);
  }
  {
    auto f = open("report.txt");
    write_report_table(f, rows);
  }
  {
    auto f = open("trace.jsonl");
    write_trace(f, result.trace);
  }
  {
    auto f = open("config.txt");
    f << echo_config(result.config);
  }
  {
    auto f = open("metadata.txt");
    const auto& c = result.config;
    f << "frame = " << c.frame << '\n';
    f << "truncation_unit = sentences\n";
    f << "n_samples = " << result.report.n_samples << '\n';
    f << "backend = " << c.backend << '\n';
    f << "test_corpus = " << c.resolved_test_corpus() << '\n';
    f << "d_sari_s = " << shortest(result.report.d_sari_s) << '\n';
    f << "fkgl_c = " << shortest(result.report.fkgl_c) << '\n';
    f << "fkgl_s = " << shortest(result.report.fkgl_s) << '\n';
    f << "fre_c = " << shortest(result.report.fre_c) << '\n';
    f << "fre_s = " << shortest(result.report.fre_s) << '\n';
    f << "coh_s = " << shortest(result.report.coh_s) << '\n';
    if (c.regime == Regime::Zero && c.backend == "builtin") {
      f << "note = zero-shot uses the untrained identity-prior built-in model as the analogue of an unadapted "
           "pretrained model\n";
    }
  }
}

}  // namespace simdoc
