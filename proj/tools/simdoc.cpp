// simdoc command-line entry point.
//
// Exit codes: 0 ok, 1 domain error, 2 usage or configuration error.
// Results go to stdout; diagnostics and epoch lines go to stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "simdoc/backend.hpp"
#include "simdoc/coherence.hpp"
#include "simdoc/corpus.hpp"
#include "simdoc/error.hpp"
#include "simdoc/harness.hpp"
#include "simdoc/metrics.hpp"
#include "simdoc/numfmt.hpp"
#include "simdoc/report.hpp"

namespace fs = std::filesystem;
using namespace simdoc;

namespace {

// Keys accepted both in config files and as --<key> flags.
const std::vector<std::string> kConfigKeys = {
    "regime",      "loss_mode",     "delta",      "stages",         "few_shot_samples", "few_shot_epochs",
    "fine_epochs", "seed",          "frame",      "batch_size",     "warmup_steps",     "test_corpus",
    "model",       "dataset",       "backend",    "backend_command", "learning_rate",   "weight_decay",
    "alpha",       "read_learning_rate", "coherence_model"};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Newsela-style directory: one file per version named <article>.<level>.txt
std::vector<LeveledArticle> read_leveled_dir(const std::string& dir) {
  std::map<std::string, LeveledArticle> by_id;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const auto stem = p.stem().string();
    const auto dot = stem.rfind('.');
    if (dot == std::string::npos || dot == 0) {
      std::cerr << "ignoring " << p.filename().string() << " (expected <article>.<level>.txt)\n";
      continue;
    }
    int level = 0;
    try {
      level = static_cast<int>(parse_int(stem.substr(dot + 1)));
    } catch (const Error&) {
      std::cerr << "ignoring " << p.filename().string() << " (level is not a number)\n";
      continue;
    }
    if (level < 0 || level > 4) fail(ErrorCode::ParseError, p.string() + ": level outside 0..4");
    auto& art = by_id[stem.substr(0, dot)];
    art.article_id = stem.substr(0, dot);
    art.versions[level] = slurp(p.string());
  }
  std::vector<LeveledArticle> out;
  for (auto& [id, art] : by_id) out.push_back(std::move(art));
  return out;
}

// Aligned pairs: one JSON object per line with "complex" and "simple".
std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(j.at("complex").get<std::string>(), j.at("simple").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// One document per non-blank line.
std::vector<Document> read_documents(const std::string& path, std::size_t frame) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path);
  std::vector<Document> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(make_document(line, frame, path + ":" + std::to_string(out.size() + 1)));
  }
  if (out.empty()) fail(ErrorCode::NoText, path + " contains no text");
  return out;
}

void print_skips(const BuildResult& r) {
  std::cout << r.instances.size() << " instances\n";
  if (!r.skipped.empty()) {
    std::cout << "skipped " << r.skipped.size() << ":";
    for (const auto& id : r.skipped) std::cout << ' ' << id;
    std::cout << '\n';
  }
}

struct BuildArgs {
  std::string scheme;
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t n = 100;
  std::size_t frame = kDefaultFrame;
  std::string pairing = "newsela-s";
};

int cmd_build_corpus(const BuildArgs& a) {
  if (a.scheme == "synthetic") {
    const auto articles = generate_synthetic_corpus(a.seed, a.n);
    const auto r = a.pairing == "newsela-sl" ? build_newsela_sl(articles, a.frame) : build_newsela_s(articles, a.frame);
    write_corpus_file(a.out, r.instances);
    print_skips(r);
    return 0;
  }
  if (a.in.empty()) throw CLI::ValidationError("--in", "required for scheme " + a.scheme);
  if (a.scheme == "newsela-s" || a.scheme == "newsela-sl") {
    if (!fs::is_directory(a.in)) throw CLI::ValidationError("--in", "directory not found: " + a.in);
    const auto articles = read_leveled_dir(a.in);
    const auto r = a.scheme == "newsela-s" ? build_newsela_s(articles, a.frame) : build_newsela_sl(articles, a.frame);
    write_corpus_file(a.out, r.instances);
    print_skips(r);
    return 0;
  }
  if (!fs::is_regular_file(a.in)) throw CLI::ValidationError("--in", "file not found: " + a.in);
  if (a.scheme == "pairs") {
    const auto instances = ingest_pairs(read_pairs(a.in), a.frame);
    write_corpus_file(a.out, instances);
    std::cout << instances.size() << " instances\n";
    return 0;
  }
  // gcdc
  std::ifstream in(a.in);
  const auto examples = ingest_gcdc(read_gcdc(in), a.frame);
  std::ofstream out(a.out);
  if (!out) fail(ErrorCode::IoError, "cannot write " + a.out);
  write_gcdc(out, examples);
  std::size_t positive = 0;
  for (const auto& ex : examples) positive += static_cast<std::size_t>(ex.binary_label);
  std::cout << examples.size() << " examples (" << positive << " coherent)\n";
  return 0;
}

struct ScoreArgs {
  std::string source;
  std::string prediction;
  std::vector<std::string> references;
  std::string format = "table";
  std::size_t frame = kDefaultFrame;
};

int cmd_score(const ScoreArgs& a) {
  const auto src = read_documents(a.source, a.frame);
  const auto pred = read_documents(a.prediction, a.frame);
  std::vector<std::vector<Document>> refs;
  for (const auto& r : a.references) refs.push_back(read_documents(r, a.frame));
  if (pred.size() != src.size()) fail(ErrorCode::ParseError, "prediction and source differ in document count");
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (refs[k].size() != src.size()) fail(ErrorCode::ParseError, a.references[k] + " differs in document count");
  }

  double f = 0, r = 0, s = 0, d = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::vector<Document> r_i;
    for (const auto& ref : refs) r_i.push_back(ref[i]);
    f += fkgl(pred[i]);
    r += fre(pred[i]);
    s += sari(src[i], pred[i], r_i);
    d += d_sari(src[i], pred[i], r_i);
  }
  const auto n = static_cast<double>(src.size());
  const std::vector<std::pair<std::string, double>> rows = {
      {"FKGL", f / n}, {"FRE", r / n}, {"SARI", s / n}, {"D-SARI", d / n}};
  if (a.format == "tsv") {
    for (std::size_t i = 0; i < rows.size(); ++i) std::cout << (i ? "\t" : "") << rows[i].first;
    std::cout << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) std::cout << (i ? "\t" : "") << fixed(rows[i].second, 3);
    std::cout << '\n';
  } else {
    for (const auto& [name, v] : rows) {
      std::cout << name << std::string(8 - name.size(), ' ') << fixed(v, 3) << '\n';
    }
  }
  return 0;
}

struct CoherenceArgs {
  std::string in;
  std::string out;
  std::size_t synthetic = 0;
  CoherenceTrainConfig train;
  double threshold = 0.5;
  std::size_t frame = kDefaultFrame;
};

int cmd_train_coherence(const CoherenceArgs& a) {
  std::vector<CoherenceExample> examples;
  if (!a.in.empty()) {
    std::ifstream in(a.in);
    if (!in) fail(ErrorCode::IoError, "cannot read " + a.in);
    examples = ingest_gcdc(read_gcdc(in), a.frame);
  } else {
    examples = synthetic_coherence_examples(a.train.seed, a.synthetic, a.frame);
  }
  auto model = train_coherence(examples, a.train);
  model.set_threshold(a.threshold);
  if (!a.out.empty()) save_coherence_model_file(a.out, model);
  const auto& log = model.training_log();
  std::cout << "examples\t" << examples.size() << '\n';
  std::cout << "initial_loss\t" << fixed(log.front().second, 6) << '\n';
  std::cout << "final_loss\t" << fixed(log.back().second, 6) << '\n';
  std::cout << "train_accuracy\t" << fixed(coherence_accuracy(model, examples), 4) << '\n';
  return 0;
}

void apply_seed_env(ExperimentConfig& config) {
  if (const char* env = std::getenv("SIMDOC_SEED"); env != nullptr && *env != '\0') {
    apply_config_value(config, "seed", env);
  }
}

ExperimentConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides) {
  auto config = parse_config_file(path);
  apply_seed_env(config);
  for (const auto& [k, v] : overrides) apply_config_value(config, k, v);
  // relative corpus and model paths resolve against the config's directory
  const auto base = fs::path(path).parent_path();
  for (auto& [id, p] : config.corpus_paths) {
    if (fs::path(p).is_relative()) p = (base / p).lexically_normal().string();
  }
  if (!config.coherence_model.empty() && fs::path(config.coherence_model).is_relative()) {
    config.coherence_model = (base / config.coherence_model).lexically_normal().string();
  }
  config.validate();
  return config;
}

CoherenceModel coherence_for(const ExperimentConfig& config) {
  if (!config.coherence_model.empty()) return load_coherence_model_file(config.coherence_model);
  return default_coherence_model(config.seed);
}

void print_epochs(const std::vector<EpochLoss>& trace) {
  for (const auto& e : trace) {
    std::cerr << "stage " << e.stage << " (" << e.corpus << ") epoch " << e.epoch << " loss " << fixed(e.total, 6)
              << '\n';
  }
}

int cmd_run_experiment(const std::string& config_path, const std::string& out_dir,
                       const std::map<std::string, std::string>& overrides) {
  const auto config = load_config(config_path, overrides);
  const auto corpora = load_corpora(config);
  const auto coherence = coherence_for(config);
  auto backend = make_backend(config);
  const auto result = run_experiment(config, corpora, *backend, coherence);
  print_epochs(result.trace);
  if (!out_dir.empty()) write_experiment_result(out_dir, result);
  write_report_table(std::cout, {result.row()});
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir,
                const std::map<std::string, std::string>& overrides) {
  std::vector<ExperimentConfig> configs;
  Corpora corpora;
  for (const auto& p : config_paths) {
    configs.push_back(load_config(p, overrides));
    for (auto& [id, data] : load_corpora(configs.back())) corpora.emplace(id, std::move(data));
  }
  const auto coherence = coherence_for(configs.front());
  const auto cmp = compare_regimes(configs, corpora, make_backend, coherence);
  if (!out_dir.empty()) {
    for (std::size_t i = 0; i < cmp.results.size(); ++i) {
      const auto& c = cmp.results[i].config;
      write_experiment_result((fs::path(out_dir) / (std::to_string(i) + "-" + std::string(regime_name(c.regime)))).string(),
                              cmp.results[i]);
    }
    std::ofstream tsv(fs::path(out_dir) / "report.tsv"), txt(fs::path(out_dir) / "report.txt");
    if (!tsv || !txt) fail(ErrorCode::IoError, "cannot write report into " + out_dir);
    write_report_tsv(tsv, cmp.rows);
    write_report_table(txt, cmp.rows);
  }
  write_report_table(std::cout, cmp.rows);
  return 0;
}

void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
  for (const auto& key : kConfigKeys) {
    cmd->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "override config key " + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document-level text simplification toolkit"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-corpus", "Build a corpus file from leveled articles, pairs, GCDC or synthetic data");
  b->add_option("--scheme", build.scheme, "newsela-s | newsela-sl | pairs | synthetic | gcdc")
      ->required()
      ->check(CLI::IsMember({"newsela-s", "newsela-sl", "pairs", "synthetic", "gcdc"}));
  b->add_option("--in", build.in, "input directory (newsela-*) or file (pairs, gcdc)");
  b->add_option("--out", build.out, "output file")->required();
  b->add_option("--seed", build.seed, "synthetic seed");
  b->add_option("--n", build.n, "synthetic article count")->check(CLI::PositiveNumber);
  b->add_option("--frame", build.frame, "sentences per document")->check(CLI::PositiveNumber);
  b->add_option("--pairing", build.pairing, "pairing for synthetic articles")
      ->check(CLI::IsMember({"newsela-s", "newsela-sl"}));

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Score predictions against references (one document per line)");
  s->add_option("--source", score.source)->required()->check(CLI::ExistingFile);
  s->add_option("--prediction", score.prediction)->required()->check(CLI::ExistingFile);
  s->add_option("--reference", score.references, "repeat for multiple references")->required()->check(CLI::ExistingFile);
  s->add_option("--format", score.format)->check(CLI::IsMember({"table", "tsv"}));
  s->add_option("--frame", score.frame)->check(CLI::PositiveNumber);

  CoherenceArgs coh;
  auto* c = app.add_subcommand("train-coherence", "Train the coherence classifier");
  auto* coh_in = c->add_option("--in", coh.in, "GCDC-style ratings file")->check(CLI::ExistingFile);
  auto* coh_syn = c->add_option("--synthetic", coh.synthetic, "train on N ordered/shuffled synthetic documents");
  coh_in->excludes(coh_syn);
  c->add_option("--out", coh.out, "model file");
  c->add_option("--learning_rate", coh.train.learning_rate);
  c->add_option("--epochs", coh.train.epochs)->check(CLI::PositiveNumber);
  c->add_option("--seed", coh.train.seed);
  c->add_option("--threshold", coh.threshold);
  c->add_option("--frame", coh.frame)->check(CLI::PositiveNumber);

  std::string run_config, run_out;
  std::map<std::string, std::string> run_overrides;
  auto* r = app.add_subcommand("run-experiment", "Train and evaluate one configuration");
  r->add_option("--config", run_config)->required()->check(CLI::ExistingFile);
  r->add_option("--out", run_out, "results directory");
  add_config_flags(r, run_overrides);

  std::vector<std::string> cmp_configs;
  std::string cmp_out;
  std::map<std::string, std::string> cmp_overrides;
  auto* m = app.add_subcommand("compare", "Run several configurations and tabulate them");
  m->add_option("--config", cmp_configs, "repeat per configuration")->required()->check(CLI::ExistingFile);
  m->add_option("--out", cmp_out, "results directory");
  add_config_flags(m, cmp_overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (b->parsed()) {
      if (build.scheme != "synthetic" && build.in.empty()) {
        std::cerr << "--in is required for scheme " << build.scheme << '\n';
        return 2;
      }
      return cmd_build_corpus(build);
    }
    if (s->parsed()) return cmd_score(score);
    if (c->parsed()) {
      if (coh.in.empty() && coh.synthetic == 0) {
        std::cerr << "train-coherence needs --in or --synthetic\n";
        return 2;
      }
      if (const char* env = std::getenv("SIMDOC_SEED"); env != nullptr && *env != '\0' && c->count("--seed") == 0) {
        coh.train.seed = static_cast<std::uint64_t>(parse_int(env));
      }
      return cmd_train_coherence(coh);
    }
    if (r->parsed()) return cmd_run_experiment(run_config, run_out, run_overrides);
    if (m->parsed()) return cmd_compare(cmp_configs, cmp_out, cmp_overrides);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
