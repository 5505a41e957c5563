#include <fstream>
#include <istream>
#include <sstream>

#include "simdoc/error.hpp"
#include "simdoc/harness.hpp"
#include "simdoc/numfmt.hpp"

namespace simdoc {

namespace {

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long config_int(const std::string& key, const std::string& value, long long min) {
  long long v = 0;
  try {
    v = parse_int(value);
  } catch (const Error&) {
    fail(ErrorCode::ConfigError, key + ": expected an integer, got '" + value + "'");
  }
  if (v < min) fail(ErrorCode::ConfigError, key + ": must be >= " + std::to_string(min));
  return v;
}

double config_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const Error&) {
    fail(ErrorCode::ConfigError, key + ": expected a number, got '" + value + "'");
  }
}

std::vector<Stage> parse_stages(const std::string& value, int default_epochs) {
  std::vector<Stage> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (item.empty()) continue;
    Stage st;
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) {
      st.corpus = item;
      st.epochs = default_epochs;
    } else {
      st.corpus = trim_copy(item.substr(0, colon));
      st.epochs = static_cast<int>(config_int("stages", trim_copy(item.substr(colon + 1)), 1));
    }
    if (st.corpus.empty()) fail(ErrorCode::ConfigError, "stages: empty corpus id");
    out.push_back(st);
  }
  return out;
}

}  // namespace

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Zero: return "zero";
    case Regime::Few: return "few";
    case Regime::Fine: return "fine";
  }
  return "fine";
}

Regime parse_regime(std::string_view name) {
  if (name == "zero") return Regime::Zero;
  if (name == "few") return Regime::Few;
  if (name == "fine") return Regime::Fine;
  fail(ErrorCode::ConfigError, "unknown regime '" + std::string(name) + "'");
}

std::string_view loss_mode_label(LossMode mode) {
  switch (mode) {
    case LossMode::S: return "simple";
    case LossMode::S_R: return "simple+read";
    case LossMode::S_C: return "simple+coh";
    case LossMode::S_R_C: return "simple+read+coh";
  }
  return "simple";
}

void ExperimentConfig::validate() const {
  loss.validate();
  if (regime == Regime::Zero && !stages.empty()) fail(ErrorCode::ConfigError, "zero regime takes no training stages");
  if (regime != Regime::Zero && stages.empty()) {
    fail(ErrorCode::ConfigError, std::string(regime_name(regime)) + " regime needs at least one stage");
  }
  if (frame == 0) fail(ErrorCode::ConfigError, "frame must be positive");
  if (batch_size == 0) fail(ErrorCode::ConfigError, "batch_size must be positive");
  if (few_shot_samples == 0) fail(ErrorCode::ConfigError, "few_shot_samples must be positive");
  if (few_shot_epochs < 1 || fine_epochs < 1) fail(ErrorCode::ConfigError, "epoch counts must be positive");
  if (resolved_test_corpus().empty()) fail(ErrorCode::ConfigError, "no test corpus (set test_corpus)");
  if (backend != "builtin" && backend != "external") fail(ErrorCode::ConfigError, "backend must be builtin or external");
  if (backend == "external" && backend_command.empty()) fail(ErrorCode::ConfigError, "external backend needs backend_command");
  if (!(alpha > 0.0)) fail(ErrorCode::ConfigError, "alpha must be positive");
}

std::string ExperimentConfig::resolved_test_corpus() const {
  if (!test_corpus.empty()) return test_corpus;
  return stages.empty() ? std::string{} : stages.back().corpus;
}

std::string ExperimentConfig::resolved_dataset() const { return dataset.empty() ? resolved_test_corpus() : dataset; }

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "regime") c.regime = parse_regime(value);
  else if (key == "loss_mode") c.loss.mode = parse_loss_mode(value);
  else if (key == "delta") c.loss.delta = config_double(key, value);
  else if (key == "stages") c.stages = parse_stages(value, c.fine_epochs);
  else if (key == "few_shot_samples") c.few_shot_samples = static_cast<std::size_t>(config_int(key, value, 1));
  else if (key == "few_shot_epochs") c.few_shot_epochs = static_cast<int>(config_int(key, value, 1));
  else if (key == "fine_epochs") c.fine_epochs = static_cast<int>(config_int(key, value, 1));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(config_int(key, value, 0));
  else if (key == "frame") c.frame = static_cast<std::size_t>(config_int(key, value, 1));
  else if (key == "batch_size") c.batch_size = static_cast<std::size_t>(config_int(key, value, 1));
  else if (key == "warmup_steps") c.warmup_steps = static_cast<std::size_t>(config_int(key, value, 0));
  else if (key == "test_corpus") c.test_corpus = value;
  else if (key == "model") c.model = value;
  else if (key == "dataset") c.dataset = value;
  else if (key == "backend") c.backend = value;
  else if (key == "backend_command") c.backend_command = value;
  else if (key == "learning_rate") c.learning_rate = config_double(key, value);
  else if (key == "weight_decay") c.weight_decay = config_double(key, value);
  else if (key == "alpha") c.alpha = config_double(key, value);
  else if (key == "read_learning_rate") c.read_learning_rate = config_double(key, value);
  else if (key == "coherence_model") c.coherence_model = value;
  else if (key.starts_with("corpus.") && key.size() > 7) c.corpus_paths[key.substr(7)] = value;
  else fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t lineno = 0;
  // stages may reference fine_epochs, so they are applied last
  std::optional<std::string> stages;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim_copy(line.substr(0, eq));
    const auto value = trim_copy(line.substr(eq + 1));
    if (key == "stages") stages = value;
    else apply_config_value(c, key, value);
  }
  if (stages) apply_config_value(c, "stages", *stages);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config " + path);
  return parse_config(in);
}

std::string echo_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "regime = " << regime_name(c.regime) << '\n';
  out << "loss_mode = " << loss_mode_name(c.loss.mode) << '\n';
  out << "delta = " << shortest(c.loss.delta) << '\n';
  out << "stages = ";
  for (std::size_t i = 0; i < c.stages.size(); ++i) out << (i ? "," : "") << c.stages[i].corpus << ':' << c.stages[i].epochs;
  out << '\n';
  out << "few_shot_samples = " << c.few_shot_samples << '\n';
  out << "few_shot_epochs = " << c.few_shot_epochs << '\n';
  out << "fine_epochs = " << c.fine_epochs << '\n';
  out << "seed = " << c.seed << '\n';
  out << "frame = " << c.frame << '\n';
  out << "batch_size = " << c.batch_size << '\n';
  out << "warmup_steps = " << c.warmup_steps << '\n';
  out << "test_corpus = " << c.test_corpus << '\n';
  out << "model = " << c.model << '\n';
  out << "dataset = " << c.dataset << '\n';
  out << "backend = " << c.backend << '\n';
  out << "backend_command = " << c.backend_command << '\n';
  out << "learning_rate = " << shortest(c.learning_rate) << '\n';
  out << "weight_decay = " << shortest(c.weight_decay) << '\n';
  out << "alpha = " << shortest(c.alpha) << '\n';
  out << "read_learning_rate = " << shortest(c.read_learning_rate) << '\n';
  out << "coherence_model = " << c.coherence_model << '\n';
  for (const auto& [id, path] : c.corpus_paths) out << "corpus." << id << " = " << path << '\n';
  return out.str();
}

}  // namespace simdoc
