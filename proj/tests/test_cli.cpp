#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "simdoc/coherence.hpp"
#include "simdoc/corpus.hpp"

#ifndef SIMDOC_CLI_PATH
#error "SIMDOC_CLI_PATH must point at the simdoc binary"
#endif

namespace fs = std::filesystem;
using namespace simdoc;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

class Workspace {
 public:
  explicit Workspace(const std::string& name) : root_(fs::temp_directory_path() / ("simdoc-cli-" + name)) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Workspace() { fs::remove_all(root_); }

  fs::path operator/(const std::string& rel) const { return root_ / rel; }

  // Runs the CLI with `args`; `env` is prepended verbatim (e.g. "SIMDOC_SEED=3").
  Run simdoc(const std::string& args, const std::string& env = "") const {
    const auto out = root_ / ".stdout", err = root_ / ".stderr";
    const std::string cmd = "cd '" + root_.string() + "' && env -u SIMDOC_SEED " + env + " '" SIMDOC_CLI_PATH "' " +
                            args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path root_;
};

void write_leveled(const Workspace& ws) {
  put(ws / "articles/whale.0.txt", "The enormous whale swam rapidly. Numerous individuals observed it.");
  put(ws / "articles/whale.2.txt", "The big whale swam fast. Many people saw it.");
  put(ws / "articles/whale.4.txt", "The big whale swam. People saw it.");
  put(ws / "articles/train.0.txt", "The locomotive departed punctually. Passengers were delighted.");
  put(ws / "articles/train.3.txt", "The train left on time. People were happy.");
  put(ws / "articles/orphan.0.txt", "Only the original and a lightly edited version exist.");
  put(ws / "articles/orphan.1.txt", "Only the original and one edited version exist.");
}

std::string experiment_config(const std::string& regime, const std::string& extra = "") {
  std::string c = "regime = " + regime + "\nseed = 5\nbatch_size = 4\ncorpus.syn = data/syn.jsonl\n";
  if (regime == "zero") c += "test_corpus = syn\n";
  else c += "stages = syn:2\n";
  return c + extra;
}

void write_experiment(const Workspace& ws) {
  const auto arts = generate_synthetic_corpus(3, 120);
  fs::create_directories(ws / "cfg/data");
  write_corpus_file((ws / "cfg/data/syn.jsonl").string(), build_newsela_sl(arts).instances);
  put(ws / "cfg/zero.cfg", experiment_config("zero"));
  put(ws / "cfg/fine.cfg", experiment_config("fine"));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("build-corpus from a leveled directory") {
    Workspace ws("build");
    write_leveled(ws);
    const auto r = ws.simdoc("build-corpus --scheme newsela-s --in articles --out s.jsonl");
    CHECK(r.code == 0);
    CHECK(r.out == "2 instances\nskipped 1: orphan\n");
    const auto inst = read_corpus_file((ws / "s.jsonl").string());
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].target.text() == "The train left on time. People were happy.");

    const auto sl = ws.simdoc("build-corpus --scheme newsela-sl --in articles --out sl.jsonl");
    CHECK(sl.code == 0);
    CHECK(sl.out == "4 instances\n");

    put(ws / "articles/headless.2.txt", "No complex version here.");
    const auto missing = ws.simdoc("build-corpus --scheme newsela-s --in articles --out m.jsonl");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("MissingComplex") != std::string::npos);
    CHECK(missing.err.find("headless") != std::string::npos);
  }

  TEST_CASE("build-corpus usage errors") {
    Workspace ws("build-usage");
    CHECK(ws.simdoc("build-corpus --scheme newsela-s --in missing-dir --out x.jsonl").code == 2);
    CHECK(ws.simdoc("build-corpus --scheme newsela-s --out x.jsonl").code == 2);
    CHECK(ws.simdoc("build-corpus --scheme nonsense --out x.jsonl").code == 2);
    CHECK(ws.simdoc("").code == 2);
    CHECK(ws.simdoc("frobnicate").code == 2);
  }

  TEST_CASE("build-corpus domain errors exit 1 and name the error") {
    Workspace ws("build-domain");
    put(ws / "pairs.jsonl", "{\"complex\": \"Fine text.\", \"simple\": \"Fine.\"}\n{\"complex\": \"  \", \"simple\": \"x\"}\n");
    const auto r = ws.simdoc("build-corpus --scheme pairs --in pairs.jsonl --out p.jsonl");
    CHECK(r.code == 1);
    CHECK(r.err.find("EmptyText") != std::string::npos);
    CHECK(r.out.empty());
  }

  TEST_CASE("build-corpus pairs, synthetic and gcdc") {
    Workspace ws("build-more");
    put(ws / "pairs.jsonl", "{\"complex\": \"The feline rested.\", \"simple\": \"The cat slept.\"}\n");
    CHECK(ws.simdoc("build-corpus --scheme pairs --in pairs.jsonl --out p.jsonl").out == "1 instances\n");
    const auto a = ws.simdoc("build-corpus --scheme synthetic --seed 4 --n 10 --out a.jsonl");
    const auto b = ws.simdoc("build-corpus --scheme synthetic --seed 4 --n 10 --out b.jsonl");
    CHECK(a.code == 0);
    CHECK(a.out == "10 instances\n");
    CHECK(slurp(ws / "a.jsonl") == slurp(ws / "b.jsonl"));
    put(ws / "g.jsonl", "{\"text\": \"It rained. We stayed in.\", \"expert_ratings\": [3, 3, 2]}\n");
    const auto g = ws.simdoc("build-corpus --scheme gcdc --in g.jsonl --out gout.jsonl");
    CHECK(g.code == 0);
    CHECK(g.out.find("1 examples (1 coherent)") != std::string::npos);
  }

  TEST_CASE("score prints metrics for line-per-document files") {
    Workspace ws("score");
    put(ws / "src.txt", "The enormous dog ran rapidly. It barked.\nNumerous people attended.\n");
    put(ws / "pred.txt", "The big dog ran. It barked.\nMany people came.\n");
    put(ws / "ref.txt", "The big dog ran fast. It barked.\nMany people came.\n");
    const auto r = ws.simdoc("score --source src.txt --prediction pred.txt --reference ref.txt");
    CHECK(r.code == 0);
    for (const char* name : {"FKGL", "FRE", "SARI", "D-SARI"}) CHECK(r.out.find(name) != std::string::npos);
    CHECK(r.err.empty());
    const auto tsv = ws.simdoc("score --source src.txt --prediction pred.txt --reference ref.txt --format tsv");
    CHECK(tsv.code == 0);
    CHECK(std::count(tsv.out.begin(), tsv.out.end(), '\n') == 2);
    const auto same = ws.simdoc("score --source src.txt --prediction ref.txt --reference ref.txt --format tsv");
    CHECK(same.out.find("100.000") != std::string::npos);

    CHECK(ws.simdoc("score --source src.txt --prediction nope.txt --reference ref.txt").code == 2);
    CHECK(ws.simdoc("score --source src.txt --prediction pred.txt --reference ref.txt --format xml").code == 2);
    put(ws / "short.txt", "Only one line.\n");
    const auto mismatch = ws.simdoc("score --source src.txt --prediction short.txt --reference ref.txt");
    CHECK(mismatch.code != 0);
  }

  TEST_CASE("train-coherence honours the seed environment") {
    Workspace ws("coherence");
    const auto a = ws.simdoc("train-coherence --synthetic 40 --epochs 5 --out a.model", "SIMDOC_SEED=9");
    const auto b = ws.simdoc("train-coherence --synthetic 40 --epochs 5 --seed 9 --out b.model");
    const auto c = ws.simdoc("train-coherence --synthetic 40 --epochs 5 --seed 9 --out c.model", "SIMDOC_SEED=1");
    CHECK(a.code == 0);
    CHECK(a.out.find("train_accuracy\t") != std::string::npos);
    CHECK(slurp(ws / "a.model") == slurp(ws / "b.model"));
    CHECK(slurp(ws / "c.model") == slurp(ws / "b.model"));
    CHECK(load_coherence_model_file((ws / "a.model").string()).training_log().size() == 6);
    CHECK(ws.simdoc("train-coherence --out x.model").code == 2);
  }

  TEST_CASE("run-experiment writes results and reports on stdout") {
    Workspace ws("run");
    write_experiment(ws);
    const auto r = ws.simdoc("run-experiment --config cfg/fine.cfg --out results");
    CHECK(r.code == 0);
    CHECK(r.out.find("D-SARI") != std::string::npos);
    CHECK(r.out.find("epoch") == std::string::npos);
    CHECK(r.err.find("epoch 2") != std::string::npos);
    for (const char* f : {"report.tsv", "report.txt", "trace.jsonl", "config.txt", "metadata.txt"}) {
      CHECK(fs::exists(ws / ("results/" + std::string(f))));
    }
    CHECK(slurp(ws / "results/config.txt").find("seed = 5\n") != std::string::npos);

    ws.simdoc("run-experiment --config cfg/fine.cfg --out again");
    CHECK(slurp(ws / "results/trace.jsonl") == slurp(ws / "again/trace.jsonl"));
    CHECK(slurp(ws / "results/report.tsv") == slurp(ws / "again/report.tsv"));

    ws.simdoc("run-experiment --config cfg/fine.cfg --out env", "SIMDOC_SEED=11");
    CHECK(slurp(ws / "env/config.txt").find("seed = 11\n") != std::string::npos);
    ws.simdoc("run-experiment --config cfg/fine.cfg --out flag --seed 12", "SIMDOC_SEED=11");
    CHECK(slurp(ws / "flag/config.txt").find("seed = 12\n") != std::string::npos);
  }

  TEST_CASE("run-experiment error exits") {
    Workspace ws("run-errors");
    write_experiment(ws);
    put(ws / "cfg/typo.cfg", experiment_config("fine", "learnin_rate = 3\n"));
    const auto typo = ws.simdoc("run-experiment --config cfg/typo.cfg");
    CHECK(typo.code == 2);
    CHECK(typo.err.find("ConfigError") != std::string::npos);

    const auto bad_flag = ws.simdoc("run-experiment --config cfg/fine.cfg --delta 2");
    CHECK(bad_flag.code == 2);

    // readability mode over unlabeled data is a domain error
    write_corpus_file((ws / "cfg/data/syn.jsonl").string(), build_newsela_s(generate_synthetic_corpus(3, 120)).instances);
    const auto mismatch = ws.simdoc("run-experiment --config cfg/fine.cfg --loss_mode S_R");
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("ModeMismatch") != std::string::npos);
    CHECK(ws.simdoc("run-experiment --config cfg/missing.cfg").code == 2);
  }

  TEST_CASE("run-experiment through the external echo backend") {
    Workspace ws("run-external");
    write_experiment(ws);
    const auto r = ws.simdoc("run-experiment --config cfg/fine.cfg --backend external --backend_command '" +
                             std::string(ECHO_BACKEND_PATH) + "'");
    CHECK(r.code == 0);
    CHECK(r.out.find("fine") != std::string::npos);
    const auto missing = ws.simdoc("run-experiment --config cfg/fine.cfg --backend external --backend_command /nonexistent/x");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("BackendUnavailable") != std::string::npos);
  }

  TEST_CASE("compare tabulates every config") {
    Workspace ws("compare");
    write_experiment(ws);
    const auto r = ws.simdoc("compare --config cfg/zero.cfg --config cfg/fine.cfg --out cmp");
    CHECK(r.code == 0);
    CHECK(r.out.find("zero") != std::string::npos);
    CHECK(r.out.find("fine") != std::string::npos);
    CHECK(fs::exists(ws / "cmp/0-zero/report.tsv"));
    CHECK(fs::exists(ws / "cmp/1-fine/trace.jsonl"));
    const auto tsv = slurp(ws / "cmp/report.tsv");
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);

    put(ws / "cfg/other.cfg", "regime = zero\ntest_corpus = other\ncorpus.other = data/syn.jsonl\n");
    const auto mismatch = ws.simdoc("compare --config cfg/zero.cfg --config cfg/other.cfg");
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("ConfigError") != std::string::npos);
  }
}
