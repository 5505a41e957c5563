#include <doctest.h>

#include <cmath>
#include <functional>

#include "simdoc/backend.hpp"
#include "simdoc/error.hpp"
#include "simdoc/linalg.hpp"

using namespace simdoc;

#ifndef ECHO_BACKEND_PATH
#error "ECHO_BACKEND_PATH must point at the echo backend binary"
#endif

namespace {

Document doc(const std::string& text) { return make_document(text); }

SimplificationInstance pair(const std::string& src, const std::string& tgt, std::optional<int> label = {}) {
  SimplificationInstance i;
  i.id = src;
  i.source = doc(src);
  i.target = doc(tgt);
  i.readability_label = label;
  return i;
}

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::ParseError;
}

std::string echo(const std::string& flags = "") {
  return std::string(ECHO_BACKEND_PATH) + (flags.empty() ? "" : " " + flags);
}

ExternalOptions fast() {
  ExternalOptions o;
  o.handshake_timeout = std::chrono::milliseconds(5000);
  o.request_timeout = std::chrono::milliseconds(5000);
  return o;
}

}  // namespace

TEST_SUITE("backend") {
  TEST_CASE("alignment") {
    const std::vector<std::string> x = {"the", "old", "man", "left"};
    const auto id = align_tokens(x, x);
    CHECK(id.insertions == 0);
    for (const auto& e : id.edits) CHECK(e.kind == EditKind::Copy);

    const std::vector<std::string> y = {"the", "man", "went"};
    const auto a = align_tokens(x, y);
    REQUIRE(a.edits.size() == 4);
    CHECK(a.edits[0].kind == EditKind::Copy);
    CHECK(a.edits[1].kind == EditKind::Delete);
    CHECK(a.edits[2].kind == EditKind::Copy);
    CHECK(a.edits[3] == TokenEdit{EditKind::Substitute, "went"});
    CHECK(a.insertions == 0);

    const std::vector<std::string> z = {"the", "man", "left", "early", "today"};
    const auto b = align_tokens(x, z);
    CHECK(b.edits[1].kind == EditKind::Delete);
    CHECK(b.insertions == 2);
  }

  TEST_CASE("untrained backend copies its input") {
    BuiltinBackend b;
    const auto d = make_document("The enormous dog ran rapidly. It barked.", 10);
    CHECK(b.generate(d) == d);
    Document empty;
    empty.sentences = {pad_sentence()};
    empty.pad_count = 1;
    CHECK_THROWS_AS(b.generate(empty), Error);
  }

  TEST_CASE("maximum-likelihood substitution") {
    BuiltinBackend b;
    const LossConfig s{LossMode::S, 0.9};
    for (const auto& p : {pair("I purchase food.", "I buy food."), pair("We purchase milk.", "We buy milk."),
                          pair("They purchase bread.", "They buy bread.")}) {
      b.update(p, 1.0, s);
    }
    CHECK(b.generate(doc("I purchase food.")).text() == "I buy food.");
    CHECK(b.generate(doc("Purchase food.")).text() == "Buy food.");
  }

  TEST_CASE("deletion of a conjunction splits the sentence") {
    BuiltinBackend b;
    b.update(pair("A dog ran and a cat sat.", "A dog ran. A cat sat."), 1.0, {});
    CHECK(b.generate(doc("The bird sang and the frog hid.")).text() == "The bird sang. The frog hid.");
  }

  TEST_CASE("simplification scores") {
    BuiltinBackend b;
    // uniform over {copy, delete, other}: -log(1/3)
    CHECK(b.score(Task::Simplify, doc("A b."), doc("A b.")) == doctest::Approx(std::log(3.0)));
    // hand-set probabilities: P(copy | x) = 0.5, P(delete | y) = 0.25
    SubstitutionModel::Counts x, y;
    x.copy = 1.0;
    y.copy = 1.0;
    b.simplifier().set_counts("x", x);
    b.simplifier().set_counts("y", y);
    CHECK(b.simplifier().probability("x", {EditKind::Copy, {}}) == 0.5);
    CHECK(b.simplifier().probability("y", {EditKind::Delete, {}}) == 0.25);
    const double nll = b.score(Task::Simplify, doc("x y."), doc("x."));
    CHECK(nll == doctest::Approx((std::log(2.0) + std::log(4.0)) / 2.0));
    CHECK(nll == doctest::Approx(1.0397).epsilon(1e-4));
    CHECK(b.score(Task::Simplify, doc("x y."), doc("X y.")) >= 0.0);
  }

  TEST_CASE("action probabilities sum to one") {
    SubstitutionModel m(0.5);
    m.observe("big", {EditKind::Substitute, "large"}, 3);
    m.observe("big", {EditKind::Substitute, "huge"}, 1);
    m.observe("big", {EditKind::Copy, {}}, 2);
    m.observe("big", {EditKind::Delete, {}}, 0.5);
    const double total = m.probability("big", {EditKind::Copy, {}}) + m.probability("big", {EditKind::Delete, {}}) +
                         m.probability("big", {EditKind::Substitute, "large"}) +
                         m.probability("big", {EditKind::Substitute, "huge"}) +
                         m.probability("big", {EditKind::Substitute, "unseen"});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.best_edit("big") == TokenEdit{EditKind::Substitute, "large"});
    CHECK_THROWS_AS(SubstitutionModel(0.0), Error);
  }

  TEST_CASE("readability classifier") {
    BuiltinBackend b;
    CHECK(b.score(Task::ReadClassify, doc("The cat sat."), 3) == doctest::Approx(std::log(4.0)));
    CHECK(b.classify(doc("The cat sat.")) == 1);

    ReadabilityWeights w = ReadabilityWeights::Zero();
    w(3, 3) = 10.0;  // FRE feature drives class 4
    ReadabilityClassifier c(w);
    CHECK(c.classify(doc("The cat sat. It was big.")) == 4);
    const auto p = c.probabilities(doc("The cat sat. It was big."));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);

    Document pads;
    pads.sentences = {pad_sentence()};
    pads.pad_count = 1;
    try {
      c.classify(pads);
      FAIL("expected NoText");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoText);
    }
    CHECK_THROWS_AS(c.nll(doc("A b."), 5), Error);
  }

  TEST_CASE("readability gradient matches finite differences") {
    std::vector<ReadabilityInput> xs;
    std::vector<int> ys;
    const std::vector<std::pair<std::string, int>> data = {
        {"Numerous individuals frequently observe magnificent architecture.", 1},
        {"Many people often see great buildings.", 2},
        {"People see big houses. They like them.", 3},
        {"Cats sit. Dogs run.", 4}};
    for (const auto& [t, l] : data) {
      xs.push_back(readability_features(doc(t)));
      ys.push_back(l);
    }
    ReadabilityWeights w;
    w << 0.1, -0.2, 0.3, 0.05, 0.0, -0.1, 0.2, 0.1, -0.3, 0.4, 0.2, 0.0, -0.1, 0.3, -0.2, 0.3, 0.1, -0.2, 0.5, 0.1;
    CHECK(gradient_check_readability(w, xs, ys, 1e-5) < 1e-4);
    CHECK(gradient_check_readability(ReadabilityWeights::Zero(), xs, ys, 1e-5) < 1e-4);
    CHECK_THROWS_AS(gradient_check_readability(w, xs, ys, 0.0), Error);

    // the analytic step lowers the loss
    ReadabilityClassifier c(w);
    const double before = readability_loss(w, xs, ys);
    for (int i = 0; i < 50; ++i) {
      for (std::size_t k = 0; k < data.size(); ++k) c.sgd_step(doc(data[k].first), data[k].second, 0.5);
    }
    CHECK(readability_loss(c.weights(), xs, ys) < before);
  }

  TEST_CASE("train_step combines and gates losses") {
    BuiltinBackend b;
    const auto inst = pair("A b.", "A b.", 2);
    const std::vector<SimplificationInstance> one{inst};
    const auto s = train_step(b, one, {LossMode::S, 0.9}, nullptr);
    CHECK(s.total == doctest::Approx(std::log(3.0)));
    CHECK(s.n == 1);

    BuiltinBackend fresh;
    const CoherenceModel accept_all;  // zero weights: every prediction coherent
    const auto src = train_step(fresh, one, {LossMode::S_R_C, 0.9}, &accept_all);
    CHECK(src.total == doctest::Approx(0.9 * (std::log(3.0) + std::log(4.0))));
    CHECK(*src.samples[0].coherent == 1);

    BuiltinBackend warm;
    const auto closed = train_step(warm, one, {LossMode::S_R_C, 0.9}, &accept_all, false);
    CHECK(closed.total == doctest::Approx(std::log(3.0) + std::log(4.0)));

    BuiltinBackend c;
    const std::vector<SimplificationInstance> unlabeled{pair("A b.", "A.")};
    CHECK(code_of([&] { train_step(c, unlabeled, {LossMode::S_R, 0.9}, nullptr); }) == ErrorCode::ModeMismatch);
    CHECK(code_of([&] { train_step(c, one, {LossMode::S_C, 0.9}, nullptr); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { train_step(c, std::vector<SimplificationInstance>{}, {}, nullptr); }) ==
          ErrorCode::NoSamples);
  }

  TEST_CASE("repeated training lowers the loss") {
    const auto inst = build_newsela_sl(generate_synthetic_corpus(3, 3)).instances;
    std::vector<SimplificationInstance> ten(inst.begin(), inst.begin() + 10);
    const CoherenceModel coh;
    for (auto mode : {LossMode::S, LossMode::S_R, LossMode::S_C, LossMode::S_R_C}) {
      BuiltinBackend b;
      std::vector<double> totals;
      for (int epoch = 0; epoch < 5; ++epoch) totals.push_back(train_step(b, ten, {mode, 0.9}, &coh).total);
      CAPTURE(loss_mode_name(mode));
      CHECK(totals.back() <= totals.front());
    }
  }

  TEST_CASE("reset restores the untrained state") {
    BuiltinBackend b;
    b.update(pair("I purchase food.", "I buy food.", 2), 1.0, {LossMode::S_R, 0.9});
    CHECK_FALSE(b == BuiltinBackend{});
    b.reset();
    CHECK(b == BuiltinBackend{});
  }

  TEST_CASE("wire text") {
    const auto d = make_document("One two. Three four!", 10);
    CHECK(wire_text(d) == "One two.\nThree four!");
    CHECK(from_wire_text(wire_text(d), 10) == d);
  }
}

TEST_SUITE("external") {
  TEST_CASE("echo backend handshake and requests") {
    auto b = spawn_external(echo(), fast());
    auto* ext = dynamic_cast<ExternalBackend*>(b.get());
    REQUIRE(ext != nullptr);
    CHECK(ext->remote_version() == 1);
    CHECK(ext->supported_ops().size() == 5);
    const auto d = make_document("The old man left. He was tired.", 10);
    CHECK(b->generate(d) == d);
    CHECK(b->score(Task::Simplify, d, d) == 0.0);
    CHECK(b->score(Task::Simplify, d, doc("Other.")) == 1.0);
    CHECK(b->classify(d) == 1);
    b->update(pair("A b.", "A."), 1.0, {});
    b->reset();
    const auto r = ext->request("generate", Task::Simplify, "simplify: Hi.", nullptr);
    CHECK(r["id"] == 7);
    CHECK(r["output"] == "Hi.");
  }

  TEST_CASE("echo backend drives train_step") {
    auto b = spawn_external(echo(), fast());
    const std::vector<SimplificationInstance> batch{pair("Same.", "Same."), pair("A b.", "A.")};
    CHECK(train_step(*b, batch, {}, nullptr).total == 0.5);
  }

  TEST_CASE("missing command is unavailable") {
    CHECK(code_of([] { spawn_external("/nonexistent/backend-binary", fast()); }) == ErrorCode::BackendUnavailable);
  }

  TEST_CASE("version mismatch names both versions") {
    std::string msg;
    CHECK(code_of([&] { spawn_external(echo("--version 2"), fast()); }, &msg) == ErrorCode::ProtocolViolation);
    CHECK(msg.find("local 1") != std::string::npos);
    CHECK(msg.find("backend 2") != std::string::npos);
  }

  TEST_CASE("out-of-order responses") {
    auto b = spawn_external(echo("--misorder"), fast());
    std::string msg;
    CHECK(code_of([&] { b->generate(doc("Hi.")); }, &msg) == ErrorCode::ProtocolViolation);
    CHECK(msg.find("does not match") != std::string::npos);
  }

  TEST_CASE("non-JSON responses") {
    auto b = spawn_external(echo("--garbage"), fast());
    CHECK(code_of([&] { b->classify(doc("Hi.")); }) == ErrorCode::ProtocolViolation);
  }

  TEST_CASE("silent backend times out") {
    ExternalOptions o = fast();
    o.handshake_timeout = std::chrono::milliseconds(200);
    std::string msg;
    CHECK(code_of([&] { spawn_external(echo("--hang"), o); }, &msg) == ErrorCode::BackendUnavailable);
    CHECK(msg.find("timed out") != std::string::npos);
  }

  TEST_CASE("rejected and unsupported operations") {
    auto b = spawn_external(echo("--fail-op classify"), fast());
    std::string msg;
    CHECK(code_of([&] { b->classify(doc("Hi.")); }, &msg) == ErrorCode::ProtocolViolation);
    CHECK(msg.find("forced_failure") != std::string::npos);
    auto* ext = dynamic_cast<ExternalBackend*>(b.get());
    CHECK(code_of([&] { ext->request("summarize", Task::Simplify, "simplify: x", nullptr); }, &msg) ==
          ErrorCode::ProtocolViolation);
    CHECK(msg.find("unsupported_op") != std::string::npos);
    // the handle stays usable after a rejected request
    CHECK(b->generate(doc("Still here.")).text() == "Still here.");
  }
}
