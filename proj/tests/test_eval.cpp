#include <doctest.h>

#include <cmath>
#include <memory>

#include "fnd/ensemble.hpp"
#include "fnd/errors.hpp"
#include "fnd/eval.hpp"
#include "fnd/pipeline.hpp"
#include "fnd/rng.hpp"
#include "helpers.hpp"

using namespace fnd;

namespace {

// Definitional oracle computed straight from the metric formulas.
struct OracleMetrics {
  double macro_f1;
  double accuracy;
};
OracleMetrics oracle_metrics(const std::vector<int>& pred,
                             const std::vector<int>& gold) {
  auto prf = [&](int positive) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == positive && gold[i] == positive) tp += 1;
      if (pred[i] == positive && gold[i] != positive) fp += 1;
      if (pred[i] != positive && gold[i] == positive) fn += 1;
    }
    double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    return f1;
  };
  double correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == gold[i];
  return {0.5 * (prf(0) + prf(1)), correct / pred.size()};
}

// Simple oracle stub: echoes the gold label.
class OracleStub : public ArticleScorer {
 public:
  double p_fake(const NewsArticle& a) const override {
    return *a.label == Label::kFake ? 1.0 : 0.0;
  }
};

class ConstantStub : public ArticleScorer {
 public:
  explicit ConstantStub(double p) : p_(p) {}
  double p_fake(const NewsArticle&) const override { return p_; }

 private:
  double p_;
};

}  // namespace

TEST_CASE("metrics on perfect predictions") {
  EvalReport r = metrics({1, 0, 1, 0}, {1, 0, 1, 0});
  CHECK(r.macro.f1 == doctest::Approx(1.0));
  CHECK(r.accuracy == doctest::Approx(1.0));
}

// Hand computation: per-class F1 = 2*0.8*0.8/1.6 = 0.8 on both sides.
TEST_CASE("metrics on the 40/10/10/40 confusion") {
  std::vector<int> pred, gold;
  auto add = [&](int p, int g, int n) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      gold.push_back(g);
    }
  };
  add(1, 1, 40);  // tp
  add(1, 0, 10);  // fp
  add(0, 1, 10);  // fn
  add(0, 0, 40);  // tn
  EvalReport r = metrics(pred, gold);
  CHECK(r.confusion.tp == 40);
  CHECK(r.fake.f1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.real.f1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.macro.f1 == doctest::Approx(0.8).epsilon(1e-12));
}

// Hand computation: fake F1 0; real P 0.5, R 1 -> F1 2/3; macro 1/3.
TEST_CASE("metrics when everything is predicted real") {
  std::vector<int> pred(100, 0), gold;
  for (int i = 0; i < 50; ++i) gold.push_back(0);
  for (int i = 0; i < 50; ++i) gold.push_back(1);
  EvalReport r = metrics(pred, gold);
  CHECK(r.fake.f1 == doctest::Approx(0.0));
  CHECK(r.real.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.macro.f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("metrics agrees with the definitional oracle on random cases") {
  Rng rng(909);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_int(20));
    std::vector<int> pred(n), gold(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.uniform_int(2));
      gold[i] = static_cast<int>(rng.uniform_int(2));
    }
    EvalReport r = metrics(pred, gold);
    OracleMetrics o = oracle_metrics(pred, gold);
    CHECK(r.macro.f1 == doctest::Approx(o.macro_f1).epsilon(1e-12));
    CHECK(r.accuracy == doctest::Approx(o.accuracy).epsilon(1e-12));
  }
}

TEST_CASE("macro f1 is invariant under simultaneous relabeling") {
  Rng rng(910);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(19));
    std::vector<int> pred(n), gold(n), ipred(n), igold(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.uniform_int(2));
      gold[i] = static_cast<int>(rng.uniform_int(2));
      ipred[i] = 1 - pred[i];
      igold[i] = 1 - gold[i];
    }
    CHECK(metrics(pred, gold).macro.f1 ==
          doctest::Approx(metrics(ipred, igold).macro.f1).epsilon(1e-12));
  }
}

TEST_CASE("metrics rejects mismatched lengths") {
  CHECK_THROWS_AS(metrics({1, 0}, {1}), ArgumentError);
  CHECK_THROWS_AS(metrics({}, {}), ArgumentError);
}

TEST_CASE("evaluate with stubs") {
  GenConfig g;
  g.n_articles = 40;
  g.seed = 3;
  Corpus c = generate_synthetic(g);
  CHECK(evaluate(OracleStub(), c).macro.f1 == doctest::Approx(1.0));
  // Constant-fake on a balanced corpus: accuracy one half.
  CHECK(evaluate(ConstantStub(1.0), c).accuracy == doctest::Approx(0.5));
  // Deterministic.
  EvalReport a = evaluate(OracleStub(), c);
  EvalReport b = evaluate(OracleStub(), c);
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("evaluate rejects unlabeled articles") {
  Corpus c = test::make_corpus(
      {test::make_article("1", "x y", 0), test::make_article("2", "y z", 1)});
  c.articles[1].label.reset();
  CHECK_THROWS_AS(evaluate(OracleStub(), c), ValidationError);
}

TEST_CASE("external scores evaluate against gold labels") {
  GenConfig g;
  g.n_articles = 30;
  g.seed = 6;
  Corpus c = generate_synthetic(g);
  ExternalScores scores;
  for (const auto& a : c.articles)
    scores.p_fake_by_id[a.id] = *a.label == Label::kFake ? 1.0 : 0.0;
  EvalReport r = evaluate_external(scores, c);
  CHECK(r.macro.f1 == doctest::Approx(1.0));
}

TEST_CASE("external scores of exactly one half predict real") {
  GenConfig g;
  g.n_articles = 20;
  g.seed = 6;
  Corpus c = generate_synthetic(g);
  ExternalScores scores;
  for (const auto& a : c.articles) scores.p_fake_by_id[a.id] = 0.5;
  EvalReport r = evaluate_external(scores, c);
  CHECK(r.confusion.tp + r.confusion.fp == 0);  // nothing predicted fake
}

TEST_CASE("compare: an injected oracle stub ranks first on a shared split") {
  GenConfig g;
  g.n_articles = 200;
  g.signal_strength = 0.6;
  g.seed = 14;
  Corpus c = generate_synthetic(g);
  ModelRegistry reg;
  reg.add("stub-oracle", [](const Corpus&, std::uint64_t) {
    return std::make_unique<OracleStub>();
  });
  CompareResult r = compare(c, {"nb", "stub-oracle", "dtree"}, 14, &reg);
  REQUIRE(r.reports.size() == 3);
  CHECK(r.reports[0].model_kind == "stub-oracle");
  CHECK(r.reports[0].macro.f1 == doctest::Approx(1.0));
  for (const auto& rep : r.reports)
    CHECK(rep.split_fingerprint == r.split_fingerprint);
}

TEST_CASE("compare: failed kinds are reported in-table, not thrown") {
  GenConfig g;
  g.n_articles = 60;
  g.seed = 15;
  Corpus c = generate_synthetic(g);
  CompareResult r = compare(c, {"nb", "no-such-kind"}, 15);
  REQUIRE(r.reports.size() == 2);
  CHECK(r.reports.back().failed);
  CHECK_FALSE(r.reports.front().failed);
}

// With no signal, trained models cannot beat coin flips; the band is the
// 3-sigma binomial noise bound at 400 test rows.
TEST_CASE("compare: zero-signal corpus keeps real models near one half") {
  GenConfig g;
  g.n_articles = 2000;
  g.signal_strength = 0.0;
  g.seed = 12;
  Corpus c = generate_synthetic(g);
  CompareResult r =
      compare(c, {"nb", "logreg", "svm", "dtree", "rforest", "gbdt"}, 12);
  for (const auto& rep : r.reports) {
    REQUIRE_FALSE(rep.failed);
    CHECK(rep.macro.f1 > 0.42);
    CHECK(rep.macro.f1 < 0.58);
  }
}

// Full-signal pipeline: the generator is constructed to be linearly
// separable, so the linear SVM and the GRU both clear high bars.
TEST_CASE("full-signal pipeline: svm >= 0.95 and gru >= 0.90 test macro-F1") {
  GenConfig g;
  g.n_articles = 2000;
  g.signal_strength = 1.0;
  g.seed = 7;
  Corpus c = generate_synthetic(g);
  auto [train, test] = split(c, 0.8, 7);
  auto space = std::make_shared<const FeatureSpace>(
      fit_feature_space(train, FeatureConfig{}));
  TrainedModel svm = train_model_with_space("svm", train, FeatureMode::kHybrid,
                                            ModelConfigs{}, 7, space);
  CHECK(evaluate(svm, test).macro.f1 >= 0.95);
  TrainedModel gru = train_model_with_space("gru", train, FeatureMode::kHybrid,
                                            ModelConfigs{}, 7, space);
  CHECK(evaluate(gru, test).macro.f1 >= 0.90);
}

TEST_CASE("external scores with a missing id fail loudly") {
  GenConfig g;
  g.n_articles = 10;
  g.seed = 6;
  Corpus c = generate_synthetic(g);
  ExternalScores scores;
  for (const auto& a : c.articles) scores.p_fake_by_id[a.id] = 0.9;
  scores.p_fake_by_id.erase(c.articles[3].id);
  try {
    evaluate_external(scores, c);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(c.articles[3].id) != std::string::npos);
  }
}
