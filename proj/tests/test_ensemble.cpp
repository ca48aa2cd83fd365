#include <doctest.h>

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "fnd/ensemble.hpp"
#include "fnd/errors.hpp"
#include "fnd/eval.hpp"
#include "fnd/rng.hpp"
#include "helpers.hpp"

using namespace fnd;

namespace {

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

class CoinFlipStub : public ArticleScorer {
 public:
  double p_fake(const NewsArticle& a) const override {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : a.id) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return (h >> 13) % 2 == 0 ? 0.9 : 0.1;
  }
};

// Memorizes its training articles by exact text; the leakage canary. On a
// memorized text it echoes the trained label, otherwise 0.5.
class MemorizerStub : public ArticleScorer {
 public:
  explicit MemorizerStub(const Corpus& train) {
    for (const auto& a : train.articles)
      memory_[a.content.text] = *a.label == Label::kFake ? 1.0 : 0.0;
  }
  double p_fake(const NewsArticle& a) const override {
    auto it = memory_.find(a.content.text);
    return it == memory_.end() ? 0.5 : it->second;
  }

 private:
  std::map<std::string, double> memory_;
};

ModelRegistry stub_registry() {
  ModelRegistry r;
  r.add("stub-oracle", [](const Corpus&, std::uint64_t) {
    return std::make_unique<OracleStub>();
  });
  r.add("stub-coin", [](const Corpus&, std::uint64_t) {
    return std::make_unique<CoinFlipStub>();
  });
  r.add("stub-constant", [](const Corpus&, std::uint64_t) {
    return std::make_unique<ConstantStub>(0.5);
  });
  r.add("stub-memorizer", [](const Corpus& train, std::uint64_t) {
    return std::make_unique<MemorizerStub>(train);
  });
  return r;
}

Corpus small_corpus(int n, std::uint64_t seed) {
  GenConfig g;
  g.n_articles = n;
  g.seed = seed;
  return generate_synthetic(g);
}

}  // namespace

TEST_CASE("stratified folds cover both labels and are deterministic") {
  std::vector<int> labels;
  for (int i = 0; i < 37; ++i) labels.push_back(i % 2);
  auto f1 = stratified_folds(labels, 5, 9);
  auto f2 = stratified_folds(labels, 5, 9);
  CHECK(f1 == f2);
  std::array<std::set<int>, 5> seen;
  for (std::size_t i = 0; i < labels.size(); ++i)
    seen[f1[i]].insert(labels[i]);
  for (const auto& s : seen) CHECK(s.size() == 2);
}

TEST_CASE("stratified folds reject too-small strata") {
  std::vector<int> labels = {0, 0, 0, 0, 0, 1, 1};
  CHECK_THROWS_AS(stratified_folds(labels, 5, 1), ValidationError);
}

TEST_CASE("ranking places the oracle first and is deterministic") {
  Corpus c = small_corpus(60, 31);
  StackConfig cfg;
  cfg.base_kinds = {"stub-coin", "stub-oracle", "stub-constant"};
  cfg.top_k = 3;
  cfg.n_folds = 3;
  cfg.seed = 4;
  ModelRegistry reg = stub_registry();
  auto ranked = rank_base_models(c, cfg, reg);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].kind == "stub-oracle");
  CHECK(ranked[0].cv_macro_f1 == doctest::Approx(1.0));
  auto again = rank_base_models(c, cfg, reg);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].kind == again[i].kind);
    CHECK(ranked[i].cv_macro_f1 == again[i].cv_macro_f1);
  }
}

TEST_CASE("identical kinds tie-break by registry order") {
  Corpus c = small_corpus(40, 8);
  ModelRegistry reg;
  reg.add("dup-b", [](const Corpus&, std::uint64_t) {
    return std::make_unique<ConstantStub>(0.5);
  });
  reg.add("dup-a", [](const Corpus&, std::uint64_t) {
    return std::make_unique<ConstantStub>(0.5);
  });
  StackConfig cfg;
  cfg.base_kinds = {"dup-a", "dup-b"};
  cfg.top_k = 2;
  cfg.n_folds = 2;
  auto ranked = rank_base_models(c, cfg, reg);
  CHECK(ranked[0].kind == "dup-b");  // registered first
  CHECK(ranked[1].kind == "dup-a");
}

TEST_CASE("meta matrix has the right shape and oracle column") {
  Corpus c = small_corpus(100, 13);
  StackConfig cfg;
  cfg.base_kinds = {"stub-oracle", "stub-coin", "stub-constant"};
  cfg.top_k = 3;
  cfg.n_folds = 5;
  cfg.seed = 2;
  ModelRegistry reg = stub_registry();
  MetaMatrix m = build_meta_matrix(
      c, {"stub-oracle", "stub-coin", "stub-constant"}, cfg, reg);
  CHECK(m.n_rows == 100);
  CHECK(m.n_cols == 3);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    CHECK(m.at(i, 0) == static_cast<double>(m.labels[i]));
    CHECK(m.at(i, 2) == 0.5);
    for (std::size_t j = 0; j < m.n_cols; ++j) {
      CHECK(m.at(i, j) >= 0.0);
      CHECK(m.at(i, j) <= 1.0);
    }
  }
  // Fold bookkeeping covers every row.
  CHECK(m.fold_of_row.size() == m.n_rows);
  for (int f : m.fold_of_row) CHECK((f >= 0 && f < 5));
}

// The leakage canary: rows carry unique texts, so a memorizing model that
// saw a row in training would echo its label exactly; the OOF prediction
// must instead be the "never saw it" response.
TEST_CASE("out-of-fold predictions come from models that never saw the row") {
  Corpus c = small_corpus(60, 77);
  StackConfig cfg;
  cfg.base_kinds = {"stub-memorizer"};
  cfg.top_k = 1;
  cfg.n_folds = 3;
  cfg.seed = 5;
  ModelRegistry reg = stub_registry();
  MetaMatrix m = build_meta_matrix(c, {"stub-memorizer"}, cfg, reg);
  // In-fold prediction would be 0 or 1; OOF must be 0.5 on unique texts.
  MemorizerStub in_fold(c);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    double in_fold_p = in_fold.p_fake(c.articles[i]);
    CHECK(m.at(i, 0) == 0.5);
    CHECK(m.at(i, 0) != in_fold_p);
  }
}

TEST_CASE("stacking on a perfect base reaches perfect training accuracy") {
  Corpus c = small_corpus(80, 19);
  StackConfig cfg;
  cfg.base_kinds = {"stub-oracle", "stub-coin", "stub-constant"};
  cfg.top_k = 3;
  cfg.n_folds = 4;
  cfg.seed = 3;
  ModelRegistry reg = stub_registry();
  GbdtConfig meta;
  meta.n_rounds = 60;
  StackedModel sm = stack_fit(c, cfg, reg, meta);
  REQUIRE(sm.selected.size() == 3);
  CHECK(sm.selected[0].kind == "stub-oracle");
  std::vector<int> preds, gold;
  for (const auto& a : c.articles) {
    preds.push_back(sm.p_fake(a) > 0.5 ? 1 : 0);
    gold.push_back(static_cast<int>(*a.label));
  }
  CHECK(metrics(preds, gold).macro.f1 == doctest::Approx(1.0));
}

TEST_CASE("constant bases collapse to the class prior") {
  Corpus c = small_corpus(40, 10);
  ModelRegistry reg;
  reg.add("const-a", [](const Corpus&, std::uint64_t) {
    return std::make_unique<ConstantStub>(0.5);
  });
  reg.add("const-b", [](const Corpus&, std::uint64_t) {
    return std::make_unique<ConstantStub>(0.5);
  });
  StackConfig cfg;
  cfg.base_kinds = {"const-a", "const-b"};
  cfg.top_k = 2;
  cfg.n_folds = 2;
  StackedModel sm = stack_fit(c, cfg, reg, {});
  int fake = 0;
  for (const auto& a : c.articles) fake += *a.label == Label::kFake;
  double prior = static_cast<double>(fake) / c.size();
  CHECK(sm.p_fake(c.articles[0]) == doctest::Approx(prior).epsilon(1e-9));
}

TEST_CASE("failing base kinds are excluded with an error if too few remain") {
  Corpus c = small_corpus(30, 12);
  ModelRegistry reg = stub_registry();
  reg.add("stub-broken", [](const Corpus&, std::uint64_t)
              -> std::unique_ptr<ArticleScorer> {
    throw TrainingError("always fails");
  });
  StackConfig cfg;
  cfg.base_kinds = {"stub-broken", "stub-oracle"};
  cfg.top_k = 1;
  cfg.n_folds = 2;
  auto ranked = rank_base_models(c, cfg, reg);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].kind == "stub-oracle");

  cfg.top_k = 2;
  CHECK_THROWS_AS(rank_base_models(c, cfg, reg), ValidationError);
}

TEST_CASE("stacked probabilities are valid and deterministic") {
  Corpus c = small_corpus(50, 21);
  StackConfig cfg;
  cfg.base_kinds = {"stub-oracle", "stub-coin", "stub-constant"};
  cfg.top_k = 3;
  cfg.n_folds = 5;
  cfg.seed = 8;
  ModelRegistry reg = stub_registry();
  StackedModel sm = stack_fit(c, cfg, reg, {});
  for (const auto& a : c.articles) {
    auto pr = sm.p_fake(a);
    CHECK(pr >= 0.0);
    CHECK(pr <= 1.0);
    CHECK(sm.p_fake(a) == pr);
  }
}
