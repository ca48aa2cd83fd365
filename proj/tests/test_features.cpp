#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fnd/errors.hpp"
#include "fnd/features.hpp"
#include "fnd/sparse.hpp"
#include "helpers.hpp"

using namespace fnd;

namespace {

FeatureConfig word_unigrams_only(int min_df = 1) {
  FeatureConfig c;
  c.word_ngram_min = c.word_ngram_max = 1;
  c.char_ngram_min = 1;
  c.char_ngram_max = 0;  // disabled
  c.min_df = min_df;
  return c;
}

}  // namespace

TEST_CASE("fit_vocabulary counts document frequencies") {
  Corpus c = test::make_corpus(
      {test::make_article("1", "a b", 0), test::make_article("2", "a", 1)});
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  REQUIRE(s.vocabulary.size() == 2);
  CHECK(s.vocabulary.terms[0] == "w:a");
  CHECK(s.vocabulary.terms[1] == "w:b");
  CHECK(s.vocabulary.df[0] == 2);
  CHECK(s.vocabulary.df[1] == 1);

  FeatureSpace s2 = fit_feature_space(c, word_unigrams_only(2));
  REQUIRE(s2.vocabulary.size() == 1);
  CHECK(s2.vocabulary.terms[0] == "w:a");
}

TEST_CASE("fit_vocabulary is order-invariant and deterministic") {
  Corpus c = test::make_corpus({test::make_article("1", "c a b", 0),
                                test::make_article("2", "b a", 1),
                                test::make_article("3", "a c", 0)});
  Corpus permuted = test::make_corpus(
      {c.articles[2], c.articles[0], c.articles[1]}, c.name);
  FeatureSpace s1 = fit_feature_space(c, word_unigrams_only());
  FeatureSpace s2 = fit_feature_space(permuted, word_unigrams_only());
  CHECK(s1.vocabulary.terms == s2.vocabulary.terms);
  CHECK(s1.vocabulary.df == s2.vocabulary.df);
}

TEST_CASE("fit_vocabulary fails on empty effective vocabulary") {
  Corpus c = test::make_corpus({test::make_article("1", "aa", 0)});
  CHECK_THROWS_AS(fit_feature_space(c, word_unigrams_only(5)), TrainingError);
}

// Hand-evaluated: docs {"a b", "a"}; idf(t) = ln((1+N)/(1+df)) + 1;
// d1 unnormalized (1.0, 1.4054651081081644), L2-normalized below.
TEST_CASE("tfidf matches the worked two-document example") {
  Corpus c = test::make_corpus(
      {test::make_article("1", "a b", 0), test::make_article("2", "a", 1)});
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());

  FeatureVector d1 = tfidf_transform(c.articles[0], s);
  REQUIRE(d1.indices.size() == 2);
  CHECK(d1.values[0] == doctest::Approx(0.57973867153766567).epsilon(1e-12));
  CHECK(d1.values[1] == doctest::Approx(0.81480247466716893).epsilon(1e-12));

  FeatureVector d2 = tfidf_transform(c.articles[1], s);
  REQUIRE(d2.indices.size() == 1);
  CHECK(d2.values[0] == doctest::Approx(1.0));
}

TEST_CASE("tfidf of an all-OOV document is the zero block") {
  Corpus c = test::make_corpus(
      {test::make_article("1", "a b", 0), test::make_article("2", "a", 1)});
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  FeatureVector v = tfidf_transform(test::make_article("x", "zz qq", 0), s);
  CHECK(v.indices.empty());
  CHECK(v.l2_norm() == 0.0);
}

TEST_CASE("content block norm is one or zero") {
  GenConfig g;
  g.n_articles = 50;
  g.seed = 13;
  Corpus c = generate_synthetic(g);
  FeatureSpace s = fit_feature_space(c);
  for (const auto& a : c.articles) {
    double n = tfidf_transform(a, s).l2_norm();
    CHECK((std::abs(n - 1.0) < 1e-9 || n == 0.0));
  }
}

TEST_CASE("idf is monotone non-increasing in df") {
  // Directly from the formula on a fitted space: higher df never gets a
  // larger idf.
  Corpus c = test::make_corpus({test::make_article("1", "a a b", 0),
                                test::make_article("2", "a", 1),
                                test::make_article("3", "a b c", 0)});
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  auto idf = [&](std::uint32_t i) {
    return std::log((1.0 + s.vocabulary.n_documents) /
                    (1.0 + s.vocabulary.df[i])) +
           1.0;
  };
  for (std::uint32_t i = 0; i < s.vocabulary.size(); ++i) {
    for (std::uint32_t j = 0; j < s.vocabulary.size(); ++j) {
      if (s.vocabulary.df[i] <= s.vocabulary.df[j])
        CHECK(idf(i) >= idf(j) - 1e-12);
    }
  }
}

TEST_CASE("social features on an article without engagements") {
  NewsArticle a = test::make_article("1", "x", 0);
  auto f = social_features(a);
  CHECK(f[0] == 0);   // engagement_count
  CHECK(f[3] == 0);   // time_span
  CHECK(f[5] == 0);   // has_any_engagement
  CHECK(f[6] == -1);  // absent age
  CHECK(f[9] == 1);   // sex unknown one-hot
}

TEST_CASE("social features aggregate engagements") {
  NewsArticle a = test::make_article("1", "x", 0);
  a.engagements = {{"u1", "p1", 0}, {"u1", "p2", 100}};
  auto f = social_features(a);
  CHECK(f[0] == 2);    // count
  CHECK(f[1] == 1);    // distinct users
  CHECK(f[2] == 2);    // distinct posts
  CHECK(f[3] == 100);  // span
  CHECK(f[4] == 100);  // mean gap
  CHECK(f[5] == 1);
}

// Hand computation: gaps 10 and 20, mean 15.
TEST_CASE("mean inter-engagement gap") {
  NewsArticle a = test::make_article("1", "x", 0);
  a.engagements = {{"u1", "p1", 0}, {"u2", "p2", 10}, {"u3", "p3", 30}};
  CHECK(social_features(a)[4] == doctest::Approx(15.0));
}

TEST_CASE("absent timestamps are excluded from span and gap") {
  NewsArticle a = test::make_article("1", "x", 0);
  a.engagements = {{"u1", "p1", 5}, {"u2", "p2", std::nullopt}};
  auto f = social_features(a);
  CHECK(f[0] == 2);
  CHECK(f[3] == 0);  // only one present timestamp
  CHECK(f[4] == 0);
}

TEST_CASE("vectorize masks blocks by mode") {
  GenConfig g;
  g.n_articles = 40;
  g.seed = 17;
  Corpus c = generate_synthetic(g);
  FeatureSpace s = fit_feature_space(c);
  const std::uint32_t vocab = s.vocabulary.size();
  CHECK(s.total_dimension() == vocab + 10);

  const NewsArticle& a = c.articles[0];
  FeatureVector content = vectorize(a, s, FeatureMode::kContentOnly);
  for (std::uint32_t i : content.indices) CHECK(i < vocab);

  FeatureVector social = vectorize(a, s, FeatureMode::kSocialOnly);
  for (std::uint32_t i : social.indices) CHECK(i >= vocab);

  FeatureVector hybrid = vectorize(a, s, FeatureMode::kHybrid);
  CHECK(hybrid.indices.size() >= content.indices.size());
  CHECK(hybrid.dimension == s.total_dimension());
}

TEST_CASE("vectorize is pure: repeated calls identical") {
  GenConfig g;
  g.n_articles = 30;
  g.seed = 19;
  Corpus c = generate_synthetic(g);
  FeatureSpace s = fit_feature_space(c);
  FeatureVector v1 = vectorize(c.articles[5], s, FeatureMode::kHybrid);
  FeatureVector v2 = vectorize(c.articles[5], s, FeatureMode::kHybrid);
  CHECK(v1.indices == v2.indices);
  CHECK(v1.values == v2.values);
}

TEST_CASE("z-scored social block of the mean article is zero") {
  // Train stats come from the corpus itself; an article whose raw social
  // features equal the train mean maps to all-zero entries.
  Corpus c = test::make_corpus(
      {test::make_article("1", "a b", 0), test::make_article("2", "a c", 1)});
  c.articles[0].engagements = {{"u1", "p1", 0}, {"u2", "p2", 10}};
  c.articles[1].engagements = {{"u1", "p1", 0}, {"u2", "p2", 10}};
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  FeatureVector v = vectorize(c.articles[0], s, FeatureMode::kSocialOnly);
  // Identical social stats across the corpus: stdev 0 features emit 0.
  CHECK(v.indices.empty());
}

TEST_CASE("a feature equal to the train mean z-scores to zero") {
  // Engagement counts 1, 2, 3: the middle article sits on the mean, so its
  // engagement_count entry vanishes even though the stdev is positive.
  Corpus c = test::make_corpus({test::make_article("1", "a b", 0),
                                test::make_article("2", "a c", 1),
                                test::make_article("3", "b c", 0)});
  c.articles[0].engagements = {{"u1", "p1", 0}};
  c.articles[1].engagements = {{"u1", "p1", 0}, {"u2", "p2", 5}};
  c.articles[2].engagements = {
      {"u1", "p1", 0}, {"u2", "p2", 5}, {"u3", "p3", 9}};
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  CHECK(s.social_stdev[0] > 0);
  FeatureVector v = vectorize(c.articles[1], s, FeatureMode::kSocialOnly);
  const std::uint32_t count_idx = s.vocabulary.size() + 0;
  for (std::uint32_t idx : v.indices) CHECK(idx != count_idx);
}

TEST_CASE("count_transform returns raw counts over the content block") {
  Corpus c = test::make_corpus(
      {test::make_article("1", "a a b", 0), test::make_article("2", "a", 1)});
  FeatureSpace s = fit_feature_space(c, word_unigrams_only());
  FeatureVector v = count_transform(c.articles[0], s);
  CHECK(v.dimension == s.vocabulary.size());
  REQUIRE(v.indices.size() == 2);
  CHECK(v.values[0] == 2.0);
  CHECK(v.values[1] == 1.0);
}

TEST_CASE("vectorize on an unfitted space is a state error") {
  FeatureSpace s;
  CHECK_THROWS_AS(vectorize(test::make_article("1", "x", 0), s,
                            FeatureMode::kHybrid),
                  StateError);
}

TEST_CASE("char n-grams activate on substrings") {
  FeatureConfig cfg;
  cfg.word_ngram_min = 1;
  cfg.word_ngram_max = 1;
  cfg.char_ngram_min = 3;
  cfg.char_ngram_max = 3;
  cfg.min_df = 1;
  Corpus c = test::make_corpus({test::make_article("1", "ሰበረ ነው", 0),
                                test::make_article("2", "ሰበራ", 1)});
  FeatureSpace s = fit_feature_space(c, cfg);
  bool found = false;
  for (const auto& t : s.vocabulary.terms) found = found || t == "c:ሰበረ";
  CHECK(found);
}
