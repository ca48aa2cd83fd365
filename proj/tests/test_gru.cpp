#include <doctest.h>

#include <cmath>

#include "fnd/corpus.hpp"
#include "fnd/errors.hpp"
#include "fnd/features.hpp"
#include "fnd/gru.hpp"
#include "helpers.hpp"

using namespace fnd;

namespace {

// Fixed tiny model (d_e = d_h = 2, 3 usable tokens); the forward values
// below were produced by an independent step-by-step evaluation of the
// four cell equations.
GruParams tiny_params() {
  GruConfig cfg;
  cfg.d_e = 2;
  cfg.d_h = 2;
  cfg.max_seq_len = 8;
  GruParams p;
  p.config = cfg;
  p.emb_terms = {"w:t2", "w:t3", "w:t4"};
  p.emb_index = {{"w:t2", 2}, {"w:t3", 3}, {"w:t4", 4}};
  p.n_social = 2;
  p.e = {0, 0, 0, 0, 0.5, -0.3, -0.2, 0.4, 0.1, 0.2};  // rows: pad, unk, t2..t4
  p.wz = {0.10, -0.20, 0.05, 0.30};
  p.uz = {0.02, 0.04, -0.06, 0.08};
  p.bz = {0.01, -0.02};
  p.wr = {-0.15, 0.25, 0.20, -0.10};
  p.ur = {0.03, -0.05, 0.07, 0.09};
  p.br = {0.02, 0.03};
  p.wh = {0.30, 0.10, -0.20, 0.40};
  p.uh = {-0.04, 0.06, 0.05, -0.07};
  p.bh = {-0.01, 0.04};
  p.v = {0.6, -0.5, 0.2, -0.3};
  p.c = 0.05;
  return p;
}

GruParams zero_params(int d = 2, int n_social = 2) {
  GruConfig cfg;
  cfg.d_e = d;
  cfg.d_h = d;
  GruParams p;
  p.config = cfg;
  p.emb_terms = {"w:a"};
  p.emb_index = {{"w:a", 2}};
  p.n_social = n_social;
  p.e.assign(3 * d, 0.0);
  p.wz.assign(d * d, 0.0);
  p.wr.assign(d * d, 0.0);
  p.wh.assign(d * d, 0.0);
  p.uz.assign(d * d, 0.0);
  p.ur.assign(d * d, 0.0);
  p.uh.assign(d * d, 0.0);
  p.bz.assign(d, 0.0);
  p.br.assign(d, 0.0);
  p.bh.assign(d, 0.0);
  p.v.assign(d + n_social, 0.0);
  p.c = 0.0;
  return p;
}

}  // namespace

TEST_CASE("gru_step with zero params halves the hidden state") {
  GruParams p = zero_params();
  std::vector<double> h = {0.4, -0.8};
  auto h1 = gru_step(p, {0.0, 0.0}, h);
  CHECK(h1[0] == doctest::Approx(0.2));
  CHECK(h1[1] == doctest::Approx(-0.4));

  auto h0 = gru_step(p, {1.0, 2.0}, {0.0, 0.0});
  CHECK(h0[0] == doctest::Approx(0.0));
  CHECK(h0[1] == doctest::Approx(0.0));
}

TEST_CASE("gru_step rejects shape mismatches") {
  GruParams p = zero_params();
  CHECK_THROWS_AS(gru_step(p, {1.0}, {0.0, 0.0}), ArgumentError);
}

TEST_CASE("gru_step matches the scripted oracle") {
  GruParams p = tiny_params();
  auto h1 = gru_step(p, {0.5, -0.3}, {0.0, 0.0});
  CHECK(h1[0] == doctest::Approx(0.058062050779967227).epsilon(1e-12));
  CHECK(h1[1] == doctest::Approx(-0.085258492381076634).epsilon(1e-12));
}

TEST_CASE("gru forward matches the scripted oracle") {
  GruParams p = tiny_params();
  double prob = gru_forward(p, {2, 3, 4}, {1.5, -0.5});
  CHECK(prob == doctest::Approx(0.61576487428678128).epsilon(1e-12));
}

TEST_CASE("zero params produce probability one half") {
  GruParams p = zero_params();
  CHECK(gru_forward(p, {2, 2}, {0.3, 0.4}) == doctest::Approx(0.5));
}

TEST_CASE("empty sequence reduces to the social term") {
  GruParams p = tiny_params();
  std::vector<double> social = {1.5, -0.5};
  double expected =
      1.0 / (1.0 + std::exp(-(0.2 * 1.5 + -0.3 * -0.5 + 0.05)));
  CHECK(gru_forward(p, {}, social) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("padding ids do not alter the output") {
  GruParams p = tiny_params();
  std::vector<double> social = {1.5, -0.5};
  double a = gru_forward(p, {2, 3}, social);
  double b = gru_forward(p, {2, 3, 0, 0, 0}, social);
  CHECK(a == b);
}

TEST_CASE("hidden state stays bounded when started inside the unit box") {
  GruParams p = tiny_params();
  std::vector<double> h = {0.9, -0.9};
  for (int t = 0; t < 50; ++t) {
    h = gru_step(p, {0.5, -0.3}, h);
    CHECK(std::abs(h[0]) <= 1.0);
    CHECK(std::abs(h[1]) <= 1.0);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  GruConfig cfg;
  cfg.d_e = 4;
  cfg.d_h = 4;
  cfg.seed = 3;
  GruParams p = init_gru({"w:a", "w:b", "w:c", "w:d", "w:e"}, cfg);
  std::vector<std::int32_t> ids = {2, 4, 3, 6, 5};
  std::vector<double> social(kSocialFeatureCount, 0.0);
  social[0] = 1.2;
  social[3] = -0.7;
  double err = gru_grad_check(p, ids, social, 1, 1e-5, 200);
  CHECK(err < 1e-4);
  double err0 = gru_grad_check(p, ids, social, 0, 1e-5, 200);
  CHECK(err0 < 1e-4);
}

TEST_CASE("corrupting the reset-gate recurrent gradient is detected") {
  GruConfig cfg;
  cfg.d_e = 4;
  cfg.d_h = 4;
  cfg.seed = 3;
  GruParams p = init_gru({"w:a", "w:b", "w:c", "w:d", "w:e"}, cfg);
  std::vector<std::int32_t> ids = {2, 4, 3, 6, 5};
  std::vector<double> social(kSocialFeatureCount, 0.0);
  social[0] = 1.2;
  double err = gru_grad_check(p, ids, social, 1, 1e-5, 200,
                              [](GruGradients& g) {
                                for (double& v : g.ur) v = v * 3.0 + 0.05;
                              });
  CHECK(err > 1e-2);
}

TEST_CASE("zero-length sequence leaves embedding gradients at zero") {
  GruConfig cfg;
  cfg.d_e = 3;
  cfg.d_h = 3;
  cfg.seed = 8;
  GruParams p = init_gru({"w:a", "w:b"}, cfg);
  std::vector<double> social(kSocialFeatureCount, 0.5);
  GruGradients g;
  gru_loss_and_gradients(p, {}, social, 1, g);
  for (double v : g.e) CHECK(v == 0.0);
  for (double v : g.uz) CHECK(v == 0.0);
  CHECK(g.c != 0.0);  // the output layer still learns
}

TEST_CASE("training with lr zero keeps the initialization") {
  GenConfig g;
  g.n_articles = 60;
  g.seed = 15;
  Corpus c = generate_synthetic(g);
  FeatureSpace space = fit_feature_space(c);
  GruConfig cfg;
  cfg.d_e = 8;
  cfg.d_h = 8;
  cfg.epochs = 2;
  cfg.learning_rate = 0.0;
  cfg.seed = 44;
  GruParams trained = train_gru(c, space, cfg, FeatureMode::kHybrid);
  GruParams fresh = init_gru(word_unigram_terms(space), cfg);
  CHECK(trained.e == fresh.e);
  CHECK(trained.uz == fresh.uz);
  CHECK(trained.v == fresh.v);
  CHECK(trained.c == fresh.c);
}

TEST_CASE("training is deterministic under seed") {
  GenConfig g;
  g.n_articles = 80;
  g.seed = 23;
  Corpus c = generate_synthetic(g);
  FeatureSpace space = fit_feature_space(c);
  GruConfig cfg;
  cfg.d_e = 8;
  cfg.d_h = 8;
  cfg.epochs = 2;
  cfg.seed = 5;
  GruParams a = train_gru(c, space, cfg, FeatureMode::kHybrid);
  GruParams b = train_gru(c, space, cfg, FeatureMode::kHybrid);
  CHECK(a.e == b.e);
  CHECK(a.wz == b.wz);
  CHECK(a.v == b.v);
  CHECK(a.c == b.c);
}

TEST_CASE("encode maps oov to unk and truncates") {
  GruParams p = tiny_params();
  NewsArticle a = test::make_article("1", "t2 zz t3 t4 t2 t3 t4 t2 t3 t4", 0);
  auto ids = p.encode(a);
  REQUIRE(static_cast<int>(ids.size()) == p.config.max_seq_len);
  CHECK(ids[0] == 2);
  CHECK(ids[1] == 1);  // unk
  CHECK(ids[2] == 3);
}
