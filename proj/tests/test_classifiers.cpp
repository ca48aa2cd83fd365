#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fnd/errors.hpp"
#include "fnd/forest.hpp"
#include "fnd/gbdt.hpp"
#include "fnd/linear.hpp"
#include "fnd/naive_bayes.hpp"
#include "fnd/rng.hpp"
#include "fnd/sparse.hpp"
#include "fnd/tree.hpp"

using namespace fnd;

namespace {

FeatureVector dense_row(const std::vector<double>& values) {
  FeatureVector v;
  v.dimension = static_cast<std::uint32_t>(values.size());
  for (std::uint32_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) {
      v.indices.push_back(i);
      v.values.push_back(values[i]);
    }
  }
  return v;
}

// Independent brute-force multinomial Bayes posterior (linear space).
double brute_force_nb_p_real(const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& labels,
                             const std::vector<double>& doc, double alpha) {
  const std::size_t d = doc.size();
  std::array<double, 2> prior{}, total{};
  std::array<std::vector<double>, 2> counts = {std::vector<double>(d, 0.0),
                                               std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    prior[labels[i]] += 1.0;
    for (std::size_t t = 0; t < d; ++t) {
      counts[labels[i]][t] += rows[i][t];
      total[labels[i]] += rows[i][t];
    }
  }
  std::array<double, 2> like{1.0, 1.0};
  for (int c = 0; c < 2; ++c) {
    like[c] = prior[c] / static_cast<double>(rows.size());
    for (std::size_t t = 0; t < d; ++t)
      like[c] *= std::pow((counts[c][t] + alpha) / (total[c] + alpha * d),
                          doc[t]);
  }
  return like[0] / (like[0] + like[1]);
}

// Exhaustive best depth-1 Gini split over 1-D points (oracle).
struct BestSplit {
  double threshold = 0;
  double gini = 1e18;
  bool found = false;
};
BestSplit exhaustive_gini_split(const std::vector<double>& xs,
                                const std::vector<int>& ys, int min_leaf) {
  std::vector<double> uniq = xs;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  BestSplit best;
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
    double thr = 0.5 * (uniq[k] + uniq[k + 1]);
    double nl = 0, nr = 0, sl = 0, sr = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] <= thr) {
        nl += 1;
        sl += ys[i];
      } else {
        nr += 1;
        sr += ys[i];
      }
    }
    if (nl < min_leaf || nr < min_leaf) continue;
    auto gini = [](double n, double s) {
      if (n == 0) return 0.0;
      double p = s / n;
      return n * (1.0 - p * p - (1.0 - p) * (1.0 - p));
    };
    double g = gini(nl, sl) + gini(nr, sr);
    if (g < best.gini - 1e-12) {
      best.gini = g;
      best.threshold = thr;
      best.found = true;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive Bayes
// ---------------------------------------------------------------------------

// Hand-evaluated posterior: (3/4)/((3/4)+(1/4)) = 0.75.
TEST_CASE("nb matches the worked two-term example") {
  std::vector<FeatureVector> rows = {dense_row({2, 0}), dense_row({0, 2})};
  std::vector<int> labels = {0, 1};
  MultinomialNaiveBayes nb(1.0);
  nb.fit(rows, labels);

  auto p = nb.predict_proba(dense_row({1, 0}));
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-12));

  auto p_sym = nb.predict_proba(dense_row({1, 1}));
  CHECK(p_sym[0] == doctest::Approx(0.5).epsilon(1e-12));

  auto p_empty = nb.predict_proba(dense_row({0, 0}));
  CHECK(p_empty[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nb equals brute-force Bayes on random tiny instances") {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_int(5));
    const int n = 2 + static_cast<int>(rng.uniform_int(7));
    std::vector<std::vector<double>> dense(n, std::vector<double>(d, 0.0));
    std::vector<int> labels(n);
    bool both = false;
    for (int i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.uniform_int(2));
      for (int t = 0; t < d; ++t)
        dense[i][t] = static_cast<double>(rng.uniform_int(4));
    }
    labels[0] = 0;
    labels[n - 1] = 1;
    both = true;
    REQUIRE(both);
    std::vector<FeatureVector> rows;
    for (const auto& r : dense) rows.push_back(dense_row(r));
    MultinomialNaiveBayes nb(1.0);
    nb.fit(rows, labels);
    std::vector<double> doc(d);
    for (int t = 0; t < d; ++t)
      doc[t] = static_cast<double>(rng.uniform_int(4));
    double expected = brute_force_nb_p_real(dense, labels, doc, 1.0);
    double actual = nb.predict_proba(dense_row(doc))[0];
    CHECK(actual == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("nb rejects negative features") {
  std::vector<FeatureVector> rows = {dense_row({1, -1}), dense_row({0, 2})};
  MultinomialNaiveBayes nb;
  CHECK_THROWS_AS(nb.fit(rows, {0, 1}), ArgumentError);
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

TEST_CASE("logreg at zero weights predicts one half") {
  LogisticRegression lr;
  lr.set_params({0.0, 0.0}, 0.0);
  auto p = lr.predict_proba(dense_row({3.0, -2.0}));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

// (sigmoid(0) - 1) * x = -x/2.
TEST_CASE("logreg gradient at zero on a positive instance is -x/2") {
  std::vector<FeatureVector> rows = {dense_row({2.0, 4.0})};
  std::vector<double> w = {0.0, 0.0};
  std::vector<double> gw;
  double gb;
  logreg_gradient(w, 0.0, rows, {1}, 0.0, gw, gb);
  CHECK(gw[0] == doctest::Approx(-1.0));
  CHECK(gw[1] == doctest::Approx(-2.0));
  CHECK(gb == doctest::Approx(-0.5));
}

TEST_CASE("logreg analytic gradient matches finite differences") {
  Rng rng(777);
  const int d = 6, n = 12;
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    std::vector<double> vals(d);
    for (double& v : vals) v = rng.normal();
    rows.push_back(dense_row(vals));
    labels.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  const double l2 = 1e-3, h = 1e-5;
  double worst = 0;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(d);
    for (double& v : w) v = rng.normal();
    double b = rng.normal();
    std::vector<double> gw;
    double gb;
    logreg_gradient(w, b, rows, labels, l2, gw, gb);
    for (int j = 0; j <= d; ++j) {
      auto probe = [&](double eps) {
        std::vector<double> wp = w;
        double bp = b;
        if (j < d)
          wp[j] += eps;
        else
          bp += eps;
        return logreg_loss(wp, bp, rows, labels, l2);
      };
      double numeric = (probe(h) - probe(-h)) / (2 * h);
      double analytic = j < d ? gw[j] : gb;
      double rel = std::abs(analytic - numeric) /
                   std::max(std::abs(analytic) + std::abs(numeric), 1e-8);
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("logreg separates a two-point set") {
  std::vector<FeatureVector> rows = {dense_row({1.0}), dense_row({-1.0})};
  std::vector<int> labels = {1, 0};
  LogisticRegression lr;
  lr.fit(rows, labels);
  CHECK(lr.predict(rows[0]) == 1);
  CHECK(lr.predict(rows[1]) == 0);
}

TEST_CASE("logreg reports the epoch when training diverges") {
  std::vector<FeatureVector> rows = {dense_row({1.0, 2.0}),
                                     dense_row({-1.5, 0.5})};
  std::vector<int> labels = {1, 0};
  LogRegConfig c;
  c.learning_rate = 1e300;  // guaranteed blow-up
  c.epochs = 3;
  LogisticRegression lr(c);
  try {
    lr.fit(rows, labels);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("logreg training is deterministic under seed") {
  Rng rng(11);
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back(dense_row({rng.normal(), rng.normal(), rng.normal()}));
    labels.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  LogRegConfig c;
  c.seed = 99;
  LogisticRegression a(c), b(c);
  a.fit(rows, labels);
  b.fit(rows, labels);
  CHECK(a.weights() == b.weights());
  CHECK(a.bias() == b.bias());
}

// ---------------------------------------------------------------------------
// SVM
// ---------------------------------------------------------------------------

TEST_CASE("platt on symmetric data maps margin zero to one half") {
  std::vector<double> margins = {-2, -1, 1, 2};
  std::vector<int> labels = {0, 0, 1, 1};
  auto ab = platt_fit(margins, labels);
  CHECK(sigmoid(ab[0] * 0.0 + ab[1]) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(ab[0] > 0);
}

TEST_CASE("svm separates a small 2-D set") {
  std::vector<FeatureVector> rows = {dense_row({2.0, 1.0}), dense_row({1.5, 2.0}),
                                     dense_row({-1.0, -1.5}),
                                     dense_row({-2.0, -0.5})};
  std::vector<int> labels = {1, 1, 0, 0};
  SvmConfig cfg;
  cfg.calibration_fraction = 0.0;  // tiny set: calibrate on nothing
  LinearSvm svm(cfg);
  svm.fit(rows, labels);
  for (int i = 0; i < 4; ++i) CHECK(svm.predict(rows[i]) == labels[i]);
}

TEST_CASE("svm labels on training points survive input scaling") {
  std::vector<FeatureVector> rows = {dense_row({2.0, 1.0}), dense_row({1.5, 2.0}),
                                     dense_row({-1.0, -1.5}),
                                     dense_row({-2.0, -0.5})};
  std::vector<int> labels = {1, 1, 0, 0};
  SvmConfig cfg;
  cfg.calibration_fraction = 0.0;
  LinearSvm a(cfg);
  a.fit(rows, labels);

  std::vector<FeatureVector> scaled = rows;
  for (auto& r : scaled)
    for (auto& v : r.values) v *= 2.0;
  LinearSvm b(cfg);
  b.fit(scaled, labels);
  for (int i = 0; i < 4; ++i) CHECK(a.predict(rows[i]) == b.predict(scaled[i]));
}

TEST_CASE("svm falls back when the calibration split is degenerate") {
  // Single fake article: the stratified 20% holdout has no fakes.
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    rows.push_back(dense_row({rng.normal(), rng.normal()}));
    labels.push_back(0);
  }
  rows.push_back(dense_row({5.0, 5.0}));
  labels.push_back(1);
  LinearSvm svm;
  svm.fit(rows, labels);
  CHECK_FALSE(svm.calibrated());
  auto p = svm.predict_proba(rows[0]);
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

TEST_CASE("pure input yields a single leaf") {
  std::vector<FeatureVector> rows = {dense_row({1.0}), dense_row({2.0})};
  DecisionTree dt;
  dt.fit(rows, {1, 1});
  CHECK(dt.root().is_leaf());
  CHECK(dt.predict_proba(rows[0])[1] == doctest::Approx(1.0));
}

// Candidates: only the midpoint 0.5; split separates labels perfectly.
TEST_CASE("two 1-D points split at the midpoint") {
  std::vector<FeatureVector> rows = {dense_row({0.0}), dense_row({1.0})};
  TreeConfig cfg;
  cfg.max_depth = 1;
  cfg.min_leaf = 1;
  DecisionTree dt(cfg);
  dt.fit(rows, {0, 1});
  REQUIRE_FALSE(dt.root().is_leaf());
  CHECK(dt.root().threshold == doctest::Approx(0.5));
  CHECK(dt.predict(rows[0]) == 0);
  CHECK(dt.predict(rows[1]) == 1);
}

TEST_CASE("max_depth zero predicts the class prior") {
  std::vector<FeatureVector> rows = {dense_row({0.0}), dense_row({1.0}),
                                     dense_row({2.0}), dense_row({3.0})};
  TreeConfig cfg;
  cfg.max_depth = 0;
  DecisionTree dt(cfg);
  dt.fit(rows, {0, 1, 1, 1});
  CHECK(dt.root().is_leaf());
  CHECK(dt.predict_proba(rows[0])[1] == doctest::Approx(0.75));
}

TEST_CASE("depth-1 fits equal the exhaustive best Gini split") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(7));
    std::vector<double> xs(n);
    std::vector<int> ys(n);
    bool mixed = false;
    for (int i = 0; i < n; ++i) {
      xs[i] = std::round(rng.uniform(-3, 3) * 4.0) / 4.0;  // force duplicates
      ys[i] = static_cast<int>(rng.uniform_int(2));
    }
    for (int i = 1; i < n; ++i) mixed = mixed || ys[i] != ys[0];
    if (!mixed) ys[0] = 1 - ys[0];

    BestSplit oracle = exhaustive_gini_split(xs, ys, 1);
    std::vector<FeatureVector> rows;
    for (double x : xs) {
      FeatureVector v;
      v.dimension = 1;
      if (x != 0.0) {
        v.indices.push_back(0);
        v.values.push_back(x);
      }
      rows.push_back(v);
    }
    TreeConfig cfg;
    cfg.max_depth = 1;
    cfg.min_leaf = 1;
    DecisionTree dt(cfg);
    dt.fit(rows, ys);
    if (!oracle.found) {
      CHECK(dt.root().is_leaf());
      continue;
    }
    // The tree may legally stay a leaf only if no split improves Gini;
    // the exhaustive oracle says one does.
    double parent;
    {
      double s = 0;
      for (int y : ys) s += y;
      double p = s / n;
      parent = n * (1.0 - p * p - (1.0 - p) * (1.0 - p));
    }
    if (oracle.gini < parent - 1e-12) {
      REQUIRE_FALSE(dt.root().is_leaf());
      CHECK(dt.root().threshold == doctest::Approx(oracle.threshold));
    }
  }
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

TEST_CASE("degenerate forest equals a single decision tree") {
  Rng rng(31);
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back(dense_row({rng.normal(), rng.normal(), rng.normal()}));
    labels.push_back(rows.back().l2_norm() > 1.5 ? 1 : 0);
  }
  ForestConfig fc;
  fc.n_trees = 1;
  fc.bootstrap = false;
  fc.mtry = 3;  // all features
  fc.max_depth = 6;
  fc.min_leaf = 2;
  RandomForest rf(fc);
  rf.fit(rows, labels);

  TreeConfig tc;
  tc.max_depth = 6;
  tc.min_leaf = 2;
  DecisionTree dt(tc);
  dt.fit(rows, labels);

  for (const auto& r : rows)
    CHECK(rf.predict_proba(r)[1] == doctest::Approx(dt.predict_proba(r)[1]));
}

TEST_CASE("forest is deterministic under seed") {
  Rng rng(33);
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back(dense_row({rng.normal(), rng.normal()}));
    labels.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  ForestConfig fc;
  fc.n_trees = 15;
  fc.seed = 123;
  RandomForest a(fc), b(fc);
  a.fit(rows, labels);
  b.fit(rows, labels);
  for (const auto& r : rows)
    CHECK(a.predict_proba(r)[1] == b.predict_proba(r)[1]);
}

TEST_CASE("forest solves xor") {
  std::vector<FeatureVector> rows = {dense_row({0, 0}), dense_row({1, 1}),
                                     dense_row({0, 1}), dense_row({1, 0})};
  std::vector<int> labels = {0, 0, 1, 1};
  ForestConfig fc;
  fc.n_trees = 60;
  fc.max_depth = 2;
  fc.min_leaf = 1;
  fc.seed = 7;
  RandomForest rf(fc);
  rf.fit(rows, labels);
  for (int i = 0; i < 4; ++i) CHECK(rf.predict(rows[i]) == labels[i]);
}

// ---------------------------------------------------------------------------
// GBDT
// ---------------------------------------------------------------------------

TEST_CASE("gbdt initial log odds") {
  std::vector<FeatureVector> rows = {dense_row({0.0}), dense_row({1.0})};
  GbdtConfig c;
  c.n_rounds = 1;
  c.min_leaf = 1;
  GradientBoostedTrees gb(c);
  gb.fit(rows, {0, 1});
  CHECK(gb.initial_log_odds() == doctest::Approx(0.0));
}

TEST_CASE("gbdt with empty trees predicts the prior") {
  GradientBoostedTrees gb;
  gb.set_params(std::log(0.25 / 0.75), {});
  auto p = gb.predict_proba(dense_row({1.0, 2.0}));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gbdt degenerates to a constant on single-class labels") {
  std::vector<FeatureVector> rows = {dense_row({0.0}), dense_row({1.0})};
  GradientBoostedTrees gb;
  gb.fit(rows, {1, 1});
  CHECK(gb.trees().empty());
  CHECK(gb.predict_proba(rows[0])[1] > 0.999);
}

TEST_CASE("gbdt solves xor and its loss is non-increasing") {
  std::vector<FeatureVector> rows = {dense_row({0, 0}), dense_row({1, 1}),
                                     dense_row({0, 1}), dense_row({1, 0})};
  std::vector<int> labels = {0, 0, 1, 1};
  GbdtConfig c;
  c.n_rounds = 50;
  c.learning_rate = 0.3;
  c.max_depth = 2;
  c.min_leaf = 1;
  GradientBoostedTrees gb(c);
  gb.fit(rows, labels);
  for (int i = 0; i < 4; ++i) CHECK(gb.predict(rows[i]) == labels[i]);
  const auto& loss = gb.training_loss();
  for (std::size_t i = 1; i < loss.size(); ++i)
    CHECK(loss[i] <= loss[i - 1] + 1e-12);
}

TEST_CASE("probabilities are valid across models") {
  Rng rng(55);
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back(dense_row({rng.normal(), rng.normal(), rng.normal()}));
    labels.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  auto check_model = [&](ProbClassifier& m) {
    m.fit(rows, labels);
    for (const auto& r : rows) {
      auto p = m.predict_proba(r);
      CHECK(std::isfinite(p[0]));
      CHECK(std::isfinite(p[1]));
      CHECK(p[0] >= 0.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
  };
  LogisticRegression lr;
  check_model(lr);
  LinearSvm svm;
  check_model(svm);
  DecisionTree dt;
  check_model(dt);
  ForestConfig fc;
  fc.n_trees = 10;
  RandomForest rf(fc);
  check_model(rf);
  GbdtConfig gc;
  gc.n_rounds = 20;
  GradientBoostedTrees gb(gc);
  check_model(gb);
}
