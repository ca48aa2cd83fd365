#include <benchmark/benchmark.h>

#include "fnd/corpus.hpp"
#include "fnd/explain.hpp"
#include "fnd/features.hpp"
#include "fnd/gru.hpp"
#include "fnd/rng.hpp"
#include "fnd/tree.hpp"
#include "fnd/unicode.hpp"

namespace {

using namespace fnd;

const Corpus& bench_corpus() {
  static const Corpus corpus = [] {
    GenConfig g;
    g.n_articles = 500;
    g.signal_strength = 0.9;
    g.seed = 42;
    return generate_synthetic(g);
  }();
  return corpus;
}

const FeatureSpace& bench_space() {
  static const FeatureSpace space = fit_feature_space(bench_corpus());
  return space;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string& text = bench_corpus().articles[0].content.text;
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
}
BENCHMARK(BM_Tokenize);

void BM_NfcLatinMixed(benchmark::State& state) {
  std::string s = "Et́at de l'art: résumé ሰበር ዜና";
  for (auto _ : state) benchmark::DoNotOptimize(nfc(s));
}
BENCHMARK(BM_NfcLatinMixed);

void BM_FitFeatureSpace(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_feature_space(bench_corpus()));
}
BENCHMARK(BM_FitFeatureSpace)->Unit(benchmark::kMillisecond);

void BM_VectorizeHybrid(benchmark::State& state) {
  const auto& a = bench_corpus().articles[0];
  const FeatureSpace& space = bench_space();  // pay the fit outside the loop
  for (auto _ : state)
    benchmark::DoNotOptimize(vectorize(a, space, FeatureMode::kHybrid));
}
BENCHMARK(BM_VectorizeHybrid);

void BM_TreeFit(benchmark::State& state) {
  auto rows = vectorize_all(bench_corpus(), bench_space(), FeatureMode::kHybrid);
  std::vector<double> targets;
  std::vector<std::uint32_t> ids;
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    targets.push_back(static_cast<double>(
        static_cast<int>(*bench_corpus().articles[i].label)));
    ids.push_back(i);
  }
  CscMatrix csc = build_csc(rows);
  TreeOptions opt{static_cast<int>(state.range(0)), 2};
  for (auto _ : state) benchmark::DoNotOptimize(fit_tree(csc, targets, ids, opt));
}
BENCHMARK(BM_TreeFit)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GruStep(benchmark::State& state) {
  GruConfig cfg;
  cfg.d_e = 64;
  cfg.d_h = 64;
  cfg.seed = 1;
  GruParams p = init_gru({"w:a", "w:b"}, cfg);
  std::vector<double> x(64, 0.02), h(64, 0.0);
  for (auto _ : state) {
    h = gru_step(p, x, h);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_GruStep);

void BM_LimeSurrogate(benchmark::State& state) {
  LimeConfig cfg;
  cfg.n_samples = 500;
  cfg.seed = 5;
  auto masks = perturb_masks(24, cfg);
  std::vector<double> targets, weights;
  Rng rng(9);
  for (const auto& m : masks) {
    targets.push_back(rng.uniform());
    weights.push_back(proximity(m, 25.0));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_surrogate(masks, targets, weights, 1.0));
}
BENCHMARK(BM_LimeSurrogate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
