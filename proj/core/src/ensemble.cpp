#include "fnd/ensemble.hpp"

#include <algorithm>
#include <array>
#include <iostream>

#include "fnd/errors.hpp"
#include "fnd/eval.hpp"
#include "fnd/rng.hpp"

namespace fnd {

void ModelRegistry::add(const std::string& kind, ModelFactory factory) {
  if (has(kind)) throw ArgumentError("model kind already registered: " + kind);
  order_.push_back(kind);
  factories_.push_back(std::move(factory));
}

bool ModelRegistry::has(const std::string& kind) const {
  return std::find(order_.begin(), order_.end(), kind) != order_.end();
}

std::unique_ptr<ArticleScorer> ModelRegistry::make(const std::string& kind,
                                                   const Corpus& train,
                                                   std::uint64_t seed) const {
  for (std::size_t i = 0; i < order_.size(); ++i)
    if (order_[i] == kind) return factories_[i](train, seed);
  throw ValidationError("unknown model kind: \"" + kind + "\"");
}

int ModelRegistry::canonical_rank(const std::string& kind) const {
  for (std::size_t i = 0; i < order_.size(); ++i)
    if (order_[i] == kind) return static_cast<int>(i);
  return static_cast<int>(order_.size());
}

std::uint64_t fold_model_seed(std::uint64_t seed, int fold,
                              const std::string& kind) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ seed;
  h *= 0x100000001B3ULL;
  h ^= static_cast<std::uint64_t>(fold + 2);
  h *= 0x100000001B3ULL;
  for (unsigned char c : kind) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed) {
  if (n_folds < 2) throw ArgumentError("n_folds must be >= 2");
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_label[labels[i] == 1 ? 1 : 0].push_back(i);
  for (const auto& idx : by_label) {
    if (idx.size() < static_cast<std::size_t>(n_folds))
      throw ValidationError(
          "corpus too small to stratify into " + std::to_string(n_folds) +
          " folds (a label has only " + std::to_string(idx.size()) +
          " articles)");
  }
  Rng rng(seed ^ 0xF01D5ULL);
  std::vector<int> fold(labels.size(), 0);
  for (auto& idx : by_label) {
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      fold[idx[i]] = static_cast<int>(i % n_folds);
  }
  return fold;
}

namespace {

struct FoldView {
  Corpus train;                       // complement of the fold
  std::vector<std::size_t> heldout;   // original row indices of the fold
};

std::vector<FoldView> make_fold_views(const Corpus& corpus,
                                      const std::vector<int>& fold) {
  int n_folds = *std::max_element(fold.begin(), fold.end()) + 1;
  std::vector<FoldView> views(n_folds);
  for (int f = 0; f < n_folds; ++f)
    views[f].train.name = corpus.name + "/fold" + std::to_string(f);
  for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
    for (int f = 0; f < n_folds; ++f) {
      if (fold[i] == f)
        views[f].heldout.push_back(i);
      else
        views[f].train.articles.push_back(corpus.articles[i]);
    }
  }
  return views;
}

}  // namespace

std::vector<OofColumn> compute_oof(const Corpus& corpus_train,
                                   const std::vector<std::string>& kinds,
                                   const StackConfig& config,
                                   const ModelRegistry& registry) {
  std::vector<int> labels;
  labels.reserve(corpus_train.size());
  for (const NewsArticle& a : corpus_train.articles) {
    if (!a.label)
      throw ValidationError("stacking requires a fully labeled corpus");
    labels.push_back(static_cast<int>(*a.label));
  }
  const std::vector<int> fold =
      stratified_folds(labels, config.n_folds, config.seed);
  const std::vector<FoldView> views = make_fold_views(corpus_train, fold);

  std::vector<OofColumn> columns;
  for (const std::string& kind : kinds) {
    OofColumn col;
    col.kind = kind;
    col.p_fake.assign(corpus_train.size(), 0.0);
    bool ok = true;
    for (int f = 0; f < config.n_folds && ok; ++f) {
      try {
        auto model = registry.make(kind, views[f].train,
                                   fold_model_seed(config.seed, f, kind));
        for (std::size_t i : views[f].heldout)
          col.p_fake[i] = model->p_fake(corpus_train.articles[i]);
      } catch (const std::exception& e) {
        std::cerr << "warning: base model \"" << kind << "\" failed on fold "
                  << f << ": " << e.what() << "; kind excluded\n";
        ok = false;
      }
    }
    if (!ok) continue;
    std::vector<int> preds;
    preds.reserve(col.p_fake.size());
    for (double p : col.p_fake) preds.push_back(p > 0.5 ? 1 : 0);
    col.macro_f1 = metrics(preds, labels).macro.f1;
    columns.push_back(std::move(col));
  }
  return columns;
}

namespace {

std::vector<RankedKind> rank_columns(const std::vector<OofColumn>& columns,
                                     const StackConfig& config,
                                     const ModelRegistry& registry) {
  std::vector<RankedKind> ranked;
  ranked.reserve(columns.size());
  for (const OofColumn& c : columns) ranked.push_back({c.kind, c.macro_f1});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const RankedKind& a, const RankedKind& b) {
                     if (a.cv_macro_f1 != b.cv_macro_f1)
                       return a.cv_macro_f1 > b.cv_macro_f1;
                     return registry.canonical_rank(a.kind) <
                            registry.canonical_rank(b.kind);
                   });
  if (ranked.size() < static_cast<std::size_t>(config.top_k))
    throw ValidationError("only " + std::to_string(ranked.size()) +
                          " base models trained successfully; top_k = " +
                          std::to_string(config.top_k));
  return ranked;
}

}  // namespace

std::vector<RankedKind> rank_base_models(const Corpus& corpus_train,
                                         const StackConfig& config,
                                         const ModelRegistry& registry) {
  if (config.base_kinds.size() < static_cast<std::size_t>(config.top_k))
    throw ArgumentError("top_k exceeds the number of candidate kinds");
  auto columns = compute_oof(corpus_train, config.base_kinds, config, registry);
  return rank_columns(columns, config, registry);
}

namespace {

MetaMatrix matrix_from_columns(const std::vector<OofColumn>& columns,
                               const std::vector<std::string>& selected,
                               const std::vector<int>& labels,
                               const std::vector<int>& fold) {
  MetaMatrix m;
  m.n_rows = labels.size();
  m.n_cols = selected.size();
  m.labels = labels;
  m.fold_of_row = fold;
  m.values.assign(m.n_rows * m.n_cols, 0.0);
  for (std::size_t j = 0; j < selected.size(); ++j) {
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const OofColumn& c) { return c.kind == selected[j]; });
    if (it == columns.end())
      throw StateError("no OOF column for selected kind " + selected[j]);
    for (std::size_t i = 0; i < m.n_rows; ++i)
      m.values[i * m.n_cols + j] = it->p_fake[i];
  }
  return m;
}

std::vector<FeatureVector> meta_rows(const MetaMatrix& m) {
  std::vector<FeatureVector> rows(m.n_rows);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    rows[i].dimension = static_cast<std::uint32_t>(m.n_cols);
    for (std::size_t j = 0; j < m.n_cols; ++j) {
      rows[i].indices.push_back(static_cast<std::uint32_t>(j));
      rows[i].values.push_back(m.at(i, j));
    }
  }
  return rows;
}

}  // namespace

MetaMatrix build_meta_matrix(const Corpus& corpus_train,
                             const std::vector<std::string>& selected,
                             const StackConfig& config,
                             const ModelRegistry& registry) {
  std::vector<int> labels;
  for (const NewsArticle& a : corpus_train.articles)
    labels.push_back(static_cast<int>(*a.label));
  auto columns = compute_oof(corpus_train, selected, config, registry);
  if (columns.size() != selected.size())
    throw TrainingError("a selected base model failed during the "
                        "out-of-fold pass");
  return matrix_from_columns(columns, selected, labels,
                             stratified_folds(labels, config.n_folds,
                                              config.seed));
}

StackedModel stack_fit(const Corpus& corpus_train, const StackConfig& config,
                       const ModelRegistry& registry,
                       const GbdtConfig& meta_config) {
  if (config.base_kinds.size() < static_cast<std::size_t>(config.top_k))
    throw ArgumentError("top_k exceeds the number of candidate kinds");

  // One OOF pass serves both the ranking and the meta features.
  auto columns = compute_oof(corpus_train, config.base_kinds, config, registry);
  auto ranked = rank_columns(columns, config, registry);

  StackedModel model;
  model.config = config;
  model.selected.assign(ranked.begin(), ranked.begin() + config.top_k);

  std::vector<int> labels;
  for (const NewsArticle& a : corpus_train.articles)
    labels.push_back(static_cast<int>(*a.label));
  std::vector<std::string> selected_kinds;
  for (const RankedKind& r : model.selected) selected_kinds.push_back(r.kind);
  MetaMatrix meta = matrix_from_columns(
      columns, selected_kinds, labels,
      stratified_folds(labels, config.n_folds, config.seed));

  model.meta = GradientBoostedTrees(meta_config);
  model.meta.fit(meta_rows(meta), meta.labels);

  for (const RankedKind& r : model.selected)
    model.bases.push_back(registry.make(
        r.kind, corpus_train, fold_model_seed(config.seed, -1, r.kind)));
  return model;
}

FeatureVector StackedModel::base_probabilities(const NewsArticle& a) const {
  FeatureVector row;
  row.dimension = static_cast<std::uint32_t>(bases.size());
  for (std::size_t j = 0; j < bases.size(); ++j) {
    row.indices.push_back(static_cast<std::uint32_t>(j));
    row.values.push_back(bases[j]->p_fake(a));
  }
  return row;
}

double StackedModel::p_fake(const NewsArticle& a) const {
  return meta.predict_proba(base_probabilities(a))[1];
}

}  // namespace fnd
