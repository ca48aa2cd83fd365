#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fnd/corpus.hpp"
#include "fnd/gbdt.hpp"
#include "fnd/scorer.hpp"

namespace fnd {

struct StackConfig {
  std::vector<std::string> base_kinds;
  int top_k = 3;
  int n_folds = 5;
  std::uint64_t seed = 0;
};

struct RankedKind {
  std::string kind;
  double cv_macro_f1 = 0.0;
};

// Out-of-fold base probabilities: row i, column j holds P(fake) for
// training row i from selected model j, produced by a model whose training
// folds never contained row i.
struct MetaMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<int> labels;
  std::vector<int> fold_of_row;  // bookkeeping for the no-leakage invariant

  double at(std::size_t i, std::size_t j) const {
    return values[i * n_cols + j];
  }
};

// Trains one base model of a named kind on a (sub)corpus. Factories wrap
// builtin kinds in the pipeline; tests register stubs.
using ModelFactory = std::function<std::unique_ptr<ArticleScorer>(
    const Corpus& train, std::uint64_t seed)>;

class ModelRegistry {
 public:
  // Registration order defines the canonical tie-break order.
  void add(const std::string& kind, ModelFactory factory);
  bool has(const std::string& kind) const;
  std::unique_ptr<ArticleScorer> make(const std::string& kind,
                                      const Corpus& train,
                                      std::uint64_t seed) const;
  int canonical_rank(const std::string& kind) const;
  const std::vector<std::string>& kinds() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::vector<ModelFactory> factories_;
};

// Deterministic stratified fold assignment; every fold receives both
// labels. Throws if a label has fewer articles than folds.
std::vector<int> stratified_folds(const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed);

// Per-kind out-of-fold P(fake) for every training row. Kinds whose
// training fails on any fold are omitted (with a warning on stderr).
struct OofColumn {
  std::string kind;
  std::vector<double> p_fake;  // per training row
  double macro_f1 = 0.0;       // pooled OOF macro-F1
};
std::vector<OofColumn> compute_oof(const Corpus& corpus_train,
                                   const std::vector<std::string>& kinds,
                                   const StackConfig& config,
                                   const ModelRegistry& registry);

// Candidates ranked by cross-validated macro-F1 (descending); ties break
// by registry order. Throws if fewer than top_k candidates survive.
std::vector<RankedKind> rank_base_models(const Corpus& corpus_train,
                                         const StackConfig& config,
                                         const ModelRegistry& registry);

// Out-of-fold meta features for the given (already ranked) kinds.
MetaMatrix build_meta_matrix(const Corpus& corpus_train,
                             const std::vector<std::string>& selected,
                             const StackConfig& config,
                             const ModelRegistry& registry);

// Stacked ensemble: top-k bases refit on the full training set feed a GBDT
// meta-classifier trained on the out-of-fold matrix.
struct StackedModel {
  StackConfig config;
  std::vector<RankedKind> selected;
  std::vector<std::unique_ptr<ArticleScorer>> bases;  // parallel to selected
  GradientBoostedTrees meta;

  double p_fake(const NewsArticle& a) const;
  FeatureVector base_probabilities(const NewsArticle& a) const;
};

StackedModel stack_fit(const Corpus& corpus_train, const StackConfig& config,
                       const ModelRegistry& registry,
                       const GbdtConfig& meta_config = {});

// Seed for the model of `kind` trained on the complement of `fold`
// (fold = -1 for the full-train refit). Shared by ranking, meta-matrix and
// refit so the three stages agree.
std::uint64_t fold_model_seed(std::uint64_t seed, int fold,
                              const std::string& kind);

}  // namespace fnd
