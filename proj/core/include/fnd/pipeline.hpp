#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fnd/classifier.hpp"
#include "fnd/corpus.hpp"
#include "fnd/ensemble.hpp"
#include "fnd/features.hpp"
#include "fnd/forest.hpp"
#include "fnd/gbdt.hpp"
#include "fnd/gru.hpp"
#include "fnd/linear.hpp"
#include "fnd/naive_bayes.hpp"
#include "fnd/scorer.hpp"
#include "fnd/tree.hpp"

namespace fnd {

// Hyperparameter bundle for every trainable kind. The defaults are the
// artifact's own (none are prescribed upstream).
struct ModelConfigs {
  FeatureConfig features;
  double nb_alpha = 1.0;
  LogRegConfig logreg;
  SvmConfig svm;
  TreeConfig tree;
  ForestConfig forest;
  GbdtConfig gbdt;
  GruConfig gru;
  int stack_top_k = 3;
  int stack_n_folds = 5;
  GbdtConfig meta_gbdt;
};

// Canonical kind order: nb, logreg, svm, dtree, rforest, gbdt, gru.
const std::vector<std::string>& builtin_model_kinds();
bool is_ensemble_kind(const std::string& kind);
// Candidate bases for the two presets ("ensemble-ml" = the six classical
// kinds; "ensemble-nn" = gru plus classical stand-ins until further
// sequence models exist).
std::vector<std::string> ensemble_base_kinds(const std::string& kind);

// A fitted model of any kind bound to its feature space; the unit of
// persistence and article-level prediction.
class TrainedModel : public ArticleScorer {
 public:
  TrainedModel() = default;
  TrainedModel(TrainedModel&&) = default;
  TrainedModel& operator=(TrainedModel&&) = default;

  double p_fake(const NewsArticle& a) const override;

  const std::string& kind() const { return kind_; }
  FeatureMode mode() const { return mode_; }
  const FeatureSpace& space() const { return *space_; }
  std::shared_ptr<const FeatureSpace> space_ptr() const { return space_; }

  const ProbClassifier* row_model() const { return row_model_.get(); }
  const GruParams* gru() const { return gru_.get(); }
  const StackedModel* stacked() const { return stacked_.get(); }

  static TrainedModel make_row_model(std::string kind, FeatureMode mode,
                                     std::shared_ptr<const FeatureSpace> space,
                                     std::unique_ptr<ProbClassifier> model);
  static TrainedModel make_gru(FeatureMode mode,
                               std::shared_ptr<const FeatureSpace> space,
                               GruParams params);
  static TrainedModel make_stacked(std::string kind, FeatureMode mode,
                                   std::shared_ptr<const FeatureSpace> space,
                                   std::unique_ptr<StackedModel> stacked);

 private:
  std::string kind_;
  FeatureMode mode_ = FeatureMode::kHybrid;
  std::shared_ptr<const FeatureSpace> space_;
  std::unique_ptr<ProbClassifier> row_model_;
  std::unique_ptr<GruParams> gru_;
  std::unique_ptr<StackedModel> stacked_;
};

// Registry of builtin kinds over a fixed feature space (base models for
// stacking; tests extend a copy with stubs).
ModelRegistry make_builtin_registry(std::shared_ptr<const FeatureSpace> space,
                                    const ModelConfigs& configs,
                                    FeatureMode mode);

// Fits the feature space on the training corpus, then the model. For
// ensemble kinds this runs the full stacking protocol.
TrainedModel train_model(const std::string& kind, const Corpus& corpus_train,
                         FeatureMode mode, const ModelConfigs& configs,
                         std::uint64_t seed);

// Same, reusing an already fitted space (shared across kinds in compare()
// and across folds in stacking).
TrainedModel train_model_with_space(const std::string& kind,
                                    const Corpus& corpus_train,
                                    FeatureMode mode,
                                    const ModelConfigs& configs,
                                    std::uint64_t seed,
                                    std::shared_ptr<const FeatureSpace> space);

}  // namespace fnd
