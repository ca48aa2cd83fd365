#include "fnd/pipeline.hpp"

#include <algorithm>

#include "fnd/errors.hpp"

namespace fnd {

const std::vector<std::string>& builtin_model_kinds() {
  static const std::vector<std::string> kinds = {
      "nb", "logreg", "svm", "dtree", "rforest", "gbdt", "gru"};
  return kinds;
}

bool is_ensemble_kind(const std::string& kind) {
  return kind == "ensemble-ml" || kind == "ensemble-nn";
}

std::vector<std::string> ensemble_base_kinds(const std::string& kind) {
  if (kind == "ensemble-ml")
    return {"nb", "logreg", "svm", "dtree", "rforest", "gbdt"};
  if (kind == "ensemble-nn") return {"gru", "logreg", "svm"};
  throw ValidationError("not an ensemble kind: \"" + kind + "\"");
}

double TrainedModel::p_fake(const NewsArticle& a) const {
  if (stacked_) return stacked_->p_fake(a);
  if (gru_)
    return gru_forward(*gru_, gru_->encode(a),
                       gru_social_block(a, *space_, mode_));
  if (!row_model_) throw StateError("TrainedModel is empty");
  if (kind_ == "nb")
    return row_model_->predict_proba(count_transform(a, *space_))[1];
  return row_model_->predict_proba(vectorize(a, *space_, mode_))[1];
}

TrainedModel TrainedModel::make_row_model(
    std::string kind, FeatureMode mode,
    std::shared_ptr<const FeatureSpace> space,
    std::unique_ptr<ProbClassifier> model) {
  TrainedModel m;
  m.kind_ = std::move(kind);
  m.mode_ = mode;
  m.space_ = std::move(space);
  m.row_model_ = std::move(model);
  return m;
}

TrainedModel TrainedModel::make_gru(FeatureMode mode,
                                    std::shared_ptr<const FeatureSpace> space,
                                    GruParams params) {
  TrainedModel m;
  m.kind_ = "gru";
  m.mode_ = mode;
  m.space_ = std::move(space);
  m.gru_ = std::make_unique<GruParams>(std::move(params));
  return m;
}

TrainedModel TrainedModel::make_stacked(
    std::string kind, FeatureMode mode,
    std::shared_ptr<const FeatureSpace> space,
    std::unique_ptr<StackedModel> stacked) {
  TrainedModel m;
  m.kind_ = std::move(kind);
  m.mode_ = mode;
  m.space_ = std::move(space);
  m.stacked_ = std::move(stacked);
  return m;
}

namespace {

std::unique_ptr<ProbClassifier> fit_row_model(const std::string& kind,
                                              const Corpus& train,
                                              const FeatureSpace& space,
                                              FeatureMode mode,
                                              const ModelConfigs& configs,
                                              std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const NewsArticle& a : train.articles) {
    if (!a.label)
      throw ValidationError("training corpus has unlabeled article \"" +
                            a.id + "\"");
    labels.push_back(static_cast<int>(*a.label));
  }

  std::unique_ptr<ProbClassifier> model;
  std::vector<FeatureVector> rows;
  if (kind == "nb") {
    if (mode == FeatureMode::kSocialOnly)
      throw ValidationError(
          "nb consumes raw token counts; social-only features are not "
          "supported");
    rows.resize(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
      rows[i] = count_transform(train.articles[i], space);
    model = std::make_unique<MultinomialNaiveBayes>(configs.nb_alpha);
  } else {
    rows = vectorize_all(train, space, mode);
    if (kind == "logreg") {
      LogRegConfig c = configs.logreg;
      c.seed = seed;
      model = std::make_unique<LogisticRegression>(c);
    } else if (kind == "svm") {
      SvmConfig c = configs.svm;
      c.seed = seed;
      model = std::make_unique<LinearSvm>(c);
    } else if (kind == "dtree") {
      model = std::make_unique<DecisionTree>(configs.tree);
    } else if (kind == "rforest") {
      ForestConfig c = configs.forest;
      c.seed = seed;
      model = std::make_unique<RandomForest>(c);
    } else if (kind == "gbdt") {
      model = std::make_unique<GradientBoostedTrees>(configs.gbdt);
    } else {
      throw ValidationError("unknown model kind: \"" + kind + "\"");
    }
  }
  model->fit(rows, labels);
  return model;
}

}  // namespace

ModelRegistry make_builtin_registry(std::shared_ptr<const FeatureSpace> space,
                                    const ModelConfigs& configs,
                                    FeatureMode mode) {
  ModelRegistry registry;
  for (const std::string& kind : builtin_model_kinds()) {
    registry.add(kind, [kind, space, configs, mode](
                           const Corpus& train,
                           std::uint64_t seed) -> std::unique_ptr<ArticleScorer> {
      return std::make_unique<TrainedModel>(
          train_model_with_space(kind, train, mode, configs, seed, space));
    });
  }
  return registry;
}

TrainedModel train_model_with_space(const std::string& kind,
                                    const Corpus& corpus_train,
                                    FeatureMode mode,
                                    const ModelConfigs& configs,
                                    std::uint64_t seed,
                                    std::shared_ptr<const FeatureSpace> space) {
  if (is_ensemble_kind(kind)) {
    StackConfig stack;
    stack.base_kinds = ensemble_base_kinds(kind);
    stack.top_k = configs.stack_top_k;
    stack.n_folds = configs.stack_n_folds;
    stack.seed = seed;
    ModelRegistry registry = make_builtin_registry(space, configs, mode);
    auto stacked = std::make_unique<StackedModel>(
        stack_fit(corpus_train, stack, registry, configs.meta_gbdt));
    return TrainedModel::make_stacked(kind, mode, std::move(space),
                                      std::move(stacked));
  }
  if (kind == "gru") {
    GruConfig c = configs.gru;
    c.seed = seed;
    return TrainedModel::make_gru(mode, space,
                                  train_gru(corpus_train, *space, c, mode));
  }
  auto model = fit_row_model(kind, corpus_train, *space, mode, configs, seed);
  return TrainedModel::make_row_model(kind, mode, std::move(space),
                                      std::move(model));
}

TrainedModel train_model(const std::string& kind, const Corpus& corpus_train,
                         FeatureMode mode, const ModelConfigs& configs,
                         std::uint64_t seed) {
  auto space = std::make_shared<const FeatureSpace>(
      fit_feature_space(corpus_train, configs.features));
  return train_model_with_space(kind, corpus_train, mode, configs, seed,
                                std::move(space));
}

}  // namespace fnd
