#include "fnd/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fnd/errors.hpp"

namespace fnd {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json space_to_json(const FeatureSpace& s) {
  ordered_json j;
  j["config"] = {{"word_ngram_min", s.vocabulary.config.word_ngram_min},
                 {"word_ngram_max", s.vocabulary.config.word_ngram_max},
                 {"char_ngram_min", s.vocabulary.config.char_ngram_min},
                 {"char_ngram_max", s.vocabulary.config.char_ngram_max},
                 {"min_df", s.vocabulary.config.min_df}};
  j["n_documents"] = s.vocabulary.n_documents;
  j["terms"] = s.vocabulary.terms;
  j["df"] = s.vocabulary.df;
  j["social_names"] = s.social_names;
  j["social_mean"] = s.social_mean;
  j["social_stdev"] = s.social_stdev;
  return j;
}

FeatureSpace space_from_json(const ordered_json& j) {
  FeatureSpace s;
  const auto& c = j.at("config");
  s.vocabulary.config.word_ngram_min = c.at("word_ngram_min").get<int>();
  s.vocabulary.config.word_ngram_max = c.at("word_ngram_max").get<int>();
  s.vocabulary.config.char_ngram_min = c.at("char_ngram_min").get<int>();
  s.vocabulary.config.char_ngram_max = c.at("char_ngram_max").get<int>();
  s.vocabulary.config.min_df = c.at("min_df").get<int>();
  s.vocabulary.n_documents = j.at("n_documents").get<std::uint32_t>();
  s.vocabulary.terms = j.at("terms").get<std::vector<std::string>>();
  s.vocabulary.df = j.at("df").get<std::vector<std::uint32_t>>();
  s.vocabulary.rebuild_index();
  s.social_names = j.at("social_names").get<std::vector<std::string>>();
  s.social_mean = j.at("social_mean").get<std::vector<double>>();
  s.social_stdev = j.at("social_stdev").get<std::vector<double>>();
  s.fitted = true;
  if (s.vocabulary.df.size() != s.vocabulary.terms.size())
    throw ValidationError("model file: terms/df length mismatch");
  return s;
}

ordered_json tree_to_json(const TreeNode& n) {
  if (n.is_leaf()) return {{"v", n.value}};
  ordered_json j;
  j["f"] = n.feature;
  j["t"] = n.threshold;
  j["l"] = tree_to_json(*n.left);
  j["r"] = tree_to_json(*n.right);
  return j;
}

std::unique_ptr<TreeNode> tree_from_json(const ordered_json& j) {
  auto n = std::make_unique<TreeNode>();
  if (j.contains("f")) {
    n->feature = j.at("f").get<std::int32_t>();
    n->threshold = j.at("t").get<double>();
    n->left = tree_from_json(j.at("l"));
    n->right = tree_from_json(j.at("r"));
  } else {
    n->value = j.at("v").get<double>();
  }
  return n;
}

ordered_json trees_to_json(const std::vector<std::unique_ptr<TreeNode>>& ts) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : ts) arr.push_back(tree_to_json(*t));
  return arr;
}

std::vector<std::unique_ptr<TreeNode>> trees_from_json(const ordered_json& arr) {
  std::vector<std::unique_ptr<TreeNode>> ts;
  for (const auto& j : arr) ts.push_back(tree_from_json(j));
  return ts;
}

ordered_json gru_to_json(const GruParams& p) {
  ordered_json j;
  j["config"] = {{"d_e", p.config.d_e},
                 {"d_h", p.config.d_h},
                 {"max_seq_len", p.config.max_seq_len},
                 {"epochs", p.config.epochs},
                 {"batch_size", p.config.batch_size},
                 {"learning_rate", p.config.learning_rate},
                 {"grad_clip", p.config.grad_clip},
                 {"validation_fraction", p.config.validation_fraction},
                 {"seed", p.config.seed}};
  j["emb_terms"] = p.emb_terms;
  j["n_social"] = p.n_social;
  j["tensors"] = {{"e", p.e},   {"wz", p.wz}, {"wr", p.wr}, {"wh", p.wh},
                  {"uz", p.uz}, {"ur", p.ur}, {"uh", p.uh}, {"bz", p.bz},
                  {"br", p.br}, {"bh", p.bh}, {"v", p.v},   {"c", p.c}};
  return j;
}

GruParams gru_from_json(const ordered_json& j) {
  GruParams p;
  const auto& c = j.at("config");
  p.config.d_e = c.at("d_e").get<int>();
  p.config.d_h = c.at("d_h").get<int>();
  p.config.max_seq_len = c.at("max_seq_len").get<int>();
  p.config.epochs = c.at("epochs").get<int>();
  p.config.batch_size = c.at("batch_size").get<int>();
  p.config.learning_rate = c.at("learning_rate").get<double>();
  p.config.grad_clip = c.at("grad_clip").get<double>();
  p.config.validation_fraction = c.at("validation_fraction").get<double>();
  p.config.seed = c.at("seed").get<std::uint64_t>();
  p.emb_terms = j.at("emb_terms").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < p.emb_terms.size(); ++i)
    p.emb_index[p.emb_terms[i]] = static_cast<std::int32_t>(i) + 2;
  p.n_social = j.at("n_social").get<int>();
  const auto& t = j.at("tensors");
  p.e = t.at("e").get<std::vector<double>>();
  p.wz = t.at("wz").get<std::vector<double>>();
  p.wr = t.at("wr").get<std::vector<double>>();
  p.wh = t.at("wh").get<std::vector<double>>();
  p.uz = t.at("uz").get<std::vector<double>>();
  p.ur = t.at("ur").get<std::vector<double>>();
  p.uh = t.at("uh").get<std::vector<double>>();
  p.bz = t.at("bz").get<std::vector<double>>();
  p.br = t.at("br").get<std::vector<double>>();
  p.bh = t.at("bh").get<std::vector<double>>();
  p.v = t.at("v").get<std::vector<double>>();
  p.c = t.at("c").get<double>();
  return p;
}

ordered_json model_json(const TrainedModel& model);

ordered_json parameters_json(const TrainedModel& model) {
  const std::string& kind = model.kind();
  ordered_json j;
  if (kind == "nb") {
    const auto* nb =
        dynamic_cast<const MultinomialNaiveBayes*>(model.row_model());
    j["alpha"] = nb->alpha();
    j["log_prior"] = nb->log_prior();
    j["log_likelihood"] = nb->log_likelihood();
  } else if (kind == "logreg") {
    const auto* lr = dynamic_cast<const LogisticRegression*>(model.row_model());
    j["config"] = {{"learning_rate", lr->config().learning_rate},
                   {"l2", lr->config().l2},
                   {"epochs", lr->config().epochs},
                   {"batch_size", lr->config().batch_size},
                   {"seed", lr->config().seed}};
    j["weights"] = lr->weights();
    j["bias"] = lr->bias();
  } else if (kind == "svm") {
    const auto* svm = dynamic_cast<const LinearSvm*>(model.row_model());
    j["config"] = {{"learning_rate", svm->config().learning_rate},
                   {"l2", svm->config().l2},
                   {"epochs", svm->config().epochs},
                   {"batch_size", svm->config().batch_size},
                   {"calibration_fraction", svm->config().calibration_fraction},
                   {"seed", svm->config().seed}};
    j["weights"] = svm->weights();
    j["bias"] = svm->bias();
    j["calibrated"] = svm->calibrated();
    j["platt_a"] = svm->platt()[0];
    j["platt_b"] = svm->platt()[1];
  } else if (kind == "dtree") {
    const auto* dt = dynamic_cast<const DecisionTree*>(model.row_model());
    j["config"] = {{"max_depth", dt->config().max_depth},
                   {"min_leaf", dt->config().min_leaf}};
    j["tree"] = tree_to_json(dt->root());
  } else if (kind == "rforest") {
    const auto* rf = dynamic_cast<const RandomForest*>(model.row_model());
    j["config"] = {{"n_trees", rf->config().n_trees},
                   {"max_depth", rf->config().max_depth},
                   {"min_leaf", rf->config().min_leaf},
                   {"bootstrap", rf->config().bootstrap},
                   {"mtry", rf->config().mtry},
                   {"seed", rf->config().seed}};
    j["trees"] = trees_to_json(rf->trees());
  } else if (kind == "gbdt") {
    const auto* gb = dynamic_cast<const GradientBoostedTrees*>(model.row_model());
    j["config"] = {{"n_rounds", gb->config().n_rounds},
                   {"learning_rate", gb->config().learning_rate},
                   {"max_depth", gb->config().max_depth},
                   {"min_leaf", gb->config().min_leaf}};
    j["initial_log_odds"] = gb->initial_log_odds();
    j["trees"] = trees_to_json(gb->trees());
  } else if (kind == "gru") {
    j = gru_to_json(*model.gru());
  } else if (model.stacked() != nullptr) {
    const StackedModel& s = *model.stacked();
    j["stack_config"] = {{"base_kinds", s.config.base_kinds},
                         {"top_k", s.config.top_k},
                         {"n_folds", s.config.n_folds},
                         {"seed", s.config.seed}};
    j["selected"] = ordered_json::array();
    for (const RankedKind& r : s.selected)
      j["selected"].push_back({{"kind", r.kind}, {"cv_macro_f1", r.cv_macro_f1}});
    j["meta"] = {{"config", {{"n_rounds", s.meta.config().n_rounds},
                             {"learning_rate", s.meta.config().learning_rate},
                             {"max_depth", s.meta.config().max_depth},
                             {"min_leaf", s.meta.config().min_leaf}}},
                 {"initial_log_odds", s.meta.initial_log_odds()},
                 {"trees", trees_to_json(s.meta.trees())}};
    j["bases"] = ordered_json::array();
    for (const auto& base : s.bases) {
      const auto* tm = dynamic_cast<const TrainedModel*>(base.get());
      if (tm == nullptr)
        throw ValidationError(
            "cannot persist a stacked model with non-builtin base models");
      j["bases"].push_back(model_json(*tm));
    }
  } else {
    throw ValidationError("cannot serialize model kind \"" + kind + "\"");
  }
  return j;
}

ordered_json model_json(const TrainedModel& model) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["model_kind"] = model.kind();
  j["feature_mode"] = to_string(model.mode());
  j["feature_space"] = space_to_json(model.space());
  j["parameters"] = parameters_json(model);
  return j;
}

TrainedModel model_from(const ordered_json& j);

TrainedModel stacked_from(const ordered_json& j, const std::string& kind,
                          FeatureMode mode,
                          std::shared_ptr<const FeatureSpace> space) {
  const ordered_json& p = j.at("parameters");
  auto s = std::make_unique<StackedModel>();
  const auto& sc = p.at("stack_config");
  s->config.base_kinds = sc.at("base_kinds").get<std::vector<std::string>>();
  s->config.top_k = sc.at("top_k").get<int>();
  s->config.n_folds = sc.at("n_folds").get<int>();
  s->config.seed = sc.at("seed").get<std::uint64_t>();
  for (const auto& r : p.at("selected"))
    s->selected.push_back(
        {r.at("kind").get<std::string>(), r.at("cv_macro_f1").get<double>()});
  const auto& meta = p.at("meta");
  GbdtConfig mc;
  mc.n_rounds = meta.at("config").at("n_rounds").get<int>();
  mc.learning_rate = meta.at("config").at("learning_rate").get<double>();
  mc.max_depth = meta.at("config").at("max_depth").get<int>();
  mc.min_leaf = meta.at("config").at("min_leaf").get<int>();
  s->meta = GradientBoostedTrees(mc);
  s->meta.set_params(meta.at("initial_log_odds").get<double>(),
                     trees_from_json(meta.at("trees")));
  for (const auto& b : p.at("bases"))
    s->bases.push_back(std::make_unique<TrainedModel>(model_from(b)));
  TrainedModel m =
      TrainedModel::make_stacked(kind, mode, std::move(space), std::move(s));
  return m;
}

TrainedModel model_from(const ordered_json& j) {
  int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion)
    throw ValidationError("unsupported model format_version " +
                          std::to_string(version));
  const std::string kind = j.at("model_kind").get<std::string>();
  FeatureMode mode =
      feature_mode_from_string(j.at("feature_mode").get<std::string>());
  auto space = std::make_shared<const FeatureSpace>(
      space_from_json(j.at("feature_space")));

  if (is_ensemble_kind(kind) || j.at("parameters").contains("stack_config"))
    return stacked_from(j, kind, mode, std::move(space));

  const ordered_json& p = j.at("parameters");
  if (kind == "gru")
    return TrainedModel::make_gru(mode, std::move(space), gru_from_json(p));

  std::unique_ptr<ProbClassifier> model;
  if (kind == "nb") {
    auto nb = std::make_unique<MultinomialNaiveBayes>(p.at("alpha").get<double>());
    nb->set_params(p.at("log_prior").get<std::array<double, 2>>(),
                   {p.at("log_likelihood")[0].get<std::vector<double>>(),
                    p.at("log_likelihood")[1].get<std::vector<double>>()});
    model = std::move(nb);
  } else if (kind == "logreg") {
    LogRegConfig c;
    c.learning_rate = p.at("config").at("learning_rate").get<double>();
    c.l2 = p.at("config").at("l2").get<double>();
    c.epochs = p.at("config").at("epochs").get<int>();
    c.batch_size = p.at("config").at("batch_size").get<int>();
    c.seed = p.at("config").at("seed").get<std::uint64_t>();
    auto lr = std::make_unique<LogisticRegression>(c);
    lr->set_params(p.at("weights").get<std::vector<double>>(),
                   p.at("bias").get<double>());
    model = std::move(lr);
  } else if (kind == "svm") {
    SvmConfig c;
    c.learning_rate = p.at("config").at("learning_rate").get<double>();
    c.l2 = p.at("config").at("l2").get<double>();
    c.epochs = p.at("config").at("epochs").get<int>();
    c.batch_size = p.at("config").at("batch_size").get<int>();
    c.calibration_fraction =
        p.at("config").at("calibration_fraction").get<double>();
    c.seed = p.at("config").at("seed").get<std::uint64_t>();
    auto svm = std::make_unique<LinearSvm>(c);
    svm->set_params(p.at("weights").get<std::vector<double>>(),
                    p.at("bias").get<double>(), p.at("calibrated").get<bool>(),
                    p.at("platt_a").get<double>(),
                    p.at("platt_b").get<double>());
    model = std::move(svm);
  } else if (kind == "dtree") {
    TreeConfig c;
    c.max_depth = p.at("config").at("max_depth").get<int>();
    c.min_leaf = p.at("config").at("min_leaf").get<int>();
    auto dt = std::make_unique<DecisionTree>(c);
    dt->set_root(tree_from_json(p.at("tree")));
    model = std::move(dt);
  } else if (kind == "rforest") {
    ForestConfig c;
    c.n_trees = p.at("config").at("n_trees").get<int>();
    c.max_depth = p.at("config").at("max_depth").get<int>();
    c.min_leaf = p.at("config").at("min_leaf").get<int>();
    c.bootstrap = p.at("config").at("bootstrap").get<bool>();
    c.mtry = p.at("config").at("mtry").get<int>();
    c.seed = p.at("config").at("seed").get<std::uint64_t>();
    auto rf = std::make_unique<RandomForest>(c);
    rf->set_trees(trees_from_json(p.at("trees")));
    model = std::move(rf);
  } else if (kind == "gbdt") {
    GbdtConfig c;
    c.n_rounds = p.at("config").at("n_rounds").get<int>();
    c.learning_rate = p.at("config").at("learning_rate").get<double>();
    c.max_depth = p.at("config").at("max_depth").get<int>();
    c.min_leaf = p.at("config").at("min_leaf").get<int>();
    auto gb = std::make_unique<GradientBoostedTrees>(c);
    gb->set_params(p.at("initial_log_odds").get<double>(),
                   trees_from_json(p.at("trees")));
    model = std::move(gb);
  } else {
    throw ValidationError("unknown model kind in model file: \"" + kind + "\"");
  }
  return TrainedModel::make_row_model(kind, mode, std::move(space),
                                      std::move(model));
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  return model_json(model).dump();
}

TrainedModel model_from_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model JSON: ") + e.what());
  }
  return model_from(j);
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open model file for writing: " + path);
  out << model_to_json(model) << "\n";
  if (!out) throw ValidationError("failed writing model file: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace fnd
