// fnd: fake-news detection pipeline CLI.
//
// Subcommands: gen, train, eval, compare, explain. Every run is fully
// determined by its flags and seeds; results print as JSON on stdout
// unless --quiet.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fnd/corpus.hpp"
#include "fnd/errors.hpp"
#include "fnd/eval.hpp"
#include "fnd/explain.hpp"
#include "fnd/model_io.hpp"
#include "fnd/parallel.hpp"
#include "fnd/pipeline.hpp"

namespace {

using fnd::ValidationError;
using ordered_json = nlohmann::ordered_json;

void require_input_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw ValidationError("input file does not exist: " + path);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << content;
  if (!out) throw ValidationError("failed writing " + path);
}

void emit(const ordered_json& j, bool quiet) {
  if (!quiet) std::cout << j.dump(2) << "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct GenArgs {
  std::string out;
  int n = 1000;
  double fake_fraction = 0.5;
  double signal = 1.0;
  double lexical_signal = -1.0;
  double engagement_signal = -1.0;
};

struct TrainArgs {
  std::string corpus;
  std::string model_kind;
  std::string features = "hybrid";
  std::string out;
};

struct EvalArgs {
  std::string model;
  std::string corpus;
  std::string external_scores;
  double threshold = 0.5;
};

struct CompareArgs {
  std::string corpus;
  std::string models;
  std::string out;
  std::string text_out;
};

struct ExplainArgs {
  std::string model;
  std::string corpus;
  std::string article_id;
  std::string format = "json";
  std::string out;
};

int run(int argc, char** argv) {
  CLI::App app{"fnd: fake-news detection with hybrid content + social "
               "features, classical and GRU classifiers, stacking, and LIME "
               "explanations"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool quiet = false;
  unsigned threads = 0;
  app.add_option("--seed", seed, "global RNG seed (default 0)");
  app.add_flag("--quiet", quiet, "suppress JSON output on stdout");
  app.add_option("--threads", threads,
                 "cap worker threads (0 = hardware; never changes results)");

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic corpus");
  cmd_gen->add_option("--out", gen.out, "output JSONL path")->required();
  cmd_gen->add_option("--n", gen.n, "number of articles")->required();
  cmd_gen->add_option("--fake-fraction", gen.fake_fraction,
                      "fraction of fake articles (default 0.5)");
  cmd_gen->add_option("--signal", gen.signal,
                      "signal strength in [0,1] for both channels");
  cmd_gen->add_option("--lexical-signal", gen.lexical_signal,
                      "override the lexical (marker token) channel");
  cmd_gen->add_option("--engagement-signal", gen.engagement_signal,
                      "override the engagement statistics channel");

  TrainArgs train;
  CLI::App* cmd_train = app.add_subcommand("train", "train a model");
  cmd_train->add_option("--corpus", train.corpus, "training corpus JSONL")
      ->required();
  cmd_train
      ->add_option("--model", train.model_kind,
                   "nb|logreg|svm|dtree|rforest|gbdt|gru|ensemble-ml|"
                   "ensemble-nn")
      ->required();
  cmd_train->add_option("--features", train.features, "content|social|hybrid");
  cmd_train->add_option("--out", train.out, "model file path")->required();

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate on a labeled corpus");
  cmd_eval->add_option("--model", eval_args.model, "model file");
  cmd_eval->add_option("--corpus", eval_args.corpus, "labeled corpus JSONL")
      ->required();
  cmd_eval->add_option("--external-scores", eval_args.external_scores,
                       "JSONL of {\"article_id\", \"p_fake\"} from a "
                       "third-party model (evaluated instead of --model)");
  cmd_eval->add_option("--threshold", eval_args.threshold,
                       "external-scores decision threshold (default 0.5)");

  CompareArgs compare_args;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "train and evaluate several kinds on one "
                                    "shared split");
  cmd_compare->add_option("--corpus", compare_args.corpus, "labeled corpus")
      ->required();
  cmd_compare
      ->add_option("--models", compare_args.models, "comma-separated kinds")
      ->required();
  cmd_compare->add_option("--out", compare_args.out, "JSON report path");
  cmd_compare->add_option("--text-out", compare_args.text_out,
                          "aligned text table path");

  ExplainArgs explain_args;
  CLI::App* cmd_explain =
      app.add_subcommand("explain", "LIME explanation for one article");
  cmd_explain->add_option("--model", explain_args.model, "model file")
      ->required();
  cmd_explain->add_option("--corpus", explain_args.corpus, "corpus JSONL")
      ->required();
  cmd_explain
      ->add_option("--article-id", explain_args.article_id, "article to explain")
      ->required();
  cmd_explain->add_option("--format", explain_args.format, "json|html|text");
  cmd_explain->add_option("--out", explain_args.out, "output document path");

  int lime_samples = 1000;
  int lime_top_k = 6;
  double lime_sigma = 25.0;
  double lime_lambda = 1.0;
  cmd_explain->add_option("--samples", lime_samples, "LIME perturbations");
  cmd_explain->add_option("--top-k", lime_top_k, "tokens to report");
  cmd_explain->add_option("--kernel-width", lime_sigma, "proximity sigma");
  cmd_explain->add_option("--ridge-lambda", lime_lambda, "surrogate ridge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  fnd::set_max_threads(threads);

  if (cmd_gen->parsed()) {
    fnd::GenConfig cfg;
    cfg.n_articles = gen.n;
    cfg.fake_fraction = gen.fake_fraction;
    cfg.signal_strength = gen.signal;
    cfg.lexical_signal = gen.lexical_signal;
    cfg.engagement_signal = gen.engagement_signal;
    cfg.seed = seed;
    fnd::Corpus corpus = fnd::generate_synthetic(cfg);
    fnd::write_corpus(corpus, gen.out);
    int fake = 0;
    for (const auto& a : corpus.articles)
      fake += *a.label == fnd::Label::kFake;
    ordered_json j;
    j["command"] = "gen";
    j["out"] = gen.out;
    j["n"] = corpus.size();
    j["fake"] = fake;
    j["real"] = static_cast<int>(corpus.size()) - fake;
    j["seed"] = seed;
    emit(j, quiet);
    return 0;
  }

  if (cmd_train->parsed()) {
    require_input_file(train.corpus);
    fnd::Corpus corpus = fnd::load_corpus(train.corpus);
    fnd::FeatureMode mode = fnd::feature_mode_from_string(train.features);
    fnd::TrainedModel model = fnd::train_model(train.model_kind, corpus, mode,
                                               fnd::ModelConfigs{}, seed);
    fnd::save_model(model, train.out);
    ordered_json j;
    j["command"] = "train";
    j["model"] = train.model_kind;
    j["features"] = train.features;
    j["corpus"] = train.corpus;
    j["train_articles"] = corpus.size();
    j["vocabulary"] = model.space().vocabulary.size();
    j["out"] = train.out;
    j["seed"] = seed;
    emit(j, quiet);
    return 0;
  }

  if (cmd_eval->parsed()) {
    require_input_file(eval_args.corpus);
    fnd::Corpus corpus = fnd::load_corpus(eval_args.corpus);
    fnd::EvalReport report;
    if (!eval_args.external_scores.empty()) {
      require_input_file(eval_args.external_scores);
      fnd::ExternalScores scores =
          fnd::load_external_scores(eval_args.external_scores);
      report = fnd::evaluate_external(scores, corpus, eval_args.threshold);
    } else {
      if (eval_args.model.empty())
        throw ValidationError("eval needs --model or --external-scores");
      require_input_file(eval_args.model);
      fnd::TrainedModel model = fnd::load_model(eval_args.model);
      report = fnd::evaluate(model, corpus);
      report.model_kind = model.kind();
    }
    report.seed = seed;
    if (!quiet) std::cout << fnd::report_to_json(report) << "\n";
    return 0;
  }

  if (cmd_compare->parsed()) {
    require_input_file(compare_args.corpus);
    fnd::Corpus corpus = fnd::load_corpus(compare_args.corpus);
    std::vector<std::string> kinds = split_list(compare_args.models);
    if (kinds.empty()) throw ValidationError("--models list is empty");
    fnd::CompareResult result = fnd::compare(corpus, kinds, seed);
    std::string json = fnd::compare_to_json(result);
    if (!compare_args.out.empty()) write_file(compare_args.out, json + "\n");
    if (!compare_args.text_out.empty())
      write_file(compare_args.text_out, fnd::compare_to_text(result));
    if (!quiet) std::cout << json << "\n";
    return 0;
  }

  if (cmd_explain->parsed()) {
    require_input_file(explain_args.model);
    require_input_file(explain_args.corpus);
    fnd::Corpus corpus = fnd::load_corpus(explain_args.corpus);
    const fnd::NewsArticle* article = nullptr;
    for (const auto& a : corpus.articles) {
      if (a.id == explain_args.article_id) {
        article = &a;
        break;
      }
    }
    if (article == nullptr)
      throw ValidationError("article not found: \"" + explain_args.article_id +
                            "\"");
    fnd::RenderFormat format =
        fnd::render_format_from_string(explain_args.format);
    fnd::TrainedModel model = fnd::load_model(explain_args.model);
    fnd::LimeConfig cfg;
    cfg.n_samples = lime_samples;
    cfg.top_k = lime_top_k;
    cfg.kernel_width = lime_sigma;
    cfg.ridge_lambda = lime_lambda;
    cfg.seed = seed;
    fnd::Explanation e = fnd::explain(model, *article, cfg);
    std::string doc = fnd::render(e, format);
    if (!explain_args.out.empty()) write_file(explain_args.out, doc);
    if (!quiet) std::cout << fnd::render(e, fnd::RenderFormat::kJson);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fnd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fnd::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
