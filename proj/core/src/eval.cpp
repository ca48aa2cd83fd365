#include "fnd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fnd/errors.hpp"
#include "fnd/parallel.hpp"
#include "fnd/pipeline.hpp"

namespace fnd {

using ordered_json = nlohmann::ordered_json;

namespace {

ClassMetrics class_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  ClassMetrics m;
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace

EvalReport metrics(const std::vector<int>& predictions,
                   const std::vector<int>& gold) {
  if (predictions.size() != gold.size())
    throw ArgumentError("metrics: predictions/gold length mismatch");
  if (predictions.empty())
    throw ArgumentError("metrics: empty prediction list");
  EvalReport r;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    int p = predictions[i], g = gold[i];
    if (p == 1 && g == 1)
      r.confusion.tp += 1;
    else if (p == 1 && g == 0)
      r.confusion.fp += 1;
    else if (p == 0 && g == 1)
      r.confusion.fn += 1;
    else
      r.confusion.tn += 1;
  }
  r.n = r.confusion.total();
  r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / r.n;
  r.fake = class_metrics(r.confusion.tp, r.confusion.fp, r.confusion.fn);
  // For class real, swap the roles: tn are its true positives.
  r.real = class_metrics(r.confusion.tn, r.confusion.fn, r.confusion.fp);
  r.macro.precision = 0.5 * (r.real.precision + r.fake.precision);
  r.macro.recall = 0.5 * (r.real.recall + r.fake.recall);
  r.macro.f1 = 0.5 * (r.real.f1 + r.fake.f1);
  return r;
}

EvalReport evaluate(const ArticleScorer& model, const Corpus& corpus_test) {
  if (corpus_test.articles.empty())
    throw ArgumentError("evaluate: empty test corpus");
  std::vector<int> preds(corpus_test.size()), gold(corpus_test.size());
  for (std::size_t i = 0; i < corpus_test.size(); ++i) {
    if (!corpus_test.articles[i].label)
      throw ValidationError("evaluate: unlabeled article \"" +
                            corpus_test.articles[i].id + "\" in test corpus");
    gold[i] = static_cast<int>(*corpus_test.articles[i].label);
  }
  parallel_for(corpus_test.size(), [&](std::size_t i) {
    preds[i] = model.predict(corpus_test.articles[i]);
  });
  EvalReport r = metrics(preds, gold);
  r.corpus_name = corpus_test.name;
  return r;
}

ExternalScores load_external_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open external scores file: " + path);
  ExternalScores scores;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": malformed JSON: " + e.what());
    }
    std::string id = j.at("article_id").get<std::string>();
    double p = j.at("p_fake").get<double>();
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": p_fake outside [0, 1]");
    scores.p_fake_by_id[id] = p;
  }
  return scores;
}

EvalReport evaluate_external(const ExternalScores& scores,
                             const Corpus& corpus_test, double threshold) {
  std::vector<std::string> missing;
  std::vector<int> preds, gold;
  for (const NewsArticle& a : corpus_test.articles) {
    if (!a.label)
      throw ValidationError("evaluate_external: unlabeled article \"" + a.id +
                            "\"");
    auto it = scores.p_fake_by_id.find(a.id);
    if (it == scores.p_fake_by_id.end()) {
      missing.push_back(a.id);
      continue;
    }
    preds.push_back(it->second > threshold ? 1 : 0);
    gold.push_back(static_cast<int>(*a.label));
  }
  if (!missing.empty()) {
    std::string msg = "external scores missing for " +
                      std::to_string(missing.size()) + " article(s):";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
      msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw ValidationError(msg);
  }
  EvalReport r = metrics(preds, gold);
  r.model_kind = "external";
  r.corpus_name = corpus_test.name;
  return r;
}

std::string split_fingerprint(const Corpus& train, const Corpus& test) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    h ^= 0x1F;
    h *= 0x100000001B3ULL;
  };
  for (const auto& a : train.articles) mix(a.id);
  mix("||");
  for (const auto& a : test.articles) mix(a.id);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

CompareResult compare(const Corpus& corpus,
                      const std::vector<std::string>& kinds,
                      std::uint64_t seed, const ModelRegistry* extra_kinds) {
  auto [train, test] = split(corpus, 0.8, seed);
  CompareResult result;
  result.seed = seed;
  result.split_fingerprint = split_fingerprint(train, test);

  for (const std::string& kind : kinds) {
    EvalReport r;
    r.model_kind = kind;
    r.corpus_name = corpus.name;
    r.seed = seed;
    r.split_fingerprint = result.split_fingerprint;
    try {
      EvalReport e;
      if (extra_kinds != nullptr && extra_kinds->has(kind)) {
        auto model = extra_kinds->make(kind, train, seed);
        e = evaluate(*model, test);
      } else {
        TrainedModel model = train_model(kind, train, FeatureMode::kHybrid,
                                         ModelConfigs{}, seed);
        e = evaluate(model, test);
      }
      e.model_kind = kind;
      e.corpus_name = corpus.name;
      e.seed = seed;
      e.split_fingerprint = result.split_fingerprint;
      r = e;
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    result.reports.push_back(std::move(r));
  }
  std::stable_sort(result.reports.begin(), result.reports.end(),
                   [](const EvalReport& a, const EvalReport& b) {
                     if (a.failed != b.failed) return !a.failed;
                     return a.macro.f1 > b.macro.f1;
                   });
  return result;
}

namespace {

ordered_json class_to_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

ordered_json report_json(const EvalReport& r) {
  ordered_json j;
  j["model"] = r.model_kind;
  j["corpus"] = r.corpus_name;
  j["seed"] = r.seed;
  j["split_fingerprint"] = r.split_fingerprint;
  if (r.failed) {
    j["failed"] = true;
    j["error"] = r.error;
    return j;
  }
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro"] = class_to_json(r.macro);
  j["real"] = class_to_json(r.real);
  j["fake"] = class_to_json(r.fake);
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"fn", r.confusion.fn},
                    {"tn", r.confusion.tn}};
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  return report_json(report).dump(2);
}

std::string compare_to_json(const CompareResult& result) {
  ordered_json j;
  j["seed"] = result.seed;
  j["split_fingerprint"] = result.split_fingerprint;
  j["models"] = ordered_json::array();
  for (const EvalReport& r : result.reports) j["models"].push_back(report_json(r));
  return j.dump(2);
}

std::string compare_to_text(const CompareResult& result) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "Model" << std::right << std::setw(11)
     << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1 score"
     << "\n";
  os << std::string(43, '-') << "\n";
  os << std::fixed << std::setprecision(2);
  for (const EvalReport& r : result.reports) {
    os << std::left << std::setw(14) << r.model_kind;
    if (r.failed) {
      os << "  failed: " << r.error << "\n";
      continue;
    }
    os << std::right << std::setw(11) << r.macro.precision << std::setw(8)
       << r.macro.recall << std::setw(10) << r.macro.f1 << "\n";
  }
  return os.str();
}

}  // namespace fnd
